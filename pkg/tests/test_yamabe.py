import math

import numpy as np
import pytest

from conftest import rand_hpoint
from ocgeom.errors import DomainError
from ocgeom.frames import E_MATS, r7_coefficients
from ocgeom.heisenberg import FDSpec, HPoint, gauge_norm, sublaplacian
from ocgeom.yamabe import (
    CONST,
    YamabeConstants,
    conformal_sublaplacian,
    connection_perturbation,
    scalar_curv_connection,
    scalar_curv_exp,
    scalar_curv_yamabe,
    yamabe_op_flat,
)


def fd_for(p, factor=1e-2):
    return FDSpec(step=factor * (1.0 + gauge_norm(p)), richardson=1)


def make_bump(rng, amp=None, sharp=None):
    cx = rng.uniform(-0.3, 0.3, 8)
    ct = rng.uniform(-0.3, 0.3, 7)
    a = amp if amp is not None else rng.uniform(0.1, 0.45)
    c = sharp if sharp is not None else rng.uniform(0.4, 1.0)

    def h(p):
        dx = p.x - cx
        dt = p.t - ct
        return a * math.exp(-c * (float(dx @ dx) ** 2 + float(dt @ dt)))

    return h


def test_constants():
    assert CONST.Q == 22
    assert CONST.b == pytest.approx(21.0 / 5.0)
    assert CONST.check()
    assert YamabeConstants().curvature_scale == 420.0
    assert CONST.conf_exp == pytest.approx(0.2)
    assert CONST.crit_exp == pytest.approx(1.2)
    assert CONST.vol_exp == pytest.approx(2.2)


def test_yamabe_op_flat():
    rng = np.random.default_rng(0)
    p = rand_hpoint(rng)
    assert yamabe_op_flat(lambda q: 7.5, p, fd_for(p)) == 0.0
    # |x|^2 has constant sublaplacian -16, so L_0 |x|^2 = -336/5
    val = yamabe_op_flat(lambda q: float(q.x @ q.x), p, fd_for(p))
    assert val == pytest.approx(-336.0 / 5.0, rel=1e-9)
    # harmonicity of the kernel power
    g = lambda q: gauge_norm(q) ** (-20.0)
    n = gauge_norm(p)
    assert abs(yamabe_op_flat(g, p, FDSpec(step=1e-3 * n, richardson=1))) <= 5e-6 * n ** (-22)


def test_scalar_curv_exp_constant_and_linearization():
    rng = np.random.default_rng(1)
    p = rand_hpoint(rng)
    assert scalar_curv_exp(lambda q: 0.31, p, fd_for(p)) == 0.0
    u = make_bump(rng)
    eps = 1e-5
    h = lambda q: eps * u(q)
    lin = 42.0 * eps * sublaplacian(u, p, fd_for(p))
    assert scalar_curv_exp(h, p, fd_for(p)) == pytest.approx(lin, rel=1e-3, abs=1e-8)


def test_lemma_43_closed_form_three_routes():
    rng = np.random.default_rng(2)
    h = lambda p: -math.log(gauge_norm(p))
    phi = lambda p: gauge_norm(p) ** (-10.0)
    f = lambda p: 1.0 / gauge_norm(p)
    for _ in range(15):
        p = rand_hpoint(rng, 0.5, 2.0)
        target = 420.0 * float(p.x @ p.x) / gauge_norm(p) ** 2
        fd = FDSpec(step=1e-2 * gauge_norm(p), richardson=1)
        assert scalar_curv_exp(h, p, fd) == pytest.approx(target, rel=1e-6)
        assert scalar_curv_yamabe(phi, p, fd) == pytest.approx(target, rel=1e-6)
        assert scalar_curv_connection(f, p, fd) == pytest.approx(target, rel=1e-3)


def test_scalar_curv_yamabe_constant_and_positivity_guard():
    rng = np.random.default_rng(3)
    p = rand_hpoint(rng)
    assert scalar_curv_yamabe(lambda q: 2.0, p, fd_for(p)) == 0.0
    with pytest.raises(DomainError):
        scalar_curv_yamabe(lambda q: -1.0, p, fd_for(p))
    with pytest.raises(DomainError):
        scalar_curv_connection(lambda q: -1.0, p, fd_for(p))


def test_three_route_agreement_on_bumps():
    rng = np.random.default_rng(4)
    for _ in range(3):
        h = make_bump(rng)
        phi = lambda q: math.exp(10.0 * h(q))
        f = lambda q: math.exp(h(q))
        s1s, s2s, s3s = [], [], []
        for _ in range(6):
            p = rand_hpoint(rng, 0.3, 1.5)
            fd = fd_for(p)
            s1s.append(scalar_curv_exp(h, p, fd))
            s2s.append(scalar_curv_yamabe(phi, p, fd))
            s3s.append(scalar_curv_connection(f, p, fd))
        s1s, s2s, s3s = map(np.array, (s1s, s2s, s3s))
        scale = float(np.max(np.abs(s1s)))
        assert np.max(np.abs(s1s - s2s)) <= 1e-6 * scale
        assert np.max(np.abs(s1s - s3s)) <= 1e-3 * scale


def test_connection_perturbation_structure():
    rng = np.random.default_rng(5)
    h = make_bump(rng)
    f = lambda q: math.exp(h(q))
    p = rand_hpoint(rng, 0.4, 1.2)
    per = connection_perturbation(f, p, fd_for(p))
    # constant factor: all fields vanish
    per0 = connection_perturbation(lambda q: 3.0, p, fd_for(p))
    assert np.max(np.abs(per0.k)) <= 1e-12
    assert np.max(np.abs(per0.gradk)) <= 1e-10
    for m in per0.ax:
        assert np.max(np.abs(m)) <= 1e-11
    # metric compatibility: <A_X Y, Z> + <Y, A_X Z> = 2 K(X) <Y, Z>
    for b in range(8):
        m = per.ax[b]
        sym = m + m.T
        assert np.max(np.abs(sym - 2.0 * per.k[b] * np.eye(8))) <= 1e-12
    # A_{R_beta} minus its trace part lies in so(7)
    for beta in range(1, 8):
        dev = per.ar[beta - 1] - per.kv[beta - 1] * np.eye(8)
        assert np.max(np.abs(dev + dev.T)) <= 1e-12
        assert np.max(np.abs(r7_coefficients(dev))) <= 1e-12
        assert abs(float(np.sum(E_MATS[beta] * dev))) <= 1e-12


def test_conformal_sublaplacian():
    rng = np.random.default_rng(6)
    p = rand_hpoint(rng, 0.4, 1.4)
    fd = fd_for(p)
    h = make_bump(rng)
    phi = lambda q: math.exp(10.0 * h(q))
    u = make_bump(rng)
    # u constant -> 0; phi = 1 -> Delta_0 u
    assert conformal_sublaplacian(phi, lambda q: 4.2, p, fd) == pytest.approx(0.0, abs=1e-9)
    assert conformal_sublaplacian(lambda q: 1.0, u, p, fd) == pytest.approx(
        sublaplacian(u, p, fd), rel=1e-10, abs=1e-10
    )
    with pytest.raises(DomainError):
        conformal_sublaplacian(lambda q: 0.0, u, p, fd)


def test_yamabe_covariance():
    # phi^{-6/5} L_0(phi u) = b Delta_{g~} u + s_{g~} u
    rng = np.random.default_rng(7)
    h = make_bump(rng)
    phi = lambda q: math.exp(10.0 * h(q))
    u = make_bump(rng)
    for _ in range(5):
        p = rand_hpoint(rng, 0.4, 1.3)
        fd = fd_for(p)
        lhs = phi(p) ** (-1.2) * yamabe_op_flat(lambda q: phi(q) * u(q), p, fd)
        rhs = (
            CONST.b * conformal_sublaplacian(phi, u, p, fd)
            + scalar_curv_yamabe(phi, p, fd) * u(p)
        )
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)
