import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocgeom.errors import DomainError
from ocgeom.frames import E_MATS
from ocgeom.heisenberg import (
    FDSpec,
    HPoint,
    X_vector,
    apply_T,
    apply_X,
    contact_form,
    gauge_norm,
    h_inv,
    h_mul,
    horizontal_grad_sq,
    sublaplacian,
    volume_density,
)

coord = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
hpoint = st.tuples(
    st.lists(coord, min_size=8, max_size=8), st.lists(coord, min_size=7, max_size=7)
).map(lambda xt: HPoint(np.array(xt[0]), np.array(xt[1])))


from conftest import rand_hpoint as rand_point


def test_group_law_examples():
    x = np.array([0.3, -0.1, 0.7, 0, 0, 0.2, 0, 0])
    s = np.arange(1.0, 8.0)
    p = HPoint(x, np.zeros(7))
    q = HPoint(2 * x, s)
    out = h_mul(p, q)
    assert np.allclose(out.x, 3 * x) and np.allclose(out.t, s)

    e1 = HPoint(np.eye(8)[1], np.zeros(7))
    e2 = HPoint(np.eye(8)[2], np.zeros(7))
    out = h_mul(e1, e2)
    expect_t = np.zeros(7)
    expect_t[2] = -2.0  # 2 Im(e1 conj(e2)) = -2 e3
    assert np.allclose(out.x, np.eye(8)[1] + np.eye(8)[2])
    assert np.allclose(out.t, expect_t)


@settings(max_examples=60, deadline=None)
@given(p=hpoint)
def test_identity_and_inverse(p):
    iden = HPoint(np.zeros(8), np.zeros(7))
    assert h_mul(p, iden).allclose(p)
    assert h_mul(p, h_inv(p)).allclose(iden, tol=1e-12)
    assert h_inv(h_inv(p)).allclose(p)


@settings(max_examples=60, deadline=None)
@given(p=hpoint, q=hpoint, r=hpoint)
def test_associativity(p, q, r):
    a = h_mul(h_mul(p, q), r)
    b = h_mul(p, h_mul(q, r))
    assert np.max(np.abs(a.coords() - b.coords())) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(p=hpoint, q=hpoint)
def test_inverse_antihomomorphism(p, q):
    lhs = h_mul(h_inv(q), h_inv(p))
    rhs = h_inv(h_mul(p, q))
    assert np.max(np.abs(lhs.coords() - rhs.coords())) <= 1e-12


def test_gauge_norm_special_cases():
    t = np.array([1.0, 2, 0, 0, -1, 0, 3])
    assert gauge_norm(HPoint(np.zeros(8), t)) == pytest.approx(
        float(np.linalg.norm(t)) ** 0.5, rel=1e-14
    )
    x = np.array([0.5, 0, -1.5, 0, 0, 2, 0, 0])
    assert gauge_norm(HPoint(x, np.zeros(7))) == pytest.approx(
        float(np.linalg.norm(x)), rel=1e-14
    )


@settings(max_examples=60, deadline=None)
@given(p=hpoint)
def test_gauge_norm_inverse_invariant(p):
    assert gauge_norm(h_inv(p)) == gauge_norm(p)


def test_gauge_norm_dilation_homogeneity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rand_point(rng)
        d = rng.uniform(0.2, 3.0)
        q = HPoint(d * p.x, d * d * p.t)
        assert gauge_norm(q) == pytest.approx(d * gauge_norm(p), rel=1e-13)


def test_contact_form_annihilates_horizontal_fields():
    rng = np.random.default_rng(1)
    for _ in range(10):
        p = rand_point(rng)
        for beta in range(1, 8):
            for a in range(8):
                assert abs(contact_form(beta, p, X_vector(a, p))) <= 1e-13


def test_contact_form_on_vertical_and_at_origin():
    p = HPoint(np.random.default_rng(2).uniform(-1, 1, 8), np.zeros(7))
    for alpha in range(1, 8):
        v = np.zeros(15)
        v[7 + alpha] = 1.0
        for beta in range(1, 8):
            assert contact_form(beta, p, v) == (1.0 if alpha == beta else 0.0)
    origin = HPoint(np.zeros(8), np.zeros(7))
    v = np.arange(15.0)
    for beta in range(1, 8):
        assert contact_form(beta, origin, v) == v[7 + beta]


def test_apply_X_on_coordinates():
    rng = np.random.default_rng(3)
    fd = FDSpec(step=1e-3)
    p = rand_point(rng)
    for a in range(8):
        for b in range(8):
            fb = lambda q, b=b: float(q.x[b])
            assert apply_X(a, fb, p, fd) == pytest.approx(1.0 if a == b else 0.0, abs=1e-9)
    for beta in range(1, 8):
        ft = lambda q, beta=beta: float(q.t[beta - 1])
        for a in range(8):
            drift = 2.0 * float(E_MATS[beta][:, a] @ p.x)
            assert apply_X(a, ft, p, fd) == pytest.approx(drift, abs=1e-9)


def test_left_invariance_of_X():
    rng = np.random.default_rng(4)
    fd = FDSpec(step=1e-4)
    f = lambda p: math.sin(p.x[1]) * math.exp(0.2 * p.t[3]) + p.x[0] * p.t[0]
    for _ in range(5):
        p, q = rand_point(rng), rand_point(rng)
        for a in (0, 3, 7):
            lhs = apply_X(a, lambda r: f(h_mul(q, r)), p, fd)
            rhs = apply_X(a, f, h_mul(q, p), fd)
            assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-6)


def test_commutator_structure_relation():
    # [X_a, X_b] f = 4 E^beta_{ab} df/dt_beta, constant in p
    rng = np.random.default_rng(5)
    f = lambda p: math.sin(p.t[2]) + p.x[1] * p.t[0] + 0.3 * p.t[4] * p.x[5]
    fd = FDSpec(step=1e-3)
    for _ in range(3):
        p = rand_point(rng)
        for a, b in [(0, 1), (2, 5), (3, 6)]:
            xbf = lambda q, b=b: apply_X(b, f, q, fd)
            xaf = lambda q, a=a: apply_X(a, f, q, fd)
            comm = apply_X(a, xbf, p, fd) - apply_X(b, xaf, p, fd)
            exact = sum(
                4.0 * E_MATS[beta][a, b] * apply_T(beta, f, p, FDSpec(step=1e-4))
                for beta in range(1, 8)
            )
            assert comm == pytest.approx(exact, rel=1e-4, abs=1e-4)


def test_fd_convergence_second_order():
    f = lambda p: math.sin(p.x[1]) * math.exp(0.3 * p.t[2]) + p.x[0] ** 3
    p = HPoint(0.3 * np.ones(8), 0.2 * np.ones(7))
    ref = apply_X(1, f, p, FDSpec(step=1e-3, richardson=2))
    e1 = abs(apply_X(1, f, p, FDSpec(step=1e-2)) - ref)
    e2 = abs(apply_X(1, f, p, FDSpec(step=5e-3)) - ref)
    assert e1 / e2 == pytest.approx(4.0, rel=0.1)


def test_sublaplacian_gauge_quartic():
    # Delta_0 ||xi||^4 = -96 |x|^2
    rng = np.random.default_rng(6)
    g4 = lambda p: gauge_norm(p) ** 4
    for _ in range(25):
        p = rand_point(rng)
        x2 = float(p.x @ p.x)
        fd = FDSpec(step=1e-2 * (1 + gauge_norm(p)), richardson=1)
        assert sublaplacian(g4, p, fd) == pytest.approx(-96.0 * x2, rel=1e-8)


def test_sublaplacian_constant_and_green_tail():
    fd = FDSpec(step=1e-2, richardson=1)
    p = HPoint(0.4 * np.ones(8), 0.1 * np.ones(7))
    assert sublaplacian(lambda q: 3.25, p, fd) == 0.0
    g = lambda q: gauge_norm(q) ** (-20.0)
    n = gauge_norm(p)
    val = sublaplacian(g, p, FDSpec(step=1e-3 * n, richardson=1))
    assert abs(val) <= 1e-6 * n ** (-22.0)


def test_horizontal_grad_sq():
    rng = np.random.default_rng(7)
    g4 = lambda p: gauge_norm(p) ** 4
    for _ in range(25):
        p = rand_point(rng)
        fd = FDSpec(step=1e-3 * (1 + gauge_norm(p)), richardson=1)
        expect = 16.0 * gauge_norm(p) ** 4 * float(p.x @ p.x)
        assert horizontal_grad_sq(g4, p, fd) == pytest.approx(expect, rel=1e-9)
    assert horizontal_grad_sq(lambda q: 5.0, p, FDSpec(step=1e-3)) == 0.0
    f3 = lambda q: float(q.x[3])
    assert horizontal_grad_sq(f3, p, FDSpec(step=1e-3)) == pytest.approx(1.0, abs=1e-10)


def test_volume_density():
    p = HPoint(np.zeros(8), np.zeros(7))
    assert volume_density(lambda q: 1.0, p) == 1.0
    assert volume_density(lambda q: 2.0, p) == pytest.approx(2.0 ** (11.0 / 5.0), rel=1e-14)
    with pytest.raises(DomainError):
        volume_density(lambda q: -1.0, p)
