"""Scalar curvature under conformal change, by three independent routes,
and the conformal SubLaplacian.

Routes for the curvature of g~ = f^2 g0 on the flat model:
  exp        s~ = e^{-2h}(42 Delta_0 h - 420 |grad h|^2), h = ln f;
  yamabe     s~ = b Delta_0(phi) phi^{-(Q+2)/(Q-2)}, phi = f^{(Q-2)/2};
  connection assemble the perturbed Biquard connection A and trace its
             curvature over the horizontal frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .frames import E_MATS, so7_component
from .heisenberg import (
    DEFAULT_FD,
    FDSpec,
    HPoint,
    ScalarField,
    apply_T,
    apply_X,
    horizontal_grad,
    horizontal_grad_sq,
    sublaplacian,
    _shift,
    _step,
)


@dataclass(frozen=True)
class YamabeConstants:
    Q: int = 22
    b: float = 21.0 / 5.0
    conf_exp: float = 4.0 / 20.0          # 4/(Q-2) = 1/5
    crit_exp: float = 24.0 / 20.0         # (Q+2)/(Q-2) = 6/5
    vol_exp: float = 44.0 / 20.0          # 2Q/(Q-2) = 11/5
    curvature_scale: float = 420.0        # (Q-1)(Q-2)

    def check(self) -> bool:
        return abs(self.b - 4.0 * (self.Q - 1) / (self.Q - 2)) == 0.0


CONST = YamabeConstants()
Q = CONST.Q
B_YAMABE = CONST.b


def yamabe_op_flat(phi: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    """L_0 phi = b Delta_0 phi (the flat background has zero scalar curvature)."""
    return B_YAMABE * sublaplacian(phi, p, fd)


def scalar_curv_exp(h: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    """Scalar curvature of e^{2h} g0."""
    lap = sublaplacian(h, p, fd)
    grad2 = horizontal_grad_sq(h, p, fd)
    return float(np.exp(-2.0 * h(p)) * (42.0 * lap - 420.0 * grad2))


def scalar_curv_yamabe(phi: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    """Scalar curvature of phi^{4/(Q-2)} g0 via the Yamabe equation."""
    v = phi(p)
    if v <= 0.0:
        raise DomainError("conformal factor must be positive")
    return B_YAMABE * sublaplacian(phi, p, fd) * v ** (-1.2)


def conformal_sublaplacian(
    phi: ScalarField, u: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD
) -> float:
    """Delta_{g~} u for g~ = phi^{4/(Q-2)} g0, via the product rule
    Delta_0(phi u) = Delta_0(phi) u + phi^{(Q+2)/(Q-2)} Delta_{g~} u."""
    v = phi(p)
    if v <= 0.0:
        raise DomainError("conformal factor must be positive")
    prod = lambda q: phi(q) * u(q)
    return (sublaplacian(prod, p, fd) - sublaplacian(phi, p, fd) * u(p)) * v ** (-1.2)


# ---------------------------------------------------------------------------
# Connection route.


@dataclass
class ConnectionPerturbation:
    """Pointwise data of the perturbed Biquard connection for f^2 g0.

    k[a] = X_a(ln f); kv[beta-1] = d(ln f)/dt_beta; gradk[a, c] = X_c(K_a);
    ax[b] is the horizontal endomorphism A_{X_b}; ar[beta-1] is A_{R_beta}.
    """

    k: np.ndarray
    kv: np.ndarray
    gradk: np.ndarray
    ax: list
    ar: list


def _wedge(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(u ^ v)(Z) = <u,Z> v - <v,Z> u as a matrix."""
    return np.outer(v, u) - np.outer(u, v)


def _ax_matrices(k: np.ndarray) -> list:
    """A_{X_b} = K(X_b) Id + <I_a K, X_b> I_a + K ^ X_b + I_a K ^ I_a X_b."""
    mats = []
    ek = [E_MATS[al] @ k for al in range(1, 8)]
    for b in range(8):
        eb = np.eye(8)[b]
        m = k[b] * np.eye(8)
        for al in range(1, 8):
            m = m + ek[al - 1][b] * E_MATS[al]
        m = m + _wedge(k, eb)
        for al in range(1, 8):
            m = m + _wedge(ek[al - 1], E_MATS[al] @ eb)
        mats.append(m)
    return mats


def _ur_matrix(beta: int, k: np.ndarray, gradk: np.ndarray) -> np.ndarray:
    """U_{R_beta} X = 2 I_beta grad_X K + 4 sum_g <I_g K,X> I_b I_g K
    - 4 sum_{g != b} <I_g I_b K, X> I_g K."""
    Eb = E_MATS[beta]
    m = 2.0 * Eb @ gradk
    for g in range(1, 8):
        Egk = E_MATS[g] @ k
        m = m + 4.0 * np.outer(Eb @ Egk, Egk)
        if g != beta:
            m = m - 4.0 * np.outer(Egk, E_MATS[g] @ (Eb @ k))
    return m


def connection_perturbation(
    f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD
) -> ConnectionPerturbation:
    """Assemble the connection data at p from finite differences of ln f."""
    if f(p) <= 0.0:
        raise DomainError("conformal factor must be positive")
    lnf = lambda q: float(np.log(f(q)))
    fd1 = FDSpec(step=fd.step, richardson=fd.richardson)
    k = horizontal_grad(lnf, p, fd1)
    kv = np.array([apply_T(beta, lnf, p, fd1) for beta in range(1, 8)])
    h2 = _step(fd, p, order=2)
    gradk = np.zeros((8, 8))
    for c in range(8):
        def ka_at(q, c=c):
            return horizontal_grad(lnf, q, fd1)
        vals = []
        for lvl in range(fd.richardson + 1):
            h = h2 / 2.0**lvl
            vals.append((ka_at(_shift(p, c, h)) - ka_at(_shift(p, c, -h))) / (2.0 * h))
        acc = vals[-1]
        if fd.richardson >= 1:
            acc = (4.0 * vals[1] - vals[0]) / 3.0
        gradk[:, c] = acc
    ax = _ax_matrices(k)
    ar = []
    for beta in range(1, 8):
        u = _ur_matrix(beta, k, gradk)
        ar.append(kv[beta - 1] * np.eye(8) + so7_component(u))
    return ConnectionPerturbation(k=k, kv=kv, gradk=gradk, ax=ax, ar=ar)


def scalar_curv_connection(
    f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD
) -> float:
    """Scalar curvature of f^2 g0 from the perturbed connection:

    f^2 s~ = sum_{a,b} < grad_{X_a}(A_{X_b} X_b) - grad_{X_b}(A_{X_a} X_b)
             + (A_{X_a} A_{X_b} - A_{X_b} A_{X_a}) X_b
             - A_{[X_a,X_b]} X_b, X_a >,
    with the flat connection differentiating coefficients and
    A_{[X_a,X_b]} = 4 E^beta_{ab} A_{R_beta}.
    """
    fp = f(p)
    if fp <= 0.0:
        raise DomainError("conformal factor must be positive")
    lnf = lambda q: float(np.log(f(q)))
    fd1 = FDSpec(step=fd.step, richardson=fd.richardson)

    def w_and_v(q):
        """w_a = (sum_b A_{X_b} X_b)_a and v_b = sum_a (A_{X_a})_{ab} at q."""
        kq = horizontal_grad(lnf, q, fd1)
        axq = _ax_matrices(kq)
        w = np.zeros(8)
        v = np.zeros(8)
        for b in range(8):
            w += axq[b][:, b]
        for a in range(8):
            v += axq[a][a, :]
        return w, v

    h2 = _step(fd, p, order=2)
    s1 = 0.0
    s2 = 0.0
    for c in range(8):
        vals_w = []
        vals_v = []
        for lvl in range(fd.richardson + 1):
            h = h2 / 2.0**lvl
            wp, vp = w_and_v(_shift(p, c, h))
            wm, vm = w_and_v(_shift(p, c, -h))
            vals_w.append((wp[c] - wm[c]) / (2.0 * h))
            vals_v.append((vp[c] - vm[c]) / (2.0 * h))
        dw = vals_w[-1] if fd.richardson == 0 else (4.0 * vals_w[1] - vals_w[0]) / 3.0
        dv = vals_v[-1] if fd.richardson == 0 else (4.0 * vals_v[1] - vals_v[0]) / 3.0
        s1 += dw
        s2 -= dv

    per = connection_perturbation(f, p, fd)
    s3 = 0.0
    for a in range(8):
        for b in range(8):
            comm = per.ax[a] @ per.ax[b] - per.ax[b] @ per.ax[a]
            s3 += comm[a, b]
    s4 = 0.0
    for beta in range(1, 8):
        s4 -= 4.0 * float(np.sum(E_MATS[beta] * per.ar[beta - 1]))
    return (s1 + s2 + s3 + s4) / fp**2
