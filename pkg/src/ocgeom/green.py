"""Green kernel of the flat Yamabe operator, the normalization constant C_Q,
and the reproduction check.

G_0(xi, eta) = C_Q ||xi^{-1} eta||^{-(Q-2)}, with
C_Q^{-1} = (Q+2)(Q-2) b * I and I the 15-dimensional integral of
|x|^2 (|x|^4+|t|^2+1)^{-7}.  The integrand is cylindrical, so I reduces to
a 2-D radial integral weighted by the sphere areas of S^7 and S^6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .actions import GroupGen, apply_gen, conf_factor
from .errors import ConvergenceError, PoleError
from .heisenberg import FDSpec, HPoint, ScalarField, gauge_distance, sublaplacian
from .yamabe import B_YAMABE, Q

EPS_POLE = 1e-10

OMEGA7 = 2.0 * math.pi**4 / math.gamma(4.0)        # area of S^7 in R^8
OMEGA6 = 2.0 * math.pi**3.5 / math.gamma(3.5)      # area of S^6 in R^7
KERNEL_POWER = Q - 2
PREFACTOR = (Q + 2.0) * (Q - 2.0) * B_YAMABE       # 2016


def green0(xi: HPoint, eta: HPoint, cq: float) -> float:
    """C_Q ||xi^{-1} eta||^{-20}."""
    d = gauge_distance(xi, eta)
    if d <= EPS_POLE:
        raise PoleError("Green kernel evaluated at its pole")
    return cq * d ** (-20.0)


def green0_transformed(g: GroupGen, xi: HPoint, eta: HPoint, cq: float) -> float:
    """lambda(g,xi)^{-10} lambda(g,eta)^{-10} G_0(xi,eta): equals G_0(g xi, g eta)."""
    return conf_factor(g, xi) ** (-10.0) * conf_factor(g, eta) ** (-10.0) * green0(
        xi, eta, cq
    )


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 128
    mapping: str = "algebraic"
    mc_samples: int = 2_000_000

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError("need at least 16 radial nodes per axis")
        if self.mapping != "algebraic":
            raise ValueError("only the algebraic (0,inf)->(0,1) mapping is implemented")


def _tree_sum(values: np.ndarray) -> float:
    """Pairwise summation with fixed fan-in 2 (deterministic order)."""
    vals = np.array(values, dtype=float).ravel()
    n = vals.size
    if n == 0:
        return 0.0
    while n > 1:
        half = n // 2
        vals[:half] = vals[:half] + vals[half : 2 * half]
        if n % 2:
            vals[half] = vals[2 * half]
            n = half + 1
        else:
            n = half
    return float(vals[0])


def _radial_integral(n: int) -> float:
    """I = omega7 omega6 int r^9 rho^6 (r^4+rho^2+1)^{-7} dr drho by mapped
    Gauss-Legendre with r = s/(1-s), rho = sigma/(1-sigma)."""
    s, w = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (s + 1.0)
    w = 0.5 * w
    r = s / (1.0 - s)
    jac = 1.0 / (1.0 - s) ** 2
    R, P = np.meshgrid(r, r, indexing="ij")
    JW = np.outer(w * jac, w * jac)
    integrand = R**9 * P**6 / (R**4 + P**2 + 1.0) ** 7
    return OMEGA7 * OMEGA6 * _tree_sum(integrand * JW)


def compute_CQ(q: QuadratureSpec = QuadratureSpec(), rtol: float = 1e-10):
    """C_Q with refinement history; ConvergenceError if refinement stalls.

    Returns (cq, history) where history is a list of (nodes, cq, rel_change).
    """
    n = q.nodes
    prev = None
    history = []
    for _ in range(6):
        integral = _radial_integral(n)
        cq = 1.0 / (PREFACTOR * integral)
        change = abs(cq - prev) / cq if prev is not None else float("nan")
        history.append((n, cq, change))
        if prev is not None and change <= rtol:
            return cq, history
        prev = cq
        n *= 2
    raise ConvergenceError(f"C_Q refinement did not stabilize below {rtol}")


def mc_integral_oracle(q: QuadratureSpec, seed: int = 0):
    """Monte Carlo estimate of the 15-dim integral in C_Q^{-1}.

    Importance sampling with independent multivariate-t proposals on the x
    and t blocks; the degrees of freedom (6 and 3) keep the importance
    weights bounded against the integrand's |x|^{-26} / |t|^{-14} tails.
    Returns (estimate, standard_error).
    """
    nu_x, nu_t, sx, st = 6.0, 3.0, 0.8, 0.5
    rng = np.random.default_rng(seed)
    lgx = (
        math.lgamma((nu_x + 8) / 2)
        - math.lgamma(nu_x / 2)
        - 4.0 * math.log(nu_x * math.pi)
        - 8.0 * math.log(sx)
    )
    lgt = (
        math.lgamma((nu_t + 7) / 2)
        - math.lgamma(nu_t / 2)
        - 3.5 * math.log(nu_t * math.pi)
        - 7.0 * math.log(st)
    )
    n = q.mc_samples
    total = 0.0
    total2 = 0.0
    done = 0
    while done < n:
        m = min(400_000, n - done)
        gx = rng.normal(size=(m, 8))
        wx = rng.chisquare(nu_x, size=m)
        x = sx * gx / np.sqrt(wx / nu_x)[:, None]
        gt = rng.normal(size=(m, 7))
        wt = rng.chisquare(nu_t, size=m)
        t = st * gt / np.sqrt(wt / nu_t)[:, None]
        x2 = np.einsum("ij,ij->i", x, x)
        t2 = np.einsum("ij,ij->i", t, t)
        logpx = lgx - (nu_x + 8) / 2 * np.log1p(x2 / (sx * sx * nu_x))
        logpt = lgt - (nu_t + 7) / 2 * np.log1p(t2 / (st * st * nu_t))
        vals = x2 / (x2**2 + t2 + 1.0) ** 7 * np.exp(-(logpx + logpt))
        total += float(np.sum(vals))
        total2 += float(np.sum(vals**2))
        done += m
    mean = total / n
    var = max(total2 / n - mean**2, 0.0)
    return mean, math.sqrt(var / n)


def gauge_polar_nodes(radius: float, n_lambda: int, n_angle: int):
    """Nodes and weights for integrals of cylindrical F over ||eta|| < radius.

    Parametrize r = lam (1-v^2)^{1/4}, rho = lam^2 v; then
    int_{R^15} F = omega7 omega6 int_0^radius int_0^1
                   lam^21 (1-v^2) v^6 F(r, rho) dv dlam.
    Returns arrays (r, rho, weight) including all constant factors.
    """
    sl, wl = np.polynomial.legendre.leggauss(n_lambda)
    lam = 0.5 * radius * (sl + 1.0)
    wlam = 0.5 * radius * wl
    sv, wv = np.polynomial.legendre.leggauss(n_angle)
    v = 0.5 * (sv + 1.0)
    wv = 0.5 * wv
    L, V = np.meshgrid(lam, v, indexing="ij")
    W = np.outer(wlam, wv)
    r = L * (1.0 - V**2) ** 0.25
    rho = L**2 * V
    weight = OMEGA7 * OMEGA6 * L**21 * (1.0 - V**2) * V**6 * W
    return r.ravel(), rho.ravel(), weight.ravel()


def cylinder_point(r: float, rho: float) -> HPoint:
    x = np.zeros(8)
    x[0] = r
    t = np.zeros(7)
    t[0] = rho
    return HPoint(x, t)


def green_reproduce(
    u: ScalarField,
    q: QuadratureSpec,
    cq: float,
    support_radius: float = 1.5,
    fd: FDSpec | None = None,
) -> float:
    """int G_0(0, eta) L_0 u(eta) dV_0 for cylindrical u supported in a gauge ball.

    The integrand is cylindrical because u is, so the 15-dim integral is
    evaluated in gauge-polar coordinates; the kernel singularity at the
    origin is absorbed by the lam^21 volume factor (G_0 ~ lam^{-20}).
    """
    if fd is None:
        fd = FDSpec(step=None, richardson=1)
    r, rho, w = gauge_polar_nodes(support_radius, q.nodes, max(q.nodes // 2, 16))
    lam4 = (r**2) ** 2 + rho**2
    kernel = cq * lam4 ** (-5.0)
    vals = np.empty_like(r)
    for i in range(r.size):
        p = cylinder_point(r[i], rho[i])
        vals[i] = B_YAMABE * sublaplacian(u, p, fd)
    return _tree_sum(vals * kernel * w)
