"""The octonionic Siegel domain, hyperbolic distance, Cayley transform,
boundary identification with the Heisenberg group, and the isometric
generator actions.

Points are v = (x, y) with 2 Re(y) + |x|^2 < 0 in the interior; the
homogeneous lift is v~ = (y, x, 1)^t and the pairing is |v~* D1 w~|^2
with D1 the anti-diagonal unit matrix, so

    v~* D1 w~ = conj(y_v) + y_w + conj(x_v) x_w.

Generator actions are arranged so that (i) the pairing value is invariant
up to octonion conjugation by a unit (hence the hyperbolic distance is
exactly invariant) and (ii) pushing the boundary action through
boundary_to_h reproduces the Heisenberg-model generators of
ocgeom.actions exactly.  Point (ii) forces a twist: the boundary
identification composes the projection (y,z) -> (y/sqrt2, |y|^2/2 + z)
with the flip (x,t) -> (conj(x), -t).  With the projection alone, the
matrix action of the inversion and the paper-form Heisenberg inversion
R(x,t) = (-(|x|^2-t)^{-1}x, -t/||(x,t)||^4) differ in sign and in the
side of the octonion product, and no isometric correction exists; the
flip reconciles all four generator families simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import Dilation, GroupGen, Inversion, Rotation, Translation
from .errors import DomainError, NotOnBoundaryError, ProjectiveError, SouthPoleError
from .heisenberg import HPoint
from .octonion import Octonion, oct_inverse

SQRT2 = float(np.sqrt(2.0))
EPS_SOUTH = 1e-8


@dataclass(frozen=True)
class SiegelPoint:
    x: Octonion
    y: Octonion

    def interior_margin(self) -> float:
        """-(2 Re y + |x|^2); positive in the interior."""
        return -(2.0 * self.y.re + self.x.norm2())

    def is_interior(self) -> bool:
        return self.interior_margin() > 0.0

    def boundary_residual(self) -> float:
        return abs(2.0 * self.y.re + self.x.norm2())

    def allclose(self, other: "SiegelPoint", tol: float = 1e-12) -> bool:
        return self.x.allclose(other.x, tol) and self.y.allclose(other.y, tol)


BASE_POINT = SiegelPoint(Octonion(0.0), Octonion(-1.0))


def pairing_octonion(v: SiegelPoint, w: SiegelPoint) -> Octonion:
    """v~* D1 w~ as an octonion."""
    return v.y.conj() + w.y + v.x.conj() * w.x


def pairing(v: SiegelPoint, w: SiegelPoint) -> float:
    """|v~* D1 w~|^2."""
    return pairing_octonion(v, w).norm2()


def hyp_distance(v: SiegelPoint, w: SiegelPoint) -> float:
    """d with cosh(d/2) = |v~*D1 w~| / (|v~*D1 v~| |w~*D1 w~|)^{1/2}."""
    for p in (v, w):
        if not p.is_interior():
            raise DomainError("hyperbolic distance needs interior points")
    num = pairing_octonion(v, w).norm()
    den = float(np.sqrt(pairing_octonion(v, v).norm() * pairing_octonion(w, w).norm()))
    ratio = max(num / den, 1.0)
    return 2.0 * float(np.arccosh(ratio))


# ---------------------------------------------------------------------------
# Generator actions on the homogeneous lift (y, x, 1)^t.


@dataclass(frozen=True)
class SiegelTranslation:
    """(y, x, 1) -> (y - conj(zeta) x - |zeta|^2/2 + v, x + zeta, 1).

    The paper's matrix T is the case zeta = 1, v = 0.  The pairing value
    is invariant term by term, for any zeta in O and imaginary v.
    """

    zeta: Octonion
    v: Octonion

    def __post_init__(self):
        if abs(self.v.re) > 1e-12 * max(1.0, self.v.norm()):
            raise ValueError("vertical part must be purely imaginary")


@dataclass(frozen=True)
class SiegelDilation:
    delta: float

    def __post_init__(self):
        if self.delta == 0.0:
            raise ValueError("dilation parameter must be nonzero")


@dataclass(frozen=True)
class SiegelRotation:
    """(y, x, 1) -> (mu y conj(mu), x conj(mu), 1) for unit imaginary mu."""

    mu: Octonion

    def __post_init__(self):
        if abs(self.mu.re) > 1e-12 or abs(self.mu.norm() - 1.0) > 1e-12:
            raise ValueError("rotation parameter must be a unit imaginary octonion")


@dataclass(frozen=True)
class SiegelInversion:
    """The matrix [[0,0,-1],[0,-1,0],[-1,0,0]]: (y, x, 1) -> (-1, -x, -y)."""


SiegelGen = SiegelTranslation | SiegelDilation | SiegelRotation | SiegelInversion

PAPER_T = SiegelTranslation(Octonion(1.0), Octonion(0.0))


def apply_siegel_raw(g: SiegelGen, p: SiegelPoint):
    """Unnormalized image triple (y-slot, x-slot, third) of (y, x, 1)."""
    x, y = p.x, p.y
    if isinstance(g, SiegelTranslation):
        z = g.zeta
        return (y - z.conj() * x - Octonion(z.norm2() / 2.0) + g.v, x + z, Octonion(1.0))
    if isinstance(g, SiegelDilation):
        return (g.delta * y, x, Octonion(1.0 / g.delta))
    if isinstance(g, SiegelRotation):
        mu = g.mu
        return ((mu * y) * mu.conj(), x * mu.conj(), Octonion(1.0))
    if isinstance(g, SiegelInversion):
        return (Octonion(-1.0), -x, -y)
    raise TypeError(f"unknown Siegel generator {g!r}")


def third_coordinate_factor(g: SiegelGen, p: SiegelPoint) -> float:
    """|gamma(v~)_3|; its reciprocal is the boundary conformal factor."""
    return apply_siegel_raw(g, p)[2].norm()


def apply_siegel(g: SiegelGen, p: SiegelPoint, eps_zero: float = 1e-14) -> SiegelPoint:
    """Generator action followed by right projection onto third coordinate 1."""
    v1, v2, v3 = apply_siegel_raw(g, p)
    n3 = v3.norm()
    if n3 <= eps_zero:
        raise ProjectiveError("image has vanishing third coordinate (maps to infinity)")
    inv3 = oct_inverse(v3)
    return SiegelPoint(x=v2 * inv3, y=v1 * inv3)


def apply_siegel_word(word, p: SiegelPoint) -> SiegelPoint:
    """Apply generators right-to-left, renormalizing at each step.

    Words are never collapsed to a single matrix: with octonion entries the
    matrix product does not represent the composed action.
    """
    cur = p
    for g in reversed(word):
        cur = apply_siegel(g, cur)
    return cur


def siegel_gen_for(g: GroupGen) -> SiegelGen:
    """The Siegel-domain twin of a Heisenberg-model generator."""
    if isinstance(g, Dilation):
        return SiegelDilation(g.delta)
    if isinstance(g, Rotation):
        return SiegelRotation(g.mu)
    if isinstance(g, Inversion):
        return SiegelInversion()
    if isinstance(g, Translation):
        zeta = SQRT2 * g.q.x_oct().conj()
        return SiegelTranslation(zeta, -g.q.t_oct())
    raise TypeError(f"unknown generator {g!r}")


def siegel_word_for(word) -> list:
    return [siegel_gen_for(g) for g in word]


# ---------------------------------------------------------------------------
# Boundary identification with the Heisenberg group.


def boundary_to_h(b: SiegelPoint, tol: float = 1e-9) -> HPoint:
    """Identify a boundary point of the Siegel domain with a Heisenberg point."""
    if b.boundary_residual() > tol * max(1.0, b.x.norm2() + b.y.norm()):
        raise NotOnBoundaryError(f"residual {b.boundary_residual()} exceeds tolerance")
    x = b.x.conj() * (1.0 / SQRT2)
    t_oct = -(Octonion(b.x.norm2() / 2.0) + b.y)
    return HPoint(x.c, t_oct.im)


def h_to_boundary(p: HPoint) -> SiegelPoint:
    """Inverse of boundary_to_h."""
    x = SQRT2 * p.x_oct().conj()
    y = -p.t_oct() - Octonion(float(p.x @ p.x))
    return SiegelPoint(x=x, y=y)


def h_to_horospherical(p: HPoint, height: float) -> SiegelPoint:
    """Interior point at the given horospherical height over p."""
    if height <= 0:
        raise DomainError("height must be positive")
    b = h_to_boundary(p)
    return SiegelPoint(x=b.x, y=b.y - Octonion(height))


# ---------------------------------------------------------------------------
# Cayley transform between the ball/sphere model and the Siegel domain.


def cayley(v1: Octonion, v2: Octonion, check_sphere: bool = True) -> SiegelPoint:
    """(v1, v2) on S^15 (or in the open ball) -> Siegel domain coordinates."""
    s = v1.norm2() + v2.norm2()
    if check_sphere and abs(s - 1.0) > 1e-10:
        raise DomainError(f"(v1,v2) not on the unit sphere: |v|^2 = {s}")
    one_plus = Octonion(1.0) + v2
    if one_plus.norm() <= EPS_SOUTH:
        raise SouthPoleError("Cayley transform undefined at the southern point")
    inv = oct_inverse(one_plus)
    x = SQRT2 * (inv * v1)
    y = -((Octonion(1.0) - v2) * inv)
    return SiegelPoint(x=x, y=y)


def inverse_cayley(p: SiegelPoint):
    """Siegel domain (or boundary) -> ball model (v1, v2)."""
    one_minus = Octonion(1.0) - p.y
    inv = oct_inverse(one_minus)
    v2 = inv * (Octonion(1.0) + p.y)
    v1 = ((Octonion(1.0) + v2) * p.x) * (1.0 / SQRT2)
    return v1, v2


# ---------------------------------------------------------------------------
# The weight entering the Patterson-Sullivan normalization.


def phi_chi(eta: SiegelPoint, delta_gamma: float):
    """phi(eta) = |z~* D1 eta~|^2 at z = (0,-1), and chi = phi^{delta/2}."""
    phi = pairing(BASE_POINT, eta)
    return phi, phi ** (delta_gamma / 2.0)


# ---------------------------------------------------------------------------
# Scale-robust representation for long orbits.
#
# Deep Schottky words reach points whose coordinates overflow doubles (a
# dilation word of length n scales y by delta^{2n}).  A point is stored as
# (x, y, sigma) for the actual point (e^sigma x, e^{2 sigma} y); dilations
# shift sigma exactly and never touch the coordinates, and distances are
# evaluated in log space.


@dataclass(frozen=True)
class ScaledSiegelPoint:
    x: Octonion
    y: Octonion
    sigma: float

    @classmethod
    def from_point(cls, p: SiegelPoint) -> "ScaledSiegelPoint":
        return cls(p.x, p.y, 0.0)

    def to_point(self) -> SiegelPoint:
        if abs(self.sigma) > 300.0:
            raise OverflowError("point not representable in plain coordinates")
        s = float(np.exp(self.sigma))
        return SiegelPoint(x=self.x * s, y=self.y * (s * s))

    def interior_margin_scaled(self) -> float:
        """Margin of the de-scaled coordinates; actual margin is e^{2 sigma} larger."""
        return -(2.0 * self.y.re + self.x.norm2())


def scaled_apply_gen(g: SiegelGen, p: ScaledSiegelPoint) -> ScaledSiegelPoint:
    x, y, sig = p.x, p.y, p.sigma
    if isinstance(g, SiegelDilation):
        if g.delta < 0:
            return ScaledSiegelPoint(-x, y, sig + float(np.log(-g.delta)))
        return ScaledSiegelPoint(x, y, sig + float(np.log(g.delta)))
    if isinstance(g, SiegelRotation):
        mu = g.mu
        return ScaledSiegelPoint(x * mu.conj(), (mu * y) * mu.conj(), sig)
    if isinstance(g, SiegelInversion):
        n2 = y.norm2()
        if n2 <= 1e-300:
            raise ProjectiveError("image has vanishing third coordinate")
        yinv = Octonion(y.conj().c / n2)
        return ScaledSiegelPoint(x * yinv, yinv, -sig)
    if isinstance(g, SiegelTranslation):
        if sig < 0.0:
            s = float(np.exp(sig))
            x, y, sig = x * s, y * (s * s), 0.0
        e = float(np.exp(-sig))
        z = g.zeta
        new_x = x + e * z
        new_y = y - (e * z.conj()) * x - (e * e) * (Octonion(z.norm2() / 2.0) - g.v)
        return ScaledSiegelPoint(new_x, new_y, sig)
    raise TypeError(f"unknown Siegel generator {g!r}")


def scaled_apply_word(word, p: ScaledSiegelPoint) -> ScaledSiegelPoint:
    cur = p
    for g in reversed(word):
        cur = scaled_apply_gen(g, cur)
    return cur


def scaled_hyp_distance(v: ScaledSiegelPoint, w: ScaledSiegelPoint) -> float:
    """Hyperbolic distance; intermediate magnitudes handled in log space."""
    m1 = v.interior_margin_scaled()
    m2 = w.interior_margin_scaled()
    if m1 <= 0 or m2 <= 0:
        raise DomainError("hyperbolic distance needs interior points")
    terms = [
        (2.0 * v.sigma, v.y.conj()),
        (2.0 * w.sigma, w.y),
        (v.sigma + w.sigma, v.x.conj() * w.x),
    ]
    M = max(t[0] for t in terms)
    acc = Octonion(0.0)
    for a, q in terms:
        acc = acc + q * float(np.exp(a - M))
    log_pair = M + float(np.log(acc.norm()))
    log_ratio = log_pair - 0.5 * (
        2.0 * v.sigma + np.log(m1) + 2.0 * w.sigma + np.log(m2)
    )
    if log_ratio > 30.0:
        return 2.0 * (log_ratio + float(np.log(2.0)))
    ratio = max(float(np.exp(log_ratio)), 1.0)
    return 2.0 * float(np.arccosh(ratio))


def scaled_shadow_ball(p: ScaledSiegelPoint):
    """Ball-model coordinates of the boundary shadow (radial projection).

    Raises SouthPoleError when the shadow is the point at infinity.
    """
    two_sig = 2.0 * p.sigma
    if two_sig > 600.0:
        raise SouthPoleError("shadow at infinity")
    s = float(np.exp(min(p.sigma, 300.0)))
    x = p.x * s
    y = p.y * (s * s)
    one_minus = Octonion(1.0) - y
    inv = oct_inverse(one_minus)
    v2 = inv * (Octonion(1.0) + y)
    v1 = ((Octonion(1.0) + v2) * x) * (1.0 / SQRT2)
    n = float(np.sqrt(v1.norm2() + v2.norm2()))
    if n <= 1e-300:
        raise SouthPoleError("degenerate shadow")
    v1, v2 = v1 * (1.0 / n), v2 * (1.0 / n)
    if (Octonion(1.0) + v2).norm() <= EPS_SOUTH:
        raise SouthPoleError("shadow at the southern point")
    return v1, v2
