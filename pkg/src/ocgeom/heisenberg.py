"""The octonionic Heisenberg group and its finite-difference horizontal calculus.

Points are (x, t) with x in R^8 and t in R^7; the group law is
(x,t)(y,s) = (x+y, t+s+2 Im(x conj(y))).  The left-invariant horizontal
fields are X_a = d/dx_a + 2 E^beta_{ba} x_b d/dt_beta; derivatives are
taken by central differences along the group curves s -> p(s e_a, 0),
which are exactly the integral curves of X_a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .frames import E_MATS
from .octonion import Octonion, oct_conj_arr, oct_mul_arr

ScalarField = Callable[["HPoint"], float]


@dataclass(frozen=True)
class HPoint:
    x: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(8))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(7))

    @classmethod
    def from_octonions(cls, x: Octonion, t: Octonion) -> "HPoint":
        if abs(t.re) > 1e-12 * max(1.0, t.norm()):
            raise DomainError("t component must be purely imaginary")
        return cls(x.c.copy(), t.im)

    @classmethod
    def origin(cls) -> "HPoint":
        return cls(np.zeros(8), np.zeros(7))

    def x_oct(self) -> Octonion:
        return Octonion(self.x)

    def t_oct(self) -> Octonion:
        return Octonion.from_imag(self.t)

    def coords(self) -> np.ndarray:
        """The 15-vector (x_0..x_7, t_1..t_7)."""
        return np.concatenate([self.x, self.t])

    def allclose(self, other: "HPoint", tol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.x, other.x, rtol=0.0, atol=tol)
            and np.allclose(self.t, other.t, rtol=0.0, atol=tol)
        )

    def __repr__(self):
        return f"HPoint(x={self.x.tolist()}, t={self.t.tolist()})"


def imag_x_conj_y(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Im(x conj(y)) as a 7-vector."""
    return oct_mul_arr(x, oct_conj_arr(y))[1:]


def h_mul(p: HPoint, q: HPoint) -> HPoint:
    return HPoint(p.x + q.x, p.t + q.t + 2.0 * imag_x_conj_y(p.x, q.x))


def h_inv(p: HPoint) -> HPoint:
    return HPoint(-p.x, -p.t)


def gauge_norm(p: HPoint) -> float:
    x2 = float(p.x @ p.x)
    return float((x2 * x2 + p.t @ p.t) ** 0.25)


def gauge_distance(p: HPoint, q: HPoint) -> float:
    return gauge_norm(h_mul(h_inv(p), q))


def contact_form(beta: int, p: HPoint, v: np.ndarray) -> float:
    """theta_{0;beta} at p evaluated on the tangent 15-vector v."""
    if not 1 <= beta <= 7:
        raise IndexError("beta must be in 1..7")
    v = np.asarray(v, dtype=float).reshape(15)
    drift = E_MATS[beta].T @ p.x  # component a: E^beta_{ba} x_b
    return float(v[7 + beta] - 2.0 * drift @ v[:8])


def X_vector(a: int, p: HPoint) -> np.ndarray:
    """Coordinate components of X_a at p as a 15-vector."""
    if not 0 <= a <= 7:
        raise IndexError("a must be in 0..7")
    v = np.zeros(15)
    v[a] = 1.0
    for beta in range(1, 8):
        v[7 + beta] = 2.0 * E_MATS[beta][:, a] @ p.x
    return v


@dataclass(frozen=True)
class FDSpec:
    """Central-difference parameters.

    step=None selects the per-point default; richardson is the number of
    extrapolation levels (0: plain O(h^2) central differences).
    """

    step: float | None = None
    scheme: str = "central2"
    richardson: int = 0

    def __post_init__(self):
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.scheme != "central2":
            raise ValueError("only the central2 scheme is implemented")


DEFAULT_FD = FDSpec()


def _step(fd: FDSpec, p: HPoint, order: int) -> float:
    if fd.step is not None:
        return fd.step
    base = 1e-3 if order == 1 else 1e-2
    return base * (1.0 + gauge_norm(p))


def _shift(p: HPoint, a: int, h: float) -> HPoint:
    """p . (h e_a, 0): the time-h point of the X_a integral curve through p."""
    x = p.x.copy()
    x[a] += h
    t = p.t + 2.0 * h * oct_mul_arr(p.x, _CONJ_E[a])[1:]
    return HPoint(x, t)


_CONJ_E = [oct_conj_arr(np.eye(8)[i]) for i in range(8)]


def _shift_t(p: HPoint, beta: int, h: float) -> HPoint:
    t = p.t.copy()
    t[beta - 1] += h
    return HPoint(p.x.copy(), t)


def _richardson(samples):
    """Limit of a sequence D(h), D(h/2), ... of O(h^2) approximations."""
    vals = list(samples)
    k = 1
    while len(vals) > 1:
        vals = [
            (4.0**k * vals[i + 1] - vals[i]) / (4.0**k - 1.0)
            for i in range(len(vals) - 1)
        ]
        k += 1
    return vals[0]


def apply_X(a: int, f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    """Central-difference X_a f(p) along the group curve."""
    if not 0 <= a <= 7:
        raise IndexError("a must be in 0..7")
    h0 = _step(fd, p, order=1)
    vals = []
    for lvl in range(fd.richardson + 1):
        h = h0 / 2.0**lvl
        vals.append((f(_shift(p, a, h)) - f(_shift(p, a, -h))) / (2.0 * h))
    return _richardson(vals)


def apply_T(beta: int, f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    """Central-difference vertical derivative d f/d t_beta (the Reeb R_beta)."""
    if not 1 <= beta <= 7:
        raise IndexError("beta must be in 1..7")
    h0 = _step(fd, p, order=1)
    vals = []
    for lvl in range(fd.richardson + 1):
        h = h0 / 2.0**lvl
        vals.append((f(_shift_t(p, beta, h)) - f(_shift_t(p, beta, -h))) / (2.0 * h))
    return _richardson(vals)


def _second_diff(f: ScalarField, p: HPoint, a: int, h: float, f0: float) -> float:
    return (f(_shift(p, a, h)) - 2.0 * f0 + f(_shift(p, a, -h))) / (h * h)


def sublaplacian(f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    """Delta_0 f(p) = -sum_a X_a^2 f(p) by central differences."""
    h0 = _step(fd, p, order=2)
    f0 = f(p)
    total = 0.0
    for a in range(8):
        vals = [
            _second_diff(f, p, a, h0 / 2.0**lvl, f0)
            for lvl in range(fd.richardson + 1)
        ]
        total += _richardson(vals)
    return -total


def horizontal_grad(f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> np.ndarray:
    return np.array([apply_X(a, f, p, fd) for a in range(8)])


def horizontal_grad_sq(f: ScalarField, p: HPoint, fd: FDSpec = DEFAULT_FD) -> float:
    g = horizontal_grad(f, p, fd)
    return float(g @ g)


def volume_density(phi: ScalarField, p: HPoint) -> float:
    """Density of dV_{g~} against Lebesgue measure for g~ = phi^{4/(Q-2)} g0."""
    v = phi(p)
    if v <= 0.0:
        raise DomainError("conformal factor must be positive")
    return float(v ** (11.0 / 5.0))
