"""Octonion arithmetic and the structure-constant tables.

The multiplication rule on the basis {e0=1, e1..e7} is
e_alpha e_beta = -delta_{alpha beta} + eps_{alpha beta gamma} e_gamma,
with eps totally antisymmetric and +1 on the seven ordered triples of
OMEGA_TRIPLES.  The associator on basis elements is controlled by a
totally antisymmetric 4-index table built from LAMBDA_QUADS.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from .errors import DomainError

OMEGA_TRIPLES = [
    (1, 2, 3), (2, 4, 6), (4, 3, 5), (3, 6, 7),
    (6, 5, 1), (5, 7, 2), (7, 1, 4),
]

# Orientations are forced by OMEGA_TRIPLES through the associator:
# (e_a e_b) e_c - e_a (e_b e_c) = 2 eps_{abcd} e_d must hold on all 8^3
# basis triples.  The last quadruple is (2,6,5,3); the opposite
# orientation fails the identity on the 24 permutations of {2,3,5,6}.
LAMBDA_QUADS = [
    (5, 4, 6, 7), (7, 3, 5, 1), (1, 6, 7, 2), (2, 5, 1, 4),
    (4, 7, 2, 3), (3, 1, 4, 6), (2, 6, 5, 3),
]


def _perm_sign(seq, ref):
    """Sign of the permutation carrying ref to seq (seq a rearrangement of ref)."""
    idx = [ref.index(s) for s in seq]
    sign = 1
    idx = list(idx)
    for i in range(len(idx)):
        while idx[i] != i:
            j = idx[i]
            idx[i], idx[j] = idx[j], idx[i]
            sign = -sign
    return sign


def _build_eps3():
    eps = np.zeros((8, 8, 8), dtype=np.int64)
    for trip in OMEGA_TRIPLES:
        for p in permutations(trip):
            eps[p] = _perm_sign(p, list(trip))
    return eps


def _build_eps4():
    eps = np.zeros((8, 8, 8, 8), dtype=np.int64)
    for quad in LAMBDA_QUADS:
        for p in permutations(quad):
            eps[p] = _perm_sign(p, list(quad))
    return eps


EPS3 = _build_eps3()
EPS4 = _build_eps4()


def _build_mult_tables():
    """MUL_INDEX[a,b], MUL_SIGN[a,b]: e_a e_b = MUL_SIGN * e_{MUL_INDEX}."""
    idx = np.zeros((8, 8), dtype=np.int64)
    sgn = np.zeros((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            if a == 0:
                idx[a, b], sgn[a, b] = b, 1
            elif b == 0:
                idx[a, b], sgn[a, b] = a, 1
            elif a == b:
                idx[a, b], sgn[a, b] = 0, -1
            else:
                g = np.nonzero(EPS3[a, b])[0]
                assert len(g) == 1
                idx[a, b], sgn[a, b] = g[0], EPS3[a, b, g[0]]
    return idx, sgn


MUL_INDEX, MUL_SIGN = _build_mult_tables()

# Structure tensor: (e_a e_b) = sum_c MULT[a, b, c] e_c, entries in {-1,0,1}.
MULT = np.zeros((8, 8, 8))
for _a in range(8):
    for _b in range(8):
        MULT[_a, _b, MUL_INDEX[_a, _b]] = MUL_SIGN[_a, _b]


def oct_mul_arr(a, b):
    """Product of two octonions given as length-8 arrays."""
    return np.einsum("a,b,abc->c", a, b, MULT)


def oct_conj_arr(a):
    out = -np.asarray(a, dtype=float).copy()
    out[0] = -out[0]
    return out


class Octonion:
    """An octonion as an 8-vector of double-precision coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = np.zeros(8)
        arr = np.asarray(coeffs, dtype=float)
        if arr.shape == ():
            c[0] = float(arr)
        else:
            if arr.shape != (8,):
                raise ValueError("Octonion needs a scalar or 8 coefficients")
            c[:] = arr
        self.c = c

    @classmethod
    def unit(cls, i):
        c = np.zeros(8)
        c[i] = 1.0
        return cls(c)

    @classmethod
    def from_imag(cls, t):
        """Embed a 7-vector as the imaginary part."""
        c = np.zeros(8)
        c[1:] = np.asarray(t, dtype=float)
        return cls(c)

    @property
    def re(self):
        return self.c[0]

    @property
    def im(self):
        """Imaginary part as a 7-vector."""
        return self.c[1:].copy()

    def conj(self):
        return Octonion(oct_conj_arr(self.c))

    def norm2(self):
        return float(self.c @ self.c)

    def norm(self):
        return float(np.sqrt(self.c @ self.c))

    def __add__(self, other):
        return Octonion(self.c + _coerce(other).c)

    __radd__ = __add__

    def __sub__(self, other):
        return Octonion(self.c - _coerce(other).c)

    def __rsub__(self, other):
        return Octonion(_coerce(other).c - self.c)

    def __neg__(self):
        return Octonion(-self.c)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Octonion(self.c * other)
        return Octonion(oct_mul_arr(self.c, _coerce(other).c))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Octonion(self.c * other)
        return Octonion(oct_mul_arr(_coerce(other).c, self.c))

    def __eq__(self, other):
        return isinstance(other, Octonion) and np.array_equal(self.c, other.c)

    def __repr__(self):
        return f"Octonion({self.c.tolist()})"

    def allclose(self, other, tol=1e-12):
        return bool(np.allclose(self.c, _coerce(other).c, rtol=0.0, atol=tol))


def _coerce(x):
    if isinstance(x, Octonion):
        return x
    return Octonion(x)


ZERO = Octonion(0.0)
ONE = Octonion(1.0)
E = [Octonion.unit(i) for i in range(8)]


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    return _coerce(a) * _coerce(b)


def oct_conj(a: Octonion) -> Octonion:
    return _coerce(a).conj()


def oct_inverse(a: Octonion, eps_zero: float = 1e-300) -> Octonion:
    """a^{-1} = conj(a)/|a|^2; DomainError when |a|^2 <= eps_zero."""
    a = _coerce(a)
    n2 = a.norm2()
    if n2 <= eps_zero:
        raise DomainError("octonion too close to zero to invert")
    return Octonion(oct_conj_arr(a.c) / n2)


def associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion:
    """(ab)c - a(bc)."""
    a, b, c = _coerce(a), _coerce(b), _coerce(c)
    return (a * b) * c - a * (b * c)
