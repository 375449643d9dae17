"""Frame matrices E^beta, associator matrices N^{ab}, and the
so(8) = so(7) + R^7 projection.

E^beta is the matrix of left multiplication by e_beta on R^8; N^{ab}
has entries (N^{ab})_{dc} = 2 eps_{abcd}.  The R^7 coefficients of an
antisymmetric D are D_alpha = (1/8) sum_a <D e_a, E^alpha e_a>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, NotAntisymmetricError
from .octonion import EPS4, MULT, MUL_INDEX, MUL_SIGN


def build_E(beta: int) -> np.ndarray:
    """Left-multiplication matrix of e_beta: (E^beta x)_c = MULT[beta,b,c] x_b."""
    if not 1 <= beta <= 7:
        raise IndexError("beta must be in 1..7")
    return MULT[beta].T.copy()


E_MATS = [None] + [build_E(b) for b in range(1, 8)]


def build_N(a: int, b: int) -> np.ndarray:
    """(N^{ab})_{dc} = 2 eps_{abcd}; satisfies E^a E^b = sign(e_a e_b) E^idx - N^{ab}."""
    for i in (a, b):
        if not 1 <= i <= 7:
            raise IndexError("indices must be in 1..7")
    if a == b:
        raise DegenerateError("N^{ab} requires a != b")
    n = np.zeros((8, 8))
    for c in range(8):
        for d in range(8):
            n[d, c] = 2.0 * EPS4[a, b, c, d]
    return n


@dataclass
class So8Decomposition:
    so7_part: np.ndarray
    r7_coeffs: np.ndarray

    def reassemble(self) -> np.ndarray:
        out = self.so7_part.copy()
        for alpha in range(1, 8):
            out += self.r7_coeffs[alpha - 1] * E_MATS[alpha]
        return out


def r7_coefficients(D: np.ndarray) -> np.ndarray:
    """D_alpha = (1/8) sum_a <D e_a, E^alpha e_a> = -(1/8) tr(E^alpha D)."""
    return np.array([-np.trace(E_MATS[alpha] @ D) / 8.0 for alpha in range(1, 8)])


def project_so7(D: np.ndarray, atol: float = 1e-12) -> So8Decomposition:
    D = np.asarray(D, dtype=float)
    if D.shape != (8, 8):
        raise ValueError("expected an 8x8 matrix")
    if not np.allclose(D, -D.T, rtol=0.0, atol=atol):
        raise NotAntisymmetricError("matrix is not antisymmetric")
    coeffs = r7_coefficients(D)
    so7 = D.copy()
    for alpha in range(1, 8):
        so7 -= coeffs[alpha - 1] * E_MATS[alpha]
    return So8Decomposition(so7_part=so7, r7_coeffs=coeffs)


def so7_component(M: np.ndarray) -> np.ndarray:
    """so(7) component of an arbitrary matrix: skew part minus its R^7 piece.

    Symmetric parts are orthogonal to so(8) under the trace form, so they
    drop; used for the connection perturbation U_{R_beta} which need not be
    antisymmetric pointwise.
    """
    skew = 0.5 * (M - M.T)
    return project_so7(skew).so7_part


def basis_product_sign(a: int, b: int):
    """(sign, beta) with e_a e_b = sign * e_beta."""
    return int(MUL_SIGN[a, b]), int(MUL_INDEX[a, b])
