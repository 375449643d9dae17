import numpy as np

from ocgeom.heisenberg import HPoint, gauge_norm
from ocgeom.octonion import Octonion


def rand_hpoint(rng, lo=0.5, hi=2.0):
    """Random point with gauge norm uniform in [lo, hi] (dilated into the window)."""
    p = HPoint(rng.uniform(-1.0, 1.0, 8), rng.uniform(-1.0, 1.0, 7))
    n = gauge_norm(p)
    if n < 1e-6:
        p = HPoint(np.full(8, 0.5), np.full(7, 0.5))
        n = gauge_norm(p)
    lam = rng.uniform(lo, hi) / n
    return HPoint(lam * p.x, lam * lam * p.t)


def rand_unit_imaginary(rng):
    v = rng.normal(size=7)
    return Octonion.from_imag(v / np.linalg.norm(v))
