"""Conformal transformations of the octonionic Heisenberg group.

Four generator families: dilations D_delta(x,t) = (delta x, delta^2 t),
left translations by a group element, rotations S_mu(x,t) = (mu x, mu t conj(mu))
for unit imaginary mu, and the inversion
R(x,t) = (-(|x|^2 - t)^{-1} x, -t/(|x|^4 + |t|^2)).

Each generator carries the conformal factor lambda with g*g0 = lambda^2 g0;
the factor of a word is the cocycle product along the intermediate points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import AnnulusError, PoleError
from .heisenberg import HPoint, gauge_norm, h_inv, h_mul
from .octonion import Octonion, oct_inverse

EPS_INV = 1e-8


@dataclass(frozen=True)
class Dilation:
    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("dilation factor must be positive")


@dataclass(frozen=True)
class Translation:
    q: HPoint


@dataclass(frozen=True)
class Rotation:
    mu: Octonion

    def __post_init__(self):
        if abs(self.mu.re) > 1e-12 or abs(self.mu.norm() - 1.0) > 1e-12:
            raise ValueError("rotation parameter must be a unit imaginary octonion")


@dataclass(frozen=True)
class Inversion:
    pass


GroupGen = Dilation | Translation | Rotation | Inversion
GroupWord = list  # sequence of GroupGen, applied right-to-left


def apply_gen(g: GroupGen, p: HPoint) -> HPoint:
    if isinstance(g, Dilation):
        return HPoint(g.delta * p.x, g.delta**2 * p.t)
    if isinstance(g, Translation):
        return h_mul(g.q, p)
    if isinstance(g, Rotation):
        mu = g.mu
        x = mu * p.x_oct()
        t = (mu * p.t_oct()) * mu.conj()
        return HPoint(x.c, t.im)
    if isinstance(g, Inversion):
        n = gauge_norm(p)
        if n <= EPS_INV:
            raise PoleError("inversion applied too close to the identity")
        q = Octonion(p.x @ p.x) - p.t_oct()  # |x|^2 - t
        x = -(oct_inverse(q) * p.x_oct())
        t = -p.t / n**4
        return HPoint(x.c, t)
    raise TypeError(f"unknown generator {g!r}")


def conf_factor(g: GroupGen, p: HPoint) -> float:
    """lambda with g*g0 = lambda^2 g0 at p."""
    if isinstance(g, Dilation):
        return g.delta
    if isinstance(g, (Translation, Rotation)):
        return 1.0
    if isinstance(g, Inversion):
        n = gauge_norm(p)
        if n <= EPS_INV:
            raise PoleError("inversion factor diverges at the identity")
        return 1.0 / n**2
    raise TypeError(f"unknown generator {g!r}")


def inverse_gen(g: GroupGen) -> GroupGen:
    if isinstance(g, Dilation):
        return Dilation(1.0 / g.delta)
    if isinstance(g, Translation):
        return Translation(h_inv(g.q))
    if isinstance(g, Rotation):
        return Rotation(g.mu.conj())
    return Inversion()


def inverse_word(w: GroupWord) -> GroupWord:
    return [inverse_gen(g) for g in reversed(w)]


def apply_word(w: GroupWord, p: HPoint) -> tuple[HPoint, float]:
    """Apply the word right-to-left; returns (w(p), cocycle factor)."""
    lam = 1.0
    cur = p
    for i, g in enumerate(reversed(w)):
        try:
            lam *= conf_factor(g, cur)
            cur = apply_gen(g, cur)
        except PoleError as exc:
            raise PoleError(
                f"pole at generator {len(w) - 1 - i} of word: {exc}"
            ) from exc
    return cur, lam


def glue_map(t: float, rotations: GroupWord, p: HPoint) -> HPoint:
    """Connected-sum identification D_t o R o A on the annulus t < ||A p|| < 1."""
    if not 0.0 < t < 1.0:
        raise ValueError("glue parameter must lie in (0,1)")
    if not all(isinstance(g, Rotation) for g in rotations):
        raise ValueError("glue word must consist of rotations")
    ap, _ = apply_word(rotations, p)
    n = gauge_norm(ap)
    if not t < n < 1.0:
        raise AnnulusError(f"||A p|| = {n} outside ({t}, 1)")
    return apply_gen(Dilation(t), apply_gen(Inversion(), ap))


def gen_to_json(g: GroupGen) -> dict:
    if isinstance(g, Dilation):
        return {"kind": "dilation", "delta": g.delta}
    if isinstance(g, Translation):
        return {"kind": "translation", "x": g.q.x.tolist(), "t": g.q.t.tolist()}
    if isinstance(g, Rotation):
        return {"kind": "rotation", "mu": g.mu.c.tolist()}
    return {"kind": "inversion"}


def gen_from_json(rec: dict) -> GroupGen:
    kind = rec["kind"]
    if kind == "dilation":
        return Dilation(float(rec["delta"]))
    if kind == "translation":
        return Translation(HPoint(np.array(rec["x"]), np.array(rec["t"])))
    if kind == "rotation":
        return Rotation(Octonion(rec["mu"]))
    if kind == "inversion":
        return Inversion()
    raise ValueError(f"unknown generator kind {kind!r}")


def word_to_json(w: GroupWord) -> str:
    return json.dumps([gen_to_json(g) for g in w])


def word_from_json(s: str) -> GroupWord:
    return [gen_from_json(rec) for rec in json.loads(s)]
