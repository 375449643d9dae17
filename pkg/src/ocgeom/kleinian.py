"""Schottky-type subgroups: word enumeration, critical exponent,
Patterson-Sullivan atoms, the invariant-metric density phi_Gamma, and the
curvature sign check.

Group elements are freely reduced words over the generators and their
inverses.  Each generator is a Heisenberg-model word (conformal-action
generators); orbits and distances are computed in the Siegel domain with
the matched isometric generator words, never by collapsing words into
matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .actions import (
    Dilation,
    GroupGen,
    GroupWord,
    Inversion,
    Translation,
    apply_gen,
    apply_word,
    conf_factor,
    inverse_word,
)
from .errors import (
    CapacityError,
    DegenerateError,
    DomainError,
    InsufficientDataError,
    PoleError,
    SouthPoleError,
)
from .green import green0
from .heisenberg import FDSpec, HPoint, gauge_distance, gauge_norm, h_inv, h_mul
from .siegel import (
    BASE_POINT,
    ScaledSiegelPoint,
    SiegelPoint,
    boundary_to_h,
    cayley,
    h_to_boundary,
    phi_chi,
    scaled_apply_word,
    scaled_hyp_distance,
    scaled_shadow_ball,
    siegel_word_for,
)
from .yamabe import scalar_curv_yamabe

WORD_BUDGET = 500_000
INFINITY = None  # boundary point at infinity for make_loxodromic


def make_loxodromic(p: HPoint, q, delta: float) -> GroupWord:
    """Word T D_delta T^{-1} with T mapping 0 -> p and infinity -> q.

    q is an HPoint or INFINITY.  The word fixes p (attracting, delta < 1)
    and q (repelling).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0,1)")
    if q is INFINITY:
        conj = [Translation(p)]
    else:
        if gauge_distance(p, q) < 1e-12:
            raise DegenerateError("fixed points coincide")
        qinv_p = h_mul(h_inv(q), p)
        conj = [Translation(q), Inversion(), Translation(apply_gen(Inversion(), qinv_p))]
    return conj + [Dilation(delta)] + inverse_word(conj)


@dataclass
class SchottkyGroup:
    """Generators as Heisenberg-model words with matched Siegel twins."""

    generators: list
    base_z: SiegelPoint = field(default_factory=lambda: BASE_POINT)
    base_w: SiegelPoint = field(default_factory=lambda: BASE_POINT)

    def __post_init__(self):
        if not self.generators or any(len(w) == 0 for w in self.generators):
            raise ValueError("generator words must be nonempty")
        self.letters = []
        for w in self.generators:
            self.letters.append(siegel_word_for(w))
            self.letters.append(siegel_word_for(inverse_word(w)))

    @property
    def rank(self) -> int:
        return len(self.generators)

    def h_word(self, letters) -> GroupWord:
        """Materialize a letter sequence as a Heisenberg-model word."""
        out: GroupWord = []
        for i, s in letters:
            out.extend(self.generators[i] if s > 0 else inverse_word(self.generators[i]))
        return out


def enumerate_words(rank: int, max_len: int, budget: int = WORD_BUDGET):
    """All freely reduced nonempty letter sequences of length <= max_len.

    Letters are (generator index, +-1); no g g^{-1} adjacency.  The count
    per length l is 2k(2k-1)^{l-1}.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    k = rank
    total = 0
    n = 2 * k
    for _ in range(max_len):
        total += n
        n *= 2 * k - 1
    if total > budget:
        raise CapacityError(f"{total} words exceed the budget {budget}")
    alphabet = [(i, s) for i in range(k) for s in (1, -1)]
    words = []
    frontier = [[a] for a in alphabet]
    words.extend(frontier)
    for _ in range(max_len - 1):
        nxt = []
        for w in frontier:
            li, ls = w[-1]
            for a in alphabet:
                if a[0] == li and a[1] == -ls:
                    continue
                nxt.append(w + [a])
        words.extend(nxt)
        frontier = nxt
    return words


def _orbit_points(G: SchottkyGroup, max_len: int, budget: int = WORD_BUDGET):
    """(letters, scaled Siegel orbit point gamma(base_w)) for all reduced words.

    Words grow by left extension, so each new word costs one letter
    application to the stored point.
    """
    k = G.rank
    total = 0
    n = 2 * k
    for _ in range(max_len):
        total += n
        n *= 2 * k - 1
    if total > budget:
        raise CapacityError(f"{total} words exceed the budget {budget}")
    alphabet = [(i, s) for i in range(k) for s in (1, -1)]
    base = ScaledSiegelPoint.from_point(G.base_w)
    out = []
    frontier = []
    for a in alphabet:
        pt = scaled_apply_word(G.letters[2 * a[0] + (0 if a[1] > 0 else 1)], base)
        frontier.append(([a], pt))
    out.extend(frontier)
    for _ in range(max_len - 1):
        nxt = []
        for letters, pt in frontier:
            fi, fs = letters[0]
            for a in alphabet:
                if a[0] == fi and a[1] == -fs:
                    continue
                new_pt = scaled_apply_word(
                    G.letters[2 * a[0] + (0 if a[1] > 0 else 1)], pt
                )
                nxt.append(([a] + letters, new_pt))
        out.extend(nxt)
        frontier = nxt
    return out


@dataclass
class DeltaEstimate:
    value: float
    word_length: int
    fit_residual: float
    bracket_low: float
    bracket_high: float
    n_points: int


def estimate_delta(G: SchottkyGroup, max_len: int, min_points: int = 50) -> DeltaEstimate:
    """Critical-exponent estimate from orbital counting.

    log N(T) ~ (delta/2) T; the slope is fit by least squares over the
    upper half of the distance range.
    """
    orbit = _orbit_points(G, max_len)
    base_z = ScaledSiegelPoint.from_point(G.base_z)
    dists = np.sort([scaled_hyp_distance(base_z, pt) for _, pt in orbit])
    if dists.size < min_points:
        raise InsufficientDataError(f"only {dists.size} orbit points")
    logN = np.log(np.arange(1, dists.size + 1, dtype=float))
    cut = dists[-1] / 2.0
    mask = dists >= cut
    if int(mask.sum()) < 10:
        mask = dists >= np.median(dists)
    x = dists[mask]
    y = logN[mask]
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    value = float(np.clip(2.0 * slope, 0.0, 22.0))
    s_lo, s_hi = 0.9 * value, 1.1 * value
    bl = float(np.sum(np.exp(-0.5 * s_lo * dists)))
    bh = float(np.sum(np.exp(-0.5 * s_hi * dists)))
    return DeltaEstimate(
        value=value,
        word_length=max_len,
        fit_residual=resid,
        bracket_low=bl,
        bracket_high=bh,
        n_points=int(dists.size),
    )


# ---------------------------------------------------------------------------
# Patterson-Sullivan measure.


@dataclass
class AtomicMeasure:
    atoms: list          # HPoint shadows
    masses: np.ndarray
    delta: float
    dropped_infinite: int = 0

    def __post_init__(self):
        self.masses = np.asarray(self.masses, dtype=float)
        if np.any(self.masses < 0):
            raise ValueError("masses must be nonnegative")

    def normalized(self) -> "AtomicMeasure":
        tot = float(np.sum(self.masses))
        if tot <= 0:
            raise DegenerateError("measure has zero total mass")
        return AtomicMeasure(self.atoms, self.masses / tot, self.delta,
                             self.dropped_infinite)

    def total_mass(self) -> float:
        return float(np.sum(self.masses))


def boundary_shadow(v) -> HPoint:
    """Radial projection of an interior orbit point to the boundary.

    Inverse Cayley to the ball, radial projection to S^15, Cayley back,
    then the Heisenberg identification.  SouthPoleError marks shadows at
    infinity.
    """
    if isinstance(v, SiegelPoint):
        v = ScaledSiegelPoint.from_point(v)
    v1, v2 = scaled_shadow_ball(v)
    b = cayley(v1, v2)
    return boundary_to_h(b)


def patterson_sullivan(
    G: SchottkyGroup, s: float, max_len: int, min_points: int = 50
) -> AtomicMeasure:
    """Finite-scale Patterson-Sullivan approximation.

    Atoms sit at boundary shadows of the orbit of base_w; the weight of an
    orbit point gamma(w) is e^{-(s/2) d(z, gamma w)} chi(shadow), with chi
    from the Siegel pairing against the reference point (0,-1); the result
    is normalized to a probability measure.
    """
    est = estimate_delta(G, max_len, min_points=min_points)
    if not s > est.value:
        raise DomainError(f"s = {s} must exceed the estimated exponent {est.value}")
    orbit = _orbit_points(G, max_len)
    base_z = ScaledSiegelPoint.from_point(G.base_z)
    atoms = []
    masses = []
    dropped = 0
    for _, pt in orbit:
        d = scaled_hyp_distance(base_z, pt)
        try:
            shadow = boundary_shadow(pt)
        except SouthPoleError:
            dropped += 1
            continue
        _, chi = phi_chi(h_to_boundary(shadow), est.value)
        atoms.append(shadow)
        masses.append(math.exp(-0.5 * s * d) * chi)
    if len(atoms) < min_points:
        raise InsufficientDataError(f"only {len(atoms)} finite atoms")
    return AtomicMeasure(atoms, np.array(masses), est.value, dropped).normalized()


# ---------------------------------------------------------------------------
# The Nayatani density and curvature.


def phi_gamma(xi: HPoint, mu: AtomicMeasure, cq: float, eps_pole: float = 1e-8) -> float:
    """phi_Gamma(xi) = (sum_i m_i G_0(xi, zeta_i)^kappa)^{1/kappa},
    kappa = 2 delta / (Q - 2)."""
    if mu.delta <= 0.0:
        raise DegenerateError("phi_Gamma needs a positive exponent")
    kappa = mu.delta / 10.0
    acc = 0.0
    for zeta, m in zip(mu.atoms, mu.masses):
        d = gauge_distance(xi, zeta)
        if d <= eps_pole:
            raise PoleError("phi_Gamma evaluated within eps_pole of an atom")
        acc += m * (cq * d ** (-20.0)) ** kappa
    return acc ** (1.0 / kappa)


def transform_measure(g: GroupGen, mu: AtomicMeasure) -> AtomicMeasure:
    """Pushforward with the conformal weight of exponent delta.

    Atoms move by g and masses pick up lambda(g, zeta)^{delta}; with this
    weighting phi_Gamma transforms exactly by lambda(g, xi)^{-10}.
    """
    atoms = [apply_gen(g, z) for z in mu.atoms]
    masses = np.array(
        [m * conf_factor(g, z) ** mu.delta for z, m in zip(mu.atoms, mu.masses)]
    )
    return AtomicMeasure(atoms, masses, mu.delta, mu.dropped_infinite)


def min_atom_distance(xi: HPoint, mu: AtomicMeasure) -> float:
    return min(gauge_distance(xi, z) for z in mu.atoms)


def nayatani_curvature(
    xi: HPoint, mu: AtomicMeasure, cq: float, fd: FDSpec | None = None
) -> float:
    """Scalar curvature of g_Gamma = phi_Gamma^{4/(Q-2)} g0 at xi."""
    if fd is None:
        fd = FDSpec(step=1e-2 * (1.0 + gauge_norm(xi)), richardson=1)
    clearance = min_atom_distance(xi, mu)
    step = fd.step if fd.step is not None else 1e-2 * (1.0 + gauge_norm(xi))
    if clearance < 10.0 * step:
        raise PoleError("FD stencil too close to an atom")
    f = lambda p: phi_gamma(p, mu, cq)
    return scalar_curv_yamabe(f, xi, fd)


def one_atom_power_field(zeta: HPoint, delta_gamma: float):
    """The kappa-power profile of a single atom: ||zeta^{-1} xi||^{-2 delta}.

    This is G_0(xi,zeta)^kappa up to a constant; as a conformal factor it
    carries the curvature-sign mechanism of the exponent threshold.
    """
    def f(p: HPoint) -> float:
        return gauge_distance(zeta, p) ** (-2.0 * delta_gamma)

    return f


def one_atom_power_curvature_exact(xi: HPoint, zeta: HPoint, delta_gamma: float) -> float:
    """Closed form for the field above:
    s = b * 2 delta (20 - 2 delta) ||eta||^{2 delta/5 - 4} |x_eta|^2,
    eta = zeta^{-1} xi; the sign is the sign of 10 - delta."""
    eta = h_mul(h_inv(zeta), xi)
    n = gauge_norm(eta)
    x2 = float(eta.x @ eta.x)
    return (21.0 / 5.0) * 2.0 * delta_gamma * (20.0 - 2.0 * delta_gamma) * n ** (
        0.4 * delta_gamma - 4.0
    ) * x2


# ---------------------------------------------------------------------------
# Group configuration (JSON) helpers used by the CLI.


def group_from_config(cfg: dict) -> SchottkyGroup:
    from .actions import gen_from_json

    gens = []
    for word in cfg["generators"]:
        gens.append([gen_from_json(rec) for rec in word])
    return SchottkyGroup(generators=gens)


def measure_to_json(mu: AtomicMeasure) -> dict:
    return {
        "delta_hat": mu.delta,
        "dropped_infinite": mu.dropped_infinite,
        "atoms": [
            {"zeta": z.coords().tolist(), "m": float(m)}
            for z, m in zip(mu.atoms, mu.masses)
        ],
    }
