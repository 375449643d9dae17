"""Batch front-end: verification suites, constant computation, curvature
grids, and the Kleinian pipeline.

Exit codes: 0 pass, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import green
from .errors import OcgeomError
from .frames import E_MATS, basis_product_sign, build_N
from .heisenberg import FDSpec, HPoint, gauge_norm
from .kleinian import (
    INFINITY,
    estimate_delta,
    group_from_config,
    make_loxodromic,
    measure_to_json,
    min_atom_distance,
    nayatani_curvature,
    patterson_sullivan,
    phi_gamma,
)
from .octonion import EPS4, E, Octonion, associator
from .yamabe import scalar_curv_connection, scalar_curv_exp, scalar_curv_yamabe

FULL = "%.17g"


def _rand_octonions(rng, n):
    return [Octonion(rng.uniform(-1.0, 1.0, 8)) for _ in range(n)]


def run_verify_algebra(seed: int = 0, inject_sign_flip: bool = False) -> dict:
    """Exhaustive table, Moufang, E^beta and N^{ab} checks."""
    rng = np.random.default_rng(seed)
    checks = []

    eps4 = EPS4.copy()
    if inject_sign_flip:
        eps4[5, 4, 6, 7] = -eps4[5, 4, 6, 7]
    worst = 0.0
    count = 0
    for a in range(8):
        for b in range(8):
            for c in range(8):
                lhs = associator(E[a], E[b], E[c]).c
                rhs = 2.0 * eps4[a, b, c, :].astype(float)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
                count += 1
    checks.append({"check": "associator-table-512", "count": count,
                   "max_residual": worst, "pass": worst == 0.0})

    worst = 0.0
    for beta in range(1, 8):
        Eb = E_MATS[beta]
        worst = max(worst, float(np.max(np.abs(Eb @ Eb + np.eye(8)))))
        worst = max(worst, float(np.max(np.abs(Eb + Eb.T))))
    for a in range(1, 8):
        for b in range(1, 8):
            if a == b:
                continue
            worst = max(worst, float(np.max(np.abs(E_MATS[a] @ E_MATS[b] + E_MATS[b] @ E_MATS[a]))))
            s, idx = basis_product_sign(a, b)
            worst = max(worst, float(np.max(np.abs(
                E_MATS[a] @ E_MATS[b] - s * E_MATS[idx] + build_N(a, b)))))
    checks.append({"check": "frame-matrix-identities", "max_residual": worst,
                   "pass": worst == 0.0})

    worst = 0.0
    for _ in range(1000):
        u, v, x, y = _rand_octonions(rng, 4)
        scale = max(u.norm(), 1.0) ** 3 * max(x.norm(), 1.0)
        uvu = (u * v) * u
        worst = max(worst, (uvu * x - u * (v * (u * x))).norm() / scale)
        worst = max(worst, (x * uvu - ((x * u) * v) * u).norm() / scale)
        worst = max(worst, ((u * (x * y)) * u - (u * x) * (y * u)).norm() / scale)
    checks.append({"check": "moufang-1000", "max_residual": worst,
                   "pass": worst <= 1e-12})

    worst = 0.0
    for _ in range(1000):
        a, b = _rand_octonions(rng, 2)
        worst = max(worst, abs((a * b).norm() - a.norm() * b.norm())
                    / max(a.norm() * b.norm(), 1e-12))
    checks.append({"check": "composition-norm", "max_residual": worst,
                   "pass": worst <= 1e-12})

    return {"suite": "verify-algebra", "seed": seed,
            "pass": all(c["pass"] for c in checks), "checks": checks}


def run_compute_cq(nodes: int, mc_samples: int, seed: int, rtol: float) -> dict:
    spec = green.QuadratureSpec(nodes=nodes, mc_samples=mc_samples)
    cq, history = green.compute_CQ(spec, rtol=rtol)
    mc_mean, mc_se = green.mc_integral_oracle(spec, seed=seed)
    integral = 1.0 / (green.PREFACTOR * cq)
    z = (mc_mean - integral) / mc_se if mc_se > 0 else float("inf")
    return {
        "cq": cq,
        "nodes": history[-1][0],
        "relative_change": history[-1][2],
        "refinement_history": [
            {"nodes": n, "cq": c, "relative_change": None if math.isnan(ch) else ch}
            for n, c, ch in history
        ],
        "mc": {"integral": mc_mean, "se": mc_se, "quadrature_integral": integral,
               "z_score": z, "samples": mc_samples, "seed": seed},
        "pass": abs(z) <= 3.0,
    }


def _curvature_field(kind: str, seed: int):
    if kind == "constant":
        h = lambda p: 0.25
        return h, None
    if kind == "log-gauge":
        h = lambda p: -math.log(gauge_norm(p))
        exact = lambda p: 420.0 * float(p.x @ p.x) / gauge_norm(p) ** 2
        return h, exact
    if kind == "bump":
        rng = np.random.default_rng(seed)
        cx = rng.uniform(-0.3, 0.3, 8)
        ct = rng.uniform(-0.3, 0.3, 7)
        amp = rng.uniform(0.1, 0.4)
        sharp = rng.uniform(0.4, 1.0)

        def h(p):
            dx = p.x - cx
            dt = p.t - ct
            return amp * math.exp(-sharp * (float(dx @ dx) ** 2 + float(dt @ dt)))

        return h, None
    raise ValueError(f"unknown field kind {kind!r}")


def run_curvature(field: str, grid_n: int, seed: int, fd_step: float | None,
                  tolerance: float, out):
    h, exact = _curvature_field(field, seed)
    rng = np.random.default_rng(seed)
    rows = []
    worst = 0.0
    n_done = 0
    while n_done < grid_n:
        p = HPoint(rng.uniform(-1.2, 1.2, 8), rng.uniform(-1.2, 1.2, 7))
        if not 0.4 <= gauge_norm(p) <= 1.6:
            continue
        n_done += 1
        step = fd_step if fd_step else 1e-2 * (1.0 + gauge_norm(p))
        fd = FDSpec(step=step, richardson=1)
        s1 = scalar_curv_exp(h, p, fd)
        s2 = scalar_curv_yamabe(lambda q: math.exp(10.0 * h(q)), p, fd)
        s3 = scalar_curv_connection(lambda q: math.exp(h(q)), p, fd)
        row = list(p.coords()) + [s1, s2, s3, s1 - s2, s1 - s3]
        if exact is not None:
            row.append(exact(p))
        rows.append(row)
        scale = max(abs(s1), 1.0)
        worst = max(worst, abs(s1 - s2) / scale, abs(s1 - s3) / scale)
    header = [f"x{i}" for i in range(8)] + [f"t{i}" for i in range(1, 8)]
    header += ["s_exp", "s_yamabe", "s_connection", "delta_exp_yamabe", "delta_exp_connection"]
    if exact is not None:
        header.append("s_exact")
    writer = csv.writer(out)
    writer.writerow(header)
    for row in rows:
        writer.writerow([FULL % v for v in row])
    return {"field": field, "points": len(rows), "max_route_delta": worst,
            "pass": worst <= tolerance}


BUILTIN_GROUPS = {
    "cyclic": {
        "generators": [[{"kind": "dilation", "delta": 0.5}]],
        "word_length": 1000,
        "s_margin": 0.5,
        "curvature_points": 0,
    },
    "schottky2": {
        "generators": None,  # built programmatically below
        "word_length": 6,
        "s_margin": 0.5,
        "curvature_points": 10,
    },
}


def builtin_schottky2_generators():
    from .actions import gen_to_json

    ori = HPoint(np.zeros(8), np.zeros(7))
    g1 = make_loxodromic(ori, INFINITY, 0.1)
    g2 = make_loxodromic(
        HPoint(2.0 * np.eye(8)[0], np.zeros(7)),
        HPoint(-2.0 * np.eye(8)[0], np.zeros(7)),
        0.1,
    )
    return [[gen_to_json(g) for g in g1], [gen_to_json(g) for g in g2]]


def load_group_config(path: str) -> dict:
    if path.startswith("builtin:"):
        name = path.split(":", 1)[1]
        if name not in BUILTIN_GROUPS:
            raise ValueError(f"unknown builtin group {name!r}")
        cfg = dict(BUILTIN_GROUPS[name])
        if cfg["generators"] is None:
            cfg["generators"] = builtin_schottky2_generators()
        return cfg
    with open(path) as fh:
        return json.load(fh)


def run_schottky(cfg: dict, word_length: int | None, seed: int, out_prefix: str | None):
    stage = "config"
    try:
        G = group_from_config(cfg)
        L = word_length or int(cfg.get("word_length", 6))
        s_margin = float(cfg.get("s_margin", 0.5))
        stage = "estimate_delta"
        est = estimate_delta(G, L)
        stage = "patterson_sullivan"
        mu = patterson_sullivan(G, est.value + s_margin, L)
        report = {
            "delta_hat": est.value,
            "word_length": L,
            "n_orbit": est.n_points,
            "fit_residual": est.fit_residual,
            "poincare_partial_sums": {"s_low": est.bracket_low, "s_high": est.bracket_high},
            "n_atoms": len(mu.atoms),
            "dropped_infinite": mu.dropped_infinite,
        }
        stage = "curvature"
        n_curv = int(cfg.get("curvature_points", 10))
        rows = []
        signs = []
        if n_curv > 0:
            cq = 40.0 / (7.0 * math.pi**8)
            rng = np.random.default_rng(seed)
            tries = 0
            while len(rows) < n_curv and tries < 10000:
                tries += 1
                p = HPoint(rng.uniform(-1.0, 1.0, 8), rng.uniform(-1.0, 1.0, 7))
                if not 0.4 <= gauge_norm(p) <= 1.2:
                    continue
                if min_atom_distance(p, mu) < 0.15:
                    continue
                phi = phi_gamma(p, mu, cq)
                s = nayatani_curvature(p, mu, cq)
                rows.append(list(p.coords()) + [phi, s])
                signs.append(math.copysign(1.0, s))
            report["curvature_sign_summary"] = {
                "positive": int(sum(1 for s in signs if s > 0)),
                "negative": int(sum(1 for s in signs if s < 0)),
            }
        if out_prefix:
            with open(out_prefix + ".measure.json", "w") as fh:
                json.dump({"config_word_length": L, **measure_to_json(mu)}, fh)
            with open(out_prefix + ".curvature.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow([f"x{i}" for i in range(8)]
                           + [f"t{i}" for i in range(1, 8)] + ["phi_gamma", "s_gGamma"])
                for row in rows:
                    w.writerow([FULL % v for v in row])
        report["stage"] = "done"
        return report
    except OcgeomError as exc:
        return {"stage": stage, "error": str(exc)}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ocgeom", description=__doc__)
    ap.add_argument("--cmd", required=True,
                    choices=["verify-algebra", "compute-cq", "curvature", "schottky"])
    ap.add_argument("--config", help="group config JSON path or builtin:<name>")
    ap.add_argument("--out", help="output path (CSV) or prefix (schottky)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--fd-step", type=float, default=None)
    ap.add_argument("--nodes", type=int, default=128)
    ap.add_argument("--mc-samples", type=int, default=2_000_000)
    ap.add_argument("--word-length", type=int, default=None)
    ap.add_argument("--tolerance", type=float, default=1e-3)
    ap.add_argument("--field", default="bump",
                    choices=["bump", "log-gauge", "constant"])
    ap.add_argument("--grid-n", type=int, default=20)
    ap.add_argument("--inject-sign-flip", action="store_true",
                    help="negative control: corrupt the eps table copy")
    args = ap.parse_args(argv)

    for name in ("tolerance",):
        if getattr(args, name) <= 0:
            ap.error(f"--{name} must be positive")

    try:
        if args.cmd == "verify-algebra":
            report = run_verify_algebra(args.seed, args.inject_sign_flip)
            print(json.dumps(report, indent=2))
            return 0 if report["pass"] else 1

        if args.cmd == "compute-cq":
            report = run_compute_cq(args.nodes, args.mc_samples, args.seed,
                                    rtol=min(args.tolerance, 1e-8))
            print(json.dumps(report, indent=2))
            return 0 if report["pass"] else 1

        if args.cmd == "curvature":
            if args.out:
                with open(args.out, "w", newline="") as fh:
                    report = run_curvature(args.field, args.grid_n, args.seed,
                                           args.fd_step, args.tolerance, fh)
            else:
                report = run_curvature(args.field, args.grid_n, args.seed,
                                       args.fd_step, args.tolerance, sys.stdout)
            print(json.dumps(report, indent=2))
            return 0 if report["pass"] else 1

        if args.cmd == "schottky":
            if not args.config:
                ap.error("--cmd schottky requires --config")
            try:
                cfg = load_group_config(args.config)
            except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
                print(f"bad config: {exc}", file=sys.stderr)
                return 2
            report = run_schottky(cfg, args.word_length, args.seed, args.out)
            print(json.dumps(report, indent=2))
            return 0 if report.get("stage") == "done" else 1
    except OcgeomError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
