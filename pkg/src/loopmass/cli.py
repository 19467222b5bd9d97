"""Command-line front end: closed-form evaluation, residual verification,
lattice enumeration, and the stochastic drift probe.

Every invocation prints one JSON result record to stdout:

    {"command": ..., "inputs": ..., "outputs": ...,
     "provenance": {"version": ..., "seed": ..., "timestamp": ...}}

Records are byte-identical across reruns except for the timestamp.
Exit codes: 0 success, 1 verification failure, 2 precondition violated,
3 enumeration budget exceeded, 4 statistics invalid.  The only
environment variable honoured is LOOPMASS_THREADS, which caps the
worker pool used for independent verification sub-checks (results are
reduced in a fixed order, so output never depends on the thread count).
"""

from __future__ import annotations

import argparse
import csv as csv_mod
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .correlators import (
    BulkConfig,
    Normalization,
    boundary_two_point,
    cross_ratio,
    four_point,
    ising_four_point,
    ope_inferred_central_charge,
    two_point,
)
from .errors import (
    BudgetError,
    LoopmassError,
    StepTooLarge,
    TooManySwallowed,
)
from .honeycomb import (
    HoneycombDomain,
    MarkSet,
    class_masses,
    classify,
    critical_weight,
    enumerate_polygons,
    fit_two_point_slope,
)
from .mu_mass import (
    PAIR_12,
    PAIR_13,
    PAIR_14,
    SeparationPattern,
    boundary_far_field_report,
    q_fn,
    w_boundary,
    w_bulk,
)
from .params import central_charge, params_from_n
from .pde_check import (
    StencilSpec,
    boundary_bpz_residual,
    bpz_residual,
    w_pde_residual,
    w_real_pde_residual,
)
from .sle import drift_estimate, evolve_points, hydrodynamic_residual, sample_chain

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3
EXIT_STATISTICS = 4

_PATTERNS = {"12|34": PAIR_12, "13|24": PAIR_13, "14|23": PAIR_14}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LOOPMASS_THREADS", "1")))
    except ValueError:
        return 1


def _parse_complex(text: str) -> complex:
    re_s, im_s = text.split(",")
    return complex(float(re_s), float(im_s))


def _points_from(args, cfg) -> list[complex]:
    if getattr(args, "points", None):
        return [_parse_complex(p) for p in args.points]
    return [complex(p[0], p[1]) for p in cfg["points"]]


def _norm_from(cfg) -> Normalization:
    nc = cfg["normalization"]
    return Normalization(A=nc["A"], varrho=nc["varrho"], sigma=nc["sigma"])


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def emit(command: str, inputs: dict, outputs: dict, seed=None) -> dict:
    record = {
        "command": command,
        "inputs": _jsonable(inputs),
        "outputs": _jsonable(outputs),
        "provenance": {
            "version": __version__,
            "seed": seed,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        },
    }
    print(json.dumps(record, sort_keys=True))
    return record


def _write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv_mod.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ----------------------------------------------------------------------
# eval
# ----------------------------------------------------------------------

def cmd_eval(args, cfg) -> int:
    n = args.n if args.n is not None else cfg["model"]["n"]
    a = args.a if args.a is not None else cfg["scale"]
    norm = _norm_from(cfg)
    p = params_from_n(n)

    if args.what == "two-point":
        pts = _points_from(args, cfg)
        val = two_point(pts[0], pts[1], p, a)
        emit(
            "eval two-point",
            {"n": n, "z1": pts[0], "z2": pts[1], "a": a},
            {"value": val},
        )
    elif args.what in ("four-point", "ising"):
        pts = _points_from(args, cfg)
        cfg4 = BulkConfig(*pts[:4], a=a)
        if args.what == "ising":
            val = ising_four_point(cfg4, norm)
        else:
            val = four_point(cfg4, p, norm)
        u = cross_ratio(*cfg4.points()).u
        emit(
            f"eval {args.what}",
            {"n": n, "points": pts, "a": a},
            {"value": val, "cross_ratio": u},
        )
    elif args.what == "boundary":
        z1, z2 = _points_from(args, cfg)[:2]
        val = boundary_two_point(z1, z2, p, norm, a)
        emit(
            "eval boundary",
            {"n": n, "z1": z1, "z2": z2, "a": a},
            {"value": val},
        )
    elif args.what == "w":
        pts = _points_from(args, cfg)
        cfg4 = BulkConfig(*pts[:4], a=a)
        pattern = _PATTERNS[args.pattern]
        mass = w_bulk(pattern, cfg4)
        u = cross_ratio(*cfg4.points()).u
        emit(
            "eval w",
            {"pattern": args.pattern, "points": pts},
            {"mass": mass.value, "cross_ratio": u, "q": q_fn(u)},
        )
    elif args.what == "w-boundary":
        z1, z2 = _points_from(args, cfg)[:2]
        mass = w_boundary(z1, z2)
        out = {"mass": mass.value}
        if args.profile:
            out["far_field"] = boundary_far_field_report()
        emit("eval w-boundary", {"z1": z1, "z2": z2}, out)
    elif args.what == "q":
        if args.eta_grid is not None:
            lo, hi, count = args.eta_grid.split(":")
            etas = np.linspace(float(lo), float(hi), int(count))
            rows = [(float(e), 0.0, q_fn(complex(e))) for e in etas]
            if args.csv:
                _write_csv(args.csv, ["eta_re", "eta_im", "q"], rows)
            emit(
                "eval q",
                {"eta_grid": args.eta_grid},
                {"rows": [{"eta": r[0], "q": r[2]} for r in rows]},
            )
        else:
            eta = _parse_complex(args.eta)
            emit("eval q", {"eta": eta}, {"q": q_fn(eta)})
    return EXIT_OK


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def _random_configs(seed: int, count: int, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        pts = rng.normal(scale=scale, size=4) + 1j * rng.normal(scale=scale, size=4)
        try:
            cfg = BulkConfig(*pts)
        except LoopmassError:
            continue
        seps = [
            abs(x - y)
            for i, x in enumerate(cfg.points())
            for y in cfg.points()[i + 1 :]
        ]
        if min(seps) < 0.5 * scale or max(seps) > 4.0 * min(seps):
            continue
        u = cross_ratio(*cfg.points()).u
        if abs(u.imag) < 1e-3:
            continue
        out.append(cfg)
    return out


def cmd_verify(args, cfg) -> int:
    tol = args.tol if args.tol is not None else cfg["tolerances"]["residual"]
    order = cfg["stencil"]["order"]

    if args.what == "ope-c":
        kappa = args.kappa if args.kappa is not None else params_from_n(cfg["model"]["n"]).kappa
        tol_c = cfg["tolerances"]["ope_c"]
        inferred = ope_inferred_central_charge(kappa)
        exact = central_charge(kappa)
        ok = abs(inferred - exact) <= tol_c
        emit(
            "verify ope-c",
            {"kappa": kappa, "tolerance": tol_c},
            {"inferred_c": inferred, "exact_c": exact, "pass": ok},
        )
        return EXIT_OK if ok else EXIT_VERIFY_FAIL

    if args.kappa is not None:
        # invert kappa -> n on the dilute branch: n = 2 cos(6 chi)
        import math

        g = 4.0 / args.kappa
        n = 2.0 * math.sin(math.pi * (1.5 - g))
        n = min(max(n, 0.0), 2.0)
        p = params_from_n(n)
    else:
        p = params_from_n(cfg["model"]["n"])

    def spec_for(c4: BulkConfig) -> StencilSpec:
        h = args.h if args.h is not None else 1e-3 * c4.min_separation()
        return StencilSpec(h=h, order=order).validated(c4.min_separation())

    configs = _random_configs(args.seed, args.configs)
    checks = []
    if args.what == "bpz":
        for c4 in configs:
            for j in (1, 2, 3, 4):
                checks.append(("bpz", c4, j))
    elif args.what == "w-pde":
        checks = [("w-pde", c4, None) for c4 in configs]
    elif args.what == "w-real-pde":
        checks = [("w-real-pde", c4, None) for c4 in configs]
    elif args.what == "boundary-bpz":
        z1 = _parse_complex(args.z1) if args.z1 else 1.0j
        z2 = _parse_complex(args.z2) if args.z2 else 1.0 + 2.0j
        h = args.h if args.h is not None else 1e-3
        rep = boundary_bpz_residual(z1, z2, p, StencilSpec(h=h, order=order))
        ok = rep.normalized < tol
        emit(
            "verify boundary-bpz",
            {"z1": z1, "z2": z2, "kappa": p.kappa, "h": h, "tolerance": tol},
            {
                "normalized_residual": rep.normalized,
                "measured_order": rep.measured_order,
                "pass": ok,
            },
        )
        return EXIT_OK if ok else EXIT_VERIFY_FAIL

    def run_check(item):
        kind, c4, j = item
        spec = spec_for(c4)
        if kind == "bpz":
            return bpz_residual(j, c4, p, spec)
        if kind == "w-pde":
            return w_pde_residual(c4, spec)
        return w_real_pde_residual(c4, spec)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(run_check, checks))

    worst = max(r.normalized for r in reports)
    ok = worst < tol
    emit(
        f"verify {args.what}",
        {
            "kappa": p.kappa,
            "configs": args.configs,
            "seed": args.seed,
            "h": args.h,
            "tolerance": tol,
        },
        {
            "checks": len(reports),
            "worst_normalized_residual": worst,
            "orders": [round(r.measured_order, 3) for r in reports],
            "pass": ok,
        },
        seed=args.seed,
    )
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


# ----------------------------------------------------------------------
# lattice
# ----------------------------------------------------------------------

def _domain_from(args, cfg) -> HoneycombDomain:
    lat = cfg["lattice"]
    if args.dom:
        rows, cols = (int(x) for x in args.dom.lower().split("x"))
    else:
        rows, cols = lat["rows"], lat["cols"]
    mode = "half_plane" if getattr(args, "half_plane", False) else lat["boundary_mode"]
    return HoneycombDomain(rows=rows, cols=cols, boundary_mode=mode)


def _marks_from(args, cfg) -> MarkSet:
    if getattr(args, "marks", None):
        faces = tuple(
            tuple(int(v) for v in part.split(",")) for part in args.marks.split(";")
        )
    else:
        faces = tuple(tuple(f) for f in cfg["lattice"].get("marks", ()))
    return MarkSet(faces)


def cmd_lattice(args, cfg) -> int:
    dom = _domain_from(args, cfg)
    lat = cfg["lattice"]
    l_max = args.lmax if args.lmax is not None else lat["l_max"]
    budget = lat["node_budget"]
    n = args.n if getattr(args, "n", None) is not None else 0.0

    if args.what == "enumerate":
        hist: dict[int, int] = {}
        dump_fh = open(args.dump, "w") if args.dump else None
        marks = _marks_from(args, cfg) if getattr(args, "marks", None) else None
        for poly in enumerate_polygons(dom, l_max, node_budget=budget):
            hist[poly.length] = hist.get(poly.length, 0) + 1
            if dump_fh is not None:
                label = classify(poly, marks, dom).label() if marks else "-"
                edges = ",".join(
                    f"{a[0]}.{a[1]}-{b[0]}.{b[1]}" for (a, b) in poly.edges()
                )
                dump_fh.write(f"l={poly.length} class={label} edges={edges}\n")
        if dump_fh is not None:
            dump_fh.close()
        total = sum(hist.values())
        if args.csv:
            _write_csv(
                args.csv,
                ["length_edges", "count"],
                sorted(hist.items()),
            )
        emit(
            "lattice enumerate",
            {"rows": dom.rows, "cols": dom.cols, "l_max": l_max, "mode": dom.boundary_mode},
            {"total": total, "by_length": {str(k): v for k, v in sorted(hist.items())}},
        )
    elif args.what == "classes":
        marks = _marks_from(args, cfg)
        table = class_masses(dom, marks, l_max, n, node_budget=budget)
        rows = [
            (p.label(), table.count(p), table.mass(p)) for p in table.patterns()
        ]
        if args.csv:
            _write_csv(args.csv, ["class", "count", "mass_sum_xc_to_l"], rows)
        emit(
            "lattice classes",
            {
                "rows": dom.rows,
                "cols": dom.cols,
                "l_max": l_max,
                "n": n,
                "marks": list(marks.faces),
            },
            {
                "x_c": table.x_c,
                "total": table.total,
                "classes": {label: {"count": c, "mass": m} for label, c, m in rows},
            },
        )
    elif args.what == "fit-2pt":
        distances = (
            [int(d) for d in args.distances.split(",")]
            if args.distances
            else lat.get("distances", [2, 3, 4, 5, 6])
        )
        slope, stderr = fit_two_point_slope(dom, l_max, distances, n=n, node_budget=budget)
        emit(
            "lattice fit-2pt",
            {
                "rows": dom.rows,
                "cols": dom.cols,
                "l_max": l_max,
                "distances": distances,
                "n": n,
            },
            {
                "slope": slope,
                "stderr": stderr,
                "continuum_slope": 1.0 / (3.0 * np.pi),
            },
        )
    elif args.what == "compare-w":
        marks = _marks_from(args, cfg)
        table = class_masses(dom, marks, l_max, n, node_budget=budget)
        zs = [dom.face_center_euclid(*f) for f in marks.faces]
        cfg4 = BulkConfig(*zs)
        cont = {
            "12|34": w_bulk(PAIR_12, cfg4).value,
            "13|24": w_bulk(PAIR_13, cfg4).value,
            "14|23": w_bulk(PAIR_14, cfg4).value,
        }
        latt = {
            "12|34": table.mass(SeparationPattern.bulk({1, 2})),
            "13|24": table.mass(SeparationPattern.bulk({1, 3})),
            "14|23": table.mass(SeparationPattern.bulk({1, 4})),
        }
        order_latt = sorted(latt, key=latt.get)
        order_cont = sorted(cont, key=cont.get)
        emit(
            "lattice compare-w",
            {"marks": list(marks.faces), "l_max": l_max, "n": n},
            {
                "lattice_mass": latt,
                "continuum_mass": cont,
                "lattice_order": order_latt,
                "continuum_order": order_cont,
                "ordering_agrees": order_latt == order_cont,
            },
        )
    return EXIT_OK


# ----------------------------------------------------------------------
# sle
# ----------------------------------------------------------------------

def cmd_sle(args, cfg) -> int:
    sc = cfg["sle"]
    dt = args.dt if args.dt is not None else sc["dt"]
    T = args.T if args.T is not None else sc["T"]
    seed = args.seed if args.seed is not None else sc["seed"]
    kappa = args.kappa if args.kappa is not None else sc["kappa"]

    if args.what == "normalization":
        chain = sample_chain(kappa, dt, T, seed)
        z = _parse_complex(args.z) if args.z else 1000.0 + 1000.0j
        res = hydrodynamic_residual(chain, z)
        emit(
            "sle normalization",
            {"kappa": kappa, "dt": dt, "T": T, "seed": seed, "z": z},
            {"residual": res, "bound": abs(2.0 * T / z / z) * 10.0},
            seed=seed,
        )
        return EXIT_OK

    runs = args.runs if args.runs is not None else sc["runs"]
    pts = _points_from(args, cfg)
    cfg4 = BulkConfig(*pts[:4])
    if args.trace:
        _write_trace(args.trace, cfg4, dt, T, seed, kappa)
    rep = drift_estimate(cfg4, dt, T, runs, seed, kappa=kappa)
    emit(
        "sle drift",
        {
            "points": pts,
            "kappa": kappa,
            "dt": dt,
            "T": T,
            "runs": runs,
            "seed": seed,
        },
        {
            "empirical_drift": rep.empirical_drift,
            "stderr": rep.stderr,
            "predicted": rep.predicted,
            "deviation_sigmas": rep.deviation_sigmas,
            "within_5_sigma": rep.within_band(5.0),
            "censored": rep.censored,
        },
        seed=seed,
    )
    return EXIT_OK


def _write_trace(path: str, cfg4: BulkConfig, dt, T, seed, kappa):
    """Step-by-step images of the spectator points for the first run."""
    from .sle import LoewnerChain

    steps = int(round(T / dt))
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    incr = rng.normal(0.0, np.sqrt(kappa * dt), size=steps)
    z1, z2, z3, z4 = cfg4.points()
    chain = LoewnerChain(
        dt=dt,
        steps=steps,
        driver=np.concatenate([[0.0], np.cumsum(incr)]),
        base_point=z1,
        kappa=kappa,
    )
    rows = []
    for k in range(chain.steps + 1):
        partial = type(chain)(
            dt=chain.dt,
            steps=k,
            driver=chain.driver[: k + 1],
            base_point=z1,
            kappa=kappa,
        )
        res = evolve_points(partial, [z2, z3, z4])
        row = [0, k * dt, chain.driver[k]]
        for g in res.points:
            row.extend([g.real, g.imag])
        rows.append(row)
    _write_csv(
        path,
        ["run", "t", "U_t", "Re_g_z2", "Im_g_z2", "Re_g_z3", "Im_g_z3", "Re_g_z4", "Im_g_z4"],
        rows,
    )


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="loopmass",
        description="Loop-model twist correlators, loop masses, and cross-checks.",
    )
    top.add_argument("--config", help="JSON configuration file")
    top.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted config override, e.g. --set model.n=0.5",
    )
    top.add_argument("--csv", help="write tabular output to this CSV file")
    sub = top.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate closed forms")
    ev.add_argument(
        "what",
        choices=["two-point", "four-point", "ising", "boundary", "w", "w-boundary", "q"],
    )
    ev.add_argument("--n", type=float)
    ev.add_argument("--a", type=float)
    ev.add_argument("--points", nargs="+", metavar="RE,IM")
    ev.add_argument("--pattern", choices=sorted(_PATTERNS), default="12|34")
    ev.add_argument("--eta", metavar="RE,IM")
    ev.add_argument("--eta-grid", metavar="LO:HI:N")
    ev.add_argument("--profile", action="store_true")
    ev.set_defaults(func=cmd_eval)

    vf = sub.add_parser("verify", help="finite-difference residual checks")
    vf.add_argument(
        "what", choices=["bpz", "w-pde", "w-real-pde", "boundary-bpz", "ope-c"]
    )
    vf.add_argument("--kappa", type=float)
    vf.add_argument("--h", type=float)
    vf.add_argument("--tol", type=float)
    vf.add_argument("--configs", type=int, default=10)
    vf.add_argument("--seed", type=int, default=2024)
    vf.add_argument("--z1", metavar="RE,IM")
    vf.add_argument("--z2", metavar="RE,IM")
    vf.set_defaults(func=cmd_verify)

    la = sub.add_parser("lattice", help="honeycomb enumeration oracles")
    la.add_argument("what", choices=["enumerate", "classes", "fit-2pt", "compare-w"])
    la.add_argument("--dom", metavar="ROWSxCOLS")
    la.add_argument("--lmax", type=int)
    la.add_argument("--n", type=float)
    la.add_argument("--marks", metavar="I,J;I,J;...")
    la.add_argument("--distances", metavar="D1,D2,...")
    la.add_argument("--half-plane", action="store_true")
    la.add_argument("--dump", metavar="PATH", help="polygon dump, one line each")
    la.set_defaults(func=cmd_lattice)

    sl = sub.add_parser("sle", help="Loewner-evolution drift probe")
    sl.add_argument("what", choices=["drift", "normalization"])
    sl.add_argument("--runs", type=int)
    sl.add_argument("--dt", type=float)
    sl.add_argument("--T", type=float)
    sl.add_argument("--seed", type=int)
    sl.add_argument("--kappa", type=float)
    sl.add_argument("--points", nargs="+", metavar="RE,IM")
    sl.add_argument("--z", metavar="RE,IM")
    sl.add_argument("--trace", metavar="PATH", help="per-step trace of run 0")
    sl.set_defaults(func=cmd_sle)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_PRECONDITION
    try:
        return args.func(args, cfg)
    except BudgetError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_BUDGET
    except TooManySwallowed as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_STATISTICS
    except StepTooLarge as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_PRECONDITION
    except (LoopmassError, ValueError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
