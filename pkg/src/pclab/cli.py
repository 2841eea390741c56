"""Command-line interface: ``pclab <subcommand> [options]``.

Exit codes: 0 success, 2 validation error, 3 invariant violation,
4 construction unavailable (g-connection, exhausted budget or boundary hit),
1 any other library error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .attractors import attractor_set, direct_attractor_oracle
from .backend import get_backend
from .ergodic import orbit_density_gap, orbit_density_gaps, ulam_model
from .errors import InvariantViolation, PCLabError, QuasiPartitionError, ValidationError
from .experiments import PRESET_NAMES, CampaignConfig, gconnection_census, preset, run_campaign
from .maps import PiecewiseContraction, Side, build_inverse, gap_set
from .orbits import coded_orbit, detect_g_connection, itinerary
from .quasipartition import build_quasi_partition, gap_hitting_time, verify_quasi_partition

EXIT_OK, EXIT_ERROR, EXIT_VALIDATION, EXIT_INVARIANT, EXIT_UNAVAILABLE = 0, 1, 2, 3, 4


# -- argument plumbing -------------------------------------------------------------


def _common(p):
    p.add_argument("--backend", choices=("rational", "float"), help="arithmetic backend (default depends on the system)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")


def _map_args(p, needs_cuts=True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--system", help="system file (JSON)")
    src.add_argument("--preset", help=f"named system: {', '.join(PRESET_NAMES)}")
    p.add_argument("--eps", default="1/10", help="shift for example-4.1-f2-eps")
    if needs_cuts:
        p.add_argument("--cuts", help="comma-separated cuts, e.g. 3/10 or 0.2,0.7")
        p.add_argument("--sides", help="left/right for every cut, or a comma-separated list")


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()] if text else None


def _system(args):
    if args.preset:
        return preset(args.preset, args.backend, args.eps)
    return None


def build_map(args) -> PiecewiseContraction:
    cuts = _split(getattr(args, "cuts", None))
    sides = _split(getattr(args, "sides", None))
    if sides is not None:
        sides = [Side.parse(s) for s in sides]
        if len(sides) == 1:
            sides = sides[0]
    if args.preset:
        ps = _system(args)
        b = ps.system.backend
        return ps.contraction(tuple(b(c) for c in cuts) if cuts else None, sides)
    data = io.read_json(args.system)
    return io.contraction_from_dict(data, args.backend, cuts, sides)


def build_branch_system(args):
    if args.preset:
        return _system(args).system
    return io.load_system(args.system, args.backend)


def _emit(args, payload):
    io.emit(payload, args.fmt, args.out)


def _figure_path(args, suffix=""):
    if not args.plot:
        return None
    out = Path(args.out)
    return out.with_name(out.stem + suffix + ".png")


# -- subcommands ------------------------------------------------------------------


def cmd_validate(args):
    system = io.load_system(args.file, args.backend)
    b = system.backend
    rec = io.system_to_dict(system)
    rec["n"] = system.n
    rec["kappa"] = b.format(system.kappa)
    if not system.general:
        rec["images"] = [iv.to_record(b) for iv in system.images]
        rec["gaps"] = [iv.to_record(b) for iv in system.gaps]
    _emit(args, rec if args.fmt == "json" else [{k: v for k, v in rec.items()}])
    return EXIT_OK


def cmd_orbit(args):
    f = build_map(args)
    pts, digits = coded_orbit(f, f.backend(args.x), args.steps)
    _emit(args, io.orbit_records(pts, digits, f.backend))
    return EXIT_OK


def cmd_itinerary(args):
    f = build_map(args)
    word = itinerary(f, args.x, args.steps, tol=args.tol)
    rec = {"x": f.backend.format(f.backend(args.x)), "steps": args.steps, **io.itinerary_record(word)}
    _emit(args, rec if args.fmt == "json" else [rec])
    return EXIT_OK


def cmd_gaps(args):
    f = build_map(args)
    g = build_inverse(f.system)
    b = f.backend
    G = gap_set(f)
    rows = []
    for i in range(1, f.n):
        h = gap_hitting_time(f, g, i, args.budget, G)
        rows.append({"cut": h.cut, "q": h.q, "verdict": h.verdict.value, "trail": [b.format(x) for x in h.trail]})
    _emit(args, rows if args.fmt == "csv" else {"G": G.to_records(), "hits": rows})
    return EXIT_OK


def cmd_qpartition(args):
    f = build_map(args)
    qp = build_quasi_partition(f, budget=args.budget, k_max=args.k_max)
    report = verify_quasi_partition(f, qp)
    rec = io.qp_record(qp)
    rec["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks]
    if args.fmt == "csv":
        _emit(args, rec["components"])
    else:
        _emit(args, rec)
    if not report.ok:
        print(str(report), file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_attractors(args):
    f = build_map(args)
    rng = np.random.default_rng(args.seed) if args.random else None
    report = attractor_set(f, args.samples, rng, args.tol, args.max_iter, k_max=args.k_max)
    rec = io.attractor_record(report, f.backend)
    if args.oracle is not None:
        rec["oracle"] = io.orbit_record(direct_attractor_oracle(f, f.backend(args.oracle)), f.backend)
    if args.fmt == "csv":
        _emit(args, rec["basin_histogram"])
    else:
        _emit(args, rec)
    fig = _figure_path(args, "_basins")
    if fig:
        from .plotting import plot_basins

        plot_basins(rec["basin_histogram"], fig)
    return EXIT_OK


def cmd_gconnect(args):
    if args.trials:
        system = build_branch_system(args)
        hits = gconnection_census(system, args.trials, args.seed, args.k_max)
        b = system.backend
        rows = [
            {"cuts": [b.format(c) for c in p.cuts], "i": c.i, "j": c.j, "k": c.k} for p, c in hits
        ]
        rec = {"samples": args.trials, "k_max": args.k_max, "connections": len(hits), "rate": len(hits) / args.trials, "hits": rows}
        _emit(args, rec if args.fmt == "json" else rows)
        return EXIT_OK
    f = build_map(args)
    conn = detect_g_connection(f, build_inverse(f.system), args.k_max)
    rec = {"k_max": args.k_max, "connection": None if conn is None else conn._asdict()}
    _emit(args, rec if args.fmt == "json" else [conn._asdict() if conn else {"i": None, "j": None, "k": None}])
    return EXIT_OK


def cmd_ulam(args):
    g = build_inverse(build_branch_system(args))
    model = ulam_model(g, args.bins, args.tol)
    rows = model.to_records()
    if args.fmt == "csv":
        _emit(args, rows)
    else:
        _emit(args, {"bins": model.bins, "residual": model.residual, "sweeps": model.sweeps, "density": rows})
    fig = _figure_path(args, "_density")
    if fig:
        from .plotting import plot_density

        plot_density(rows, fig)
    return EXIT_OK


def cmd_density_gap(args):
    g = build_inverse(build_branch_system(args))
    if args.x is not None:
        rows = [{"seed": args.x, "M": args.steps, "max_gap": orbit_density_gap(g, get_backend("float")(args.x), args.steps)}]
    else:
        seeds = np.random.default_rng(args.seed).random(args.seeds)
        gaps = orbit_density_gaps(g, seeds, args.steps)
        rows = [{"seed": float(s), "M": args.steps, "max_gap": float(v)} for s, v in zip(seeds, gaps)]
    _emit(args, rows)
    return EXIT_OK


def cmd_campaign(args):
    data = io.read_json(args.config)
    if args.backend:
        data["backend"] = args.backend
    if args.seed_given:
        data["seed"] = args.seed
    if args.records:
        data["records_path"] = args.records
    if args.workers:
        data["workers"] = args.workers
    config = CampaignConfig.from_dict(data)
    summary, records = run_campaign(config)
    rec = summary.to_record()
    _emit(args, rec if args.fmt == "json" else [rec])
    fig = _figure_path(args, "_sweep")
    if fig:
        from .plotting import plot_sweep

        plot_sweep([r.to_record() for r in records], fig)
    if summary.violations:
        print(f"invariant violations: {summary.violations}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_presets(args):
    rows = []
    for name in PRESET_NAMES:
        ps = preset(name, args.backend) if name != "S3" or args.backend != "rational" else None
        if ps is None:
            continue
        b = ps.system.backend
        rows.append({
            "name": name,
            "backend": b.name,
            "general_mode": ps.system.general,
            "branches": io.system_to_dict(ps.system)["branches"],
            "cuts": None if ps.cuts is None else [b.format(c) for c in ps.cuts],
            "sides": None if ps.sides is None else [s.value for s in ps.sides],
            "description": ps.description,
        })
    _emit(args, rows)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pclab", description="Dynamics of injective piecewise contractions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file")
    p.add_argument("file")
    _common(p)
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (
        ("orbit", cmd_orbit, "forward orbit with branch digits"),
        ("itinerary", cmd_itinerary, "itinerary with eventual-period classification"),
    ):
        p = sub.add_parser(name, help=helptext)
        _map_args(p)
        p.add_argument("--x", required=True, help="initial point")
        p.add_argument("--steps", "-N", type=int, default=50)
        if name == "itinerary":
            p.add_argument("--tol", type=float, default=1e-9)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("gaps", help="gap set and gap-hitting times of the cuts")
    _map_args(p)
    p.add_argument("--budget", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("qpartition", help="build and verify the invariant quasi-partition")
    _map_args(p)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--k-max", type=int, default=200)
    _common(p)
    p.set_defaults(func=cmd_qpartition)

    p = sub.add_parser("attractors", help="periodic orbits and sampled basins")
    _map_args(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--random", action="store_true", help="draw sample points instead of a grid")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--k-max", type=int, default=200)
    p.add_argument("--oracle", help="also run the direct oracle from this point")
    _common(p)
    p.set_defaults(func=cmd_attractors)

    p = sub.add_parser("gconnect", help="g-connection scan for one map, or a census with --trials")
    _map_args(p)
    p.add_argument("--k-max", type=int, default=200)
    p.add_argument("--trials", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_gconnect)

    p = sub.add_parser("ulam", help="Ulam stationary density of g")
    _map_args(p, needs_cuts=False)
    p.add_argument("--bins", "-B", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-10)
    _common(p)
    p.set_defaults(func=cmd_ulam)

    p = sub.add_parser("density-gap", help="largest gap left by a g-orbit")
    _map_args(p, needs_cuts=False)
    p.add_argument("--x", type=str, default=None, help="single seed; otherwise --seeds random seeds")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--steps", "-M", type=int, default=100_000)
    _common(p)
    p.set_defaults(func=cmd_density_gap)

    p = sub.add_parser("campaign", help="run a sampling campaign from a config file")
    p.add_argument("config")
    p.add_argument("--records", help="per-trial JSON-lines file")
    p.add_argument("--workers", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("presets", help="list named systems")
    _common(p)
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    args.seed_given = "--seed" in argv or any(a.startswith("--seed=") for a in argv)
    try:
        if args.plot and not args.out:
            raise ValidationError("--plot needs --out; the figure is written next to it")
        if getattr(args, "steps", 1) < 1:
            raise ValidationError("--steps must be positive")
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except QuasiPartitionError as exc:
        print(f"{exc.reason}: {exc}", file=sys.stderr)
        return EXIT_UNAVAILABLE
    except (PCLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
