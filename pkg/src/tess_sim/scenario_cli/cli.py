"""``tess-sim`` command line.

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 comparison finished with at least one failed case.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from ..errors import InvalidInputError, NumericFailureError, SolverDivergenceError, TessSimError
from ..thermal_network import EnclosureGeometry, compare_geometries, equal_volume_cube
from ..thermo_props import BUILTIN_SORBENTS, export_storage_csv, storage_table
from .budget import validate_budget
from .build import build_enclosure, build_environment, dissipation_watts
from .config import load_config_file
from .runner import run_comparison, run_scenario, sweep, sweep_table, write_run

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_PARTIAL = 0, 1, 2, 3


def _cmd_run(args) -> int:
    cfg = load_config_file(args.config)
    result = run_scenario(cfg)
    if args.out:
        csv_path, summary_path = write_run(result, args.out, Path(args.config).stem)
        print(f"wrote {csv_path} and {summary_path}")
    sys.stdout.write(result.summary.to_text())
    return EXIT_OK


def _cmd_compare(args) -> int:
    labels = args.labels or [Path(p).stem for p in args.configs]
    if len(labels) != len(args.configs):
        raise InvalidInputError(f"{len(labels)} labels given for {len(args.configs)} configs")
    cases = [(label, load_config_file(p)) for label, p in zip(labels, args.configs)]
    report = run_comparison(cases, workers=args.workers)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.csv").write_text(report.to_csv())
        (out / "comparison.txt").write_text(report.to_text())
    sys.stdout.write(report.to_text())
    return EXIT_PARTIAL if report.partial else EXIT_OK


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInputError(f"--values must be comma-separated numbers, got {text!r}") from None


def _cmd_sweep(args) -> int:
    cfg = load_config_file(args.config)
    results = sweep(cfg, args.param, _parse_values(args.values), workers=args.workers)
    table = sweep_table(args.param, results)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(table)
    sys.stdout.write(table)
    return EXIT_OK


def _cmd_sorbents(args) -> int:
    specs = list(BUILTIN_SORBENTS.values())
    if args.export is not None:
        text = export_storage_csv(specs)
        if args.export == "-":
            sys.stdout.write(text)
        else:
            Path(args.export).write_text(text)
            print(f"wrote {args.export}")
        return EXIT_OK
    print(f"{'sorbent':<10}{'x':>3}{'dHr_kJ_mol':>12}{'Wh_kg':>10}")
    for row in storage_table(specs):
        print(f"{row['name']:<10}{row['x']:>3}{row['dHr_kJ_mol']:>12.2f}{row['energy_Wh_kg']:>10.1f}")
    return EXIT_OK


def _equal_volume_sphere(cube: EnclosureGeometry) -> EnclosureGeometry:
    radius = (3.0 * cube.enclosed_volume / (4.0 * math.pi)) ** (1.0 / 3.0)
    return EnclosureGeometry("sphere", radius, cube.wall_thickness, cube.k_wall, cube.emissivity)


def _cmd_geometry(args) -> int:
    cfg = load_config_file(args.config)
    own = build_enclosure(cfg)
    other = equal_volume_cube(own) if own.shape == "sphere" else _equal_volume_sphere(own)
    sphere, cube = (own, other) if own.shape == "sphere" else (other, own)
    boundary = build_environment(cfg).bounds()[0]
    q = dissipation_watts(cfg) if args.dissipation is None else args.dissipation
    print(compare_geometries(sphere, cube, q, boundary).to_text())
    return EXIT_OK


def _cmd_budget(args) -> int:
    cfg = load_config_file(args.config)
    print(validate_budget(cfg.budget).to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tess-sim", description="Thermal simulation of a TESS-heated sensor module.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario")
    p.add_argument("config")
    p.add_argument("--out", help="directory for <name>.csv and <name>_summary.txt")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="run labelled scenarios and tabulate per-sensor results")
    p.add_argument("configs", nargs="+")
    p.add_argument("--labels", nargs="+")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sweep", help="vary one numeric parameter")
    p.add_argument("config")
    p.add_argument("--param", required=True, help="section.key, e.g. tess.salt_mass_g")
    p.add_argument("--values", required=True, help="comma-separated, e.g. 25,50,100")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sorbents", help="storage-density table of the built-in sorbents")
    p.add_argument("--export", nargs="?", const="-", metavar="CSV", help="write CSV (stdout when no path)")
    p.set_defaults(func=_cmd_sorbents)

    p = sub.add_parser("geometry", help="sphere versus equal-volume cube steady state")
    p.add_argument("config")
    p.add_argument("--dissipation", type=float, help="W; defaults to the scenario's dissipation")
    p.set_defaults(func=_cmd_geometry)

    p = sub.add_parser("budget", help="mass and power budget consistency report")
    p.add_argument("config")
    p.set_defaults(func=_cmd_budget)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SolverDivergenceError, NumericFailureError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (TessSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
