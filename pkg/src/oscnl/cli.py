"""Command-line entry point: ``oscnl run|compare|list|coil``.

Exit codes: 0 success, 2 configuration error, 3 tolerance failure,
4 numeric failure. ``OSCNL_MAX_WORKERS`` caps the number of scenarios run
in parallel.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .coil import CoilParams, coil_table
from .errors import (
    ConfigError,
    GridTooNarrowError,
    IntegrationError,
    InvalidDimensionError,
    LabelError,
    PhysicalityError,
    SchemaError,
    TruncationError,
)
from .scenarios import ScenarioConfig, compare_runs, list_scenarios, parse_overrides, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_NUMERIC = 4

WORKERS_ENV = "OSCNL_MAX_WORKERS"

_NUMERIC_ERRORS = (TruncationError, IntegrationError, PhysicalityError, GridTooNarrowError)
_CONFIG_ERRORS = (ConfigError, SchemaError, InvalidDimensionError, LabelError, OSError)

log = logging.getLogger("oscnl")


def max_workers(requested: int | None = None) -> int:
    """Worker count: ``requested`` (default: CPU count) capped by ``OSCNL_MAX_WORKERS``."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from None
    return max(1, n)


def _run_one(cfg: ScenarioConfig) -> str:
    ds = run_scenario(cfg)
    return ds.paths.get("table", "")


def _cmd_run(args) -> int:
    overrides = parse_overrides(args.set)
    configs = []
    for sid in args.scenario:
        if args.config:
            cfg = ScenarioConfig.from_file(args.config, sid, overrides, args.out)
        else:
            cfg = ScenarioConfig(sid, dict(overrides), args.out, args.seed)
        cfg.resolve()  # fail on bad overrides before any work starts
        configs.append(cfg)
    workers = min(len(configs), max_workers(args.jobs))
    if workers == 1:
        paths = [_run_one(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(_run_one, configs))
    for cfg, path in zip(configs, paths):
        print(f"{cfg.scenario}: {path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    report = compare_runs(args.a, args.b, args.tol)
    width = max(len(k) for k in report["max_abs_diff"]) if report["max_abs_diff"] else 0
    for name, diff in report["max_abs_diff"].items():
        print(f"{name:<{width}}  {diff:.3e}")
    print(f"worst {report['worst']:.3e}")
    if report["passed"] is False:
        print(f"FAIL: exceeds tolerance {args.tol:g}")
        return EXIT_TOLERANCE
    return EXIT_OK


def _cmd_list(args) -> int:
    entries = list_scenarios()
    width = max(len(sid) for sid, _ in entries)
    for sid, caption in entries:
        print(f"{sid:<{width}}  {caption}")
    return EXIT_OK


def _cmd_coil(args) -> int:
    table = coil_table(CoilParams(R=args.R, I=args.I, N_mag=args.Nmag, a0=args.a0,
                                  n_turns=args.n_turns))
    if args.json:
        print(json.dumps(table, indent=2))
        return EXIT_OK
    rows = [("B(0)", f"{table['B0_T']:.6g} T"),
            ("quartic coefficient", f"{table['quartic_coefficient']:.6f} (144/125 = 1.152)"),
            ("beta", f"{table['beta_Hz']:.4g} Hz")]
    for k, v in rows:
        print(f"{k:<20} {v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscnl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more scenarios")
    run.add_argument("scenario", nargs="+")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", default=[],
                     help="override one parameter; repeatable, wins over --config")
    run.add_argument("--out", default="runs", help="output root; each scenario gets OUT/<id>/")
    run.add_argument("--config", help="YAML file with scenario, params, out, seed")
    run.add_argument("--seed", type=int, default=0, help="recorded in the metadata")
    run.add_argument("--jobs", type=int, default=None,
                     help="parallel scenarios, capped by $OSCNL_MAX_WORKERS")
    run.set_defaults(func=_cmd_run)

    cmp_ = sub.add_parser("compare", help="max-abs difference between two datasets")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--tol", type=float, default=None, help="exit 3 if any column differs by more")
    cmp_.set_defaults(func=_cmd_compare)

    lst = sub.add_parser("list", help="list scenarios")
    lst.set_defaults(func=_cmd_list)

    defaults = CoilParams()
    coil = sub.add_parser("coil", help="Helmholtz-coil nonlinearity estimate")
    coil.add_argument("--R", type=float, default=defaults.R, help="coil radius (m)")
    coil.add_argument("--I", type=float, default=defaults.I, help="current (A)")
    coil.add_argument("--Nmag", type=float, default=defaults.N_mag, help="atoms in the magnet")
    coil.add_argument("--a0", type=float, default=defaults.a0, help="zero-point amplitude (m)")
    coil.add_argument("--n-turns", type=int, default=defaults.n_turns, help="turns per loop")
    coil.add_argument("--json", action="store_true", help="print the table as JSON")
    coil.set_defaults(func=_cmd_coil)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (*_CONFIG_ERRORS, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
