"""Command line entry point: ``burgers-pod run`` and ``burgers-pod run-all``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .fdsolver import BlowUpError
from .harness import (
    ConfigError,
    case_spec,
    load_config,
    parse_modes,
    run_all,
    run_case,
    with_overrides,
)
from .rom import INTEGRATORS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3

log = logging.getLogger("burgers_pod")


def _print_report(report):
    print(f"case {report.case_id}: dt={report.dt:.6g}  t_sim={report.t_sim:.4g}s")
    for rec in report.records:
        if rec.failed:
            print(f"  i={rec.i:<3d} {rec.status}")
            continue
        print(
            f"  i={rec.i:<3d} max|err|={rec.max_pct_error:9.4g}%  "
            f"mean|err|={rec.mean_pct_error:9.4g}%  energy={rec.captured_energy:.6f}  "
            f"t_rom={rec.t_rom:.4g}s  t_ratio={rec.t_ratio:.3g}"
        )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="burgers-pod",
        description="Finite-difference Burgers solver with a POD-Galerkin reduced model.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one preset case or a config file")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--case", type=int, help="preset case 1-6")
    src.add_argument("--config", help="flat key=value config file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--modes", help="comma separated mode counts, e.g. 1,5")
    run.add_argument("--stride", type=int, help="save every k-th time step")
    run.add_argument("--integrator", choices=INTEGRATORS, help="reduced-model ODE integrator")
    run.add_argument("--repeats", type=int, default=3, help="timing repetitions (median)")

    run_all_p = sub.add_parser("run-all", help="run all six presets")
    run_all_p.add_argument("--out", required=True, help="output directory")
    run_all_p.add_argument("--repeats", type=int, default=3)
    return parser


def _cmd_run(args):
    spec = load_config(args.config) if args.config else case_spec(args.case)
    modes = parse_modes(args.modes) if args.modes else None
    if args.stride is not None and args.stride < 1:
        raise ConfigError("--stride must be >= 1")
    try:
        spec = with_overrides(spec, modes=modes, stride=args.stride)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.integrator:
        spec = replace(spec, rom_method=args.integrator)
    if spec.rom_method not in INTEGRATORS:
        raise ConfigError(f"integrator must be one of {INTEGRATORS}")
    report = run_case(spec, args.out, repeats=args.repeats)
    _print_report(report)
    return EXIT_BLOWUP if any(r.status == "blow-up" for r in report.records) else EXIT_OK


def _cmd_run_all(args):
    reports = run_all(args.out, repeats=args.repeats)
    for rep in reports:
        _print_report(rep)
    return EXIT_BLOWUP if any(r.status == "blow-up" for rep in reports for r in rep.records) else EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_run_all(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
