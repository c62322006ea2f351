"""Command-line entry point for sweeps, figure presets, checks and spectra."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings

from . import output
from .cavity import NORMALIZATION_TAG, spectrum
from .config import ConfigError, load_config
from .sweep import NON_CONVERGENCE_FLAGS, PRESET_NAMES, figure_preset, resolve, resolved_cutoff, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGED = 2
EXIT_BOUND = 3


def _sweep_and_emit(config, fmt, out) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        resolved = resolve(config)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for note in resolved.warnings:
        if "clamped" in note:
            print(f"warning: {note}", file=sys.stderr)
    rows = run_sweep(config, resolved)
    if out is None and fmt == "csv" and config.output.csv:
        out = config.output.csv
    if out is None and fmt == "json" and config.output.json_path:
        out = config.output.json_path
    output.emit(rows, fmt, out, config)
    bad = sum(1 for r in rows if NON_CONVERGENCE_FLAGS.intersection(r.flags))
    if bad:
        print(f"error: {bad} of {len(rows)} rows did not converge (see flags)", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_run(args) -> int:
    return _sweep_and_emit(load_config(args.config), args.format, args.out)


def cmd_figure(args) -> int:
    return _sweep_and_emit(figure_preset(args.name), args.format, args.out)


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks(include_accelerated=not args.quick)
    for r in results:
        print(r.line())
    if any(not r.passed for r in results):
        return EXIT_BOUND
    return EXIT_OK


def cmd_modes(args) -> int:
    config = load_config(args.config)
    cavity = config.cavity_config()
    j, converged = resolved_cutoff(config)
    spec = spectrum(min(j, args.show) if args.show else j, cavity)
    print(f"boundary     {cavity.boundary}")
    print(f"length       {cavity.length!r}")
    print(f"gap          {config.gap()!r}")
    print(f"norm         {NORMALIZATION_TAG}")
    status = "converged" if converged else "NOT converged at the mode cap"
    print(f"cutoff       {j} ({status}, tail tolerance {cavity.tail_tolerance:g})")
    print("j,k,omega,norm")
    for idx, (k, w, n) in enumerate(zip(spec.wavenumber, spec.omega, spec.norm), start=1):
        print(f"{idx},{float(k)!r},{float(w)!r},{float(n)!r}")
    return EXIT_OK if converged else EXIT_NONCONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="landauer-qft", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="sweep a configuration file")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("figure", help="sweep a figure preset")
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--quick", action="store_true", help="skip the accelerated preset")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("modes", help="print the resolved spectrum and cutoff")
    p.add_argument("--config", required=True)
    p.add_argument("--show", type=int, default=0, help="print only the first N modes")
    p.set_defaults(func=cmd_modes)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except output.OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
