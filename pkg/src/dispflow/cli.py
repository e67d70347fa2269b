"""Command line interface.

    dispflow run <config>                  execute the run described by a config file
    dispflow check-identities [--trials N --seed S]
    dispflow convergence <config> --levels L

Exit codes: 0 success, 1 validation error, 2 numerical blow-up.  The
environment variable DISPFLOW_OUT overrides the config's output_dir.
"""
from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, parse_config
from .flow import BlowUpError, CFLViolation
from .harness import (COMPARE_HEADER, COMPLEX_HEADER, GEOMETRIC_HEADER,
                      check_identities, compare_frame, convergence_study,
                      emit_timeseries, output_dir, run_complex_mode,
                      run_geometric)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BLOWUP = 2


def _load_config(path: str):
    with open(path) as fh:
        return parse_config(fh.read())


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    out = output_dir(cfg)
    if cfg.mode == "geometric":
        _, rows = run_geometric(cfg)
        path = emit_timeseries(rows, GEOMETRIC_HEADER,
                               os.path.join(out, "geometric.csv"))
        print("wrote %s (%d samples)" % (path, len(rows)))
    elif cfg.mode == "complex":
        _, rows = run_complex_mode(cfg)
        path = emit_timeseries(rows, COMPLEX_HEADER,
                               os.path.join(out, "complex.csv"))
        print("wrote %s (%d samples)" % (path, len(rows)))
    elif cfg.mode == "compare-frame":
        report = compare_frame(cfg)
        path = emit_timeseries(report.rows, COMPARE_HEADER,
                               os.path.join(out, "compare.csv"))
        print("wrote %s" % path)
        print("max modulus gap %.3e | max E1 gap %.3e | max E2 gap %.3e"
              % (report.max_modulus_gap, report.max_e1_gap, report.max_e2_gap))
    elif cfg.mode == "check-identities":
        result = check_identities(seed=cfg.seed, n=cfg.n, verbose=True)
        return EXIT_OK if result["ok"] else EXIT_INVALID
    elif cfg.mode == "convergence":
        convergence_study(cfg, levels=3)
    else:  # pragma: no cover - validate() already rejects unknown modes
        raise ConfigError("unhandled mode %r" % cfg.mode)
    return EXIT_OK


def _cmd_check_identities(args) -> int:
    result = check_identities(trials=args.trials, seed=args.seed, verbose=True)
    return EXIT_OK if result["ok"] else EXIT_INVALID


def _cmd_convergence(args) -> int:
    cfg = _load_config(args.config)
    rows, orders = convergence_study(cfg, levels=args.levels)
    out = output_dir(cfg)
    path = emit_timeseries(rows, "N,dt,l2_drift,e1_drift",
                           os.path.join(out, "convergence.csv"))
    print("wrote %s" % path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispflow",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the run described by a config file")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_chk = sub.add_parser("check-identities",
                           help="verify the parameter-map identities on random draws")
    p_chk.add_argument("--trials", type=int, default=100)
    p_chk.add_argument("--seed", type=int, default=0)
    p_chk.set_defaults(func=_cmd_check_identities)

    p_conv = sub.add_parser("convergence", help="grid-refinement drift study")
    p_conv.add_argument("config")
    p_conv.add_argument("--levels", type=int, default=3)
    p_conv.set_defaults(func=_cmd_convergence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CFLViolation, ValueError, OSError) as err:
        print("error: %s" % err, file=sys.stderr)
        return EXIT_INVALID
    except BlowUpError as err:
        print("blow-up: %s" % err, file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
