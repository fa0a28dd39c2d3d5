"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical/domain error,
4 I/O error.
"""

import argparse
import math
import sys
from dataclasses import replace

from . import __version__
from .harness import (
    ConfigError,
    config_from_preset,
    emit,
    load_config,
    run_sweep,
    theory_table,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eepnlab",
        description="EEPN Monte Carlo sweeps and closed-form BER-floor tables",
    )
    parser.add_argument("--version", action="version", version=f"eepnlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a BER-vs-OSNR sweep")
    _add_config_args(run_p)
    run_p.add_argument("--out", default="results.csv", help="output file path")
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.add_argument("--jobs", type=int, default=None, help="override parallelism")
    run_p.add_argument("--seed", type=int, default=None, help="override master seed")
    run_p.add_argument("--quiet", action="store_true", help="no per-point progress lines")

    theory_p = sub.add_parser("theory", help="print the analytic floor table")
    _add_config_args(theory_p)
    theory_p.add_argument("--out", default=None, help="optionally also write csv/json")
    theory_p.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("selftest", help="run the invariant suite")
    return parser


def _add_config_args(p: argparse.ArgumentParser):
    p.add_argument("--config", default=None, help="JSON sweep configuration file")
    p.add_argument("--preset", choices=("fig4", "fig5"), default=None)


def _resolve_config(args):
    if args.config is None and args.preset is None:
        raise ConfigError("provide --config FILE or --preset fig4|fig5")
    cfg = config_from_preset(args.preset) if args.config is None else load_config(args.config)
    if getattr(args, "jobs", None) is not None:
        cfg = replace(cfg, parallelism=args.jobs)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return cfg


def _cmd_run(args) -> int:
    cfg = _resolve_config(args)

    def progress(rec):
        osnr = "inf" if math.isinf(rec.osnr_db) else f"{rec.osnr_db:g}"
        print(
            f"{rec.scenario:>12s} osnr={osnr:>5s} dB  ber={rec.ber:.3e} "
            f"({rec.n_errors}/{rec.n_bits})  floor_theory={rec.ber_floor_theory:.3e}"
        )

    results = run_sweep(cfg, progress=None if args.quiet else progress)
    emit(results, args.out, args.format)
    print(f"wrote {len(results.records)} records to {args.out} (config {results.config_hash})")
    return 0


def _cmd_theory(args) -> int:
    cfg = _resolve_config(args)
    results = theory_table(cfg)
    ts = cfg.base.clock.symbol_period_Ts
    print(f"{'scenario':>12s} {'df_tx':>9s} {'df_lo':>9s} {'eepn_lw':>12s} {'eff_lw':>12s} {'sigma2_eff':>11s} {'ber_floor':>10s}")
    for r in results.records:
        sigma2 = 2.0 * math.pi * r.eff_lw_hz * ts
        print(
            f"{r.scenario:>12s} {r.df_tx_hz/1e6:>7.2f}MHz {r.df_lo_hz/1e6:>7.2f}MHz "
            f"{r.eepn_lw_hz/1e6:>9.2f}MHz {r.eff_lw_hz/1e6:>9.2f}MHz "
            f"{sigma2:>11.4e} {r.ber_floor_theory:>10.3e}"
        )
    if args.out:
        emit(results, args.out, args.format)
        print(f"wrote theory table to {args.out}")
    return 0


def _cmd_selftest(_args) -> int:
    from .selftest import run_selftest

    return 0 if run_selftest() else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "theory": _cmd_theory, "selftest": _cmd_selftest}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical/domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
