"""Command-line interface: apply procedures to P-value files, simulate data,
run experiments, compute oracle reports, and emit figure data.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import asymptotics, harness, models
from .core import (
    InvalidAlphaError,
    PValueFileError,
    bh_procedure,
    read_pvalue_file,
    scan_procedure,
    write_pvalue_file,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(message)


def _positive_int(flag: str, value: int) -> int:
    if value < 1:
        raise UsageError(f"{flag} must be a positive integer, got {value}")
    return value


def _open_unit(flag: str, value: float) -> float:
    if not (0.0 < value < 1.0):
        raise UsageError(f"{flag} must lie strictly inside (0, 1), got {value}")
    return value


def _model_from_args(args) -> models.MixtureModel:
    if args.mu < 0:
        raise UsageError(f"--mu must be nonnegative, got {args.mu}")
    _open_unit("--eps", args.eps)
    dist = models.normal() if args.model == "normal" else models.cauchy()
    return models.MixtureModel(null_dist=dist, mu=args.mu, eps=args.eps)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, choices=("normal", "cauchy"))
    parser.add_argument("--mu", required=True, type=float, help="effect size")
    parser.add_argument("--eps", required=True, type=float, help="alternative fraction")


def build_parser() -> _Parser:
    parser = _Parser(prog="scanfdr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, blurb in (("bh", "step-up threshold procedure"), ("scan", "interval scan procedure")):
        p = sub.add_parser(name, help=blurb)
        p.add_argument("--alpha", type=float, default=0.10, help="FDR level (default 0.10)")
        p.add_argument("--input", required=True, help="P-value file, one record per line")

    p = sub.add_parser("simulate", help="write a labeled P-value file from a mixture model")
    _add_model_flags(p)
    p.add_argument("--n", required=True, type=int, help="sample size")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--output", required=True)

    p = sub.add_parser("experiment", help="replicated Monte Carlo runs; writes records.csv and summary.csv")
    _add_model_flags(p)
    p.add_argument("--alpha", type=float, default=0.10)
    p.add_argument("--n-grid", required=True, help="comma-separated sample sizes, e.g. 2000,4000")
    p.add_argument("--reps", required=True, type=int)
    p.add_argument("--seed", required=True, type=int, help="master seed")
    p.add_argument("--methods", default="bh,scan", help="comma-separated subset of bh,scan")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--output", required=True, help="output directory for the two CSV files")

    p = sub.add_parser("oracle", help="asymptotic quantities of a model as JSON")
    _add_model_flags(p)
    p.add_argument("--alpha", type=float, default=0.10)

    p = sub.add_parser("gcurve", help="CSV of the alternative P-value CDF and the line beta*t")
    _add_model_flags(p)
    p.add_argument("--alpha", type=float, default=0.10)
    p.add_argument("--points", type=int, default=1001)
    p.add_argument("--output", required=True)

    return parser


def _cmd_procedure(args) -> int:
    _open_unit("--alpha", args.alpha)
    sample = read_pvalue_file(args.input)
    proc = bh_procedure if args.command == "bh" else scan_procedure
    outcome = proc(sample, args.alpha)
    print(json.dumps(outcome.to_dict(), indent=2))
    return 0


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    _positive_int("--n", args.n)
    labeled = models.sample_labeled(model, args.n, args.seed)
    write_pvalue_file(args.output, labeled.sample)
    return 0


def _cmd_experiment(args) -> int:
    model = _model_from_args(args)
    _open_unit("--alpha", args.alpha)
    _positive_int("--reps", args.reps)
    _positive_int("--workers", args.workers)
    try:
        n_grid = tuple(int(tok) for tok in args.n_grid.split(",") if tok)
        config = harness.ExperimentConfig(
            model=model,
            n_grid=n_grid,
            replications=args.reps,
            alpha=args.alpha,
            master_seed=args.seed,
            methods=tuple(tok for tok in args.methods.split(",") if tok),
        )
    except ValueError as exc:
        raise UsageError(f"--n-grid/--methods: {exc}") from None
    records = harness.run_experiment(config, workers=args.workers)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    harness.write_records(outdir / "records.csv", records)
    harness.write_summary(outdir / "summary.csv", harness.summarize(records))
    return 0


def _cmd_oracle(args) -> int:
    model = _model_from_args(args)
    _open_unit("--alpha", args.alpha)
    report = asymptotics.oracle_report(model, args.alpha)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_gcurve(args) -> int:
    model = _model_from_args(args)
    _open_unit("--alpha", args.alpha)
    if args.points < 2:
        raise UsageError(f"--points must be at least 2, got {args.points}")
    beta = asymptotics.beta_constant(args.alpha, model.pi0)
    harness.write_gcurve(args.output, harness.gcurve(model, beta, args.points))
    return 0


_COMMANDS = {
    "bh": _cmd_procedure,
    "scan": _cmd_procedure,
    "simulate": _cmd_simulate,
    "experiment": _cmd_experiment,
    "oracle": _cmd_oracle,
    "gcurve": _cmd_gcurve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"scanfdr: usage error: {exc}", file=sys.stderr)
        return 1
    except InvalidAlphaError as exc:
        print(f"scanfdr: usage error: --alpha: {exc}", file=sys.stderr)
        return 1
    except (PValueFileError, harness.MalformedCSVError) as exc:
        print(f"scanfdr: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"scanfdr: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
