"""Monte Carlo experiment runner: replicated sampling, per-replication error
proportions, aggregation with standard errors, and CSV persistence."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import RejectionOutcome, bh_procedure, confusion, fdp, fnp, scan_procedure
from .models import MixtureModel, alt_pvalue_cdf, sample_labeled

RECORDS_HEADER = ["n", "rep", "method", "U", "V", "T", "S", "sigma", "tau", "fdp", "fnp", "elapsed_ms"]
SUMMARY_HEADER = ["n", "method", "mean_fdp", "se_fdp", "mean_fnp", "se_fnp", "reps"]
GCURVE_HEADER = ["t", "G", "beta_t"]

_PROCEDURES: dict[str, Callable] = {"bh": bh_procedure, "scan": scan_procedure}


class MalformedCSVError(ValueError):
    """CSV fails the schema or value rules; message carries file and line."""


def derive_seed(master_seed: int, n: int, rep: int) -> int:
    """64-bit replication seed: first word of SeedSequence([master_seed, n, rep]).

    Replications get independent streams regardless of execution order, and the
    mapping is stable across runs of this implementation.
    """
    ss = np.random.SeedSequence([int(master_seed), int(n), int(rep)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    model: MixtureModel
    n_grid: tuple[int, ...]
    replications: int
    alpha: float
    master_seed: int
    methods: tuple[str, ...] = ("bh", "scan")

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid must be nonempty with all sizes >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must be in (0, 1)")
        unknown = set(self.methods) - _PROCEDURES.keys()
        if not self.methods or unknown:
            raise ValueError(f"methods must be a nonempty subset of {sorted(_PROCEDURES)}")


@dataclass(frozen=True)
class RepRecord:
    """One (sample size, replication, method) result.

    elapsed_ms is wall-clock and excluded from equality: two runs of the same
    config compare equal record-by-record.
    """

    n: int
    rep: int
    method: str
    U: int
    V: int
    T: int
    S: int
    sigma: float
    tau: float
    fdp: float
    fnp: float
    elapsed_ms: float = field(compare=False)


@dataclass(frozen=True)
class SummaryRow:
    n: int
    method: str
    mean_fdp: float
    se_fdp: float
    mean_fnp: float
    se_fnp: float
    reps: int


def _run_replication(args: tuple[ExperimentConfig, int, int]) -> list[RepRecord]:
    config, n, rep = args
    labeled = sample_labeled(config.model, n, derive_seed(config.master_seed, n, rep))
    records = []
    for method in config.methods:
        start = time.perf_counter()
        outcome: RejectionOutcome = _PROCEDURES[method](labeled.sample, config.alpha)
        elapsed_ms = (time.perf_counter() - start) * 1e3
        table = confusion(outcome, labeled.sample)
        records.append(
            RepRecord(
                n=n,
                rep=rep,
                method=method,
                U=table.U,
                V=table.V,
                T=table.T,
                S=table.S,
                sigma=outcome.sigma,
                tau=outcome.tau,
                fdp=fdp(table),
                fnp=fnp(table),
                elapsed_ms=elapsed_ms,
            )
        )
    return records


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[RepRecord]:
    """Run every (n, replication) cell and return records ordered by
    (n_grid order, replication, configured method order); the worker count
    changes only the wall-clock, never the records."""
    tasks = [(config, n, rep) for n in config.n_grid for rep in range(config.replications)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_replication, tasks, chunksize=8))
    else:
        chunks = [_run_replication(task) for task in tasks]
    return [record for chunk in chunks for record in chunk]


def summarize(records: Sequence[RepRecord]) -> list[SummaryRow]:
    """Group by (n, method) in first-seen order; se = sample std / sqrt(reps)."""
    if not records:
        raise ValueError("cannot summarize an empty record list")
    groups: dict[tuple[int, str], list[RepRecord]] = {}
    for record in records:
        groups.setdefault((record.n, record.method), []).append(record)
    rows = []
    for (n, method), group in groups.items():
        fdps = np.array([r.fdp for r in group])
        fnps = np.array([r.fnp for r in group])
        reps = len(group)
        se = lambda x: float(x.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
        rows.append(
            SummaryRow(
                n=n,
                method=method,
                mean_fdp=float(fdps.mean()),
                se_fdp=se(fdps),
                mean_fnp=float(fnps.mean()),
                se_fnp=se(fnps),
                reps=reps,
            )
        )
    return rows


def _format(value) -> str:
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} not permitted in CSV output")
        return repr(value)
    return str(value)


def _parse_float(token: str, path, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedCSVError(f"{path}:{lineno}: not a number: {token!r}") from None
    if not math.isfinite(value):
        raise MalformedCSVError(f"{path}:{lineno}: non-finite value {token!r} not permitted")
    return value


def _parse_int(token: str, path, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedCSVError(f"{path}:{lineno}: not an integer: {token!r}") from None


def write_records(path: str | Path, records: Iterable[RepRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORDS_HEADER)
        for r in records:
            writer.writerow(
                [_format(v) for v in (r.n, r.rep, r.method, r.U, r.V, r.T, r.S,
                                      r.sigma, r.tau, r.fdp, r.fnp, r.elapsed_ms)]
            )


def read_records(path: str | Path) -> list[RepRecord]:
    path = Path(path)
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                if row and not row[0].startswith("#")]
    if not rows or rows[0][1] != RECORDS_HEADER:
        raise MalformedCSVError(f"{path}:1: expected header {','.join(RECORDS_HEADER)}")
    for lineno, row in rows[1:]:
        if len(row) != len(RECORDS_HEADER):
            raise MalformedCSVError(f"{path}:{lineno}: expected {len(RECORDS_HEADER)} fields")
        records.append(
            RepRecord(
                n=_parse_int(row[0], path, lineno),
                rep=_parse_int(row[1], path, lineno),
                method=row[2],
                U=_parse_int(row[3], path, lineno),
                V=_parse_int(row[4], path, lineno),
                T=_parse_int(row[5], path, lineno),
                S=_parse_int(row[6], path, lineno),
                sigma=_parse_float(row[7], path, lineno),
                tau=_parse_float(row[8], path, lineno),
                fdp=_parse_float(row[9], path, lineno),
                fnp=_parse_float(row[10], path, lineno),
                elapsed_ms=_parse_float(row[11], path, lineno),
            )
        )
    return records


def write_summary(path: str | Path, rows: Iterable[SummaryRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# error bars: se_* = sample standard deviation / sqrt(reps)\n")
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for r in rows:
            writer.writerow(
                [_format(v) for v in (r.n, r.method, r.mean_fdp, r.se_fdp,
                                      r.mean_fnp, r.se_fnp, r.reps)]
            )


def read_summary(path: str | Path) -> list[SummaryRow]:
    path = Path(path)
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                if row and not row[0].startswith("#")]
    if not rows or rows[0][1] != SUMMARY_HEADER:
        raise MalformedCSVError(f"{path}:1: expected header {','.join(SUMMARY_HEADER)}")
    for lineno, row in rows[1:]:
        if len(row) != len(SUMMARY_HEADER):
            raise MalformedCSVError(f"{path}:{lineno}: expected {len(SUMMARY_HEADER)} fields")
        out.append(
            SummaryRow(
                n=_parse_int(row[0], path, lineno),
                method=row[1],
                mean_fdp=_parse_float(row[2], path, lineno),
                se_fdp=_parse_float(row[3], path, lineno),
                mean_fnp=_parse_float(row[4], path, lineno),
                se_fnp=_parse_float(row[5], path, lineno),
                reps=_parse_int(row[6], path, lineno),
            )
        )
    return out


def gcurve(model: MixtureModel, beta: float, points: int) -> list[tuple[float, float, float]]:
    """Evenly spaced samples of the alternative CDF and the reference line beta*t."""
    if points < 2:
        raise ValueError("points must be >= 2")
    ts = np.linspace(0.0, 1.0, points)
    gs = np.asarray(alt_pvalue_cdf(model, ts))
    return [(float(t), float(g), float(beta * t)) for t, g in zip(ts, gs)]


def write_gcurve(path: str | Path, rows: Iterable[tuple[float, float, float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GCURVE_HEADER)
        for t, g, bt in rows:
            writer.writerow([_format(float(t)), _format(float(g)), _format(float(bt))])
