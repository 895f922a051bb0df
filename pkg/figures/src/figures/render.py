"""Figure regeneration from experiment CSV files.

Consumes exactly the CSV schemas written by the scanfdr harness:

    gcurve:  t,G,beta_t
    summary: n,method,mean_fdp,se_fdp,mean_fnp,se_fnp,reps

and renders three figure kinds: the alternative P-value CDF with its
reference line (`gcurve`), and mean FDP/FNP against sample size with error
bars (`fdp_vs_n`, `fnp_vs_n`).  BH is drawn red, the scan blue.  Rendering is
deterministic: fixed figure geometry and no timestamps in the output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KINDS = ("gcurve", "fdp_vs_n", "fnp_vs_n")

GCURVE_HEADER = ["t", "G", "beta_t"]
SUMMARY_HEADER = ["n", "method", "mean_fdp", "se_fdp", "mean_fnp", "se_fnp", "reps"]

METHOD_COLORS = {"bh": "red", "scan": "blue"}

_FIGSIZE = (6.0, 4.5)
_DPI = 100


class SchemaError(ValueError):
    """Input CSV does not match the expected schema; names the column."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str | Path
    output_image: str | Path
    title: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def _read_rows(path: str | Path, header: list[str]) -> list[dict[str, str]]:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        raw = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if not raw:
        raise SchemaError(f"{path}: empty file, expected header {','.join(header)}")
    got = raw[0]
    for column in header:
        if column not in got:
            raise SchemaError(f"{path}: missing column {column!r} in header {','.join(got)}")
    for column in got:
        if column not in header:
            raise SchemaError(f"{path}: unexpected column {column!r}")
    if got != header:
        raise SchemaError(f"{path}: columns out of order, expected {','.join(header)}")
    if len(raw) == 1:
        raise SchemaError(f"{path}: no data rows")
    rows = []
    for row in raw[1:]:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row with {len(row)} fields, expected {len(header)}")
        rows.append(dict(zip(header, row)))
    return rows


def _float_column(rows: list[dict[str, str]], column: str, path) -> list[float]:
    out = []
    for row in rows:
        try:
            out.append(float(row[column]))
        except ValueError:
            raise SchemaError(f"{path}: non-numeric value {row[column]!r} in column {column!r}") from None
    return out


def read_gcurve(path: str | Path) -> dict[str, list[float]]:
    rows = _read_rows(path, GCURVE_HEADER)
    return {col: _float_column(rows, col, path) for col in GCURVE_HEADER}


def read_summary(path: str | Path) -> dict[str, list]:
    rows = _read_rows(path, SUMMARY_HEADER)
    data: dict[str, list] = {"method": [row["method"] for row in rows]}
    for col in ("n", "mean_fdp", "se_fdp", "mean_fnp", "se_fnp", "reps"):
        data[col] = _float_column(rows, col, path)
    return data


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    if title:
        ax.set_title(title)
    return fig, ax


def _render_gcurve(spec: FigureSpec):
    data = read_gcurve(spec.input_csv)
    fig, ax = _new_axes(spec.title)
    ax.plot(data["t"], data["G"], color="black", linestyle="-", label="G")
    ax.plot(data["t"], data["beta_t"], color="black", linestyle="--", label="beta * t")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel("t")
    ax.set_ylabel("probability")
    ax.legend(loc="lower right")
    return fig


def _render_summary(spec: FigureSpec, prefix: str, ylabel: str):
    data = read_summary(spec.input_csv)
    methods = sorted(set(data["method"]), key=list(data["method"]).index)
    fig, ax = _new_axes(spec.title)
    for method in methods:
        rows = sorted(
            (n, mean, se)
            for n, m, mean, se in zip(
                data["n"], data["method"], data[f"mean_{prefix}"], data[f"se_{prefix}"]
            )
            if m == method
        )
        ns = [r[0] for r in rows]
        means = [r[1] for r in rows]
        ses = [r[2] for r in rows]
        ax.errorbar(
            ns,
            means,
            yerr=ses,
            color=METHOD_COLORS.get(method, "gray"),
            marker="o",
            capsize=3,
            label=method,
        )
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.legend()
    return fig


def render(spec: FigureSpec) -> Path:
    """Render the figure described by spec and return the written path."""
    if spec.kind == "gcurve":
        fig = _render_gcurve(spec)
    elif spec.kind == "fdp_vs_n":
        fig = _render_summary(spec, "fdp", "FDP")
    else:
        fig = _render_summary(spec, "fnp", "FNP")
    out = Path(spec.output_image)
    try:
        fig.savefig(out, metadata={"Software": "figures"})
    finally:
        plt.close(fig)
    return out
