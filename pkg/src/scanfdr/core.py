"""P-value data structures, the interval FDR estimate, and the BH and scan procedures.

Both procedures reject the hypotheses whose P-values fall in an interval
[sigma, tau].  The estimated false discovery rate of an interval is

    fdr_hat(s, t) = n * (t - s) / (R(s, t) v 1),   R(s, t) = #{i : s <= P_i <= t}.

BH maximizes t over intervals anchored at s = 0 with fdr_hat <= alpha; the scan
maximizes t - s over all intervals, choosing the left-most interval on ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class InvalidIntervalError(ValueError):
    """Interval endpoints violate 0 <= s <= t <= 1."""


class InvalidAlphaError(ValueError):
    """Control level alpha is outside the open interval (0, 1)."""


class EmptySampleError(ValueError):
    """Operation requires at least one P-value."""


class CapExceededError(ValueError):
    """Sample exceeds the configured size cap of the quadratic search."""


class MissingLabelsError(ValueError):
    """Operation requires null/alternative ground-truth labels."""


class NoAlternativesError(ValueError):
    """False non-discovery proportion is undefined when no alternatives exist."""


class PValueFileError(ValueError):
    """Malformed P-value input file; message carries file and line context."""


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise InvalidAlphaError(f"alpha must be in (0, 1), got {alpha!r}")


@dataclass(frozen=True)
class PValueSample:
    """P-values sorted ascending, with the sort permutation and optional labels.

    ``values[k]`` is the k-th order statistic; ``original_index[k]`` is its
    position in the input sequence.  ``is_null``, when present, is aligned with
    the *input* order and marks hypotheses whose null is actually true.
    """

    values: np.ndarray
    original_index: np.ndarray
    is_null: np.ndarray | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        order = np.asarray(self.original_index, dtype=np.intp)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "original_index", order)
        if values.ndim != 1 or order.shape != values.shape:
            raise ValueError("values and original_index must be 1-d of equal length")
        n = values.size
        if n and (values[0] < 0.0 or values[-1] > 1.0 or np.isnan(values).any()):
            raise ValueError("P-values must lie in [0, 1]")
        if n and (values[1:] < values[:-1]).any():
            raise ValueError("values must be sorted ascending")
        if n and not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("original_index must be a permutation of 0..n-1")
        if self.is_null is not None:
            labels = np.asarray(self.is_null, dtype=bool)
            if labels.shape != (n,):
                raise ValueError("is_null must have one label per P-value")
            object.__setattr__(self, "is_null", labels)
        for arr in (values, order):
            arr.flags.writeable = False
        if self.is_null is not None:
            self.is_null.flags.writeable = False

    @classmethod
    def from_values(
        cls, values: Sequence[float], is_null: Sequence[bool] | None = None
    ) -> "PValueSample":
        """Build a sample from P-values in input order (stable sort)."""
        raw = np.asarray(values, dtype=float)
        order = np.argsort(raw, kind="stable")
        labels = None if is_null is None else np.asarray(is_null, dtype=bool)
        return cls(values=raw[order], original_index=order, is_null=labels)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def values_in_input_order(self) -> np.ndarray:
        out = np.empty_like(self.values)
        out[self.original_index] = self.values
        return out


@dataclass(frozen=True)
class RejectionOutcome:
    """Rejection interval [sigma, tau] of a procedure and its covered set.

    ``rejected`` holds input-order indices i with sigma <= P_i <= tau;
    ``fdr_hat = n*(tau - sigma) / (covered_count v 1)``.  ``length_budget`` is
    alpha * covered_count / n, the longest interval that would keep the
    estimate at level alpha for this covered count (the reported trimmed
    interval is never longer).
    """

    method: str
    sigma: float
    tau: float
    rejected: frozenset[int]
    covered_count: int
    fdr_hat: float
    length_budget: float

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "sigma": self.sigma,
            "tau": self.tau,
            "covered_count": self.covered_count,
            "fdr_hat": self.fdr_hat,
            "length_budget": self.length_budget,
            "rejected": sorted(self.rejected),
        }


@dataclass(frozen=True)
class ConfusionTable:
    """Counts of a testing outcome: U/V true-null accepted/rejected, T/S false-null."""

    U: int
    V: int
    T: int
    S: int

    def __post_init__(self) -> None:
        if min(self.U, self.V, self.T, self.S) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def n0(self) -> int:
        return self.U + self.V

    @property
    def n1(self) -> int:
        return self.T + self.S

    @property
    def R(self) -> int:
        return self.V + self.S

    @property
    def W(self) -> int:
        return self.U + self.T

    @property
    def n(self) -> int:
        return self.n0 + self.n1


def empirical_fdr_hat(sample: PValueSample, s: float, t: float) -> float:
    """Estimated FDR of the rejection interval [s, t], endpoints inclusive."""
    if not (0.0 <= s <= t <= 1.0):
        raise InvalidIntervalError(f"need 0 <= s <= t <= 1, got s={s!r}, t={t!r}")
    n = sample.n
    lo = int(np.searchsorted(sample.values, s, side="left"))
    hi = int(np.searchsorted(sample.values, t, side="right"))
    covered = hi - lo
    return n * (t - s) / max(covered, 1)


def _covered_slice(sample: PValueSample, sigma: float, tau: float) -> tuple[int, int]:
    lo = int(np.searchsorted(sample.values, sigma, side="left"))
    hi = int(np.searchsorted(sample.values, tau, side="right"))
    return lo, hi


def _outcome(
    sample: PValueSample, method: str, sigma: float, tau: float, alpha: float
) -> RejectionOutcome:
    lo, hi = _covered_slice(sample, sigma, tau)
    covered = hi - lo
    rejected = frozenset(int(i) for i in sample.original_index[lo:hi])
    return RejectionOutcome(
        method=method,
        sigma=sigma,
        tau=tau,
        rejected=rejected,
        covered_count=covered,
        fdr_hat=sample.n * (tau - sigma) / max(covered, 1),
        length_budget=alpha * covered / sample.n if sample.n else 0.0,
    )


def bh_procedure(sample: PValueSample, alpha: float) -> RejectionOutcome:
    """Step-up rule: reject the k* smallest P-values, k* = max{k : p_(k) <= alpha*k/n}."""
    _check_alpha(alpha)
    n = sample.n
    if n == 0:
        return RejectionOutcome("bh", 0.0, 0.0, frozenset(), 0, 0.0, 0.0)
    p = sample.values
    hits = np.nonzero(n * p <= alpha * np.arange(1, n + 1))[0]
    if hits.size == 0:
        return RejectionOutcome("bh", 0.0, 0.0, frozenset(), 0, 0.0, 0.0)
    tau = float(p[hits[-1]])
    return _outcome(sample, "bh", 0.0, tau, alpha)


def scan_procedure(sample: PValueSample, alpha: float) -> RejectionOutcome:
    """Longest-interval rule: maximize the covered count, left-most window on ties.

    Searches windows of k consecutive order statistics from k = n downward and
    stops at the first k admitting a window with n*(p_(i+k-1) - p_(i)) <= alpha*k
    (exact float comparison, no epsilon; the brute-force oracle uses the same
    predicate).  The first feasible k going down is the maximal covered count;
    argmax over the feasibility mask gives the smallest window start.
    """
    _check_alpha(alpha)
    n = sample.n
    if n == 0:
        raise EmptySampleError("scan procedure requires at least one P-value")
    p = sample.values
    for k in range(n, 0, -1):
        spans = p[k - 1 :] - p[: n - k + 1]
        feasible = n * spans <= alpha * k
        if feasible.any():
            i = int(np.argmax(feasible))
            sigma = float(p[i])
            tau = float(p[i + k - 1])
            return _outcome(sample, "scan", sigma, tau, alpha)
    raise AssertionError("unreachable: single-point windows are always feasible")


def scan_bruteforce(sample: PValueSample, alpha: float, cap: int = 2000) -> RejectionOutcome:
    """Exhaustive-enumeration oracle for ``scan_procedure``; O(n^2), capped.

    Walks every (i, j) order-statistic window with the identical feasibility
    predicate n*(p_(j) - p_(i)) <= alpha*k and keeps the largest covered count,
    first (left-most) window on ties.
    """
    _check_alpha(alpha)
    n = sample.n
    if n == 0:
        raise EmptySampleError("scan procedure requires at least one P-value")
    if n > cap:
        raise CapExceededError(f"n={n} exceeds brute-force cap {cap}")
    p = sample.values.tolist()
    best_k = 0
    best_i = 0
    for i in range(n):
        pi = p[i]
        for j in range(i, n):
            k = j - i + 1
            if n * (p[j] - pi) <= alpha * k and k > best_k:
                best_k = k
                best_i = i
    sigma = p[best_i]
    tau = p[best_i + best_k - 1]
    return _outcome(sample, "scan", sigma, tau, alpha)


def confusion(outcome: RejectionOutcome, sample: PValueSample) -> ConfusionTable:
    """Cross-tabulate rejections against ground-truth labels."""
    if sample.is_null is None:
        raise MissingLabelsError("sample carries no is_null labels")
    n = sample.n
    rejected = np.zeros(n, dtype=bool)
    if outcome.rejected:
        rejected[np.fromiter(outcome.rejected, dtype=np.intp)] = True
    null = sample.is_null
    V = int((rejected & null).sum())
    S = int((rejected & ~null).sum())
    U = int((~rejected & null).sum())
    T = int((~rejected & ~null).sum())
    return ConfusionTable(U=U, V=V, T=T, S=S)


def fdp(table: ConfusionTable) -> float:
    """False discovery proportion V / (R v 1); 0 when nothing is rejected."""
    return table.V / max(table.R, 1)


def fnp(table: ConfusionTable) -> float:
    """False non-discovery proportion T / n1; undefined without alternatives."""
    if table.n1 == 0:
        raise NoAlternativesError("fnp undefined: no false null hypotheses (n1 = 0)")
    return table.T / table.n1


def read_pvalue_file(path: str | Path) -> PValueSample:
    """Read a P-value file: one `<float>` or `<float>,<0|1>` per line, # comments.

    The second column, when present on any line, must be present on all lines;
    1 marks a true null hypothesis.
    """
    values: list[float] = []
    labels: list[bool] = []
    labeled: bool | None = None
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                if len(parts) == 1:
                    value, flag = float(parts[0]), None
                elif len(parts) == 2:
                    value, flag = float(parts[0]), parts[1].strip()
                    if flag not in ("0", "1"):
                        raise ValueError(f"label must be 0 or 1, got {flag!r}")
                else:
                    raise ValueError("expected `<float>` or `<float>,<0|1>`")
                if not (0.0 <= value <= 1.0) or value != value:
                    raise ValueError(f"P-value {value!r} outside [0, 1]")
            except ValueError as exc:
                raise PValueFileError(f"{path}:{lineno}: {exc}") from None
            has_label = flag is not None
            if labeled is None:
                labeled = has_label
            elif labeled != has_label:
                raise PValueFileError(f"{path}:{lineno}: mixed labeled and unlabeled lines")
            values.append(value)
            if has_label:
                labels.append(flag == "1")
    return PValueSample.from_values(values, labels if labeled else None)


def write_pvalue_file(path: str | Path, sample: PValueSample) -> None:
    """Write a sample in input order using the same line format as the reader."""
    values = sample.values_in_input_order()
    with open(path, "w", encoding="utf-8") as fh:
        if sample.is_null is None:
            for v in values:
                fh.write(f"{float(v)!r}\n")
        else:
            for v, null in zip(values, sample.is_null):
                fh.write(f"{float(v)!r},{1 if null else 0}\n")
