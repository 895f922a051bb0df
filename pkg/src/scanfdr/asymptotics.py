"""Population-level (n -> infinity) quantities for the BH and scan procedures.

With beta = (1/pi1)(1/alpha - pi0), the limiting rejection-interval lengths are

    delta_bh   = right-most solution of G(t) = beta*t,
    delta_scan = max{ t - s : G(t) - G(s) = beta*(t - s) },

and the limiting FNRs are 1 - beta*delta.  G is the alternative P-value CDF
and must accept both floats and 1-d numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import MixtureModel, TailSpec, alt_density_at_zero, alt_pvalue_cdf, alt_pvalue_density

CdfFunction = Callable[[np.ndarray], np.ndarray]


def beta_constant(alpha: float, pi0: float) -> float:
    """Slope of the reference line the G-curve must beat: (1/pi1)*(1/alpha - pi0)."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    if not (0.0 < pi0 < 1.0):
        raise ValueError(f"pi0 must be in (0, 1), got {pi0!r}")
    return (1.0 / alpha - pi0) / (1.0 - pi0)


def asymptotic_fdr(G: CdfFunction, pi0: float, s: float, t: float) -> float:
    """Limiting estimated FDR of the interval [s, t]:
    (t-s) / (pi0*(t-s) + pi1*(G(t)-G(s)))."""
    if not (0.0 <= s < t <= 1.0):
        raise ValueError("need 0 <= s < t <= 1")
    pi1 = 1.0 - pi0
    denom = pi0 * (t - s) + pi1 * (float(G(t)) - float(G(s)))
    return (t - s) / denom


def delta_bh(G: CdfFunction, beta: float, grid_points: int = 10_000, tol: float = 1e-12) -> float:
    """Right-most solution of G(t) = beta*t on [0, 1]; 0 when none exists.

    Scans a uniform grid from t = 1 downward for the highest sign change of
    G(t) - beta*t, then bisects the bracket to width <= tol (tight enough to
    keep the root residual |G(t) - beta*t| below 1e-8 even when G' - beta is
    large).  Crossings narrower than the grid step (1e-4 by default) need a
    larger grid_points.
    """
    if not beta > 1.0:
        raise ValueError("beta must exceed 1")
    ts = np.linspace(0.0, 1.0, grid_points)
    h = np.asarray(G(ts)) - beta * ts
    drops = np.nonzero((h[:-1] >= 0.0) & (h[1:] < 0.0))[0]
    if drops.size == 0:
        return 0.0
    i = int(drops[-1])
    lo, hi = float(ts[i]), float(ts[i + 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if float(G(mid)) - beta * mid >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def leftmost_crossing(
    G: CdfFunction, beta: float, t_floor: float = 1e-12, grid_points: int = 20_000
) -> float:
    """Smallest positive solution of G(t) = beta*t; 0 when none exists.

    This is the point where the alternative CDF first rises above the
    reference line.  For power-law tails with a large shift it vanishes like
    the survival of a*mu with a = (1 - beta^(-1/gamma))^(-1), and the density
    ratio G' evaluated there approaches beta^((gamma+1)/gamma); the right-most
    root behaves differently (it tends to 1/beta).  Searches a log-spaced grid
    upward from t_floor, then bisects in log space.
    """
    if not beta > 1.0:
        raise ValueError("beta must exceed 1")
    ts = np.logspace(math.log10(t_floor), 0.0, grid_points)
    h = np.asarray(G(ts)) - beta * ts
    nonneg = np.nonzero(h >= 0.0)[0]
    if nonneg.size == 0:
        return 0.0
    i = int(nonneg[0])
    if i == 0:
        return t_floor
    lo, hi = float(ts[i - 1]), float(ts[i])
    while hi - lo > 1e-15 * hi:
        mid = math.sqrt(lo * hi)
        if float(G(mid)) - beta * mid < 0.0:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class DeltaScanResult:
    """Solution of the interval-length maximization, with solver diagnostics."""

    delta: float
    s: float
    t: float
    n_grid_maximizers: int
    degenerate: bool


def _expand_to_boundary(
    feasible_at: Callable[[float], bool], start: float, direction: float, limit: float
) -> float:
    """March from a feasible point toward `limit` and bisect onto the
    feasibility boundary; returns the last feasible coordinate."""
    step = 1e-4
    good = start
    while (limit - good) * direction > 0.0:
        probe = good + direction * step
        probe = min(probe, limit) if direction > 0 else max(probe, limit)
        if feasible_at(probe):
            good = probe
            step *= 2.0
        else:
            bad = probe
            while abs(bad - good) > 1e-14:
                mid = 0.5 * (good + bad)
                if feasible_at(mid):
                    good = mid
                else:
                    bad = mid
            return good
    return good


def delta_scan(
    G: CdfFunction,
    beta: float,
    grid_points: int = 2000,
    warm_start: tuple[float, float] | None = None,
) -> DeltaScanResult:
    """Maximize t - s subject to G(t) - G(s) >= beta*(t - s), left-most on ties.

    Dense grid over (s, t) pairs, then a shrinking-box local search, then a
    boundary polish that pushes each endpoint onto the constraint boundary
    (where the inequality binds).  ``warm_start``, when given, is a known
    feasible interval used as the refinement center if the grid finds nothing
    longer; passing (0, delta_bh) guarantees delta >= delta_bh.
    """
    if not beta > 1.0:
        raise ValueError("beta must exceed 1")
    g = np.linspace(0.0, 1.0, grid_points)
    Gv = np.asarray(G(g))
    obj = g[None, :] - g[:, None]
    feas = ((Gv[None, :] - Gv[:, None]) - beta * obj >= 0.0) & (obj >= 0.0)
    masked = np.where(feas, obj, -1.0)
    best = float(masked.max())
    ii, jj = np.nonzero(masked >= best - 1e-12)
    n_grid_max = int(ii.size)
    k = int(np.argmin(g[ii]))
    s, t = float(g[ii[k]]), float(g[jj[k]])
    step = float(g[1] - g[0])

    def D(s_: float, t_: float) -> float:
        return float(G(t_)) - float(G(s_)) - beta * (t_ - s_)

    if warm_start is not None:
        ws, wt = float(warm_start[0]), float(warm_start[1])
        if wt - ws > t - s and D(ws, wt) >= 0.0:
            s, t = ws, wt

    h = step
    while h > 1e-12:
        ss = np.clip(np.linspace(s - h, s + h, 33), 0.0, 1.0)
        tt = np.clip(np.linspace(t - h, t + h, 33), 0.0, 1.0)
        Gs = np.asarray(G(ss))
        Gt = np.asarray(G(tt))
        oo = tt[None, :] - ss[:, None]
        ff = ((Gt[None, :] - Gs[:, None]) - beta * oo >= 0.0) & (oo >= 0.0)
        mm = np.where(ff, oo, -1.0)
        b = float(mm.max())
        if b > t - s:
            ai, aj = np.nonzero(mm == b)
            kk = int(np.argmin(ss[ai]))
            s, t = float(ss[ai[kk]]), float(tt[aj[kk]])
        h *= 0.35

    for _ in range(3):
        t = _expand_to_boundary(lambda u: D(s, u) >= 0.0, t, +1.0, 1.0)
        s = _expand_to_boundary(lambda u: D(u, t) >= 0.0, s, -1.0, 0.0)

    delta = t - s
    return DeltaScanResult(
        delta=delta, s=s, t=t, n_grid_maximizers=n_grid_max, degenerate=delta <= step
    )


def fnr_limits(beta: float, delta_bh_value: float, delta_scan_value: float) -> tuple[float, float]:
    """Limiting FNRs (1 - beta*delta) of BH and of the scan, in that order."""

    def one(delta: float) -> float:
        v = 1.0 - beta * delta
        if -1e-9 <= v < 0.0:
            return 0.0
        if 1.0 < v <= 1.0 + 1e-9:
            return 1.0
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"FNR limit {v!r} outside [0, 1] beyond numerical noise")
        return v

    return one(delta_bh_value), one(delta_scan_value)


def check_property1(model: MixtureModel, beta: float, delta_bh_value: float | None = None) -> bool:
    """Outperformance condition: G'(0) < G'(delta_bh), strictly.

    False when delta_bh = 0 (degenerate) and for families whose density ratio
    diverges at 0 (the normal location family).
    """
    if delta_bh_value is None:
        delta_bh_value = delta_bh(lambda t: alt_pvalue_cdf(model, t), beta)
    if delta_bh_value <= 0.0:
        return False
    g0 = alt_density_at_zero(model)
    if math.isinf(g0):
        return False
    return g0 < float(alt_pvalue_density(model, delta_bh_value))


def check_assumption_A(
    G: CdfFunction,
    beta: float,
    pi0: float,
    maximizer: tuple[float, float],
    step: float = 1e-6,
    slope_tol: float = 1e-8,
) -> bool:
    """Diagnostic for the maximizer-boundary monotonicity assumption.

    True when the interval is non-degenerate and the limiting estimated FDR is
    strictly decreasing in the left endpoint at s* or strictly increasing in
    the right endpoint at t* (finite-difference slopes against slope_tol).
    """
    s, t = float(maximizer[0]), float(maximizer[1])
    if t - s <= 0.0:
        return False
    f0 = asymptotic_fdr(G, pi0, s, t)
    left_slope = (asymptotic_fdr(G, pi0, min(s + step, t), t) - f0) / step
    if t + step <= 1.0:
        right_slope = (asymptotic_fdr(G, pi0, s, t + step) - f0) / step
    else:
        right_slope = (f0 - asymptotic_fdr(G, pi0, s, t - step)) / step
    return left_slope < -slope_tol or right_slope > slope_tol


@dataclass(frozen=True)
class PowerLawLimit:
    """Large-shift limit of the density ratio at the vanishing crossing."""

    a: float
    limit: float


def power_law_limit(tail: TailSpec, beta: float) -> PowerLawLimit:
    """For power-law tails: a = (1 - beta^(-1/gamma))^(-1); the crossing sits
    near survival(a*mu) and the density ratio there tends to
    (a/(a-1))^(gamma+1) = beta^((gamma+1)/gamma) > 1."""
    if not beta > 1.0:
        raise ValueError("beta must exceed 1")
    a = 1.0 / (1.0 - beta ** (-1.0 / tail.gamma))
    return PowerLawLimit(a=a, limit=beta ** ((tail.gamma + 1.0) / tail.gamma))


@dataclass(frozen=True)
class OracleReport:
    """Asymptotic quantities of a mixture model at level alpha."""

    alpha: float
    beta: float
    delta_bh: float
    delta_scan: float
    maximizer: tuple[float, float]
    fnr_bh_limit: float
    fnr_scan_limit: float
    property1_holds: bool
    assumption_A_diagnostic: bool
    degenerate_delta: bool
    n_grid_maximizers: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "delta_bh": self.delta_bh,
            "delta_scan": self.delta_scan,
            "maximizer_s": self.maximizer[0],
            "maximizer_t": self.maximizer[1],
            "fnr_bh_limit": self.fnr_bh_limit,
            "fnr_scan_limit": self.fnr_scan_limit,
            "property1": self.property1_holds,
            "assumption_A": self.assumption_A_diagnostic,
            "degenerate_delta": self.degenerate_delta,
            "n_grid_maximizers": self.n_grid_maximizers,
        }


def oracle_report(model: MixtureModel, alpha: float, grid_points: int = 2000) -> OracleReport:
    """Compute all asymptotic quantities for a model at level alpha."""
    beta = beta_constant(alpha, model.pi0)

    def G(t):
        return alt_pvalue_cdf(model, t)

    d_bh = delta_bh(G, beta)
    scan = delta_scan(G, beta, grid_points=grid_points, warm_start=(0.0, d_bh))
    fnr_bh, fnr_scan = fnr_limits(beta, d_bh, scan.delta)
    return OracleReport(
        alpha=alpha,
        beta=beta,
        delta_bh=d_bh,
        delta_scan=scan.delta,
        maximizer=(scan.s, scan.t),
        fnr_bh_limit=fnr_bh,
        fnr_scan_limit=fnr_scan,
        property1_holds=check_property1(model, beta, d_bh),
        assumption_A_diagnostic=check_assumption_A(G, beta, model.pi0, (scan.s, scan.t)),
        degenerate_delta=scan.degenerate,
        n_grid_maximizers=scan.n_grid_maximizers,
    )
