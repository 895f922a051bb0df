"""Null distributions, the location-mixture model, and labeled sample generation.

Test statistics follow ``pi0 * Psi(x) + pi1 * Psi(x - mu)`` with null
distribution Psi and effect size mu; P-values are the null survival
``P = 1 - Psi(X)``. Null P-values are therefore Uniform[0,1], and alternative
P-values have distribution function ``G(t) = surv(surv_inv(t) - mu)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .core import PValueSample

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TailSpec:
    """Power-law tail exponent: density ~ x^-(gamma+1) * (log x)^c at +inf."""

    gamma: float
    c: float = 0.0

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError("tail exponent gamma must be positive")


@dataclass(frozen=True)
class NullDistribution:
    """Continuous null distribution, either standard normal or standard Cauchy.

    The Cauchy family carries a TailSpec (gamma=1, c=0); the normal has none.
    Normal cdf/quantile go through scipy's ndtr/ndtri (absolute error well
    below 1e-9); the Cauchy is in closed form.
    """

    kind: str
    tail: TailSpec | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("normal", "cauchy"):
            raise ValueError(f"unknown null distribution kind {self.kind!r}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            out = ndtr(x)
        else:
            # 1/2 + arctan(x)/pi, evaluated via arctan(1/|x|) on the far branch
            # to keep full relative precision in the tails
            with np.errstate(divide="ignore"):
                out = np.where(
                    x < 0,
                    np.arctan2(1.0, -x) / np.pi,
                    1.0 - np.arctan2(1.0, np.where(x > 0, x, 1.0)) / np.pi,
                )
                out = np.where(x == 0, 0.5, out)
        return out if out.ndim else float(out)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            out = ndtr(-x)
        else:
            out = np.where(
                x > 0,
                np.arctan2(1.0, np.where(x > 0, x, 1.0)) / np.pi,
                0.5 - np.arctan(x) / np.pi,
            )
        return out if out.ndim else float(out)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "normal":
            out = np.exp(-0.5 * x * x) / _SQRT2PI
        else:
            out = 1.0 / (np.pi * (1.0 + x * x))
        return out if out.ndim else float(out)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if ((u <= 0.0) | (u >= 1.0)).any():
            raise ValueError("quantile argument must lie strictly inside (0, 1)")
        if self.kind == "normal":
            out = ndtri(u)
        else:
            out = np.tan(np.pi * (u - 0.5))
        return out if out.ndim else float(out)

    def survival_inverse(self, t):
        """Inverse of ``survival``; accurate for t near 0 (deep upper tail)."""
        t = np.asarray(t, dtype=float)
        if ((t <= 0.0) | (t >= 1.0)).any():
            raise ValueError("survival_inverse argument must lie strictly inside (0, 1)")
        if self.kind == "normal":
            out = -ndtri(t)
        else:
            out = 1.0 / np.tan(np.pi * t)  # cot(pi t) = tan(pi (1/2 - t))
        return out if out.ndim else float(out)


def normal() -> NullDistribution:
    return NullDistribution(kind="normal")


def cauchy() -> NullDistribution:
    return NullDistribution(kind="cauchy", tail=TailSpec(gamma=1.0, c=0.0))


@dataclass(frozen=True)
class MixtureModel:
    """Location mixture: fraction eps of hypotheses shifted by mu, rest null.

    eps is the alternative fraction pi1; mu = 0 degenerates to the pure-null
    model (allowed for tests: G becomes the identity).
    """

    null_dist: NullDistribution
    mu: float
    eps: float

    def __post_init__(self) -> None:
        if not self.mu >= 0:
            raise ValueError("effect size mu must be nonnegative")
        if not (0.0 < self.eps < 1.0):
            raise ValueError("alternative fraction eps must lie in (0, 1)")

    @property
    def pi0(self) -> float:
        return 1.0 - self.eps

    @property
    def pi1(self) -> float:
        return self.eps


def alt_pvalue_cdf(model: MixtureModel, t):
    """CDF G of a P-value under the alternative: G(t) = surv(surv_inv(t) - mu)."""
    t = np.asarray(t, dtype=float)
    if ((t < 0.0) | (t > 1.0)).any():
        raise ValueError("t must lie in [0, 1]")
    interior = np.clip(t, 1e-300, 1.0 - 1e-16)
    dist = model.null_dist
    g = dist.survival(np.asarray(dist.survival_inverse(interior)) - model.mu)
    out = np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, g))
    return out if out.ndim else float(out)


def alt_pvalue_density(model: MixtureModel, t):
    """Density G'(t) = psi(surv_inv(t) - mu) / psi(surv_inv(t)).

    For power-law tails the ratio tends to 1 as t -> 0; below t = 1e-12 that
    analytic limit is returned directly.  For the normal family the ratio is
    computed as exp(mu*z - mu^2/2), which diverges as t -> 0.
    """
    t = np.asarray(t, dtype=float)
    if ((t <= 0.0) | (t >= 1.0)).any():
        raise ValueError("t must lie strictly inside (0, 1)")
    dist = model.null_dist
    safe = np.maximum(t, 1e-12)
    q = np.asarray(dist.survival_inverse(safe))
    if dist.kind == "normal":
        ratio = np.exp(model.mu * q - 0.5 * model.mu * model.mu)
    else:
        ratio = dist.density(q - model.mu) / dist.density(q)
    if dist.tail is not None:
        ratio = np.where(t < 1e-12, 1.0, ratio)
    return ratio if ratio.ndim else float(ratio)


def alt_density_at_zero(model: MixtureModel) -> float:
    """Limit of G' at t = 0: 1 for power-law tails (and mu = 0), +inf for normal."""
    if model.mu == 0.0:
        return 1.0
    if model.null_dist.tail is not None:
        return 1.0
    return math.inf


@dataclass(frozen=True)
class LabeledSample:
    """One replication: a labeled P-value sample plus the seed and model that made it."""

    sample: PValueSample
    seed: int
    model: MixtureModel

    @property
    def n_alternatives(self) -> int:
        return int((~self.sample.is_null).sum())


def sample_labeled(model: MixtureModel, n: int, seed: int) -> LabeledSample:
    """Draw a labeled sample: round(n*eps) alternatives, the rest null.

    Null P-values are drawn directly as Uniform[0,1] (identical in law to the
    survival of a null draw, without the quantile round trip).  Alternative
    P-values are survival(Z + mu) with Z a null draw, hence exactly
    G-distributed.  Deterministic in (model, n, seed).
    """
    if n < 1:
        raise ValueError("sample size n must be at least 1")
    rng = np.random.default_rng(seed)
    m_alt = int(math.floor(n * model.eps + 0.5))
    if model.null_dist.kind == "normal":
        z = rng.standard_normal(m_alt)
    else:
        z = rng.standard_cauchy(m_alt)
    p_alt = np.asarray(model.null_dist.survival(z + model.mu), dtype=float).reshape(m_alt)
    p_null = rng.uniform(0.0, 1.0, n - m_alt)
    values = np.concatenate([p_alt, p_null])
    is_null = np.ones(n, dtype=bool)
    is_null[:m_alt] = False
    sample = PValueSample.from_values(values, is_null)
    return LabeledSample(sample=sample, seed=int(seed), model=model)


def parse_model_spec(spec: str) -> MixtureModel:
    """Parse the `model=<normal|cauchy> mu=<float> eps=<float>` grammar."""
    fields: dict[str, str] = {}
    for token in spec.split():
        if "=" not in token:
            raise ValueError(f"bad model-spec token {token!r}")
        key, value = token.split("=", 1)
        if key in fields:
            raise ValueError(f"duplicate model-spec key {key!r}")
        fields[key] = value
    missing = {"model", "mu", "eps"} - fields.keys()
    if missing:
        raise ValueError(f"model spec missing keys: {sorted(missing)}")
    extra = fields.keys() - {"model", "mu", "eps"}
    if extra:
        raise ValueError(f"unknown model-spec keys: {sorted(extra)}")
    dist = {"normal": normal, "cauchy": cauchy}.get(fields["model"])
    if dist is None:
        raise ValueError(f"model must be normal or cauchy, got {fields['model']!r}")
    return MixtureModel(null_dist=dist(), mu=float(fields["mu"]), eps=float(fields["eps"]))


def format_model_spec(model: MixtureModel) -> str:
    return f"model={model.null_dist.kind} mu={model.mu!r} eps={model.eps!r}"
