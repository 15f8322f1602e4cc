"""Accuracy metrics, one-way ANOVA, and Tukey HSD multiple comparisons.

Metrics follow the forecasting-competition conventions: MAPE and SMAPE
in percent, MASE scaled by the in-sample one-step naive MAE.  Terms with
an undefined denominator (zero actual, zero mean, constant estimation
sample) are excluded from the average and counted in an optional
exclusion tally instead of failing the run.

Tukey HSD critical values come from the studentized range distribution,
evaluated at runtime by numeric double integration (inner integral over
the standard normal range probability, outer over the pooled-variance
chi distribution) and cross-checked in tests against an embedded
quantile table.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.stats import f as f_distribution
from scipy.stats import norm, rankdata

from .exceptions import InputError, PostHocGateError


# ---------------------------------------------------------------------------
# point-forecast accuracy metrics


def _tally(exclusions, key: str, count: int) -> None:
    if exclusions is not None and count:
        exclusions[key] += count


def mape(actuals, forecasts, *, exclusions: Counter | None = None) -> float:
    """Mean absolute percentage error, in percent.

    Terms with a zero actual are excluded (and tallied); the mean runs
    over the remaining terms.
    """
    actuals = np.asarray(actuals, dtype=float)
    forecasts = np.asarray(forecasts, dtype=float)
    if actuals.shape != forecasts.shape:
        raise InputError("actuals and forecasts must have equal shape")
    mask = actuals != 0
    _tally(exclusions, "mape_zero_actual", int(np.sum(~mask)))
    if not np.any(mask):
        return float("nan")
    terms = np.abs(actuals[mask] - forecasts[mask]) / np.abs(actuals[mask])
    return float(terms.mean() * 100.0)


def smape(actuals, forecasts, *, exclusions: Counter | None = None) -> float:
    """Symmetric MAPE: |a - f| over the mean of a and f, in percent."""
    actuals = np.asarray(actuals, dtype=float)
    forecasts = np.asarray(forecasts, dtype=float)
    if actuals.shape != forecasts.shape:
        raise InputError("actuals and forecasts must have equal shape")
    denom = (actuals + forecasts) / 2.0
    mask = denom != 0
    _tally(exclusions, "smape_zero_denominator", int(np.sum(~mask)))
    if not np.any(mask):
        return float("nan")
    terms = np.abs(actuals[mask] - forecasts[mask]) / np.abs(denom[mask])
    return float(terms.mean() * 100.0)


def naive_mae(estimation_sample) -> float:
    """In-sample one-step naive MAE, the MASE scaling denominator."""
    values = np.asarray(estimation_sample, dtype=float)
    if values.size < 2:
        raise InputError("naive MAE needs at least 2 observations")
    return float(np.mean(np.abs(np.diff(values))))


def mase(actuals, forecasts, estimation_samples, *,
         exclusions: Counter | None = None) -> float:
    """Mean absolute scaled error.

    ``estimation_samples`` holds one estimation-sample array per series,
    aligned with the actual/forecast entries.  Series whose estimation
    sample is constant (zero naive MAE) are excluded and tallied.
    """
    actuals = np.asarray(actuals, dtype=float)
    forecasts = np.asarray(forecasts, dtype=float)
    if actuals.shape != forecasts.shape:
        raise InputError("actuals and forecasts must have equal shape")
    if len(estimation_samples) != actuals.size:
        raise InputError("one estimation sample per scored value is required")
    scales = np.array([naive_mae(s) for s in estimation_samples])
    mask = scales > 0
    _tally(exclusions, "mase_constant_estimation_sample", int(np.sum(~mask)))
    if not np.any(mask):
        return float("nan")
    terms = np.abs(actuals[mask] - forecasts[mask]) / scales[mask]
    return float(terms.mean())


def average_rank(values) -> np.ndarray:
    """Average rank per model across horizons.

    ``values`` is a (models, horizons) metric array; models are ranked
    1..m ascending per horizon, ties receive the average rank.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    ranks = np.column_stack([rankdata(values[:, h], method="average")
                             for h in range(values.shape[1])])
    return ranks.mean(axis=1)


# ---------------------------------------------------------------------------
# one-way ANOVA


class AnovaResult(NamedTuple):
    F: float
    p: float
    df_between: int
    df_within: int
    ms_within: float


def anova_oneway(groups) -> AnovaResult:
    """Classic one-way F test.

    Zero within-group variance yields F = 0, p = 1 when the means also
    agree and F = inf, p = 0 when they differ.
    """
    samples = [np.asarray(g, dtype=float) for g in groups]
    if len(samples) < 2:
        raise InputError("ANOVA needs at least 2 groups")
    if any(g.size < 2 for g in samples):
        raise InputError("every ANOVA group needs at least 2 observations")

    sizes = np.array([g.size for g in samples])
    means = np.array([g.mean() for g in samples])
    grand = np.concatenate(samples).mean()
    ss_between = float(np.sum(sizes * (means - grand) ** 2))
    ss_within = float(sum(np.sum((g - m) ** 2) for g, m in zip(samples, means)))
    df_between = len(samples) - 1
    df_within = int(sizes.sum()) - len(samples)
    ms_within = ss_within / df_within

    if ss_within == 0.0:
        if ss_between == 0.0:
            return AnovaResult(0.0, 1.0, df_between, df_within, 0.0)
        return AnovaResult(float("inf"), 0.0, df_between, df_within, 0.0)

    f_value = (ss_between / df_between) / ms_within
    p_value = float(f_distribution.sf(f_value, df_between, df_within))
    return AnovaResult(float(f_value), p_value, df_between, df_within, ms_within)


# ---------------------------------------------------------------------------
# studentized range distribution

_Z_NODES, _Z_WEIGHTS = np.polynomial.legendre.leggauss(160)
_Z_LIMIT = 12.0
_Z_NODES = _Z_NODES * _Z_LIMIT
_Z_WEIGHTS = _Z_WEIGHTS * _Z_LIMIT

_S_ORDER = 240


def _range_probability(x, k: int) -> np.ndarray:
    """P(range of k independent standard normals <= x), vectorized in x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    positive = x > 0
    if np.any(positive):
        xp = x[positive]
        phi = norm.pdf(_Z_NODES)
        inner = norm.cdf(_Z_NODES)[:, None] - norm.cdf(_Z_NODES[:, None] - xp[None, :])
        np.clip(inner, 0.0, None, out=inner)
        integrand = k * phi[:, None] * inner ** (k - 1)
        out[positive] = _Z_WEIGHTS @ integrand
    return np.clip(out, 0.0, 1.0)


def studentized_range_cdf(q: float, k: int, df: float) -> float:
    """CDF of the studentized range with k groups and ``df`` error degrees
    of freedom (df = inf gives the plain normal range distribution)."""
    if k < 2:
        raise InputError(f"studentized range needs k >= 2, got {k}")
    if q <= 0:
        return 0.0
    if math.isinf(df):
        return float(_range_probability(q, k)[0])

    # outer integral over s = sqrt(chi2_df / df); density concentrates near 1
    hi = 1.0 + 14.0 / math.sqrt(2.0 * df)
    nodes, weights = np.polynomial.legendre.leggauss(_S_ORDER)
    s = 0.5 * hi * (nodes + 1.0)
    w = 0.5 * hi * weights
    log_norm = (df / 2.0) * math.log(df / 2.0) - math.lgamma(df / 2.0) + math.log(2.0)
    log_density = log_norm + (df - 1.0) * np.log(s) - df * s * s / 2.0
    density = np.exp(log_density)
    return float(np.clip(np.sum(w * density * _range_probability(q * s, k)), 0.0, 1.0))


@lru_cache(maxsize=256)
def studentized_range_quantile(prob: float, k: int, df: float) -> float:
    """Quantile of the studentized range via root finding on the CDF."""
    if not 0 < prob < 1:
        raise InputError(f"probability must be in (0, 1), got {prob}")
    return float(brentq(lambda q: studentized_range_cdf(q, k, df) - prob,
                        1e-9, 100.0, xtol=1e-10))


# q_{0.05; k; df} reference values used to cross-check the integrator;
# k is the group count, df the within degrees of freedom.
Q_TABLE_005 = {
    (2, 5): 3.6354, (3, 5): 4.6017, (4, 5): 5.2183, (5, 5): 5.6731, (6, 5): 6.0329,
    (2, 10): 3.1511, (3, 10): 3.8768, (4, 10): 4.3266, (5, 10): 4.6543, (6, 10): 4.9120,
    (2, 20): 2.9500, (3, 20): 3.5779, (4, 20): 3.9583, (5, 20): 4.2319, (6, 20): 4.4452,
    (2, 30): 2.8882, (3, 30): 3.4864, (4, 30): 3.8454, (5, 30): 4.1021, (6, 30): 4.3015,
    (2, 60): 2.8288, (3, 60): 3.3987, (4, 60): 3.7371, (5, 60): 3.9774, (6, 60): 4.1632,
    (2, math.inf): 2.7718, (3, math.inf): 3.3145,
    (4, math.inf): 3.6332, (5, math.inf): 3.8577, (6, math.inf): 4.0301,
}


# ---------------------------------------------------------------------------
# Tukey HSD


@dataclass
class TukeyResult:
    """All-pairs comparison at a fixed significance level.

    ``order`` lists labels by group mean ascending; ``significant`` maps
    unordered label pairs to the significance flag; ``chain`` renders the
    ranked chain with ``<*`` between adjacent groups whose difference is
    significant and ``=`` between exactly tied means.
    """

    order: list
    means: dict
    significant: dict
    q_critical: float
    alpha: float
    chain: str = field(init=False)

    def __post_init__(self):
        parts = [self.order[0]]
        for prev, cur in zip(self.order, self.order[1:]):
            if self.means[prev] == self.means[cur]:
                sep = "="
            elif self.significant[frozenset((prev, cur))]:
                sep = "<*"
            else:
                sep = "<"
            parts.extend([sep, cur])
        self.chain = " ".join(str(p) for p in parts)

    def is_significant(self, a, b) -> bool:
        return self.significant[frozenset((a, b))]


def tukey_hsd(groups, alpha: float = 0.05, labels=None) -> TukeyResult:
    """Tukey HSD (Tukey-Kramer for unequal sizes) over all group pairs.

    A post-hoc gate applies: calling this when the one-way ANOVA is not
    significant at ``alpha`` raises PostHocGateError.
    """
    samples = [np.asarray(g, dtype=float) for g in groups]
    anova = anova_oneway(samples)
    if not anova.p < alpha:
        raise PostHocGateError(
            f"ANOVA p = {anova.p:.4g} is not significant at alpha = {alpha}; "
            "post-hoc comparisons refused"
        )
    k = len(samples)
    if labels is None:
        labels = [f"group{i + 1}" for i in range(k)]
    labels = list(labels)
    if len(labels) != k:
        raise InputError("one label per group is required")

    q_crit = studentized_range_quantile(1.0 - alpha, k, float(anova.df_within))
    means = {lab: float(g.mean()) for lab, g in zip(labels, samples)}
    sizes = {lab: g.size for lab, g in zip(labels, samples)}

    significant = {}
    for i in range(k):
        for j in range(i + 1, k):
            a, b = labels[i], labels[j]
            half_width = q_crit * math.sqrt(
                anova.ms_within / 2.0 * (1.0 / sizes[a] + 1.0 / sizes[b])
            )
            significant[frozenset((a, b))] = bool(abs(means[a] - means[b]) > half_width)

    order = sorted(labels, key=lambda lab: means[lab])
    return TukeyResult(order, means, significant, q_crit, alpha)
