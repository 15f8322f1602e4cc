"""Invertible preprocessing: min-max scaling, multiplicative seasonal
decomposition, and Mann-Kendall gated polynomial detrending.

Every forward step records what it did in a PreprocessRecord, and every
step has an exact inverse, so forecasts made in transformed space can be
rolled back to the original scale before scoring.  All statistics are
estimated from the estimation sample only; hold-out positions are
handled by extrapolating the recorded transforms.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.stats import norm

from .exceptions import InputError, PreprocessingError

log = logging.getLogger(__name__)

NORMALIZE = "normalize"
DESEASONALIZE = "deseasonalize"
DETREND = "detrend"


@dataclass
class PreprocessRecord:
    """Parameters of the applied transforms, in application order."""

    data_min: float | None = None
    data_max: float | None = None
    seasonal_period: int | None = None
    seasonal_indices: np.ndarray | None = None
    trend_coeffs: np.ndarray | None = None
    n_estimation: int | None = None
    steps_applied: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self, path) -> None:
        payload = {
            "data_min": self.data_min,
            "data_max": self.data_max,
            "seasonal_period": self.seasonal_period,
            "seasonal_indices": (
                None if self.seasonal_indices is None else self.seasonal_indices.tolist()
            ),
            "trend_coeffs": (
                None if self.trend_coeffs is None else self.trend_coeffs.tolist()
            ),
            "n_estimation": self.n_estimation,
            "steps_applied": list(self.steps_applied),
            "notes": list(self.notes),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, path) -> "PreprocessRecord":
        with open(path) as fh:
            payload = json.load(fh)
        return cls(
            data_min=payload["data_min"],
            data_max=payload["data_max"],
            seasonal_period=payload["seasonal_period"],
            seasonal_indices=(
                None if payload["seasonal_indices"] is None
                else np.array(payload["seasonal_indices"], dtype=float)
            ),
            trend_coeffs=(
                None if payload["trend_coeffs"] is None
                else np.array(payload["trend_coeffs"], dtype=float)
            ),
            n_estimation=payload["n_estimation"],
            steps_applied=list(payload["steps_applied"]),
            notes=list(payload["notes"]),
        )


def normalize(values, record: PreprocessRecord) -> np.ndarray:
    """Min-max scale onto [0, 1], bounds taken from ``values`` itself.

    A constant sample cannot be scaled; it is passed through unchanged
    and the skip is noted on the record.
    """
    values = np.asarray(values, dtype=float)
    vmin, vmax = float(values.min()), float(values.max())
    if vmax <= vmin:
        record.notes.append("normalize skipped: constant estimation sample")
        return values.copy()
    record.data_min = vmin
    record.data_max = vmax
    record.steps_applied.append(NORMALIZE)
    return (values - vmin) / (vmax - vmin)


def apply_normalize(values, record: PreprocessRecord) -> np.ndarray:
    """Apply the recorded affine map to further values (may leave [0, 1])."""
    values = np.asarray(values, dtype=float)
    return (values - record.data_min) / (record.data_max - record.data_min)


def denormalize(values, record: PreprocessRecord) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return values * (record.data_max - record.data_min) + record.data_min


def _centered_moving_average(values: np.ndarray, period: int) -> tuple[np.ndarray, int]:
    """Centered MA of window ``period``; half weights at the ends for even
    periods.  Returns the averaged values and the offset of the first one."""
    if period % 2 == 0:
        weights = np.full(period + 1, 1.0 / period)
        weights[0] = weights[-1] = 0.5 / period
        offset = period // 2
    else:
        weights = np.full(period, 1.0 / period)
        offset = (period - 1) // 2
    smoothed = np.convolve(values, weights, mode="valid")  # weights are symmetric
    return smoothed, offset


def deseasonalize(values, period: int) -> tuple[np.ndarray, np.ndarray]:
    """Classical ratio-to-moving-average multiplicative decomposition.

    Returns the deseasonalized series and the length-``period`` index
    vector, rescaled to mean exactly 1.  Seasonal position is the
    absolute sample index modulo ``period``.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if period < 2:
        raise InputError(f"seasonal period must be >= 2, got {period}")
    if n < 2 * period:
        raise InputError(f"need at least {2 * period} observations, got {n}")
    if np.any(values < 0):
        raise PreprocessingError("multiplicative decomposition undefined for negative values")

    smoothed, offset = _centered_moving_average(values, period)
    if np.any(smoothed <= 0):
        raise PreprocessingError("moving average hit zero; multiplicative model undefined")
    positions = np.arange(offset, offset + smoothed.size)
    ratios = values[positions] / smoothed

    indices = np.empty(period)
    for season in range(period):
        mask = positions % period == season
        if not np.any(mask):
            raise PreprocessingError(f"season {season} has no ratio observations")
        indices[season] = ratios[mask].mean()
    if np.any(indices <= 0):
        raise PreprocessingError("seasonal index hit zero; multiplicative model undefined")
    indices *= period / indices.sum()

    deseasonalized = values / indices[np.arange(n) % period]
    return deseasonalized, indices


def reseasonalize(values, indices: np.ndarray, start_position: int = 0) -> np.ndarray:
    """Multiply the seasonal indices back in, continuing the cycle from
    ``start_position`` (absolute index of the first value)."""
    values = np.asarray(values, dtype=float)
    period = len(indices)
    positions = (start_position + np.arange(values.size)) % period
    return values * np.asarray(indices)[positions]


class MannKendallResult(NamedTuple):
    S: int
    var_s: float
    Z: float
    trend_detected: bool


def mann_kendall(values, alpha: float = 0.05) -> MannKendallResult:
    """Mann-Kendall trend test with the standard tie correction.

    S sums the signs of all pairwise forward differences; the normal
    approximation with continuity correction gives Z, and a trend is
    flagged when |Z| exceeds the two-sided normal quantile at ``alpha``.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 4:
        raise InputError(f"Mann-Kendall needs at least 4 observations, got {n}")
    diffs = np.sign(values[None, :] - values[:, None])
    s = int(np.sum(np.triu(diffs, k=1)))

    _, tie_counts = np.unique(values, return_counts=True)
    ties = tie_counts[tie_counts > 1]
    var_s = (n * (n - 1) * (2 * n + 5) - np.sum(ties * (ties - 1) * (2 * ties + 5))) / 18.0
    if var_s <= 0:
        return MannKendallResult(s, 0.0, 0.0, False)

    if s > 0:
        z = (s - 1) / np.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / np.sqrt(var_s)
    else:
        z = 0.0
    detected = abs(z) > norm.ppf(1.0 - alpha / 2.0)
    return MannKendallResult(s, float(var_s), float(z), bool(detected))


def detrend(values, degree: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares polynomial trend in t = 1..N; returns residuals and
    ascending coefficients."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if degree < 1 or degree >= n:
        raise InputError(f"polynomial degree {degree} invalid for {n} observations")
    t = np.arange(1, n + 1, dtype=float)
    coeffs = np.polynomial.polynomial.polyfit(t, values, degree)
    residuals = values - np.polynomial.polynomial.polyval(t, coeffs)
    return residuals, coeffs


def retrend(values, coeffs: np.ndarray, start_position: int = 0) -> np.ndarray:
    """Add the fitted trend back, extrapolating past the estimation sample."""
    values = np.asarray(values, dtype=float)
    t = np.arange(start_position + 1, start_position + values.size + 1, dtype=float)
    return values + np.polynomial.polynomial.polyval(t, np.asarray(coeffs))


def preprocess(values, *, period: int | None = None, detrend_degree: int = 1,
               alpha: float = 0.05) -> tuple[np.ndarray, PreprocessRecord]:
    """Run the full pipeline on an estimation sample.

    Order is fixed: normalize, then deseasonalize when a period is given
    and the original sample is positive and long enough, then detrend
    when the Mann-Kendall test flags a trend.  The single zero produced
    by min-max scaling is tolerated by the decomposition.
    """
    values = np.asarray(values, dtype=float)
    record = PreprocessRecord(n_estimation=values.size)
    out = normalize(values, record)

    if period is not None and period >= 2:
        if not np.all(values > 0):
            record.notes.append("deseasonalize skipped: non-positive values")
        elif values.size < 2 * period:
            record.notes.append(
                f"deseasonalize skipped: fewer than {2 * period} observations"
            )
            log.warning("series too short for seasonal decomposition; skipping")
        else:
            try:
                out_season, indices = deseasonalize(out, period)
            except PreprocessingError as exc:
                record.notes.append(f"deseasonalize skipped: {exc}")
                log.warning("seasonal decomposition skipped: %s", exc)
            else:
                out = out_season
                record.seasonal_period = period
                record.seasonal_indices = indices
                record.steps_applied.append(DESEASONALIZE)

    if values.size >= 4:
        mk = mann_kendall(out, alpha=alpha)
        if mk.trend_detected:
            out, coeffs = detrend(out, degree=detrend_degree)
            record.trend_coeffs = coeffs
            record.steps_applied.append(DETREND)
    return out, record


def rollback(values, record: PreprocessRecord, start_position: int = 0) -> np.ndarray:
    """Invert the recorded pipeline, last step first.

    ``start_position`` is the absolute index of the first value, so
    hold-out forecasts (start_position = n_estimation) pick up the right
    seasonal phase and trend extrapolation.
    """
    out = np.asarray(values, dtype=float)
    for step in reversed(record.steps_applied):
        if step == DETREND:
            out = retrend(out, record.trend_coeffs, start_position)
        elif step == DESEASONALIZE:
            out = reseasonalize(out, record.seasonal_indices, start_position)
        elif step == NORMALIZE:
            out = denormalize(out, record)
        else:
            raise InputError(f"unknown preprocessing step in record: {step!r}")
    return out
