"""Lag embeddings and the multi-step-ahead forecasting strategies.

Three model-based strategies cover the horizon H:

* iterated: one 1-step model applied recursively, feeding its own
  predictions back in once the series runs out of real observations;
* direct: H independent single-output models, one per horizon;
* mimo: a single multi-output model that emits all H values at once.

Naive (repeat the last value) and seasonal naive (repeat the last
cycle) serve as benchmarks.  Forecast functions accept any object with
a ``predict(inputs) -> (m, width)`` method, so stub predictors can be
used in tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError

ITERATED = "iterated"
DIRECT = "direct"
MIMO = "mimo"
NAIVE = "naive"
SEASONAL_NAIVE = "seasonal-naive"

SVR_STRATEGIES = (ITERATED, DIRECT, MIMO)
ALL_STRATEGIES = (NAIVE, SEASONAL_NAIVE) + SVR_STRATEGIES


@dataclass
class TimeSeries:
    """An ordered sequence of real observations with optional seasonality."""

    values: np.ndarray
    period: int | None = None
    name: str = "series"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.values.size < 2:
            raise InputError(f"series {self.name!r} needs at least 2 observations")
        if not np.all(np.isfinite(self.values)):
            raise InputError(f"series {self.name!r} contains non-finite values")
        if self.period is not None and self.period < 1:
            raise InputError(f"period must be a positive integer, got {self.period}")

    def __len__(self) -> int:
        return self.values.size


@dataclass
class EmbeddedDataset:
    """Input/output pair matrices produced by lag embedding.

    ``lag_indices`` are offsets back from the anchor time t (0 is the
    current observation); ``horizon_offsets`` are the future steps each
    output column holds.
    """

    inputs: np.ndarray
    outputs: np.ndarray
    lag_indices: tuple
    horizon_offsets: tuple

    @property
    def n_rows(self) -> int:
        return self.inputs.shape[0]


@dataclass
class ForecastResult:
    point_forecasts: np.ndarray
    strategy: str
    elapsed_train: float = 0.0
    elapsed_predict: float = 0.0

    def __post_init__(self):
        self.point_forecasts = np.asarray(self.point_forecasts, dtype=float).ravel()
        if not np.all(np.isfinite(self.point_forecasts)):
            raise InputError("forecast contains non-finite values")


def _normalize_lags(lag_indices) -> tuple:
    lags = tuple(sorted(int(l) for l in set(lag_indices)))
    if not lags:
        raise InputError("lag index set must be non-empty")
    if lags[0] < 0:
        raise InputError("lag indices must be non-negative offsets back from t")
    return lags


def embed(series: TimeSeries, lag_indices, horizon: int, mode: str):
    """Embed a series into supervised input/output form.

    Returns one dataset for the iterated and mimo modes, a list of H
    datasets (one per horizon) for the direct mode.  Row counts are the
    maximum the index constraints permit.
    """
    lags = _normalize_lags(lag_indices)
    if horizon < 1:
        raise InputError(f"horizon must be >= 1, got {horizon}")
    values = series.values
    n = values.size
    max_lag = lags[-1]

    def build(target_offsets):
        span = max(target_offsets)
        rows = n - max_lag - span
        if rows < 1:
            raise InputError(
                f"series {series.name!r} has {n} observations; embedding with "
                f"max lag {max_lag} and target offset {span} needs at least "
                f"{max_lag + span + 1}"
            )
        anchors = np.arange(max_lag, n - span)  # 0-based index of the anchor value
        inputs = np.stack([values[anchors - l] for l in lags], axis=1)
        outputs = np.stack([values[anchors + h] for h in target_offsets], axis=1)
        return EmbeddedDataset(inputs, outputs, lags, tuple(target_offsets))

    if mode == ITERATED:
        return build((1,))
    if mode == MIMO:
        return build(tuple(range(1, horizon + 1)))
    if mode == DIRECT:
        return [build((h,)) for h in range(1, horizon + 1)]
    raise InputError(f"unknown embedding mode: {mode!r}")


def _last_lag_vector(values: np.ndarray, lags: tuple, anchor: int) -> np.ndarray:
    if anchor - lags[-1] < 0:
        raise InputError("series too short for the requested lag set")
    return np.array([values[anchor - l] for l in lags])


def forecast_iterated(model, series: TimeSeries, lag_indices, horizon: int) -> ForecastResult:
    """Recursive one-step forecasting.

    Real observations feed the recursion for as long as the needed index
    exists; beyond the end of the series the model's own predictions are
    substituted.
    """
    lags = _normalize_lags(lag_indices)
    n = len(series)
    extended = list(series.values)
    start = time.perf_counter()
    for h in range(1, horizon + 1):
        anchor = n + h - 2  # 0-based index of the most recent available value
        x = np.array([extended[anchor - l] for l in lags])
        pred = np.asarray(model.predict(x[None, :]), dtype=float)
        if pred.shape[1] != 1:
            raise InputError("iterated strategy needs a single-output model")
        extended.append(float(pred[0, 0]))
    elapsed = time.perf_counter() - start
    return ForecastResult(np.array(extended[n:]), ITERATED, elapsed_predict=elapsed)


def forecast_direct(models, series: TimeSeries, lag_indices, horizon: int) -> ForecastResult:
    """One model per horizon, each applied to the final real lag vector."""
    models = list(models)
    if len(models) != horizon:
        raise InputError(f"direct strategy needs {horizon} models, got {len(models)}")
    lags = _normalize_lags(lag_indices)
    x = _last_lag_vector(series.values, lags, len(series) - 1)
    start = time.perf_counter()
    forecasts = np.empty(horizon)
    for h, model in enumerate(models):
        pred = np.asarray(model.predict(x[None, :]), dtype=float)
        if pred.shape[1] != 1:
            raise InputError("direct strategy needs single-output models")
        forecasts[h] = pred[0, 0]
    elapsed = time.perf_counter() - start
    return ForecastResult(forecasts, DIRECT, elapsed_predict=elapsed)


def forecast_mimo(model, series: TimeSeries, lag_indices, horizon: int) -> ForecastResult:
    """Single multi-output prediction on the final real lag vector."""
    lags = _normalize_lags(lag_indices)
    x = _last_lag_vector(series.values, lags, len(series) - 1)
    start = time.perf_counter()
    pred = np.asarray(model.predict(x[None, :]), dtype=float)
    elapsed = time.perf_counter() - start
    if pred.shape[1] != horizon:
        raise InputError(
            f"mimo model emits {pred.shape[1]} outputs, horizon is {horizon}"
        )
    return ForecastResult(pred[0], MIMO, elapsed_predict=elapsed)


def forecast_naive(series: TimeSeries, horizon: int) -> ForecastResult:
    start = time.perf_counter()
    forecasts = np.full(horizon, series.values[-1])
    elapsed = time.perf_counter() - start
    return ForecastResult(forecasts, NAIVE, elapsed_predict=elapsed)


def forecast_seasonal_naive(series: TimeSeries, horizon: int,
                            period: int | None = None) -> ForecastResult:
    """Repeat the last observed seasonal cycle, recycling it beyond one period."""
    p = period if period is not None else series.period
    if p is None:
        raise InputError(f"series {series.name!r} has no period for seasonal naive")
    n = len(series)
    if p > n:
        raise InputError(f"period {p} exceeds series length {n}")
    start = time.perf_counter()
    offsets = (np.arange(horizon)) % p
    forecasts = series.values[n - p + offsets]
    elapsed = time.perf_counter() - start
    return ForecastResult(forecasts, SEASONAL_NAIVE, elapsed_predict=elapsed)
