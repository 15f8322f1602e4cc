"""Lag selection via the nearest-neighbor Delta test.

The Delta test estimates the output noise variance reachable by any
smooth model of the inputs: half the mean squared output gap between
each point and its nearest input-space neighbor.  For multi-output
targets the squared gap sums over outputs, which is the extension that
makes the criterion usable for vector forecasts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .strategies import DIRECT, ITERATED, MIMO, TimeSeries, embed

WINDOW_SEARCH = "windows"
FORWARD_SEARCH = "forward"


@dataclass
class SelectionResult:
    chosen_lags: tuple
    delta_value: float
    candidates_evaluated: int
    evaluated: list = field(default_factory=list)  # (lags, delta) pairs in scan order


def delta_test(inputs, outputs) -> float:
    """Delta test value (1 / 2n) * sum_i ||y_nn(i) - y_i||^2.

    Nearest neighbors use Euclidean distance, self excluded, distance
    ties broken toward the lowest index.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    outputs = np.asarray(outputs, dtype=float)
    if outputs.ndim == 1:
        outputs = outputs[:, None]
    n = inputs.shape[0]
    if n < 2:
        raise InputError(f"Delta test needs at least 2 samples, got {n}")
    if outputs.shape[0] != n:
        raise InputError("inputs and outputs must have equal row counts")

    diff = inputs[:, None, :] - inputs[None, :, :]
    sq_dist = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(sq_dist, np.inf)
    nearest = np.argmin(sq_dist, axis=1)  # argmin takes the first (lowest) index on ties

    gaps = outputs[nearest] - outputs
    return float(np.sum(gaps * gaps) / (2.0 * n))


def _selection_dataset(series: TimeSeries, lags, horizon: int, mode: str):
    """Embedding used to score a candidate lag set.

    The iterated strategy scores against the one-step target; direct and
    mimo both score against the full H-column target block (the direct
    strategy's per-horizon targets, stacked).
    """
    if mode == ITERATED:
        return embed(series, lags, 1, ITERATED)
    if mode in (DIRECT, MIMO):
        return embed(series, lags, horizon, MIMO)
    raise InputError(f"unknown strategy mode: {mode!r}")


def select_inputs(series: TimeSeries, max_lag: int, horizon: int, mode: str,
                  search: str = WINDOW_SEARCH) -> SelectionResult:
    """Pick the lag set minimizing the Delta test.

    ``windows`` scans contiguous windows {t, ..., t-k+1} for k = 1..max_lag;
    ``forward`` greedily adds the single lag that lowers the delta most,
    stopping when no addition improves it.  Ties keep the smaller lag set
    (fewer lags, then smaller indices), so candidates are scanned in that
    order with strict improvement required.
    """
    if max_lag < 1:
        raise InputError(f"max_lag must be >= 1, got {max_lag}")

    evaluated = []

    def score(lags):
        ds = _selection_dataset(series, lags, horizon, mode)
        value = delta_test(ds.inputs, ds.outputs)
        evaluated.append((tuple(sorted(lags)), value))
        return value

    if search == WINDOW_SEARCH:
        best_lags, best_delta = None, np.inf
        for k in range(1, max_lag + 1):
            lags = tuple(range(k))
            try:
                value = score(lags)
            except InputError:
                continue  # window too wide for the series; smaller ones may fit
            if value < best_delta:
                best_lags, best_delta = lags, value
        if best_lags is None:
            raise InputError("no feasible lag window for this series and horizon")
        return SelectionResult(best_lags, best_delta, len(evaluated), evaluated)

    if search == FORWARD_SEARCH:
        chosen: list[int] = []
        best_delta = np.inf
        while True:
            best_add, best_add_delta = None, best_delta
            for lag in range(max_lag):
                if lag in chosen:
                    continue
                try:
                    value = score(tuple(chosen) + (lag,))
                except InputError:
                    continue
                if value < best_add_delta:
                    best_add, best_add_delta = lag, value
            if best_add is None:
                break
            chosen.append(best_add)
            best_delta = best_add_delta
        if not chosen:
            raise InputError("no feasible lag candidate for this series and horizon")
        return SelectionResult(tuple(sorted(chosen)), best_delta, len(evaluated), evaluated)

    raise InputError(f"unknown search method: {search!r}")
