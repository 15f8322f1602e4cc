import numpy as np
import pytest

from msvr_forecast import (DIRECT, ITERATED, MIMO, Hyperparams, InputError,
                           KernelConfig, TimeSeries, embed, fit,
                           forecast_direct, forecast_iterated, forecast_mimo,
                           forecast_naive, forecast_seasonal_naive)


class StubPredictor:
    """Test double: applies fn to each input row, returns a column block."""

    def __init__(self, fn, width=1):
        self.fn = fn
        self.width = width

    def predict(self, inputs):
        inputs = np.atleast_2d(inputs)
        out = np.array([np.atleast_1d(self.fn(row)) for row in inputs], dtype=float)
        return out.reshape(inputs.shape[0], self.width)


def one_to_ten():
    return TimeSeries(np.arange(1.0, 11.0), name="1..10")


# ---------------------------------------------------------------------------
# TimeSeries validation


def test_series_too_short():
    with pytest.raises(InputError):
        TimeSeries(np.array([1.0]))


def test_series_non_finite():
    with pytest.raises(InputError):
        TimeSeries(np.array([1.0, np.nan, 2.0]))


# ---------------------------------------------------------------------------
# embed


def test_embed_mimo_hand_enumeration():
    ds = embed(one_to_ten(), [0, 1], horizon=2, mode=MIMO)
    assert ds.n_rows == 7
    np.testing.assert_array_equal(ds.inputs[0], [2.0, 1.0])
    np.testing.assert_array_equal(ds.outputs[0], [3.0, 4.0])
    np.testing.assert_array_equal(ds.inputs[-1], [8.0, 7.0])
    np.testing.assert_array_equal(ds.outputs[-1], [9.0, 10.0])
    assert ds.horizon_offsets == (1, 2)


def test_embed_iterated_hand_enumeration():
    ds = embed(one_to_ten(), [0, 1], horizon=2, mode=ITERATED)
    assert ds.n_rows == 8
    np.testing.assert_array_equal(ds.inputs[-1], [9.0, 8.0])
    np.testing.assert_array_equal(ds.outputs[-1], [10.0])
    assert ds.horizon_offsets == (1,)


def test_embed_direct_hand_enumeration():
    datasets = embed(one_to_ten(), [0, 1], horizon=2, mode=DIRECT)
    assert len(datasets) == 2
    h2 = datasets[1]
    np.testing.assert_array_equal(h2.inputs[-1], [8.0, 7.0])
    np.testing.assert_array_equal(h2.outputs[-1], [10.0])
    assert h2.horizon_offsets == (2,)


def test_embed_non_contiguous_lags():
    ds = embed(one_to_ten(), [0, 3], horizon=1, mode=ITERATED)
    # anchor must reach back 3 steps: first row is (4, 1) -> 5
    np.testing.assert_array_equal(ds.inputs[0], [4.0, 1.0])
    np.testing.assert_array_equal(ds.outputs[0], [5.0])


def test_embed_no_leakage():
    series = one_to_ten()
    for mode in (ITERATED, MIMO):
        ds = embed(series, [0, 2], horizon=3, mode=mode)
        datasets = [ds]
        if mode == ITERATED:
            datasets = [ds]
        for d in datasets:
            for row in range(d.n_rows):
                # every input value predates every output value in the series
                assert d.inputs[row].max() < d.outputs[row].min()


def test_embed_too_short_names_shortfall():
    short = TimeSeries(np.arange(1.0, 5.0), name="tiny")
    with pytest.raises(InputError, match="tiny"):
        embed(short, [0, 1, 2], horizon=3, mode=MIMO)


def test_embed_empty_lags_rejected():
    with pytest.raises(InputError):
        embed(one_to_ten(), [], horizon=1, mode=ITERATED)


# ---------------------------------------------------------------------------
# iterated forecasts


def test_iterated_identity_stub_repeats_last_value():
    series = one_to_ten()
    stub = StubPredictor(lambda row: row[0])
    result = forecast_iterated(stub, series, [0, 1], horizon=5)
    np.testing.assert_array_equal(result.point_forecasts, np.full(5, 10.0))


def test_iterated_constant_stub():
    stub = StubPredictor(lambda row: 42.0)
    result = forecast_iterated(stub, one_to_ten(), [0], horizon=4)
    np.testing.assert_array_equal(result.point_forecasts, np.full(4, 42.0))


def test_iterated_hand_unrolled_recursion():
    series = TimeSeries(np.array([7.0, 7.0, 2.0, 3.0]), name="fib-tail")
    stub = StubPredictor(lambda row: row[0] + row[1])
    result = forecast_iterated(stub, series, [0, 1], horizon=3)
    np.testing.assert_array_equal(result.point_forecasts, [5.0, 8.0, 13.0])


def test_iterated_uses_real_values_while_available():
    # lags reach deep enough that early steps consume only real observations
    seen = []
    series = one_to_ten()

    def record(row):
        seen.append(tuple(row))
        return 100.0

    forecast_iterated(StubPredictor(record), series, [0, 3], horizon=3)
    # h=1 anchors at value 10: lags 0,3 -> (10, 7); h=2 -> (100, 8); h=3 -> (100, 9)
    assert seen[0] == (10.0, 7.0)
    assert seen[1] == (100.0, 8.0)
    assert seen[2] == (100.0, 9.0)


# ---------------------------------------------------------------------------
# direct forecasts


def test_direct_constant_stubs():
    models = [StubPredictor(lambda row, c=c: c) for c in (1.0, 2.0, 3.0)]
    result = forecast_direct(models, one_to_ten(), [0, 1], horizon=3)
    np.testing.assert_array_equal(result.point_forecasts, [1.0, 2.0, 3.0])


def test_direct_scaled_first_lag():
    series = TimeSeries(np.array([1.0, 1.0, 2.0]), name="ends-2")
    models = [StubPredictor(lambda row, h=h: h * row[0]) for h in (1, 2, 3)]
    result = forecast_direct(models, series, [0], horizon=3)
    np.testing.assert_array_equal(result.point_forecasts, [2.0, 4.0, 6.0])


def test_direct_model_count_mismatch():
    with pytest.raises(InputError):
        forecast_direct([StubPredictor(lambda r: 0.0)], one_to_ten(), [0], horizon=2)


# ---------------------------------------------------------------------------
# mimo forecasts


def test_mimo_intercept_only_model():
    stub = StubPredictor(lambda row: [5.0, -1.0, 0.5], width=3)
    result = forecast_mimo(stub, one_to_ten(), [0, 1], horizon=3)
    np.testing.assert_array_equal(result.point_forecasts, [5.0, -1.0, 0.5])


def test_mimo_width_mismatch():
    stub = StubPredictor(lambda row: [1.0, 2.0], width=2)
    with pytest.raises(InputError):
        forecast_mimo(stub, one_to_ten(), [0], horizon=3)


def test_mimo_trained_near_constant_targets():
    rng = np.random.default_rng(0)
    values = np.concatenate([rng.uniform(2.0, 2.1, size=30), [2.05, 2.05]])
    series = TimeSeries(values, name="near-const")
    eps = 0.5
    hyper = Hyperparams(C=10.0, epsilon=eps, kernel=KernelConfig(gamma=1.0))
    ds = embed(series, [0, 1], horizon=3, mode=MIMO)
    model = fit(ds.inputs, ds.outputs, hyper)
    result = forecast_mimo(model, series, [0, 1], horizon=3)
    means = ds.outputs.mean(axis=0)
    assert np.all(np.abs(result.point_forecasts - means) <= eps)


# ---------------------------------------------------------------------------
# naive benchmarks


def test_naive_repeats_last():
    series = TimeSeries(np.array([1.0, 2.0, 3.0]))
    result = forecast_naive(series, 4)
    np.testing.assert_array_equal(result.point_forecasts, [3.0, 3.0, 3.0, 3.0])


def test_seasonal_naive_recycles_cycle():
    series = TimeSeries(np.array([10.0, 20.0, 30.0, 40.0]), period=2)
    result = forecast_seasonal_naive(series, 3)
    np.testing.assert_array_equal(result.point_forecasts, [30.0, 40.0, 30.0])


def test_seasonal_naive_period_one_equals_naive():
    series = TimeSeries(np.array([5.0, 6.0, 7.0]), period=1)
    seasonal = forecast_seasonal_naive(series, 4)
    naive = forecast_naive(series, 4)
    np.testing.assert_array_equal(seasonal.point_forecasts, naive.point_forecasts)


def test_seasonal_naive_requires_period():
    series = TimeSeries(np.array([1.0, 2.0, 3.0]))
    with pytest.raises(InputError):
        forecast_seasonal_naive(series, 2)


# ---------------------------------------------------------------------------
# horizon-1 coincidence of all strategies


def test_horizon_one_strategies_coincide():
    rng = np.random.default_rng(21)
    series = TimeSeries(np.sin(np.arange(40) * 0.3) + 0.1 * rng.normal(size=40),
                        name="h1")
    lags = (0, 1, 2)
    hyper = Hyperparams(C=10.0, epsilon=0.01, kernel=KernelConfig(gamma=1.0))
    ds = embed(series, lags, horizon=1, mode=ITERATED)
    model = fit(ds.inputs, ds.outputs, hyper)

    it = forecast_iterated(model, series, lags, 1).point_forecasts
    di = forecast_direct([model], series, lags, 1).point_forecasts
    mi = forecast_mimo(model, series, lags, 1).point_forecasts
    assert abs(it[0] - di[0]) < 1e-12
    assert abs(it[0] - mi[0]) < 1e-12


def test_forecast_lengths_match_horizon():
    series = one_to_ten()
    stub1 = StubPredictor(lambda row: row[0])
    assert forecast_iterated(stub1, series, [0], 7).point_forecasts.shape == (7,)
    assert forecast_naive(series, 7).point_forecasts.shape == (7,)
    stub3 = StubPredictor(lambda row: [1.0, 2.0, 3.0], width=3)
    assert forecast_mimo(stub3, series, [0], 3).point_forecasts.shape == (3,)
