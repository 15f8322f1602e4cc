import json
import os

import numpy as np
import pytest

from msvr_forecast import (ExperimentManifest, ForecastToolkitError,
                           IngestError, InputError, SeriesSpec, TimeSeries,
                           benchmark_strategies, ingest_csv,
                           materialize_series, run_experiment,
                           train_and_forecast)
from msvr_forecast.harness import (SIMULATED_SERIES_TABLE, derive_seed,
                                   henon_table_specs, mackey_glass_table_specs)
from msvr_forecast.tuning import PsoConfig


def tiny_manifest(**overrides):
    base = dict(
        series=(SeriesSpec("mackey_glass", name="mg-t", period=6,
                           params={"phi0": 1.2, "tau": 17.0, "length": 90}),),
        holdout_length=6,
        strategies=("naive", "seasonal-naive", "iterated", "direct", "mimo"),
        replicates=2,
        seed=1,
        pso=PsoConfig(swarm_size=3, iterations=2),
        cv_folds=4,
        max_lag=4,
    )
    base.update(overrides)
    return ExperimentManifest(**base)


# ---------------------------------------------------------------------------
# CSV ingestion


def test_ingest_two_columns_with_header(tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("s1,s2\n1,4\n2,5\n3,6\n")
    series = ingest_csv(path)
    assert [s.name for s in series] == ["s1", "s2"]
    np.testing.assert_array_equal(series[0].values, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(series[1].values, [4.0, 5.0, 6.0])


def test_ingest_trailing_blanks_give_unequal_lengths(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("long,short\n1,9\n2,8\n3,\n4,\n")
    series = ingest_csv(path)
    assert len(series[0]) == 4
    assert len(series[1]) == 2
    np.testing.assert_array_equal(series[1].values, [9.0, 8.0])


def test_ingest_empty_file_fails(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(IngestError):
        ingest_csv(path)


def test_ingest_unparseable_cell_has_coordinates(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3,oops\n")
    with pytest.raises(IngestError, match=r"row 3, column 2"):
        ingest_csv(path)


def test_ingest_interior_blank_rejected(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text("a,b\n1,5\n,6\n3,7\n")
    with pytest.raises(IngestError, match="blank cell inside"):
        ingest_csv(path)


def test_ingest_headerless_numeric(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("1,10\n2,20\n3,30\n")
    series = ingest_csv(path)
    assert [s.name for s in series] == ["s1", "s2"]
    np.testing.assert_array_equal(series[1].values, [10.0, 20.0, 30.0])


def test_ingest_row_oriented_with_labels(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("alpha,1,2,3,4\nbeta,9,8,7\n")
    series = ingest_csv(path)
    assert [s.name for s in series] == ["alpha", "beta"]
    np.testing.assert_array_equal(series[0].values, [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(series[1].values, [9.0, 8.0, 7.0])


# ---------------------------------------------------------------------------
# manifest and materialization


def test_manifest_json_round_trip(tmp_path):
    manifest = tiny_manifest()
    path = tmp_path / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest.to_dict(), fh)
    loaded = ExperimentManifest.from_json(path)
    assert loaded == manifest


def test_materialize_generators():
    manifest = tiny_manifest()
    series = materialize_series(manifest)
    assert len(series) == 1 and series[0].name == "mg-t"
    assert len(series[0]) == 90 and series[0].period == 6


def test_materialize_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("a,b\n" + "\n".join(f"{i},{i * 2}" for i in range(1, 31)))
    manifest = tiny_manifest(series=(
        SeriesSpec("csv", name="file", period=4, params={"path": str(path)}),))
    series = materialize_series(manifest)
    assert [s.name for s in series] == ["a", "b"]
    assert all(s.period == 4 for s in series)


def test_simulated_table_shape():
    assert len(SIMULATED_SERIES_TABLE) == 20
    specs_h = henon_table_specs(rows=[1, 2])
    assert specs_h[0].params == {"x0": 0.1, "y0": 0.1, "length": 205}
    specs_m = mackey_glass_table_specs(rows=[5])
    assert specs_m[0].params == {"phi0": 1.8, "tau": 15.0, "length": 389}


def test_derive_seed_deterministic_and_distinct():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(1, 2, 4)


def test_manifest_validation():
    with pytest.raises(InputError):
        tiny_manifest(holdout_length=0)
    with pytest.raises(InputError):
        tiny_manifest(replicates=0)
    with pytest.raises(InputError):
        tiny_manifest(strategies=("warp",))


# ---------------------------------------------------------------------------
# single-unit pipeline


def test_unit_forecast_lengths_and_scale():
    manifest = tiny_manifest()
    series = materialize_series(manifest)[0]
    out = train_and_forecast(series, manifest, 0, 0)
    for model, forecast in out["forecasts"].items():
        assert forecast.shape == (6,)
        assert np.all(np.isfinite(forecast))
    # forecasts are on the original scale, near the series' range
    values = series.values
    for forecast in out["forecasts"].values():
        assert np.all(forecast > values.min() - 2.0)
        assert np.all(forecast < values.max() + 2.0)


def test_unit_never_reads_holdout():
    manifest = tiny_manifest()
    series = materialize_series(manifest)[0]
    tampered = TimeSeries(series.values.copy(), period=series.period,
                          name=series.name)
    tampered.values[-manifest.holdout_length:] = 1e6  # poison the hold-out
    base = train_and_forecast(series, manifest, 0, 0)
    poked = train_and_forecast(tampered, manifest, 0, 0)
    for model in base["forecasts"]:
        np.testing.assert_array_equal(base["forecasts"][model],
                                      poked["forecasts"][model])
    assert base["artifacts"]["seeds"] == poked["artifacts"]["seeds"]


def test_unit_replicates_differ_only_by_seed():
    manifest = tiny_manifest()
    series = materialize_series(manifest)[0]
    rep0 = train_and_forecast(series, manifest, 0, 0)
    rep1 = train_and_forecast(series, manifest, 0, 1)
    assert rep0["artifacts"]["seeds"] != rep1["artifacts"]["seeds"]
    # benchmarks are deterministic, identical across replicates
    np.testing.assert_array_equal(rep0["forecasts"]["naive"],
                                  rep1["forecasts"]["naive"])


# ---------------------------------------------------------------------------
# full runs


def test_constant_series_run(tmp_path):
    values = np.full(60, 5.0)
    path = tmp_path / "const.csv"
    path.write_text("c\n" + "\n".join(str(v) for v in values))
    manifest = tiny_manifest(series=(
        SeriesSpec("csv", name="const", period=4, params={"path": str(path)}),))
    report = run_experiment(manifest, output_dir=str(tmp_path / "run"))
    idx = {m: i for i, m in enumerate(report.models)}
    assert np.allclose(report.metric_means["mape"][idx["naive"]], 0.0)
    assert np.allclose(report.metric_means["smape"][idx["naive"]], 0.0)
    for model in ("iter-svr", "dir-svr", "mimo-svr"):
        assert np.all(report.metric_means["smape"][idx[model]] < 1e-6)
    # constant estimation sample: MASE is undefined and tallied
    assert report.exclusions["mase_constant_estimation_sample"] > 0


def test_run_reports_written_and_consistent(tmp_path):
    manifest = tiny_manifest()
    run_dir = tmp_path / "run"
    report = run_experiment(manifest, output_dir=str(run_dir))
    for name in ("manifest.json", "scores.json", "metrics.csv", "averages.csv",
                 "anova.csv", "timing.csv", "tukey_chains.txt",
                 "tukey_flags.csv"):
        assert (run_dir / name).exists(), name
    assert (run_dir / "figures" / "smape_by_horizon.png").exists()
    assert (run_dir / "figures" / "elapsed_time.png").exists()
    assert (run_dir / "figures" / "forecast_mg-t.png").exists()
    assert (run_dir / "series" / "mg-t" / "preprocess_record.json").exists()
    assert (run_dir / "series" / "mg-t" / "forecasts.csv").exists()

    # average columns equal the mean of their per-horizon entries
    import csv as csv_mod

    with open(run_dir / "metrics.csv") as fh:
        rows = list(csv_mod.DictReader(fh))
    by_model = {}
    for row in rows:
        by_model.setdefault(row["model"], []).append(float(row["smape"]))
    for m_i, model in enumerate(report.models):
        np.testing.assert_allclose(
            np.mean(by_model[model]),
            report.band_average("smape", 1, report.horizon)[m_i], atol=1e-10)


def test_identical_seeds_byte_identical_reports(tmp_path):
    manifest = tiny_manifest()
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    run_experiment(manifest, output_dir=str(dir_a))
    run_experiment(manifest, output_dir=str(dir_b))
    for name in ("metrics.csv", "averages.csv", "scores.json", "anova.csv",
                 "tukey_chains.txt", "tukey_flags.csv"):
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes(), name


def test_failed_series_recorded_and_skipped(tmp_path):
    good = SeriesSpec("mackey_glass", name="ok", period=6,
                      params={"phi0": 1.2, "tau": 17.0, "length": 90})
    bad = SeriesSpec("henon", name="boom",
                     params={"x0": 50.0, "y0": 0.0, "length": 90})
    manifest = tiny_manifest(series=(good, bad))
    report = run_experiment(manifest, output_dir=str(tmp_path / "run"))
    assert "boom" in report.failures
    assert report.series_names == ["ok"]


def test_all_series_failing_raises(tmp_path):
    bad = SeriesSpec("henon", name="boom",
                     params={"x0": 50.0, "y0": 0.0, "length": 90})
    manifest = tiny_manifest(series=(bad,))
    with pytest.raises(ForecastToolkitError):
        run_experiment(manifest, output_dir=str(tmp_path / "run"))


def test_env_output_dir_override(tmp_path, monkeypatch):
    manifest = tiny_manifest(replicates=1, strategies=("naive",))
    target = tmp_path / "env-run"
    monkeypatch.setenv("MSVR_OUTPUT_DIR", str(target))
    report = run_experiment(manifest)
    assert report.run_dir == str(target)
    assert target.exists()


def test_parallel_workers_match_serial(tmp_path, monkeypatch):
    manifest = tiny_manifest()
    serial = run_experiment(manifest, output_dir=str(tmp_path / "s"))
    monkeypatch.setenv("MSVR_WORKERS", "2")
    parallel = run_experiment(manifest, output_dir=str(tmp_path / "p"))
    for metric in ("mape", "smape", "mase"):
        np.testing.assert_array_equal(serial.per_replicate[metric],
                                      parallel.per_replicate[metric])
    assert (tmp_path / "s" / "metrics.csv").read_bytes() == \
        (tmp_path / "p" / "metrics.csv").read_bytes()


# ---------------------------------------------------------------------------
# bench


def test_bench_dir_costs_more(tmp_path):
    manifest = tiny_manifest(
        holdout_length=6,
        strategies=("iterated", "direct", "mimo"),
        replicates=1,
        pso=PsoConfig(swarm_size=3, iterations=2),
    )
    report, summary = benchmark_strategies(
        manifest, output_dir=str(tmp_path / "bench"))
    assert summary["ratios"]["dir_over_mimo"] > 1.5
    assert summary["ratios"]["dir_over_iter"] > 1.5
    assert (tmp_path / "bench" / "bench_summary.json").exists()
    assert all(t.train_seconds > 0 for t in report.timings)


def test_report_rerender_round_trip(tmp_path):
    from msvr_forecast.report import render_run

    manifest = tiny_manifest()
    run_dir = tmp_path / "run"
    run_experiment(manifest, output_dir=str(run_dir))
    metrics_before = (run_dir / "metrics.csv").read_bytes()
    (run_dir / "metrics.csv").unlink()
    render_run(str(run_dir))
    assert (run_dir / "metrics.csv").read_bytes() == metrics_before
