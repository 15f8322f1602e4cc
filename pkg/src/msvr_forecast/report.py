"""Report emission: delimited tables, Tukey chains, and figures.

Every run directory receives the metric table CSV, band averages with
ranks, ANOVA and Tukey outputs, a timing CSV, the raw per-replicate
scores (so ``report`` can re-render everything later), per-series
artifacts, and rendered figures next to the delimited output.  Floats
are written with repr so identical runs produce byte-identical files;
timing values are kept in their own file since wall-clock times differ
between runs.
"""

from __future__ import annotations

import csv
import json
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import METRICS, EvaluationReport, TimingRecord

BANDS = ((1, 6), (7, 12), (13, 18))


def _fmt(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(float(x))


def write_metrics_csv(report: EvaluationReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "horizon", "mape", "smape", "mase"])
        for m_i, model in enumerate(report.models):
            for h in range(1, report.horizon + 1):
                writer.writerow([model, h] + [
                    _fmt(report.metric_means[metric][m_i, h - 1])
                    for metric in METRICS
                ])


def write_averages_csv(report: EvaluationReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["model", "metric"]
        header += [f"avg_{lo}_{min(hi, report.horizon)}" for lo, hi in BANDS
                   if lo <= report.horizon]
        header += [f"avg_1_{report.horizon}", "avg_rank"]
        writer.writerow(header)
        for metric in METRICS:
            ranks = report.average_rank(metric)
            for m_i, model in enumerate(report.models):
                row = [model, metric]
                row += [_fmt(report.band_average(metric, lo, hi)[m_i])
                        for lo, hi in BANDS if lo <= report.horizon]
                row.append(_fmt(report.band_average(metric, 1, report.horizon)[m_i]))
                row.append(_fmt(ranks[m_i]))
                writer.writerow(row)


def write_anova_csv(report: EvaluationReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "horizon", "F", "p", "significant"])
        for metric in METRICS:
            for h in range(1, report.horizon + 1):
                result = report.anova.get((metric, h))
                if result is None:
                    writer.writerow([metric, h, "nan", "nan", "skipped"])
                else:
                    writer.writerow([metric, h, _fmt(result.F), _fmt(result.p),
                                     str(result.p < report.manifest.alpha).lower()])


def write_tukey_outputs(report: EvaluationReport, chains_path: str,
                        flags_path: str) -> None:
    with open(chains_path, "w") as fh:
        for metric in METRICS:
            for h in range(1, report.horizon + 1):
                result = report.tukey.get((metric, h))
                if result is not None:
                    fh.write(f"{metric} h={h}: {result.chain}\n")
    with open(flags_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "horizon", "model_a", "model_b", "significant"])
        for metric in METRICS:
            for h in range(1, report.horizon + 1):
                result = report.tukey.get((metric, h))
                if result is None:
                    continue
                for i, a in enumerate(report.models):
                    for b in report.models[i + 1:]:
                        writer.writerow([metric, h, a, b,
                                         str(result.is_significant(a, b)).lower()])


def write_timing_csv(timings: list, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series", "strategy", "train_ms", "predict_ms"])
        for record in timings:
            writer.writerow([record.series, record.strategy,
                             _fmt(record.train_seconds * 1000.0),
                             _fmt(record.predict_seconds * 1000.0)])


def write_scores_json(report: EvaluationReport, path: str) -> None:
    payload = {
        "models": report.models,
        "horizon": report.horizon,
        "replicates": report.replicates,
        "series": report.series_names,
        "alpha": report.manifest.alpha,
        "per_replicate": {m: report.per_replicate[m].tolist() for m in METRICS},
        "exclusions": dict(sorted(report.exclusions.items())),
        "failures": report.failures,
        "forecast_samples": {
            name: {k: np.asarray(v).tolist() for k, v in entry.items()}
            for name, entry in sorted(report.forecast_samples.items())
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)


def write_reproducibility_manifest(report: EvaluationReport,
                                   unit_artifacts: dict, path: str) -> None:
    payload = report.manifest.to_dict()
    payload["derived_seeds"] = {
        name: artifacts.get("seeds", {})
        for name, artifacts in sorted(unit_artifacts.items())
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# figures


def figure_metric_by_horizon(report: EvaluationReport, metric: str,
                             path: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 5))
    horizons = np.arange(1, report.horizon + 1)
    for m_i, model in enumerate(report.models):
        ax.plot(horizons, report.metric_means[metric][m_i], marker="o",
                markersize=3, label=model)
    ax.set_xlabel("forecast horizon h")
    ax.set_ylabel(metric.upper())
    ax.set_title(f"{metric.upper()} by horizon")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_elapsed_time(timings: list, path: str) -> None:
    """Grouped bars of total elapsed seconds per strategy for each series."""
    series = sorted({t.series for t in timings})
    strategies = sorted({t.strategy for t in timings})
    totals = {(t.series, t.strategy): t.total_seconds for t in timings}
    fig, ax = plt.subplots(figsize=(max(6, 1.1 * len(series) + 2), 5))
    width = 0.8 / max(len(strategies), 1)
    x = np.arange(len(series))
    for s_i, strategy in enumerate(strategies):
        heights = [totals.get((name, strategy), 0.0) for name in series]
        ax.bar(x + s_i * width, heights, width, label=strategy)
    ax.set_xticks(x + width * (len(strategies) - 1) / 2)
    ax.set_xticklabels(series, rotation=30, ha="right")
    ax.set_ylabel("elapsed seconds")
    ax.set_title("Elapsed time per series and strategy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_forecasts(name: str, entry: dict, path: str) -> None:
    """Hold-out actuals against every model's point forecasts."""
    fig, ax = plt.subplots(figsize=(8, 5))
    horizon = len(entry["actual"])
    h = np.arange(1, horizon + 1)
    ax.plot(h, entry["actual"], color="black", linewidth=2, marker="o",
            markersize=4, label="actual")
    for model, values in entry.items():
        if model == "actual":
            continue
        ax.plot(h, values, marker=".", markersize=4, alpha=0.8, label=model)
    ax.set_xlabel("forecast horizon h")
    ax.set_ylabel("value")
    ax.set_title(f"Hold-out forecasts: {name}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# full run emission and re-rendering


def write_run_reports(report: EvaluationReport, unit_artifacts: dict) -> None:
    run_dir = report.run_dir
    os.makedirs(run_dir, exist_ok=True)
    fig_dir = os.path.join(run_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)

    write_reproducibility_manifest(report, unit_artifacts,
                                   os.path.join(run_dir, "manifest.json"))
    write_scores_json(report, os.path.join(run_dir, "scores.json"))
    write_metrics_csv(report, os.path.join(run_dir, "metrics.csv"))
    write_averages_csv(report, os.path.join(run_dir, "averages.csv"))
    write_anova_csv(report, os.path.join(run_dir, "anova.csv"))
    write_tukey_outputs(report, os.path.join(run_dir, "tukey_chains.txt"),
                        os.path.join(run_dir, "tukey_flags.csv"))
    write_timing_csv(report.timings, os.path.join(run_dir, "timing.csv"))

    for name, artifacts in sorted(unit_artifacts.items()):
        series_dir = os.path.join(run_dir, "series", name)
        os.makedirs(series_dir, exist_ok=True)
        record = artifacts.get("record")
        if record is not None:
            record.to_json(os.path.join(series_dir, "preprocess_record.json"))
        detail = {k: v for k, v in artifacts.items() if k != "record"}
        with open(os.path.join(series_dir, "artifacts.json"), "w") as fh:
            json.dump(detail, fh, indent=1, sort_keys=True)
        for label, entry in detail.items():
            if isinstance(entry, dict) and "tuning" in entry:
                with open(os.path.join(series_dir, f"tuning_{label}.json"),
                          "w") as fh:
                    json.dump(entry["tuning"], fh, indent=1, sort_keys=True)
        entry = report.forecast_samples.get(name)
        if entry is not None:
            with open(os.path.join(series_dir, "forecasts.csv"), "w",
                      newline="") as fh:
                writer = csv.writer(fh)
                keys = ["actual"] + [m for m in report.models if m in entry]
                writer.writerow(["h"] + keys)
                for h in range(report.horizon):
                    writer.writerow([h + 1] + [_fmt(entry[k][h]) for k in keys])

    for metric in METRICS:
        figure_metric_by_horizon(
            report, metric, os.path.join(fig_dir, f"{metric}_by_horizon.png"))
    if report.timings:
        figure_elapsed_time(report.timings,
                            os.path.join(fig_dir, "elapsed_time.png"))
    for name, entry in sorted(report.forecast_samples.items()):
        figure_forecasts(name, entry,
                         os.path.join(fig_dir, f"forecast_{name}.png"))


def render_run(run_dir: str) -> EvaluationReport:
    """Rebuild every derived table and figure from a run's raw artifacts."""
    from collections import Counter

    from . import evaluation
    from .harness import ExperimentManifest

    with open(os.path.join(run_dir, "scores.json")) as fh:
        scores = json.load(fh)
    with open(os.path.join(run_dir, "manifest.json")) as fh:
        manifest_payload = json.load(fh)
    manifest_payload.pop("derived_seeds", None)
    manifest = ExperimentManifest.from_dict(manifest_payload)

    models = list(scores["models"])
    horizon = int(scores["horizon"])
    reps = int(scores["replicates"])
    alpha = float(scores.get("alpha", 0.05))
    per_replicate = {m: np.array(scores["per_replicate"][m], dtype=float)
                     for m in METRICS}
    metric_means = {m: per_replicate[m].mean(axis=2) for m in METRICS}

    anova_results, tukey_results = {}, {}
    for metric in METRICS:
        for h in range(1, horizon + 1):
            groups = [per_replicate[metric][m_i, h - 1, :]
                      for m_i in range(len(models))]
            key = (metric, h)
            if reps < 2 or not all(np.all(np.isfinite(g)) for g in groups):
                anova_results[key] = None
                tukey_results[key] = None
                continue
            anova = evaluation.anova_oneway(groups)
            anova_results[key] = anova
            tukey_results[key] = (
                evaluation.tukey_hsd(groups, alpha=alpha, labels=models)
                if anova.p < alpha else None
            )

    timings = []
    timing_path = os.path.join(run_dir, "timing.csv")
    if os.path.exists(timing_path):
        with open(timing_path, newline="") as fh:
            for row in csv.DictReader(fh):
                timings.append(TimingRecord(
                    row["series"], row["strategy"],
                    float(row["train_ms"]) / 1000.0,
                    float(row["predict_ms"]) / 1000.0))

    forecast_samples = {
        name: {k: np.array(v, dtype=float) for k, v in entry.items()}
        for name, entry in scores.get("forecast_samples", {}).items()
    }

    report = EvaluationReport(
        models=models, horizon=horizon, replicates=reps,
        series_names=list(scores["series"]), per_replicate=per_replicate,
        metric_means=metric_means, anova=anova_results, tukey=tukey_results,
        timings=timings, exclusions=Counter(scores.get("exclusions", {})),
        forecast_samples=forecast_samples,
        failures=dict(scores.get("failures", {})), manifest=manifest,
        run_dir=run_dir,
    )

    write_metrics_csv(report, os.path.join(run_dir, "metrics.csv"))
    write_averages_csv(report, os.path.join(run_dir, "averages.csv"))
    write_anova_csv(report, os.path.join(run_dir, "anova.csv"))
    write_tukey_outputs(report, os.path.join(run_dir, "tukey_chains.txt"),
                        os.path.join(run_dir, "tukey_flags.csv"))
    fig_dir = os.path.join(run_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    for metric in METRICS:
        figure_metric_by_horizon(
            report, metric, os.path.join(fig_dir, f"{metric}_by_horizon.png"))
    if timings:
        figure_elapsed_time(timings, os.path.join(fig_dir, "elapsed_time.png"))
    for name, entry in sorted(forecast_samples.items()):
        figure_forecasts(name, entry,
                         os.path.join(fig_dir, f"forecast_{name}.png"))
    return report
