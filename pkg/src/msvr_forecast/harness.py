"""End-to-end experiment harness.

For every series and replicate: split off the hold-out tail, preprocess
the estimation sample, select lags, tune hyperparameters with PSO and
k-fold cross validation, fit the final model(s), forecast the full
horizon, roll the forecasts back to the original scale, and score them.
Replicates differ only through derived PSO seeds; the data itself is
deterministic.  Per-series failures are recorded and skipped; the run
fails only when every series fails.

Timing of the train and predict phases is captured per strategy, which
makes the computational-cost comparison a byproduct of a normal run.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ForecastToolkitError, IngestError, InputError
from .preprocessing import PreprocessRecord, preprocess, rollback
from .selection import WINDOW_SEARCH, select_inputs
from .solver import Hyperparams, SolverOptions, fit
from .strategies import (ALL_STRATEGIES, DIRECT, ITERATED, MIMO, NAIVE,
                         SEASONAL_NAIVE, SVR_STRATEGIES, TimeSeries, embed,
                         forecast_direct, forecast_iterated, forecast_mimo,
                         forecast_naive, forecast_seasonal_naive)
from .simulators import (HenonConfig, MackeyGlassConfig, henon_generate,
                         mackey_glass_generate)
from .tuning import DEFAULT_BOUNDS, PsoConfig, tune
from . import evaluation

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "MSVR_OUTPUT_DIR"
WORKERS_ENV = "MSVR_WORKERS"

MODEL_LABELS = {
    NAIVE: "naive",
    SEASONAL_NAIVE: "s-naive",
    ITERATED: "iter-svr",
    DIRECT: "dir-svr",
    MIMO: "mimo-svr",
}
METRICS = ("mape", "smape", "mase")


# ---------------------------------------------------------------------------
# manifest


@dataclass(frozen=True)
class SeriesSpec:
    """One dataset entry: a generator config or a CSV path."""

    kind: str  # "henon" | "mackey_glass" | "csv"
    name: str = ""
    period: int | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "name": self.name, "period": self.period}
        out.update(self.params)
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "SeriesSpec":
        payload = dict(payload)
        kind = payload.pop("kind")
        name = payload.pop("name", "")
        period = payload.pop("period", None)
        return cls(kind=kind, name=name, period=period, params=payload)


@dataclass(frozen=True)
class ExperimentManifest:
    series: tuple
    holdout_length: int = 18
    strategies: tuple = ALL_STRATEGIES
    replicates: int = 5
    seed: int = 0
    pso: PsoConfig = PsoConfig()
    cv_folds: int = 5
    max_lag: int = 12
    selection_search: str = WINDOW_SEARCH
    detrend_degree: int = 1
    alpha: float = 0.05
    dir_per_horizon_tuning: bool | None = None  # None: False in run, True in bench
    solver: SolverOptions = SolverOptions()
    output_dir: str | None = None

    def __post_init__(self):
        if self.holdout_length < 1:
            raise InputError("holdout_length must be >= 1")
        if self.replicates < 1:
            raise InputError("replicate count must be >= 1")
        unknown = [s for s in self.strategies if s not in ALL_STRATEGIES]
        if unknown:
            raise InputError(f"unknown strategies: {unknown}")

    def to_dict(self) -> dict:
        return {
            "series": [s.to_dict() for s in self.series],
            "holdout_length": self.holdout_length,
            "strategies": list(self.strategies),
            "replicates": self.replicates,
            "seed": self.seed,
            "pso": {
                "swarm_size": self.pso.swarm_size,
                "iterations": self.pso.iterations,
                "cognitive_coeff": self.pso.cognitive_coeff,
                "social_coeff": self.pso.social_coeff,
                "inertia_initial": self.pso.inertia_initial,
                "inertia_final": self.pso.inertia_final,
                "bounds": [list(b) for b in self.pso.bounds],
            },
            "cv_folds": self.cv_folds,
            "max_lag": self.max_lag,
            "selection_search": self.selection_search,
            "detrend_degree": self.detrend_degree,
            "alpha": self.alpha,
            "dir_per_horizon_tuning": self.dir_per_horizon_tuning,
            "solver": dataclasses.asdict(self.solver),
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentManifest":
        pso_payload = dict(payload.get("pso", {}))
        bounds = pso_payload.pop("bounds", None)
        pso = PsoConfig(
            bounds=tuple(tuple(b) for b in bounds) if bounds else DEFAULT_BOUNDS,
            **pso_payload,
        )
        solver = SolverOptions(**payload.get("solver", {}))
        return cls(
            series=tuple(SeriesSpec.from_dict(s) for s in payload["series"]),
            holdout_length=payload.get("holdout_length", 18),
            strategies=tuple(payload.get("strategies", ALL_STRATEGIES)),
            replicates=payload.get("replicates", 5),
            seed=payload.get("seed", 0),
            pso=pso,
            cv_folds=payload.get("cv_folds", 5),
            max_lag=payload.get("max_lag", 12),
            selection_search=payload.get("selection_search", WINDOW_SEARCH),
            detrend_degree=payload.get("detrend_degree", 1),
            alpha=payload.get("alpha", 0.05),
            dir_per_horizon_tuning=payload.get("dir_per_horizon_tuning"),
            solver=solver,
            output_dir=payload.get("output_dir"),
        )

    @classmethod
    def from_json(cls, path) -> "ExperimentManifest":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def derive_seed(*parts) -> int:
    """Deterministic child seed from integer components."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# data ingestion and generation


def _parse_cell(cell: str):
    cell = cell.strip()
    if not cell:
        return None
    return float(cell)  # ValueError propagates to the caller with coordinates


def ingest_csv(path) -> list[TimeSeries]:
    """Load series from a delimited file.

    A non-numeric first row is treated as a header naming one series per
    column; a non-numeric first column names one series per row; an
    all-numeric file is read per column with generated names.  Trailing
    blanks are tolerated so series of unequal length can share a file.
    """
    with open(path, newline="") as fh:
        rows = [list(r) for r in csv.reader(fh)]
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise IngestError(f"{path}: file contains no data")

    def is_numeric(cell: str) -> bool:
        try:
            return _parse_cell(cell) is not None
        except ValueError:
            return False

    first_row_numeric = all(is_numeric(c) or not c.strip() for c in rows[0])
    first_col_numeric = all(is_numeric(r[0]) or not r[0].strip() for r in rows[1:])

    if not first_row_numeric and (first_col_numeric or len(rows) == 1):
        names = [c.strip() or f"s{i + 1}" for i, c in enumerate(rows[0])]
        data_rows, row_offset, col_offset = rows[1:], 2, 1
        columns = True
    elif not first_col_numeric:
        names = [r[0].strip() or f"s{i + 1}" for i, r in enumerate(rows)]
        data_rows, row_offset, col_offset = rows, 1, 2
        columns = False
    else:
        width = max(len(r) for r in rows)
        names = [f"s{i + 1}" for i in range(width)]
        data_rows, row_offset, col_offset = rows, 1, 1
        columns = True

    def parsed(cell, r, c):
        try:
            return _parse_cell(cell)
        except ValueError:
            raise IngestError(
                f"{path}: cell at row {r}, column {c}: {cell.strip()!r} is not numeric"
            ) from None

    series_cells: list[list] = [[] for _ in names]
    if columns:
        for r_idx, row in enumerate(data_rows):
            for c_idx in range(len(names)):
                cell = row[c_idx] if c_idx < len(row) else ""
                series_cells[c_idx].append(
                    (parsed(cell, r_idx + row_offset, c_idx + col_offset),
                     r_idx + row_offset, c_idx + col_offset)
                )
    else:
        for r_idx, row in enumerate(data_rows):
            for c_idx, cell in enumerate(row[1:]):
                series_cells[r_idx].append(
                    (parsed(cell, r_idx + row_offset, c_idx + col_offset),
                     r_idx + row_offset, c_idx + col_offset)
                )

    out = []
    for name, cells in zip(names, series_cells):
        while cells and cells[-1][0] is None:
            cells.pop()
        for value, r, c in cells:
            if value is None:
                raise IngestError(
                    f"{path}: blank cell inside series {name!r} at row {r}, column {c}"
                )
        values = [v for v, _, _ in cells]
        if len(values) < 2:
            raise IngestError(f"{path}: series {name!r} has fewer than 2 observations")
        out.append(TimeSeries(np.array(values), name=name))
    return out


def materialize_series(manifest: ExperimentManifest) -> list[TimeSeries]:
    """Instantiate every manifest entry as a TimeSeries."""
    out = []
    for spec in manifest.series:
        if spec.kind == "henon":
            cfg = HenonConfig(name=spec.name or "henon", **spec.params)
            ts = henon_generate(cfg)
        elif spec.kind == "mackey_glass":
            cfg = MackeyGlassConfig(name=spec.name or "mackey-glass", **spec.params)
            ts = mackey_glass_generate(cfg)
        elif spec.kind == "csv":
            loaded = ingest_csv(spec.params["path"])
            for ts_csv in loaded:
                out.append(TimeSeries(ts_csv.values, period=spec.period,
                                      name=ts_csv.name))
            continue
        else:
            raise InputError(f"unknown series kind: {spec.kind!r}")
        out.append(TimeSeries(ts.values, period=spec.period, name=ts.name))
    if not out:
        raise InputError("manifest defines no series")
    names = [ts.name for ts in out]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate series names in manifest: {names}")
    return out


# Simulated-series catalog: initialization and sample-size table used by
# the bundled manifests.  Columns: Henon (x0, y0), Mackey-Glass (phi0, tau),
# shared sample size.
SIMULATED_SERIES_TABLE = (
    (0.1, 0.1, 1.0, 15, 205),
    (0.1, 0.3, 1.2, 15, 246),
    (0.1, 0.5, 1.4, 15, 297),
    (0.1, 0.7, 1.6, 15, 341),
    (0.1, 0.9, 1.8, 15, 389),
    (0.3, 0.1, 2.0, 15, 428),
    (0.3, 0.3, 1.0, 16, 489),
    (0.3, 0.5, 1.2, 16, 534),
    (0.3, 0.7, 1.4, 16, 584),
    (0.3, 0.9, 1.6, 16, 648),
    (0.5, 0.1, 1.8, 16, 685),
    (0.5, 0.3, 2.0, 16, 718),
    (0.5, 0.5, 1.0, 17, 745),
    (0.5, 0.7, 1.2, 17, 784),
    (0.5, 0.9, 1.4, 17, 804),
    (0.7, 0.1, 1.6, 17, 834),
    (0.7, 0.3, 1.8, 17, 879),
    (0.7, 0.5, 2.0, 17, 915),
    (0.7, 0.7, 1.0, 18, 957),
    (0.7, 0.9, 1.2, 18, 986),
)


def henon_table_specs(rows=None, period: int | None = None) -> list[SeriesSpec]:
    rows = range(1, len(SIMULATED_SERIES_TABLE) + 1) if rows is None else rows
    out = []
    for r in rows:
        x0, y0, _, _, size = SIMULATED_SERIES_TABLE[r - 1]
        out.append(SeriesSpec("henon", name=f"henon-{r:02d}", period=period,
                              params={"x0": x0, "y0": y0, "length": size}))
    return out


def mackey_glass_table_specs(rows=None, period: int | None = None) -> list[SeriesSpec]:
    rows = range(1, len(SIMULATED_SERIES_TABLE) + 1) if rows is None else rows
    out = []
    for r in rows:
        _, _, phi0, tau, size = SIMULATED_SERIES_TABLE[r - 1]
        out.append(SeriesSpec("mackey_glass", name=f"mg-{r:02d}", period=period,
                              params={"phi0": phi0, "tau": float(tau), "length": size}))
    return out


# ---------------------------------------------------------------------------
# per-unit pipeline


@dataclass
class TimingRecord:
    series: str
    strategy: str
    train_seconds: float
    predict_seconds: float

    @property
    def total_seconds(self) -> float:
        return self.train_seconds + self.predict_seconds


_STRATEGY_INDEX = {s: i for i, s in enumerate(ALL_STRATEGIES)}


def train_and_forecast(series: TimeSeries, manifest: ExperimentManifest,
                       series_idx: int, replicate: int) -> dict:
    """Model everything requested for one series and one replicate.

    Only the estimation sample (everything before the hold-out tail) is
    ever read; forecasts are returned on the original scale.
    """
    horizon = manifest.holdout_length
    if len(series) <= horizon + 1:
        raise InputError(
            f"series {series.name!r} has {len(series)} observations; "
            f"hold-out of {horizon} leaves no estimation sample"
        )
    est_values = series.values[: len(series) - horizon]
    est = TimeSeries(est_values.copy(), period=series.period, name=series.name)
    per_horizon = manifest.dir_per_horizon_tuning or False

    forecasts: dict[str, np.ndarray] = {}
    timings: dict[str, tuple] = {}
    artifacts: dict = {"series": series.name, "replicate": replicate, "seeds": {}}

    working = None
    record: PreprocessRecord | None = None
    if any(s in SVR_STRATEGIES for s in manifest.strategies):
        transformed, record = preprocess(
            est_values, period=series.period,
            detrend_degree=manifest.detrend_degree, alpha=manifest.alpha,
        )
        artifacts["record"] = record
        working = TimeSeries(transformed, period=series.period, name=series.name)

    for strategy in manifest.strategies:
        label = MODEL_LABELS[strategy]
        if strategy == NAIVE:
            result = forecast_naive(est, horizon)
            forecasts[label] = result.point_forecasts
            timings[label] = (0.0, result.elapsed_predict)
            continue
        if strategy == SEASONAL_NAIVE:
            result = forecast_seasonal_naive(est, horizon)
            forecasts[label] = result.point_forecasts
            timings[label] = (0.0, result.elapsed_predict)
            continue

        seed = derive_seed(manifest.seed, series_idx, replicate,
                           _STRATEGY_INDEX[strategy])
        artifacts["seeds"][label] = seed
        pso_cfg = replace(manifest.pso, seed=seed)

        train_start = time.perf_counter()
        sel = select_inputs(working, manifest.max_lag, horizon, strategy,
                            search=manifest.selection_search)
        lags = sel.chosen_lags

        if strategy == ITERATED:
            ds = embed(working, lags, 1, ITERATED)
            hyper, pso_result = tune(ds, pso_cfg, manifest.cv_folds, manifest.solver)
            model = fit(ds.inputs, ds.outputs, hyper, manifest.solver)
            train_elapsed = time.perf_counter() - train_start
            result = forecast_iterated(model, working, lags, horizon)
            tuning_info = {"hyper": _hyper_dict(hyper), "trace": pso_result.trace}
        elif strategy == MIMO:
            ds = embed(working, lags, horizon, MIMO)
            hyper, pso_result = tune(ds, pso_cfg, manifest.cv_folds, manifest.solver)
            model = fit(ds.inputs, ds.outputs, hyper, manifest.solver)
            train_elapsed = time.perf_counter() - train_start
            result = forecast_mimo(model, working, lags, horizon)
            tuning_info = {"hyper": _hyper_dict(hyper), "trace": pso_result.trace}
        else:  # DIRECT
            datasets = embed(working, lags, horizon, DIRECT)
            if per_horizon:
                hypers, traces = [], []
                for h_idx, ds_h in enumerate(datasets):
                    seed_h = derive_seed(manifest.seed, series_idx, replicate,
                                         _STRATEGY_INDEX[strategy], h_idx)
                    hyper_h, res_h = tune(ds_h, replace(pso_cfg, seed=seed_h),
                                          manifest.cv_folds, manifest.solver)
                    hypers.append(hyper_h)
                    traces.append(res_h.trace)
                tuning_info = {"hyper": [_hyper_dict(h) for h in hypers],
                               "trace": traces, "per_horizon": True}
            else:
                # shared hyperparameters, tuned on the hardest (h = H) dataset
                hyper, pso_result = tune(datasets[-1], pso_cfg,
                                         manifest.cv_folds, manifest.solver)
                hypers = [hyper] * horizon
                tuning_info = {"hyper": _hyper_dict(hyper),
                               "trace": pso_result.trace, "per_horizon": False}
            models = [fit(ds_h.inputs, ds_h.outputs, hp, manifest.solver)
                      for ds_h, hp in zip(datasets, hypers)]
            train_elapsed = time.perf_counter() - train_start
            result = forecast_direct(models, working, lags, horizon)

        raw = rollback(result.point_forecasts, record,
                       start_position=est_values.size)
        forecasts[label] = raw
        timings[label] = (train_elapsed, result.elapsed_predict)
        artifacts[label] = {
            "selection": {"lags": list(lags), "delta": sel.delta_value,
                          "candidates": [
                              {"lags": list(l), "delta": d} for l, d in sel.evaluated
                          ]},
            "tuning": tuning_info,
        }

    return {"forecasts": forecasts, "timings": timings, "artifacts": artifacts}


def _hyper_dict(hyper: Hyperparams) -> dict:
    return {"C": hyper.C, "epsilon": hyper.epsilon, "gamma": hyper.kernel.gamma}


def _run_unit(args):
    series, manifest, series_idx, replicate = args
    return (series_idx, replicate), train_and_forecast(series, manifest,
                                                       series_idx, replicate)


# ---------------------------------------------------------------------------
# full experiment


@dataclass
class EvaluationReport:
    """Aggregated outcome of a run: metric tables, statistical tests,
    timing records, and the raw per-replicate scores they derive from."""

    models: list
    horizon: int
    replicates: int
    series_names: list
    per_replicate: dict  # metric -> (models, horizon, replicates) array
    metric_means: dict   # metric -> (models, horizon) array
    anova: dict          # (metric, horizon) -> AnovaResult or None
    tukey: dict          # (metric, horizon) -> TukeyResult or None
    timings: list        # TimingRecord, averaged over replicates
    exclusions: Counter
    forecast_samples: dict  # series -> {"actual": array, <model>: array}
    failures: dict
    manifest: ExperimentManifest
    run_dir: str | None = None

    def band_average(self, metric: str, lo: int, hi: int) -> np.ndarray:
        """Mean of the per-horizon entries for horizons lo..hi (1-based)."""
        hi = min(hi, self.horizon)
        if lo > hi:
            return np.full(len(self.models), np.nan)
        return self.metric_means[metric][:, lo - 1: hi].mean(axis=1)

    def average_rank(self, metric: str) -> np.ndarray:
        return evaluation.average_rank(self.metric_means[metric])


def _resolve_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    workers = int(raw)
    return max(1, workers)


def run_experiment(manifest: ExperimentManifest,
                   output_dir: str | None = None,
                   write_reports: bool = True) -> EvaluationReport:
    """Execute the full experiment described by the manifest.

    Reports (CSV tables, Tukey chains, figures, reproducibility manifest)
    are written to the resolved output directory unless ``write_reports``
    is false.  The output directory resolves in order: argument, the
    MSVR_OUTPUT_DIR environment variable, the manifest field, ``./msvr-run``.
    """
    from . import report as report_mod  # local import to keep matplotlib lazy

    failures: dict[str, str] = {}
    series_list = []
    for spec in manifest.series:
        try:
            series_list.extend(materialize_series(
                dataclasses.replace(manifest, series=(spec,))))
        except ForecastToolkitError as exc:
            failures[spec.name or spec.kind] = str(exc)
            log.warning("series %s failed to materialize: %s", spec.name, exc)
    if not series_list:
        raise ForecastToolkitError(f"every series failed: {failures}")
    names = [s.name for s in series_list]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate series names in manifest: {names}")

    horizon = manifest.holdout_length
    shortest = min(len(s) for s in series_list)
    if horizon >= shortest:
        raise InputError(
            f"holdout_length {horizon} must be shorter than the shortest series "
            f"({shortest} observations)"
        )

    units = [(series_list[si], manifest, si, r)
             for si in range(len(series_list))
             for r in range(manifest.replicates)]

    results: dict[tuple, dict] = {}
    workers = _resolve_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = []
            for args in units:
                outcomes.append(pool.submit(_run_unit, args))
            for args, fut in zip(units, outcomes):
                key = (args[2], args[3])
                try:
                    results[key] = fut.result()[1]
                except ForecastToolkitError as exc:
                    failures[series_list[key[0]].name] = str(exc)
    else:
        for args in units:
            key = (args[2], args[3])
            try:
                results[key] = _run_unit(args)[1]
            except ForecastToolkitError as exc:
                failures[series_list[key[0]].name] = str(exc)
                log.warning("series %s failed: %s", series_list[key[0]].name, exc)

    failed_names = set(failures)
    ok_indices = [si for si, s in enumerate(series_list) if s.name not in failed_names]
    if not ok_indices:
        raise ForecastToolkitError(f"every series failed: {failures}")

    models = [MODEL_LABELS[s] for s in manifest.strategies]
    n_models, reps = len(models), manifest.replicates
    actuals = {si: series_list[si].values[-horizon:] for si in ok_indices}
    est_samples = {si: series_list[si].values[:-horizon] for si in ok_indices}

    exclusions: Counter = Counter()
    per_replicate = {m: np.full((n_models, horizon, reps), np.nan) for m in METRICS}
    for r in range(reps):
        for m_i, model in enumerate(models):
            for h in range(horizon):
                a = np.array([actuals[si][h] for si in ok_indices])
                f = np.array([results[(si, r)]["forecasts"][model][h]
                              for si in ok_indices])
                ests = [est_samples[si] for si in ok_indices]
                per_replicate["mape"][m_i, h, r] = evaluation.mape(
                    a, f, exclusions=exclusions)
                per_replicate["smape"][m_i, h, r] = evaluation.smape(
                    a, f, exclusions=exclusions)
                per_replicate["mase"][m_i, h, r] = evaluation.mase(
                    a, f, ests, exclusions=exclusions)

    metric_means = {m: per_replicate[m].mean(axis=2) for m in METRICS}

    anova_results: dict = {}
    tukey_results: dict = {}
    for metric in METRICS:
        for h in range(1, horizon + 1):
            groups = [per_replicate[metric][m_i, h - 1, :] for m_i in range(n_models)]
            key = (metric, h)
            if reps < 2 or n_models < 2 or not all(np.all(np.isfinite(g)) for g in groups):
                anova_results[key] = None
                tukey_results[key] = None
                continue
            anova = evaluation.anova_oneway(groups)
            anova_results[key] = anova
            if anova.p < manifest.alpha:
                tukey_results[key] = evaluation.tukey_hsd(
                    groups, alpha=manifest.alpha, labels=models)
            else:
                tukey_results[key] = None

    timings = []
    for si in ok_indices:
        for model in models:
            train = float(np.mean([results[(si, r)]["timings"][model][0]
                                   for r in range(reps)]))
            pred = float(np.mean([results[(si, r)]["timings"][model][1]
                                  for r in range(reps)]))
            timings.append(TimingRecord(series_list[si].name, model, train, pred))

    forecast_samples = {}
    for si in ok_indices:
        entry = {"actual": actuals[si]}
        entry.update({m: results[(si, 0)]["forecasts"][m] for m in models})
        forecast_samples[series_list[si].name] = entry

    run_dir = (output_dir or os.environ.get(OUTPUT_DIR_ENV)
               or manifest.output_dir or "msvr-run")
    report = EvaluationReport(
        models=models, horizon=horizon, replicates=reps,
        series_names=[series_list[si].name for si in ok_indices],
        per_replicate=per_replicate, metric_means=metric_means,
        anova=anova_results, tukey=tukey_results, timings=timings,
        exclusions=exclusions, forecast_samples=forecast_samples,
        failures=failures, manifest=manifest, run_dir=run_dir,
    )
    if write_reports:
        unit_artifacts = {series_list[si].name: results[(si, 0)]["artifacts"]
                          for si in ok_indices}
        report_mod.write_run_reports(report, unit_artifacts)
    return report


def benchmark_strategies(manifest: ExperimentManifest,
                         output_dir: str | None = None,
                         write_reports: bool = True):
    """Wall-clock comparison of the strategies under equal tuning budgets.

    Every trained model gets the same PSO budget, so the direct strategy
    tunes each of its H models independently unless the manifest pins
    ``dir_per_horizon_tuning`` to false.  Returns the report plus a
    summary with the pairwise elapsed-time ratios.
    """
    if manifest.dir_per_horizon_tuning is None:
        manifest = replace(manifest, dir_per_horizon_tuning=True)
    report = run_experiment(manifest, output_dir=output_dir,
                            write_reports=write_reports)

    totals = {m: 0.0 for m in report.models}
    for record in report.timings:
        totals[record.strategy] += record.total_seconds

    def ratio(a: str, b: str) -> float:
        if a in totals and b in totals and totals[b] > 0:
            return totals[a] / totals[b]
        return float("nan")

    summary = {
        "total_seconds": totals,
        "ratios": {
            "dir_over_iter": ratio(MODEL_LABELS[DIRECT], MODEL_LABELS[ITERATED]),
            "dir_over_mimo": ratio(MODEL_LABELS[DIRECT], MODEL_LABELS[MIMO]),
            "iter_over_mimo": ratio(MODEL_LABELS[ITERATED], MODEL_LABELS[MIMO]),
        },
    }
    if write_reports and report.run_dir:
        with open(os.path.join(report.run_dir, "bench_summary.json"), "w") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
    return report, summary
