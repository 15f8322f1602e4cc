"""Command-line interface.

Subcommands: ``generate`` (write simulated series as CSV), ``ingest``
(validate a CSV file), ``select-inputs`` (lag selection for one series),
``tune`` (PSO hyperparameter search for one series and strategy),
``run`` (full experiment from a manifest), ``bench`` (strategy timing
comparison), and ``report`` (re-render tables and figures from a run
directory).  Manifests are JSON files; the bundled ones can be named
directly (e.g. ``--manifest mackey-glass-desk``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from importlib import resources

from .exceptions import ForecastToolkitError
from .harness import (ExperimentManifest, benchmark_strategies, ingest_csv,
                      materialize_series, run_experiment)
from .selection import FORWARD_SEARCH, WINDOW_SEARCH, select_inputs
from .strategies import DIRECT, ITERATED, MIMO, TimeSeries, embed
from .tuning import PsoConfig, tune

BUILTIN_MANIFESTS = ("mackey-glass-desk", "henon-desk", "bench-desk")


def load_manifest(name_or_path: str) -> ExperimentManifest:
    """Load a manifest from a path, or by bundled name."""
    if name_or_path in BUILTIN_MANIFESTS:
        resource = resources.files("msvr_forecast.manifests").joinpath(
            name_or_path.replace("-", "_") + ".json")
        return ExperimentManifest.from_dict(json.loads(resource.read_text()))
    return ExperimentManifest.from_json(name_or_path)


def _write_series_csv(ts: TimeSeries, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for t, value in enumerate(ts.values, start=1):
            writer.writerow([t, repr(float(value))])


def _load_single_series(args) -> TimeSeries:
    series_list = ingest_csv(args.data)
    if args.series:
        matches = [s for s in series_list if s.name == args.series]
        if not matches:
            raise ForecastToolkitError(
                f"series {args.series!r} not found; available: "
                f"{[s.name for s in series_list]}")
        return matches[0]
    return series_list[0]


def cmd_generate(args) -> int:
    import os

    manifest = load_manifest(args.manifest)
    os.makedirs(args.out, exist_ok=True)
    for ts in materialize_series(manifest):
        path = os.path.join(args.out, f"{ts.name}.csv")
        _write_series_csv(ts, path)
        print(f"wrote {path} ({len(ts)} samples)")
    return 0


def cmd_ingest(args) -> int:
    series_list = ingest_csv(args.data)
    print(f"{args.data}: {len(series_list)} series")
    for ts in series_list:
        print(f"  {ts.name}: {len(ts)} observations, "
              f"range [{ts.values.min():.6g}, {ts.values.max():.6g}]")
    return 0


def cmd_select_inputs(args) -> int:
    series = _load_single_series(args)
    result = select_inputs(series, args.max_lag, args.horizon, args.mode,
                           search=args.search)
    writer = csv.writer(sys.stdout)
    writer.writerow(["lags", "delta"])
    for lags, delta in result.evaluated:
        writer.writerow([" ".join(str(l) for l in lags), repr(delta)])
    writer.writerow([])
    print(f"chosen: lags={list(result.chosen_lags)} delta={result.delta_value!r} "
          f"candidates={result.candidates_evaluated}")
    return 0


def cmd_tune(args) -> int:
    series = _load_single_series(args)
    mode = args.mode
    if mode == ITERATED:
        dataset = embed(series, range(args.lags), 1, ITERATED)
    elif mode == MIMO:
        dataset = embed(series, range(args.lags), args.horizon, MIMO)
    else:
        dataset = embed(series, range(args.lags), args.horizon, DIRECT)[-1]
    pso = PsoConfig(swarm_size=args.swarm, iterations=args.iterations,
                    seed=args.seed)
    hyper, result = tune(dataset, pso, folds=args.folds)
    payload = {
        "series": series.name,
        "strategy": mode,
        "best": {"C": hyper.C, "epsilon": hyper.epsilon,
                 "gamma": hyper.kernel.gamma},
        "best_fitness": result.best_fitness,
        "trace": result.trace,
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
        print(f"wrote {args.out}")
    else:
        json.dump(payload, sys.stdout, indent=1)
        print()
    return 0


def cmd_run(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.replicates is not None:
        manifest = replace(manifest, replicates=args.replicates)
    if args.seed is not None:
        manifest = replace(manifest, seed=args.seed)
    report = run_experiment(manifest, output_dir=args.out)
    print(f"run complete: {len(report.series_names)} series, "
          f"{report.replicates} replicates -> {report.run_dir}")
    for metric in ("smape", "mase"):
        overall = report.band_average(metric, 1, report.horizon)
        summary = ", ".join(f"{m}={v:.3f}"
                            for m, v in zip(report.models, overall))
        print(f"  avg {metric} 1-{report.horizon}: {summary}")
    if report.failures:
        print(f"  skipped series: {sorted(report.failures)}")
    return 0


def cmd_bench(args) -> int:
    manifest = load_manifest(args.manifest)
    report, summary = benchmark_strategies(manifest, output_dir=args.out)
    print(f"bench complete -> {report.run_dir}")
    for strategy, seconds in summary["total_seconds"].items():
        print(f"  {strategy}: {seconds:.2f}s")
    for name, value in summary["ratios"].items():
        print(f"  {name}: {value:.2f}")
    return 0


def cmd_report(args) -> int:
    from .report import render_run

    report = render_run(args.run_dir)
    print(f"re-rendered reports in {report.run_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msvr-forecast",
        description="Multi-step-ahead forecasting with multi-output SVR",
    )
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="enable info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write manifest series as t,value CSVs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ingest", help="validate and summarize a CSV file")
    p.add_argument("data")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("select-inputs", help="Delta-test lag selection")
    p.add_argument("data")
    p.add_argument("--series", default=None)
    p.add_argument("--max-lag", type=int, default=12, dest="max_lag")
    p.add_argument("--horizon", type=int, default=18)
    p.add_argument("--mode", choices=[ITERATED, DIRECT, MIMO], default=MIMO)
    p.add_argument("--search", choices=[WINDOW_SEARCH, FORWARD_SEARCH],
                   default=WINDOW_SEARCH)
    p.set_defaults(func=cmd_select_inputs)

    p = sub.add_parser("tune", help="PSO hyperparameter search for one series")
    p.add_argument("data")
    p.add_argument("--series", default=None)
    p.add_argument("--mode", choices=[ITERATED, DIRECT, MIMO], default=MIMO)
    p.add_argument("--lags", type=int, default=4)
    p.add_argument("--horizon", type=int, default=18)
    p.add_argument("--swarm", type=int, default=20)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("run", help="run the full experiment from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="strategy timing comparison")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="re-render tables and figures for a run")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ForecastToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
