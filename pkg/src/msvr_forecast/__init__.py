"""Multi-step-ahead time series forecasting with multi-output SVR.

A desk-scale forecasting toolkit: a multi-output support vector
regressor trained by iteratively reweighted least squares, three
multi-step-ahead prediction strategies (iterated, direct, MIMO) plus
naive benchmarks, chaotic benchmark generators, an invertible
preprocessing pipeline, Delta-test lag selection, PSO hyperparameter
tuning, and an experiment harness with accuracy metrics, ANOVA and
Tukey HSD comparisons, and timing reports.
"""

from .exceptions import (ForecastToolkitError, IngestError, InputError,
                         NumericError, PostHocGateError, PreprocessingError,
                         SimulatorError, SolverError)
from .kernels import KernelConfig, gram, kernel_eval
from .solver import (Hyperparams, MsvrModel, SolverOptions, fit, irwls_weights,
                     objective, predict, quad_eps_loss, solve_weighted_system)
from .strategies import (DIRECT, ITERATED, MIMO, NAIVE, SEASONAL_NAIVE,
                         EmbeddedDataset, ForecastResult, TimeSeries, embed,
                         forecast_direct, forecast_iterated, forecast_mimo,
                         forecast_naive, forecast_seasonal_naive)
from .simulators import (HenonConfig, MackeyGlassConfig, henon_generate,
                         henon_step, mackey_glass_generate)
from .preprocessing import (PreprocessRecord, deseasonalize, detrend,
                            mann_kendall, normalize, preprocess, reseasonalize,
                            retrend, rollback)
from .selection import SelectionResult, delta_test, select_inputs
from .tuning import PsoConfig, PsoResult, cv_fitness, pso_search, tune
from .evaluation import (AnovaResult, TukeyResult, anova_oneway, average_rank,
                         mape, mase, smape, studentized_range_quantile,
                         tukey_hsd)
from .harness import (EvaluationReport, ExperimentManifest, SeriesSpec,
                      TimingRecord, benchmark_strategies, ingest_csv,
                      materialize_series, run_experiment, train_and_forecast)

__version__ = "0.1.0"
