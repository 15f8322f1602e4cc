"""Hyperparameter search: particle swarm optimization over (C, epsilon,
gamma) in log10 space, scored by k-fold cross-validated MSE.

The swarm follows the standard global-best update with linearly
decreasing inertia.  Random draws come from a stream derived per
(iteration, particle) from the seed, so evaluation order (including a
concurrent one) cannot change the search trajectory.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .kernels import KernelConfig
from .solver import Hyperparams, SolverOptions, fit
from .strategies import EmbeddedDataset

log = logging.getLogger(__name__)

DEFAULT_BOUNDS = ((-2.0, 4.0), (-4.0, 0.0), (-4.0, 2.0))  # log10 C, epsilon, gamma


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 20
    iterations: int = 100
    cognitive_coeff: float = 2.0
    social_coeff: float = 2.0
    inertia_initial: float = 0.9
    inertia_final: float = 0.4
    seed: int = 0
    bounds: tuple = DEFAULT_BOUNDS

    def __post_init__(self):
        if self.swarm_size < 2:
            raise InputError(f"swarm size must be >= 2, got {self.swarm_size}")
        if self.iterations < 1:
            raise InputError(f"iterations must be >= 1, got {self.iterations}")
        if self.inertia_initial < self.inertia_final:
            raise InputError("initial inertia must not be below the final inertia")
        for low, high in self.bounds:
            if not (np.isfinite(low) and np.isfinite(high) and low < high):
                raise InputError(f"invalid bound ({low}, {high})")


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_fitness: float
    trace: list = field(default_factory=list)  # global-best fitness after each iteration


def inertia_at(cfg: PsoConfig, iteration: int) -> float:
    """Linearly decreasing inertia weight for a 0-based iteration index."""
    if cfg.iterations == 1:
        return cfg.inertia_initial
    frac = iteration / (cfg.iterations - 1)
    return cfg.inertia_initial - (cfg.inertia_initial - cfg.inertia_final) * frac


def pso_search(fitness, cfg: PsoConfig) -> PsoResult:
    """Global-best PSO over a box; returns the best position, its fitness,
    and the per-iteration best-fitness trace (initial evaluation included).

    Non-finite fitness values are logged and treated as +inf, so a broken
    region of the search space stalls a particle without stopping the run.
    """
    lows = np.array([b[0] for b in cfg.bounds])
    highs = np.array([b[1] for b in cfg.bounds])
    ndim = lows.size
    v_max = 0.5 * (highs - lows)

    def safe(position: np.ndarray) -> float:
        value = fitness(position)
        if not np.isfinite(value):
            log.warning("non-finite fitness at %s; treating as +inf", position)
            return float("inf")
        return float(value)

    init_rng = np.random.default_rng([cfg.seed])
    positions = lows + (highs - lows) * init_rng.random((cfg.swarm_size, ndim))
    velocities = np.zeros_like(positions)

    personal_best = positions.copy()
    personal_fitness = np.array([safe(p) for p in positions])
    g_idx = int(np.argmin(personal_fitness))
    global_best = personal_best[g_idx].copy()
    global_fitness = float(personal_fitness[g_idx])
    trace = [global_fitness]

    for it in range(cfg.iterations):
        w = inertia_at(cfg, it)
        for p_idx in range(cfg.swarm_size):
            rng = np.random.default_rng([cfg.seed, it + 1, p_idx])
            r1 = rng.random(ndim)
            r2 = rng.random(ndim)
            velocities[p_idx] = (
                w * velocities[p_idx]
                + cfg.cognitive_coeff * r1 * (personal_best[p_idx] - positions[p_idx])
                + cfg.social_coeff * r2 * (global_best - positions[p_idx])
            )
            np.clip(velocities[p_idx], -v_max, v_max, out=velocities[p_idx])
            positions[p_idx] = np.clip(positions[p_idx] + velocities[p_idx], lows, highs)
            value = safe(positions[p_idx])
            if value < personal_fitness[p_idx]:
                personal_fitness[p_idx] = value
                personal_best[p_idx] = positions[p_idx].copy()
        g_idx = int(np.argmin(personal_fitness))
        if personal_fitness[g_idx] < global_fitness:
            global_fitness = float(personal_fitness[g_idx])
            global_best = personal_best[g_idx].copy()
        trace.append(global_fitness)

    return PsoResult(global_best, global_fitness, trace)


def hyper_from_log10(position) -> Hyperparams:
    """Map a (log10 C, log10 epsilon, log10 gamma) point to Hyperparams."""
    position = np.asarray(position, dtype=float)
    if position.size != 3:
        raise InputError("hyperparameter position must have 3 entries")
    return Hyperparams(
        C=float(10.0 ** position[0]),
        epsilon=float(10.0 ** position[1]),
        kernel=KernelConfig(gamma=float(10.0 ** position[2])),
    )


def cv_fitness(dataset: EmbeddedDataset, hyper: Hyperparams, folds: int,
               solver_options: SolverOptions | None = None) -> float:
    """Mean squared error over k contiguous row blocks.

    Each fold trains on the other k-1 blocks and scores the held block;
    the k per-fold MSEs (over all output columns) are averaged.
    """
    n = dataset.n_rows
    if folds < 2:
        raise InputError(f"cross validation needs k >= 2, got {folds}")
    if n < folds:
        raise InputError(f"{n} rows cannot form {folds} folds with >= 1 row each")

    blocks = np.array_split(np.arange(n), folds)
    scores = []
    for block in blocks:
        train_mask = np.ones(n, dtype=bool)
        train_mask[block] = False
        model = fit(dataset.inputs[train_mask], dataset.outputs[train_mask],
                    hyper, solver_options)
        pred = model.predict(dataset.inputs[block])
        scores.append(float(np.mean((pred - dataset.outputs[block]) ** 2)))
    return float(np.mean(scores))


def tune(dataset: EmbeddedDataset, pso: PsoConfig, folds: int = 5,
         solver_options: SolverOptions | None = None) -> tuple[Hyperparams, PsoResult]:
    """PSO over log10 (C, epsilon, gamma) with CV fitness on ``dataset``."""

    def fitness(position):
        return cv_fitness(dataset, hyper_from_log10(position), folds, solver_options)

    result = pso_search(fitness, pso)
    return hyper_from_log10(result.best_position), result
