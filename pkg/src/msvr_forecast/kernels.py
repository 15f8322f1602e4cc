"""RBF kernel evaluation and Gram matrix construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError

RBF = "rbf"


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family plus its width parameter.

    Only the RBF kernel k(x, y) = exp(-gamma * ||x - y||^2) is supported;
    the ``kind`` field exists so tests can register alternatives.
    """

    kind: str = RBF
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind != RBF:
            raise InputError(f"unsupported kernel kind: {self.kind!r}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise InputError(f"gamma must be a positive real, got {self.gamma}")


def kernel_eval(x, y, cfg: KernelConfig) -> float:
    """Evaluate the kernel on a single pair of equally sized vectors."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InputError(f"kernel inputs differ in dimension: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.exp(-cfg.gamma * np.dot(diff, diff)))


def gram(rows, cols, cfg: KernelConfig) -> np.ndarray:
    """Kernel matrix with entries[i, j] = k(rows[i], cols[j]).

    Squared distances are formed directly from the difference tensor;
    fine at desk scale (n up to a few thousand).
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    cols = np.atleast_2d(np.asarray(cols, dtype=float))
    if rows.shape[1] != cols.shape[1]:
        raise InputError(
            f"gram inputs differ in dimension: {rows.shape[1]} vs {cols.shape[1]}"
        )
    diff = rows[:, None, :] - cols[None, :, :]
    sq_dist = np.einsum("ijk,ijk->ij", diff, diff)
    return np.exp(-cfg.gamma * sq_dist)
