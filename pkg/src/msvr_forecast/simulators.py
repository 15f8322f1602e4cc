"""Chaotic benchmark series: the Henon map and the Mackey-Glass equation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, SimulatorError
from .strategies import TimeSeries

_DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class HenonConfig:
    x0: float
    y0: float
    length: int
    burn_in: int = 0
    name: str = "henon"

    def __post_init__(self):
        if self.length < 1:
            raise InputError(f"length must be >= 1, got {self.length}")
        if self.burn_in < 0:
            raise InputError(f"burn_in must be >= 0, got {self.burn_in}")


@dataclass(frozen=True)
class MackeyGlassConfig:
    """Constant initial history phi0, delay tau, and integration controls.

    ``dt`` is the integrator step, ``sample_stride`` the number of steps
    per emitted sample (defaults give one sample per unit time).  The
    delay must align with the grid: tau / dt has to be an integer >= 2.
    """

    phi0: float
    tau: float
    length: int
    dt: float = 0.1
    sample_stride: int = 10
    burn_in: int = 100
    name: str = "mackey-glass"

    def __post_init__(self):
        if self.length < 1:
            raise InputError(f"length must be >= 1, got {self.length}")
        if self.burn_in < 0:
            raise InputError(f"burn_in must be >= 0, got {self.burn_in}")
        if not self.tau > 0:
            raise InputError(f"tau must be positive, got {self.tau}")
        if not self.dt > 0:
            raise InputError(f"dt must be positive, got {self.dt}")
        if self.sample_stride < 1:
            raise InputError(f"sample_stride must be >= 1, got {self.sample_stride}")
        ratio = self.tau / self.dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise InputError(f"tau/dt must be an integer, got {ratio}")
        if round(ratio) < 4:
            raise InputError("delay must span at least four integrator steps")


def henon_step(x: float, y: float) -> tuple[float, float]:
    """One application of the canonical Henon map (a = 1.4, b = 0.3)."""
    return 1.0 + y - 1.4 * x * x, 0.3 * x


def henon_generate(cfg: HenonConfig) -> TimeSeries:
    """Iterate the map and emit the x coordinate.

    The first emitted value is the state reached after ``burn_in``
    iterations, so with burn_in = 0 the series starts at x0.
    """
    x, y = cfg.x0, cfg.y0
    total = cfg.burn_in + cfg.length
    out = np.empty(cfg.length)
    for step in range(total):
        if step >= cfg.burn_in:
            out[step - cfg.burn_in] = x
        x, y = henon_step(x, y)
        if abs(x) > _DIVERGENCE_LIMIT:
            raise SimulatorError(f"Henon trajectory diverged at step {step + 1}")
    return TimeSeries(out, name=cfg.name)


def _mg_derivative(phi: float, phi_delayed: float) -> float:
    return 0.2 * phi_delayed / (1.0 + phi_delayed ** 10) - 0.1 * phi


def mackey_glass_generate(cfg: MackeyGlassConfig) -> TimeSeries:
    """Integrate the Mackey-Glass delay equation with fourth-order Runge-Kutta.

    The delayed state is read from the trajectory grid: exact grid values
    for the full-step stages, four-point cubic interpolation for the
    half-step stages.  A constant history makes the solution lose one
    derivative at every multiple of tau; those breaking points land
    exactly on grid nodes (tau/dt is an integer), and the interpolation
    stencil is shifted one-sided there so the integrator keeps its
    fourth-order accuracy.
    """
    delay_steps = round(cfg.tau / cfg.dt)
    total_samples = cfg.burn_in + cfg.length
    n_steps = (total_samples - 1) * cfg.sample_stride

    offset = delay_steps + 1  # grid index of t = 0
    phi = np.empty(offset + n_steps + 1)
    phi[: offset + 1] = cfg.phi0

    dt = cfg.dt
    for k in range(n_steps):
        base = offset + k
        j = k - delay_steps  # grid index of the delayed interval's left node
        d0 = phi[offset + j]
        d1 = phi[offset + j + 1]

        # delayed value at the half step, interpolated without crossing a
        # breaking point (grid nodes at non-negative multiples of the delay)
        if j + 1 >= 0 and (j + 1) % delay_steps == 0:
            p = phi[offset + j - 2: offset + j + 2]
            d_mid = (p[0] - 5.0 * p[1] + 15.0 * p[2] + 5.0 * p[3]) / 16.0
        elif j >= 0 and j % delay_steps == 0:
            p = phi[offset + j: offset + j + 4]
            d_mid = (5.0 * p[0] + 15.0 * p[1] - 5.0 * p[2] + p[3]) / 16.0
        else:
            p = phi[offset + j - 1: offset + j + 3]
            d_mid = (-p[0] + 9.0 * p[1] + 9.0 * p[2] - p[3]) / 16.0

        y = phi[base]
        k1 = _mg_derivative(y, d0)
        k2 = _mg_derivative(y + 0.5 * dt * k1, d_mid)
        k3 = _mg_derivative(y + 0.5 * dt * k2, d_mid)
        k4 = _mg_derivative(y + dt * k3, d1)
        nxt = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(nxt):
            raise SimulatorError(f"Mackey-Glass state non-finite at step {k + 1}")
        phi[base + 1] = nxt

    samples = phi[offset + np.arange(total_samples) * cfg.sample_stride]
    return TimeSeries(samples[cfg.burn_in:].copy(), name=cfg.name)
