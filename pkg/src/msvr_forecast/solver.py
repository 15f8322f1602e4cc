"""Multi-output support vector regression trained by IRWLS.

The model minimizes

    0.5 * sum_j ||w^j||^2 + C * sum_i L(u_i),    u_i = ||y_i - W'phi(x_i) - b||

where L is the quadratic epsilon-insensitive loss.  The residual norm
u_i couples all output dimensions, so every regressor sees information
from every output; this is what distinguishes the multi-output model
from a stack of independent SVRs.

Training alternates three moves: recompute per-sample weights from the
current residual norms, solve one weighted least-squares system per
output (same coefficient matrix, different right-hand side), and take
a backtracking step along the direction toward that solution.  The
true objective never increases across accepted steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError, NumericError, SolverError
from .kernels import KernelConfig, gram


@dataclass(frozen=True)
class Hyperparams:
    """Regularization trade-off C, tube radius epsilon, kernel config."""

    C: float
    epsilon: float
    kernel: KernelConfig

    def __post_init__(self):
        if not (np.isfinite(self.C) and self.C > 0):
            raise InputError(f"C must be a positive real, got {self.C}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise InputError(f"epsilon must be non-negative, got {self.epsilon}")


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 200
    tolerance: float = 1e-8
    step_floor: float = 1e-12
    jitter: float = 1e-8


@dataclass
class SolverDiagnostics:
    objective: float
    iterations: int
    stop_reason: str
    objective_trace: list = field(default_factory=list)


@dataclass
class MsvrModel:
    """Trained regressor: dual coefficients, intercepts, stored inputs."""

    beta: np.ndarray  # (n, H)
    intercept: np.ndarray  # (H,)
    train_inputs: np.ndarray  # (n, d)
    hyper: Hyperparams
    diagnostics: SolverDiagnostics

    @property
    def n_outputs(self) -> int:
        return self.beta.shape[1]

    def predict(self, inputs) -> np.ndarray:
        """Predict an (m, H) output block for an (m, d) input block."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        if inputs.shape[1] != self.train_inputs.shape[1]:
            raise InputError(
                f"prediction inputs have dimension {inputs.shape[1]}, "
                f"model was trained on dimension {self.train_inputs.shape[1]}"
            )
        k_new = gram(inputs, self.train_inputs, self.hyper.kernel)
        return k_new @ self.beta + self.intercept

    def save(self, path) -> None:
        """Write the model as self-describing JSON.

        Floats serialize via repr, so a load() round trip restores every
        real field bit for bit.
        """
        payload = {
            "beta": self.beta.tolist(),
            "intercept": self.intercept.tolist(),
            "train_inputs": self.train_inputs.tolist(),
            "hyper": {
                "C": self.hyper.C,
                "epsilon": self.hyper.epsilon,
                "kernel": {"kind": self.hyper.kernel.kind, "gamma": self.hyper.kernel.gamma},
            },
            "diagnostics": {
                "objective": self.diagnostics.objective,
                "iterations": self.diagnostics.iterations,
                "stop_reason": self.diagnostics.stop_reason,
                "objective_trace": list(self.diagnostics.objective_trace),
            },
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)

    @classmethod
    def load(cls, path) -> "MsvrModel":
        with open(path) as fh:
            payload = json.load(fh)
        hyper = Hyperparams(
            C=payload["hyper"]["C"],
            epsilon=payload["hyper"]["epsilon"],
            kernel=KernelConfig(
                kind=payload["hyper"]["kernel"]["kind"],
                gamma=payload["hyper"]["kernel"]["gamma"],
            ),
        )
        diag = SolverDiagnostics(
            objective=payload["diagnostics"]["objective"],
            iterations=payload["diagnostics"]["iterations"],
            stop_reason=payload["diagnostics"]["stop_reason"],
            objective_trace=list(payload["diagnostics"]["objective_trace"]),
        )
        return cls(
            beta=np.array(payload["beta"], dtype=float),
            intercept=np.array(payload["intercept"], dtype=float),
            train_inputs=np.array(payload["train_inputs"], dtype=float),
            hyper=hyper,
            diagnostics=diag,
        )


def quad_eps_loss(u, epsilon: float):
    """Quadratic epsilon-insensitive loss: 0 inside the tube, (u - eps)^2 outside."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise InputError("residual norms must be non-negative")
    out = np.where(u < epsilon, 0.0, (u - epsilon) ** 2)
    return float(out) if out.ndim == 0 else out


def irwls_weights(u, epsilon: float, C: float) -> np.ndarray:
    """Per-sample weights a_i: 0 inside the tube, 2C(u - eps)/u outside.

    At u = 0 with epsilon = 0 the limit 2C is used, which keeps the
    zero-epsilon model identical to kernel ridge regression.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise InputError("residual norms must be non-negative")
    a = np.zeros_like(u)
    if epsilon == 0.0:
        a[:] = 2.0 * C
        mask = u > 0
        a[mask] = 2.0 * C * (u[mask] - epsilon) / u[mask]  # equals 2C exactly
    else:
        mask = u >= epsilon
        a[mask] = 2.0 * C * (u[mask] - epsilon) / u[mask]
    return a


def _objective_with_gram(beta, intercept, K, targets, hyper: Hyperparams) -> float:
    residual = targets - K @ beta - intercept
    u = np.linalg.norm(residual, axis=1)
    reg = 0.5 * float(np.sum(beta * (K @ beta)))
    loss = hyper.C * float(np.sum(quad_eps_loss(u, hyper.epsilon)))
    value = reg + loss
    if not np.isfinite(value):
        raise NumericError("objective evaluated to a non-finite value")
    return value


def objective(beta, intercept, inputs, targets, hyper: Hyperparams) -> float:
    """Evaluate the training objective at (beta, intercept).

    The regularizer is computed in the dual as beta_j' K beta_j per output.
    """
    beta = np.asarray(beta, dtype=float)
    intercept = np.asarray(intercept, dtype=float)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    for name, arr in (("beta", beta), ("intercept", intercept),
                      ("inputs", inputs), ("targets", targets)):
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"{name} contains non-finite values")
    K = gram(inputs, inputs, hyper.kernel)
    return _objective_with_gram(beta, intercept, K, targets, hyper)


def solve_weighted_system(K, a, targets, jitter: float = 1e-8):
    """Solve the per-output weighted least-squares systems.

    For each output j, with A the set of samples having a_i > 0, solve

        [ K_AA + diag(1/a_A)   1        ] [beta_A]   [y_A      ]
        [ a_A' K_AA            sum(a_A) ] [b     ] = [a_A' y_A ]

    Rows outside A receive beta_i = 0.  The coefficient matrix is shared
    across outputs, so all right-hand sides are solved in one call.
    A singular system is retried once with ``jitter`` added to the
    diagonal; if that also fails a SolverError is raised.
    """
    K = np.asarray(K, dtype=float)
    a = np.asarray(a, dtype=float)
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    n = K.shape[0]
    if K.shape != (n, n):
        raise InputError("kernel matrix must be square")
    if a.shape != (n,) or targets.shape[0] != n:
        raise InputError("weights and targets must match the kernel matrix size")
    sv = a > 0
    if not np.any(sv):
        raise InputError("at least one positive weight is required")

    n_sv = int(np.count_nonzero(sv))
    k_sv = K[np.ix_(sv, sv)]
    a_sv = a[sv]
    y_sv = targets[sv]

    system = np.empty((n_sv + 1, n_sv + 1))
    system[:n_sv, :n_sv] = k_sv + np.diag(1.0 / a_sv)
    system[:n_sv, n_sv] = 1.0
    system[n_sv, :n_sv] = a_sv @ k_sv
    system[n_sv, n_sv] = a_sv.sum()
    rhs = np.vstack([y_sv, a_sv @ y_sv])

    solution = None
    try:
        candidate = np.linalg.solve(system, rhs)
        if np.all(np.isfinite(candidate)):
            solution = candidate
    except np.linalg.LinAlgError:
        pass
    if solution is None:
        regularized = system + jitter * np.eye(n_sv + 1)
        try:
            candidate = np.linalg.solve(regularized, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError("weighted system singular even after jitter") from exc
        if not np.all(np.isfinite(candidate)):
            raise SolverError("weighted system singular even after jitter")
        solution = candidate

    beta = np.zeros_like(targets)
    beta[sv] = solution[:n_sv]
    intercept = solution[n_sv].copy()
    return beta, intercept


def fit(inputs, targets, hyper: Hyperparams, options: SolverOptions | None = None) -> MsvrModel:
    """Train the regressor on an (n, d) input block and (n, H) target block.

    Starts from beta = 0, b = 0.  If every residual already sits inside
    the epsilon tube at that start, the intercept is re-centered on the
    per-output target means and checked again; a start with no active
    sample is returned as-is since its objective is already zero.
    """
    opts = options or SolverOptions()
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float)
    if targets.ndim == 1:
        targets = targets[:, None]
    if inputs.shape[0] != targets.shape[0]:
        raise InputError(
            f"inputs have {inputs.shape[0]} rows but targets have {targets.shape[0]}"
        )
    if inputs.shape[0] == 0:
        raise InputError("cannot fit on an empty dataset")
    if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(targets))):
        raise InputError("training data contains non-finite values")

    n, n_out = targets.shape
    K = gram(inputs, inputs, hyper.kernel)

    beta = np.zeros((n, n_out))
    intercept = np.zeros(n_out)
    u = np.linalg.norm(targets - K @ beta - intercept, axis=1)
    a = irwls_weights(u, hyper.epsilon, hyper.C)

    if hyper.epsilon > 0 and not np.any(a > 0):
        # Zero start already has zero loss; try centering the intercept on
        # the target means, keeping it only if everything stays in-tube.
        centered = targets.mean(axis=0)
        u_c = np.linalg.norm(targets - centered, axis=1)
        a_c = irwls_weights(u_c, hyper.epsilon, hyper.C)
        if not np.any(a_c > 0):
            intercept = centered
        obj0 = _objective_with_gram(beta, intercept, K, targets, hyper)
        diag = SolverDiagnostics(obj0, 0, "in_tube_at_start", [obj0])
        return MsvrModel(beta, intercept, inputs.copy(), hyper, diag)

    obj = _objective_with_gram(beta, intercept, K, targets, hyper)
    trace = [obj]
    stop_reason = "max_iterations"
    iterations = 0

    for _ in range(opts.max_iterations):
        if np.any(a > 0):
            beta_s, b_s = solve_weighted_system(K, a, targets, jitter=opts.jitter)
        else:
            beta_s, b_s = np.zeros_like(beta), intercept.copy()
        d_beta = beta_s - beta
        d_b = b_s - intercept

        eta = 1.0
        accepted = False
        while eta >= opts.step_floor:
            cand_beta = beta + eta * d_beta
            cand_b = intercept + eta * d_b
            cand_obj = _objective_with_gram(cand_beta, cand_b, K, targets, hyper)
            if cand_obj < obj:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            stop_reason = "step_underflow"
            break

        prev = obj
        beta, intercept, obj = cand_beta, cand_b, cand_obj
        trace.append(obj)
        iterations += 1
        u = np.linalg.norm(targets - K @ beta - intercept, axis=1)
        a = irwls_weights(u, hyper.epsilon, hyper.C)
        if (prev - obj) / (1.0 + prev) < opts.tolerance:
            stop_reason = "tolerance"
            break

    diag = SolverDiagnostics(obj, iterations, stop_reason, trace)
    return MsvrModel(beta, intercept, inputs.copy(), hyper, diag)


def predict(model: MsvrModel, inputs) -> np.ndarray:
    """Functional alias for MsvrModel.predict."""
    return model.predict(inputs)
