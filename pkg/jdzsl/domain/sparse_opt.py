#!/usr/bin/env python3
"""
Sparse Optimization - proximal gradient machinery

Soft-thresholding, Lipschitz step estimation by power iteration, and a
monotone FISTA solver for

    data_weight * ||target - design @ a||^2 + l1_weight * ||a||_1

The solver works on a block of independent columns at once; the single-column
entry point is the same kernel with one column.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .dense_matrix import as_dense, as_vector
from .errors import DataValidationError, DegenerateDesignError, DimensionMismatchError

logger = logging.getLogger(__name__)

POWER_ITER_MAX = 500
POWER_ITER_TOL = 1e-12
_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class FistaOptions:
    max_iter: int = 500
    tol: float = 1e-7

    def __post_init__(self):
        if self.max_iter < 0:
            raise DataValidationError(f"max_iter must be >= 0, got {self.max_iter}")
        if self.tol < 0:
            raise DataValidationError(f"tol must be >= 0, got {self.tol}")


@dataclass(frozen=True)
class LassoProblem:
    """One LASSO instance: data_weight * ||target - design a||^2 + l1_weight * ||a||_1"""
    design: np.ndarray
    target: np.ndarray
    data_weight: float
    l1_weight: float

    def __post_init__(self):
        design = as_dense(self.design, "design")
        target = as_vector(self.target, "target")
        if design.shape[0] != target.shape[0]:
            raise DimensionMismatchError(
                f"design has {design.shape[0]} rows but target has length {target.shape[0]}"
            )
        if not self.data_weight > 0:
            raise DataValidationError(f"data_weight must be > 0, got {self.data_weight}")
        if not self.l1_weight >= 0:
            raise DataValidationError(f"l1_weight must be >= 0, got {self.l1_weight}")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "target", target)

    @property
    def n_atoms(self) -> int:
        return self.design.shape[1]

    def objective(self, a: np.ndarray) -> float:
        residual = self.target - self.design @ a
        return float(self.data_weight * residual @ residual + self.l1_weight * np.abs(a).sum())


@dataclass
class SolveReport:
    solution: np.ndarray
    objective_trace: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def soft_threshold(v, tau):
    """
    Proximal map of tau * |.|, applied elementwise

    Args:
        v: Scalar or array
        tau: Nonnegative threshold (scalar or broadcastable array)

    Returns:
        sign(v) * max(|v| - tau, 0)
    """
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(tau < 0):
        raise DataValidationError("soft_threshold requires tau >= 0")
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def largest_eigenvalue(gram: np.ndarray,
                       max_iter: int = POWER_ITER_MAX,
                       tol: float = POWER_ITER_TOL) -> float:
    """
    Largest eigenvalue of a symmetric positive semi-definite matrix by power iteration

    The start vector comes from a fixed-seed generator so the estimate is
    deterministic.
    """
    n = gram.shape[0]
    vector = np.random.default_rng(0).standard_normal(n)
    vector /= np.linalg.norm(vector)
    estimate = 0.0
    for _ in range(max_iter):
        image = gram @ vector
        rayleigh = float(vector @ image)
        norm = np.linalg.norm(image)
        if norm == 0.0:
            return 0.0
        vector = image / norm
        if abs(rayleigh - estimate) <= tol * abs(rayleigh):
            return rayleigh
        estimate = rayleigh
    return estimate


def lipschitz_step(design: np.ndarray, data_weight: float,
                   max_iter: int = POWER_ITER_MAX,
                   tol: float = POWER_ITER_TOL) -> float:
    """
    Step 1/L for the data term, L = 2 * data_weight * sigma_max(design)^2

    Raises:
        DegenerateDesignError: When design is all zeros
    """
    design = as_dense(design, "design")
    if design.size == 0:
        raise DataValidationError("design must be nonempty")
    if not data_weight > 0:
        raise DataValidationError(f"data_weight must be > 0, got {data_weight}")
    if not np.any(design):
        raise DegenerateDesignError("degenerate design")
    rows, cols = design.shape
    gram = design.T @ design if cols <= rows else design @ design.T
    sigma_sq = largest_eigenvalue(gram, max_iter, tol)
    if sigma_sq <= 0.0:
        raise DegenerateDesignError("degenerate design")
    return 1.0 / (2.0 * data_weight * sigma_sq)


def lasso_objectives(design: np.ndarray, targets: np.ndarray, codes: np.ndarray,
                     data_weight: float, l1_weight: float) -> np.ndarray:
    """Per-column LASSO objective values"""
    residual = targets - design @ codes
    return data_weight * np.einsum("ij,ij->j", residual, residual) + l1_weight * np.abs(codes).sum(axis=0)


def _fista_columns(design: np.ndarray, targets: np.ndarray, init: np.ndarray,
                   data_weight: float, l1_weight: float, step: float,
                   max_iter: int, tol: float
                   ) -> Tuple[np.ndarray, List[np.ndarray], np.ndarray, np.ndarray]:
    """
    Monotone FISTA on every column of targets

    Each column keeps its own momentum, acceptance test and stopping flag;
    columns that have converged are frozen while the rest keep iterating.
    A rejected step restarts that column's momentum from its current iterate.

    Returns:
        (solutions, objective trace per sweep, iterations per column, converged per column)
    """
    n = targets.shape[1]
    dead_atoms = ~np.any(design, axis=0)
    x = init.copy()
    x[dead_atoms, :] = 0.0
    y = x.copy()
    momentum = np.ones(n)
    f_x = lasso_objectives(design, targets, x, data_weight, l1_weight)
    trace = [f_x.copy()]
    active = np.ones(n, dtype=bool)
    iterations = np.zeros(n, dtype=int)
    converged = np.zeros(n, dtype=bool)
    threshold = step * l1_weight
    gradient_scale = 2.0 * data_weight

    for _ in range(max_iter):
        if not active.any():
            break
        gradient = gradient_scale * (design.T @ (design @ y - targets))
        z = soft_threshold(y - step * gradient, threshold)
        z[dead_atoms, :] = 0.0
        f_z = lasso_objectives(design, targets, z, data_weight, l1_weight)

        accept = f_z <= f_x
        x_next = np.where(accept, z, x)
        f_next = np.where(accept, f_z, f_x)
        momentum_next = (1.0 + np.sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0
        y_next = (x_next
                  + (momentum / momentum_next) * (z - x_next)
                  + ((momentum - 1.0) / momentum_next) * (x_next - x))
        restart = ~accept
        momentum_next = np.where(restart, 1.0, momentum_next)
        y_next = np.where(restart, x_next, y_next)
        change = np.abs(f_x - f_z) / np.maximum(np.abs(f_x), _TINY)
        done = change < tol

        x = np.where(active, x_next, x)
        y = np.where(active, y_next, y)
        f_x = np.where(active, f_next, f_x)
        iterations[active] += 1
        converged |= active & done
        active &= ~done
        momentum = np.where(active, momentum_next, momentum)
        trace.append(f_x.copy())

    return x, trace, iterations, converged


def fista_lasso(problem: LassoProblem, init: Optional[np.ndarray] = None,
                max_iter: int = 500, tol: float = 1e-7,
                step: Optional[float] = None) -> SolveReport:
    """
    Solve one LASSO problem with monotone FISTA

    Args:
        problem: The LASSO instance
        init: Starting point (zeros when omitted), length design.cols
        max_iter: Iteration cap
        tol: Relative objective change that counts as converged
        step: Precomputed 1/L; estimated by power iteration when omitted

    Returns:
        SolveReport with the best (last accepted) iterate
    """
    r = problem.n_atoms
    start = np.zeros(r) if init is None else as_vector(init, "init")
    if start.shape[0] != r:
        raise DimensionMismatchError(f"init has length {start.shape[0]}, expected {r}")
    if max_iter < 0:
        raise DataValidationError(f"max_iter must be >= 0, got {max_iter}")

    if not np.any(problem.design):
        zero = np.zeros(r)
        return SolveReport(solution=zero, objective_trace=[problem.objective(zero)],
                           iterations=0, converged=True)

    if step is None:
        step = lipschitz_step(problem.design, problem.data_weight)
    solution, trace, iterations, converged = _fista_columns(
        problem.design, problem.target[:, None], start[:, None],
        problem.data_weight, problem.l1_weight, step, max_iter, tol,
    )
    report = SolveReport(
        solution=solution[:, 0],
        objective_trace=[float(values[0]) for values in trace],
        iterations=int(iterations[0]),
        converged=bool(converged[0]),
    )
    logger.debug("FISTA finished after %d iterations (converged=%s, objective=%.6g)",
                 report.iterations, report.converged, report.objective_trace[-1])
    return report


def batch_sparse_code(design: np.ndarray, targets: np.ndarray,
                      data_weight: float, l1_weight: float,
                      opts: Optional[FistaOptions] = None,
                      init: Optional[np.ndarray] = None,
                      step: Optional[float] = None) -> np.ndarray:
    """
    Sparse-code every column of targets against design

    Columns are independent problems sharing only the step size.

    Args:
        design: d x r dictionary
        targets: d x n matrix, one problem per column
        data_weight: Weight of the squared residual (the 1/p or 1/q factor)
        l1_weight: Weight of the l1 penalty (the lambda/r factor)
        opts: Iteration cap and tolerance
        init: Optional r x n warm start

    Returns:
        r x n matrix of codes
    """
    opts = opts or FistaOptions()
    design = as_dense(design, "design")
    targets = as_dense(targets, "targets")
    if design.shape[0] != targets.shape[0]:
        raise DimensionMismatchError(
            f"design has {design.shape[0]} rows but targets have {targets.shape[0]}"
        )
    if not data_weight > 0:
        raise DataValidationError(f"data_weight must be > 0, got {data_weight}")
    if not l1_weight >= 0:
        raise DataValidationError(f"l1_weight must be >= 0, got {l1_weight}")
    r, n = design.shape[1], targets.shape[1]
    if init is None:
        start = np.zeros((r, n))
    else:
        start = as_dense(init, "init")
        if start.shape != (r, n):
            raise DimensionMismatchError(f"init has shape {start.shape}, expected {(r, n)}")
    if n == 0 or not np.any(design):
        return np.zeros((r, n))

    if step is None:
        step = lipschitz_step(design, data_weight)
    codes, _, iterations, converged = _fista_columns(
        design, targets, start, data_weight, l1_weight, step, opts.max_iter, opts.tol,
    )
    if not converged.all():
        logger.debug("%d of %d columns reached max_iter=%d", int((~converged).sum()), n, opts.max_iter)
    return codes
