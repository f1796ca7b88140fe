#!/usr/bin/env python3
"""
Recovery Study - LASSO recovery error as the visual dimension p grows

For every p: draw a p x r Gaussian design, a k-sparse code with entries
sign * (1 + U(0,1)), observe y = D a + noise, solve

    (1/p)||y - D a||^2 + mu ||a||_1,   mu = c * max(sigma, sigma_floor) * sqrt(log r / p)

and record ||a_hat - a||_2. The table shows the error falling with p; the
constant c' of error ~ c' sqrt(k log r / p) is fitted by least squares.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from domain.errors import DataValidationError
from domain.sparse_opt import LassoProblem, fista_lasso

logger = logging.getLogger(__name__)

SUPPORT_THRESHOLD = 0.1


@dataclass(frozen=True)
class RecoverySettings:
    k: int = 4
    r: int = 512
    q: int = 16
    noise_sigma: float = 0.01
    trials: int = 50
    penalty_scale: float = 4.0
    sigma_floor: float = 1e-3
    max_iter: int = 3000
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.k < 0 or self.k > self.r:
            raise DataValidationError(f"k must lie in [0, r], got k={self.k}, r={self.r}")
        if self.trials < 1:
            raise DataValidationError(f"trials must be >= 1, got {self.trials}")
        if self.noise_sigma < 0:
            raise DataValidationError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


@dataclass
class RecoveryRow:
    p: int
    mean_error: float
    std_error: float
    support_recovery: float
    rate: float
    bound_predictor: float


@dataclass
class RecoveryTable:
    rows: List[RecoveryRow] = field(default_factory=list)
    fitted_constant: float = 0.0

    @property
    def errors(self) -> List[float]:
        return [row.mean_error for row in self.rows]


def sparse_truth(rng: np.random.Generator, r: int, k: int) -> np.ndarray:
    code = np.zeros(r)
    if k:
        support = rng.choice(r, size=k, replace=False)
        code[support] = rng.choice([-1.0, 1.0], size=k) * (1.0 + rng.random(k))
    return code


def recovery_trial(rng: np.random.Generator, p: int, settings: RecoverySettings):
    """One draw: (error, exact support recovered)"""
    design = rng.standard_normal((p, settings.r))
    truth = sparse_truth(rng, settings.r, settings.k)
    observed = design @ truth + settings.noise_sigma * rng.standard_normal(p)
    penalty = (settings.penalty_scale * max(settings.noise_sigma, settings.sigma_floor)
               * np.sqrt(np.log(settings.r) / p))
    report = fista_lasso(LassoProblem(design, observed, 1.0 / p, penalty),
                         max_iter=settings.max_iter, tol=settings.tol)
    estimate = report.solution
    error = float(np.linalg.norm(estimate - truth))
    recovered = np.array_equal(np.abs(estimate) > SUPPORT_THRESHOLD, truth != 0.0)
    return error, recovered


def lemma1_study(p_list: Sequence[int], settings: RecoverySettings) -> RecoveryTable:
    """
    Args:
        p_list: Increasing visual dimensions
        settings: Sparsity, atom count, noise, trial count and solver settings

    Returns:
        RecoveryTable with one row per p and the fitted constant
    """
    p_list = [int(p) for p in p_list]
    if not p_list or any(p < 1 for p in p_list):
        raise DataValidationError(f"p_list must hold positive dimensions, got {p_list}")
    if any(b <= a for a, b in zip(p_list, p_list[1:])):
        raise DataValidationError(f"p_list must be increasing, got {p_list}")

    rng = np.random.default_rng(settings.seed)
    table = RecoveryTable()
    for p in p_list:
        outcomes = [recovery_trial(rng, p, settings) for _ in range(settings.trials)]
        errors = np.array([error for error, _ in outcomes])
        row = RecoveryRow(
            p=p,
            mean_error=float(errors.mean()),
            std_error=float(errors.std()),
            support_recovery=float(np.mean([recovered for _, recovered in outcomes])),
            rate=float(np.sqrt(settings.k * np.log(settings.r) / p)),
            bound_predictor=float(1.0 / np.sqrt(p) + 1.0 / np.sqrt(p + settings.q)),
        )
        table.rows.append(row)
        logger.info("p=%d: mean error %.6g, support recovery %.2f", p, row.mean_error, row.support_recovery)

    rates = np.array([row.rate for row in table.rows])
    if np.any(rates):
        table.fitted_constant = float(rates @ np.array(table.errors) / (rates @ rates))
    return table
