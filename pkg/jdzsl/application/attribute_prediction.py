#!/usr/bin/env python3
"""
Attribute Prediction - codes and attribute estimates for unseen-class features

Attribute-agnostic (AAg): LASSO-code x against Dx and decode Dz a.
Attribute-aware (AAw): the same objective plus gamma times the entropy of the
soft assignment of Dz a to the unseen prototypes, solved by proximal gradient
from the AAg solution:

    min_a  g(a) + (lambda/r)||a||_1,   g(a) = (1/p)||x - Dx a||^2 + gamma H(p(a))
"""
import logging
from typing import Optional, Tuple

import numpy as np

from domain.dense_matrix import as_dense, as_vector, require_rows
from domain.errors import DataValidationError, DivergenceError
from domain.hyper_params import HyperParams
from domain.joint_dictionary import JointDictionary, UnseenPrototypes
from domain.prediction import PREDICTION_MODES, PredictionResult
from domain.soft_assignment import entropy_gradient, soft_assign
from domain.sparse_opt import (
    LassoProblem,
    SolveReport,
    batch_sparse_code,
    fista_lasso,
    lipschitz_step,
    soft_threshold,
)

_TINY = np.finfo(np.float64).tiny


def normalize_mode(mode: str) -> str:
    for known in PREDICTION_MODES:
        if mode.lower() == known.lower():
            return known
    raise DataValidationError(f"Unknown prediction mode: {mode} (expected one of {PREDICTION_MODES})")


class AttributePredictor:
    """Predicts attribute vectors from visual features with a trained dictionary pair"""

    def __init__(self, dictionary: JointDictionary, params: HyperParams):
        self.dictionary = dictionary
        self.params = params
        self.logger = logging.getLogger(__name__)
        self._data_weight = 1.0 / dictionary.p
        self._step: Optional[float] = None

    @property
    def data_step(self) -> float:
        """1/L of the data term, computed once per dictionary"""
        if self._step is None:
            self._step = lipschitz_step(self.dictionary.dx, self._data_weight)
        return self._step

    def predict_aag(self, x: np.ndarray) -> np.ndarray:
        """
        Args:
            x: Feature vector of length p

        Returns:
            Sparse code of length r
        """
        x = as_vector(x, "x")
        problem = LassoProblem(self.dictionary.dx, x, self._data_weight, self.params.l1_weight)
        if not np.any(problem.design):
            return np.zeros(self.dictionary.r)
        report = fista_lasso(problem, max_iter=self.params.fista_max_iter,
                             tol=self.params.fista_tol, step=self.data_step)
        return report.solution

    def smooth_objective(self, a: np.ndarray, x: np.ndarray, protos: UnseenPrototypes) -> float:
        residual = x - self.dictionary.dx @ a
        value = self._data_weight * float(residual @ residual)
        if self.params.gamma > 0.0:
            value += self.params.gamma * self.entropy_at(a, protos)
        return value

    def aaw_objective(self, a: np.ndarray, x: np.ndarray, protos: UnseenPrototypes) -> float:
        """g(a) + (lambda/r)||a||_1; equals the AAg objective when gamma = 0"""
        return self.smooth_objective(a, x, protos) + self.params.l1_weight * float(np.abs(a).sum())

    def entropy_at(self, a: np.ndarray, protos: UnseenPrototypes) -> float:
        return soft_assign(self.dictionary.dz @ a, protos, self.params.rho).entropy

    def grad_g(self, a: np.ndarray, x: np.ndarray, protos: UnseenPrototypes) -> np.ndarray:
        """
        Gradient of the smooth part g

        The data term differentiates to (2/p) Dx^T (Dx a - x). The entropy term is
        -gamma sum_m (1 + log p_m) grad p_m; the constant part drops out because
        the grad p_m sum to zero, leaving the log p_m weights used below.
        """
        dx = self.dictionary.dx
        gradient = 2.0 * self._data_weight * (dx.T @ (dx @ a - x))
        if self.params.gamma > 0.0:
            gradient = gradient + self.params.gamma * entropy_gradient(
                a, self.dictionary.dz, protos.attributes, self.params.rho
            )
        return gradient

    def predict_aaw(self, x: np.ndarray, protos: UnseenPrototypes) -> Tuple[np.ndarray, SolveReport]:
        """
        Entropy-regularised prediction started from the AAg code

        Returns:
            (code with the lowest objective seen, SolveReport over the iterations)

        Raises:
            DivergenceError: When the gradient or objective turns non-finite
        """
        x = as_vector(x, "x")
        require_rows(protos.attributes, self.dictionary.q, "prototype attributes")
        params = self.params
        start = self.predict_aag(x)
        step = params.aaw_step if params.aaw_step is not None else self.data_step
        best, best_value = start, self.aaw_objective(start, x, protos)
        trace = [best_value]
        current = start
        converged = False
        iterations = 0

        for iteration in range(params.aaw_max_iter):
            candidate, value = self._prox_step(current, x, protos, step)
            if iteration == 0 and value > best_value:
                step /= 2.0
                self.logger.debug("AAw first step increased the objective, halving step to %.6g", step)
                candidate, value = self._prox_step(current, x, protos, step)
            iterations += 1
            trace.append(value)
            if value < best_value:
                best, best_value = candidate, value
            change = np.linalg.norm(candidate - current) / max(np.linalg.norm(current), _TINY)
            current = candidate
            if change < params.fista_tol:
                converged = True
                break

        return best, SolveReport(solution=best, objective_trace=trace,
                                 iterations=iterations, converged=converged)

    def _prox_step(self, a: np.ndarray, x: np.ndarray, protos: UnseenPrototypes,
                   step: float) -> Tuple[np.ndarray, float]:
        gradient = self.grad_g(a, x, protos)
        if not np.all(np.isfinite(gradient)):
            raise DivergenceError("aaw divergence: reduce step")
        candidate = soft_threshold(a - step * gradient, step * self.params.l1_weight)
        if not np.all(np.isfinite(self.dictionary.dz @ candidate)):
            raise DivergenceError("aaw divergence: reduce step")
        with np.errstate(over="ignore", invalid="ignore"):
            value = self.aaw_objective(candidate, x, protos)
        if not np.isfinite(value):
            raise DivergenceError("aaw divergence: reduce step")
        return candidate, value

    def predict_batch(self, features: np.ndarray, protos: UnseenPrototypes, mode: str = "AAg") -> PredictionResult:
        """
        Predict every column of a p x l feature matrix

        Args:
            features: Test features, one sample per column
            protos: Unseen prototypes the soft assignments refer to
            mode: "AAg" or "AAw"
        """
        mode = normalize_mode(mode)
        features = as_dense(features, "test features")
        require_rows(features, self.dictionary.p, "test features")
        require_rows(protos.attributes, self.dictionary.q, "prototype attributes")
        l = features.shape[1]

        if mode == "AAg" or l == 0:
            if np.any(self.dictionary.dx):
                codes = batch_sparse_code(self.dictionary.dx, features, self._data_weight,
                                          self.params.l1_weight, self.params.fista_options,
                                          step=self.data_step)
            else:
                codes = np.zeros((self.dictionary.r, l))
        else:
            columns = [self.predict_aaw(features[:, i], protos)[0] for i in range(l)]
            codes = np.column_stack(columns)

        predicted = self.dictionary.dz @ codes
        assignments = [soft_assign(predicted[:, i], protos, self.params.rho) for i in range(l)]
        result = PredictionResult(codes=codes, predicted_attributes=predicted, assignments=assignments)
        self.logger.info("Predicted %d samples with %s (mean entropy %.4f)", l, mode, result.mean_entropy())
        return result
