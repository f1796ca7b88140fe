#!/usr/bin/env python3
"""
Dictionary Training - coupled dictionary learning by alternating minimisation

Learns (Dx, Dz) from seen pairs (X, Z) and unseen prototypes Z'. Each outer
round is the EM-like pair

    update_dz: code X against Dx, then alternate B-coding and projected
               gradient steps on Dz
    update_dx: code Z against Dz, then regress X on the codes

after which the shared codes A are refreshed for the new pair. A round is
kept only when the joint objective did not go up; otherwise a plain block
coordinate round (code refresh plus projected gradient steps on both
dictionaries) is taken from the previous state.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from domain.dense_matrix import column_norms, l2_normalize_columns
from domain.errors import DataValidationError, DimensionMismatchError, DivergenceError
from domain.hyper_params import HyperParams
from domain.joint_dictionary import (
    JointDictionary,
    SeenDataset,
    UnseenPrototypes,
    fit_dictionary,
    init_dictionaries,
    joint_codes,
    joint_objective,
    project_columns,
)
from domain.sparse_opt import batch_sparse_code, largest_eigenvalue


@dataclass
class TrainReport:
    objective_trace: List[float] = field(default_factory=list)
    codes_a: Optional[np.ndarray] = None
    codes_b: Optional[np.ndarray] = None
    max_column_norms: List[float] = field(default_factory=list)
    fallback_rounds: int = 0
    replaced_atoms: int = 0


def projected_gradient(matrix: np.ndarray, hessian: np.ndarray, linear: np.ndarray, steps: int) -> np.ndarray:
    """
    Projected gradient descent on 0.5 tr(D H D^T) - tr(D G^T) over {column norms <= 1}

    Step 1/L with L the largest eigenvalue of H.
    """
    curvature = largest_eigenvalue(hessian)
    if curvature <= 0.0:
        return matrix
    for _ in range(steps):
        matrix = project_columns(matrix - (matrix @ hessian - linear) / curvature)
    return matrix


def dz_subproblem_objective(dz: np.ndarray, data: SeenDataset, protos: UnseenPrototypes,
                            codes_a: np.ndarray, codes_b: np.ndarray, params: HyperParams) -> float:
    """The Dz/B part of the joint objective, with A held fixed"""
    n, q, m = data.n_samples, data.q, protos.n_prototypes
    value = np.sum((data.attributes - dz @ codes_a) ** 2) / (n * q)
    if m > 0:
        unseen = np.sum((protos.attributes - dz @ codes_b) ** 2)
        value += (unseen + (q * params.lambda_ / dz.shape[1]) * np.abs(codes_b).sum()) / (m * q)
    return float(value)


class DictionaryTrainer:
    """Fits a JointDictionary to seen data and unseen prototypes"""

    def __init__(self, params: HyperParams):
        self.params = params
        self.logger = logging.getLogger(__name__)

    def update_dz(self, dictionary: JointDictionary, data: SeenDataset, protos: UnseenPrototypes,
                  codes_a: Optional[np.ndarray] = None, codes_b: Optional[np.ndarray] = None
                  ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Update Dz for fixed Dx

        Args:
            dictionary: Current dictionary pair
            data: Seen dataset
            protos: Unseen prototypes (may be empty)
            codes_a: Optional warm start for A*
            codes_b: Optional warm start for B

        Returns:
            (Dz, A*, B)
        """
        params = self.params
        opts = params.fista_options
        p, q, r = dictionary.p, dictionary.q, dictionary.r
        codes_a = batch_sparse_code(dictionary.dx, data.features, 1.0 / p, params.l1_weight,
                                    opts, init=codes_a)
        m = protos.n_prototypes
        if m == 0:
            return fit_dictionary(data.attributes, codes_a), codes_a, np.zeros((r, 0))

        n = data.n_samples
        codes_b = np.zeros((r, m)) if codes_b is None else codes_b
        seen_hessian = (2.0 / (n * q)) * (codes_a @ codes_a.T)
        seen_linear = (2.0 / (n * q)) * (data.attributes @ codes_a.T)
        dz = np.array(dictionary.dz)
        # B first, then Dz, once per sweep
        for _ in range(params.dz_sweeps):
            codes_b = batch_sparse_code(dz, protos.attributes, 1.0 / q, params.l1_weight,
                                        opts, init=codes_b)
            hessian = seen_hessian + (2.0 / (m * q)) * (codes_b @ codes_b.T)
            linear = seen_linear + (2.0 / (m * q)) * (protos.attributes @ codes_b.T)
            dz = projected_gradient(dz, hessian, linear, params.dz_steps)
        return dz, codes_a, codes_b

    def update_dx(self, dictionary: JointDictionary, data: SeenDataset,
                  codes_a: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Update Dx for fixed Dz: LASSO-code Z against Dz, then regress X on the codes

        Returns:
            (Dx, A*)

        Raises:
            DeadCodesError: When every code is zero
        """
        params = self.params
        codes_a = batch_sparse_code(dictionary.dz, data.attributes, 1.0 / dictionary.q,
                                    params.l1_weight, params.fista_options, init=codes_a)
        return fit_dictionary(data.features, codes_a), codes_a

    def train(self, data: SeenDataset, protos: UnseenPrototypes,
              on_round: Optional[Callable[[int, JointDictionary, float], None]] = None
              ) -> Tuple[JointDictionary, TrainReport]:
        """
        Learn the coupled dictionaries

        Args:
            data: Seen dataset (N >= 1)
            protos: Unseen prototypes (M >= 1), labels disjoint from the seen labels
            on_round: Optional callback(round, dictionary, objective) after every round

        Returns:
            (JointDictionary, TrainReport); objective_trace[0] is the objective of
            the initial dictionaries with zero codes

        Raises:
            DivergenceError: When the objective becomes non-finite
        """
        params = self.params
        if protos.n_prototypes < 1:
            raise DataValidationError("training needs at least one unseen prototype")
        if protos.q != data.q:
            raise DimensionMismatchError(
                f"seen attributes have {data.q} rows but prototypes have {protos.q}"
            )
        protos.require_disjoint(data)

        dictionary = init_dictionaries(data.p, data.q, params)
        codes_a = np.zeros((params.r, data.n_samples))
        codes_b = np.zeros((params.r, protos.n_prototypes))
        objective = joint_objective(dictionary, data, protos, codes_a, codes_b, params)
        report = TrainReport(objective_trace=[objective], codes_a=codes_a, codes_b=codes_b)
        report.max_column_norms.append(self._max_norm(dictionary))
        self.logger.info("Training r=%d on N=%d seen samples, M=%d prototypes (initial objective %.6g)",
                         params.r, data.n_samples, protos.n_prototypes, objective)

        for round_index in range(1, params.outer_iters + 1):
            state = self._em_round(dictionary, data, protos, codes_a, codes_b)
            candidate = joint_objective(state[0], data, protos, state[1], state[2], params)
            self._check_finite(candidate)
            kind = "em"
            if candidate > objective:
                state = self._fallback_round(dictionary, data, protos, codes_a, codes_b)
                candidate = joint_objective(state[0], data, protos, state[1], state[2], params)
                self._check_finite(candidate)
                report.fallback_rounds += 1
                kind = "fallback"
                if candidate > objective:
                    self.logger.warning("Round %d did not decrease the objective, keeping previous state",
                                        round_index)
                    state, candidate, kind = (dictionary, codes_a, codes_b), objective, "kept"

            dictionary, codes_a, codes_b = state
            dictionary, replaced = self._replace_dead_atoms(dictionary, data, codes_a)
            report.replaced_atoms += replaced
            objective = candidate
            report.objective_trace.append(objective)
            report.max_column_norms.append(self._max_norm(dictionary))
            self.logger.info("Round %d/%d: objective %.6g (%s, %d atoms replaced)",
                             round_index, params.outer_iters, objective, kind, replaced)
            if on_round is not None:
                on_round(round_index, dictionary, objective)

        report.codes_a, report.codes_b = codes_a, codes_b
        self.logger.info("Training finished: %s", dictionary.describe(codes_a))
        return dictionary, report

    def _em_round(self, dictionary: JointDictionary, data: SeenDataset, protos: UnseenPrototypes,
                  codes_a: np.ndarray, codes_b: np.ndarray
                  ) -> Tuple[JointDictionary, np.ndarray, np.ndarray]:
        params = self.params
        dz, codes_x, codes_b = self.update_dz(dictionary, data, protos, codes_a, codes_b)
        dx, codes_z = self.update_dx(JointDictionary(dictionary.dx, dz), data, codes_x)
        candidate = JointDictionary(dx, dz)
        start = min((codes_x, codes_z, codes_a),
                    key=lambda codes: joint_objective(candidate, data, protos, codes, codes_b, params))
        codes_a = joint_codes(candidate, data.features, data.attributes, params, init=start)
        codes_b = batch_sparse_code(dz, protos.attributes, 1.0 / candidate.q, params.l1_weight,
                                    params.fista_options, init=codes_b)
        return candidate, codes_a, codes_b

    def _fallback_round(self, dictionary: JointDictionary, data: SeenDataset, protos: UnseenPrototypes,
                        codes_a: np.ndarray, codes_b: np.ndarray
                        ) -> Tuple[JointDictionary, np.ndarray, np.ndarray]:
        params = self.params
        n, m = data.n_samples, protos.n_prototypes
        p, q = dictionary.p, dictionary.q
        codes_a = joint_codes(dictionary, data.features, data.attributes, params, init=codes_a)
        codes_b = batch_sparse_code(dictionary.dz, protos.attributes, 1.0 / q, params.l1_weight,
                                    params.fista_options, init=codes_b)
        gram_a = codes_a @ codes_a.T
        dx = projected_gradient(np.array(dictionary.dx), (2.0 / (n * p)) * gram_a,
                                (2.0 / (n * p)) * (data.features @ codes_a.T), params.dz_steps)
        dz_hessian = (2.0 / (n * q)) * gram_a + (2.0 / (m * q)) * (codes_b @ codes_b.T)
        dz_linear = (2.0 / (n * q)) * (data.attributes @ codes_a.T) + (2.0 / (m * q)) * (protos.attributes @ codes_b.T)
        dz = projected_gradient(np.array(dictionary.dz), dz_hessian, dz_linear, params.dz_steps)
        return JointDictionary(dx, dz), codes_a, codes_b

    def _replace_dead_atoms(self, dictionary: JointDictionary, data: SeenDataset,
                            codes_a: np.ndarray) -> Tuple[JointDictionary, int]:
        """
        Point unused Dx atoms at the worst-reconstructed samples

        The replaced atoms have all-zero rows in A, so the objective is unchanged.
        """
        dead = np.flatnonzero(~np.any(codes_a != 0.0, axis=1))
        if dead.size == 0:
            return dictionary, 0
        residual = column_norms(data.features - dictionary.dx @ codes_a)
        worst = np.argsort(-residual, kind="stable")[:dead.size]
        worst = worst[residual[worst] > 0.0]
        if worst.size == 0:
            return dictionary, 0
        dx = np.array(dictionary.dx)
        dx[:, dead[:worst.size]] = l2_normalize_columns(data.features[:, worst])
        self.logger.debug("Replaced %d dead atoms", worst.size)
        return JointDictionary(dx, dictionary.dz), int(worst.size)

    @staticmethod
    def _max_norm(dictionary: JointDictionary) -> float:
        return float(max(column_norms(dictionary.dx).max(), column_norms(dictionary.dz).max()))

    @staticmethod
    def _check_finite(value: float) -> None:
        if not np.isfinite(value):
            raise DivergenceError("divergence")
