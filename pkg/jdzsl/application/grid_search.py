#!/usr/bin/env python3
"""
Grid Search - choose (lambda, gamma) on a validation split of the seen classes

A few seen classes are held out and play the unseen role: their attribute
vectors become the prototypes, their features the test set. Training depends
on lambda only, so each lambda is trained once and every gamma is evaluated
against the same dictionary.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from domain.errors import DataValidationError
from domain.hyper_params import HyperParams
from domain.joint_dictionary import SeenDataset, UnseenPrototypes

from .dictionary_training import DictionaryTrainer
from .evaluation_service import EvaluationService


@dataclass
class GridPoint:
    lambda_: float
    gamma: float
    hit_at_1: float


@dataclass
class GridResult:
    points: List[GridPoint] = field(default_factory=list)
    holdout_classes: List[int] = field(default_factory=list)

    @property
    def best(self) -> GridPoint:
        """Highest hit@1; the earliest grid point wins ties"""
        if not self.points:
            raise DataValidationError("grid search has no points")
        return max(self.points, key=lambda point: point.hit_at_1)


def validation_split(data: SeenDataset, n_holdout: int, seed: int
                     ) -> Tuple[SeenDataset, UnseenPrototypes, np.ndarray, np.ndarray]:
    """
    Returns:
        (training subset, held-out class prototypes, held-out features, held-out labels)
    """
    classes = data.classes
    if not 1 <= n_holdout < classes.shape[0]:
        raise DataValidationError(
            f"holdout must leave at least one training class: {n_holdout} of {classes.shape[0]} classes"
        )
    rng = np.random.default_rng(seed)
    held = np.sort(rng.permutation(classes)[:n_holdout])
    mask = np.isin(data.labels, held)
    held_data = data.subset(mask)
    return data.subset(~mask), held_data.class_prototypes(), held_data.features, held_data.labels


class GridSearch:
    def __init__(self, params: HyperParams):
        self.params = params
        self.logger = logging.getLogger(__name__)

    def run(self, data: SeenDataset, lambdas: Sequence[float], gammas: Sequence[float],
            n_holdout: int = 2) -> GridResult:
        if len(lambdas) == 0 or len(gammas) == 0:
            raise DataValidationError("grid search needs at least one lambda and one gamma")
        train_data, protos, features, labels = validation_split(data, n_holdout, self.params.seed)
        result = GridResult(holdout_classes=protos.labels.tolist())
        self.logger.info("Grid search over %d x %d points, holding out classes %s",
                         len(lambdas), len(gammas), result.holdout_classes)
        for lambda_ in lambdas:
            params = self.params.with_overrides(lambda_=float(lambda_))
            dictionary, _ = DictionaryTrainer(params).train(train_data, protos)
            for gamma in gammas:
                scored = params.with_overrides(gamma=float(gamma))
                report = EvaluationService(dictionary, scored).evaluate(
                    features, labels, protos, methods=("AAw",), ks=(1,)
                )["AAw"]
                point = GridPoint(lambda_=float(lambda_), gamma=float(gamma), hit_at_1=report.hit_at[1])
                result.points.append(point)
                self.logger.info("lambda=%g gamma=%g: hit@1=%.4f", point.lambda_, point.gamma, point.hit_at_1)
        return result
