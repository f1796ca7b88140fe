#!/usr/bin/env python3
"""
Evaluation Service - flat hit@K of the three prediction pipelines

    AAg   attribute-agnostic prediction, nearest prototype
    AAw   attribute-aware prediction, nearest prototype
    TAAw  attribute-aware prediction, transductive label propagation

NN pipelines rank classes by soft-assignment probability; TAAw ranks them by
the propagation scores. Only the t-SNE embedding depends on the seed, so the
predictions are computed once per mode and reused across repetitions.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from domain.dense_matrix import as_dense
from domain.errors import DataValidationError, DimensionMismatchError
from domain.hyper_params import HyperParams
from domain.joint_dictionary import JointDictionary, UnseenPrototypes
from domain.metrics import EvalReport, hit_at_k, per_class_accuracy
from domain.prediction import PredictionResult

from .attribute_prediction import AttributePredictor
from .label_assignment import nn_indices, taaw_propagate

DEFAULT_KS = (1, 3, 5)


@dataclass(frozen=True)
class Pipeline:
    name: str
    mode: str
    strategy: str


PIPELINES = {
    "AAg": Pipeline("AAg", "AAg", "nn"),
    "AAw": Pipeline("AAw", "AAw", "nn"),
    "TAAw": Pipeline("TAAw", "AAw", "taaw"),
}

STRATEGY_METHODS = {
    "nn": ("AAg", "AAw"),
    "taaw": ("TAAw",),
    "all": ("AAg", "AAw", "TAAw"),
}


def methods_for_strategy(strategy: str) -> Sequence[str]:
    try:
        return STRATEGY_METHODS[strategy.lower()]
    except KeyError as e:
        raise DataValidationError(f"Unknown strategy: {strategy} (expected one of {sorted(STRATEGY_METHODS)})") from e


class EvaluationService:
    """Runs prediction and assignment pipelines against known test labels"""

    def __init__(self, dictionary: JointDictionary, params: HyperParams):
        self.dictionary = dictionary
        self.params = params
        self.predictor = AttributePredictor(dictionary, params)
        self.logger = logging.getLogger(__name__)

    def evaluate(self, features: np.ndarray, truth: np.ndarray, protos: UnseenPrototypes,
                 methods: Iterable[str] = ("AAg", "AAw", "TAAw"), repeats: int = 1,
                 seeds: Optional[List[int]] = None, ks: Sequence[int] = DEFAULT_KS) -> Dict[str, EvalReport]:
        """
        Args:
            features: p x l test features
            truth: Length-l true class labels (prototype labels)
            protos: Unseen prototypes
            methods: Subset of "AAg", "AAw", "TAAw"
            repeats: Number of seeds, params.seed, params.seed + 1, ... (ignored when seeds is given)
            seeds: Explicit seed list
            ks: Cutoffs; cutoffs above the number of classes report 1.0

        Returns:
            EvalReport per method, keyed by method name
        """
        features = as_dense(features, "test features")
        truth = np.asarray(truth, dtype=np.int64)
        if truth.shape[0] != features.shape[1]:
            raise DimensionMismatchError(
                f"{features.shape[1]} test samples but {truth.shape[0]} test labels"
            )
        if repeats < 1:
            raise DataValidationError(f"repeats must be >= 1, got {repeats}")
        seeds = list(seeds) if seeds is not None else [self.params.seed + i for i in range(repeats)]
        truth_index = protos.indices_of(truth)

        predictions: Dict[str, PredictionResult] = {}
        reports = {}
        for name in methods:
            if name not in PIPELINES:
                raise DataValidationError(f"Unknown method: {name} (expected one of {sorted(PIPELINES)})")
            pipeline = PIPELINES[name]
            if pipeline.mode not in predictions:
                predictions[pipeline.mode] = self.predictor.predict_batch(features, protos, pipeline.mode)
            prediction = predictions[pipeline.mode]
            reports[name] = self._evaluate_pipeline(pipeline, prediction, truth_index, protos, seeds, ks)
            self.logger.info("%s: %s", name, ", ".join(
                f"hit@{k}={reports[name].hit_at[k]:.4f}" for k in sorted(reports[name].hit_at)
            ))
        return reports

    def _evaluate_pipeline(self, pipeline: Pipeline, prediction: PredictionResult, truth_index: np.ndarray,
                           protos: UnseenPrototypes, seeds: List[int], ks: Sequence[int]) -> EvalReport:
        n_classes = protos.n_prototypes
        runs: Dict[int, List[float]] = {k: [] for k in ks}
        class_runs: List[Dict[int, float]] = []
        nn_scores = prediction.assignment_matrix()
        nn_labels = nn_indices(prediction.predicted_attributes, protos) if pipeline.strategy == "nn" else None

        for seed in seeds:
            if pipeline.strategy == "nn":
                scores, hard = nn_scores, nn_labels
            else:
                result = taaw_propagate(prediction.predicted_attributes, protos, self.params, seed=seed)
                scores, hard = result.test_scores, result.prototype_index
            for k in ks:
                if k > n_classes:
                    runs[k].append(1.0)
                elif k == 1:
                    runs[k].append(hit_at_k(hard, truth_index, 1))
                else:
                    runs[k].append(hit_at_k(scores, truth_index, k))
            class_runs.append(per_class_accuracy(hard, truth_index))
            if pipeline.strategy == "nn" and len(seeds) > 1:
                # NN pipelines do not depend on the seed
                runs = {k: values * len(seeds) for k, values in runs.items()}
                class_runs = class_runs * len(seeds)
                break

        per_class = {
            int(protos.labels[index]): float(np.mean([run[index] for run in class_runs]))
            for index in sorted(class_runs[0])
        }
        return EvalReport(
            method=pipeline.name,
            hit_at={k: float(np.mean(values)) for k, values in runs.items()},
            hit_at_std={k: float(np.std(values)) for k, values in runs.items()},
            per_class_accuracy=per_class,
            n_test=int(truth_index.shape[0]),
            seeds_used=list(seeds),
            mean_entropy=prediction.mean_entropy(),
        )
