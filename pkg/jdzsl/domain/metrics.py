#!/usr/bin/env python3
"""
Flat hit@K accuracy and the evaluation report
"""
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .errors import DataValidationError, DimensionMismatchError


def top_k_classes(scores: np.ndarray, k: int) -> np.ndarray:
    """
    Column indices of the k best scores per row

    A stable sort on the negated scores keeps equal scores in index order,
    so ties at the boundary go to the lowest class index.
    """
    return np.argsort(-scores, axis=1, kind="stable")[:, :k]


def hit_at_k(scores, truth, k: int) -> float:
    """
    Fraction of samples whose true class is among the top-k predictions

    Args:
        scores: l x C score matrix, or a length-l vector of hard class indices
        truth: Length-l vector of true class indices (column indices into scores)
        k: Cutoff, 1 <= k <= C

    Returns:
        Accuracy in [0, 1]

    Raises:
        DataValidationError: When k is out of range, or k > 1 is asked of hard labels
    """
    truth = np.asarray(truth, dtype=np.int64)
    scores = np.asarray(scores)
    if k < 1:
        raise DataValidationError(f"K must be >= 1, got {k}")
    if scores.ndim == 1:
        if k != 1:
            raise DataValidationError("hit@K for K > 1 needs class scores, not hard labels")
        if scores.shape[0] != truth.shape[0]:
            raise DimensionMismatchError(f"{scores.shape[0]} predictions for {truth.shape[0]} samples")
        return float(np.mean(scores == truth)) if truth.size else 0.0
    if scores.ndim != 2:
        raise DataValidationError(f"scores must be 1-D or 2-D, got shape {scores.shape}")
    n_samples, n_classes = scores.shape
    if k > n_classes:
        raise DataValidationError(f"K={k} exceeds the number of classes C={n_classes}")
    if n_samples != truth.shape[0]:
        raise DimensionMismatchError(f"{n_samples} score rows for {truth.shape[0]} samples")
    if n_samples == 0:
        return 0.0
    hits = np.any(top_k_classes(scores.astype(np.float64), k) == truth[:, None], axis=1)
    return float(np.mean(hits))


def per_class_accuracy(predicted: np.ndarray, truth: np.ndarray) -> Dict[int, float]:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    return {int(cls): float(np.mean(predicted[truth == cls] == cls)) for cls in np.unique(truth)}


@dataclass
class EvalReport:
    """Accuracy summary of one prediction method over one or more seeds"""
    method: str
    hit_at: Dict[int, float] = field(default_factory=dict)
    hit_at_std: Dict[int, float] = field(default_factory=dict)
    per_class_accuracy: Dict[int, float] = field(default_factory=dict)
    n_test: int = 0
    seeds_used: List[int] = field(default_factory=list)
    mean_entropy: float = float("nan")

    def __post_init__(self):
        for k, value in self.hit_at.items():
            if not 0.0 <= value <= 1.0:
                raise DataValidationError(f"hit@{k}={value} outside [0, 1]")
        ordered = [self.hit_at[k] for k in sorted(self.hit_at)]
        if any(later < earlier - 1e-12 for earlier, later in zip(ordered, ordered[1:])):
            raise DataValidationError(f"hit@K must be non-decreasing in K, got {self.hit_at}")

    @property
    def overall_accuracy(self) -> float:
        return self.hit_at.get(1, float("nan"))
