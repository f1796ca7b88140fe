#!/usr/bin/env python3
"""
PredictionResult - codes and attribute estimates for a batch of test features
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DimensionMismatchError
from .soft_assignment import SoftAssignment

PREDICTION_MODES = ("AAg", "AAw")


@dataclass
class PredictionResult:
    codes: np.ndarray
    predicted_attributes: np.ndarray
    assignments: List[SoftAssignment] = field(default_factory=list)
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.codes.shape[1] != self.predicted_attributes.shape[1]:
            raise DimensionMismatchError(
                f"{self.codes.shape[1]} codes but {self.predicted_attributes.shape[1]} predictions"
            )
        if self.labels is not None and self.labels.shape[0] != self.codes.shape[1]:
            raise DimensionMismatchError(f"{self.codes.shape[1]} codes but {self.labels.shape[0]} labels")

    @property
    def n_samples(self) -> int:
        return self.codes.shape[1]

    def assignment_matrix(self) -> np.ndarray:
        """l x M matrix of soft-assignment probabilities"""
        if not self.assignments:
            return np.zeros((self.n_samples, 0))
        return np.vstack([assignment.probs for assignment in self.assignments])

    def mean_entropy(self) -> float:
        if not self.assignments:
            return float("nan")
        return float(np.mean([assignment.entropy for assignment in self.assignments]))
