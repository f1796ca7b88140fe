#!/usr/bin/env python3
"""
Joint Dictionary Domain Model

Seen data, unseen prototypes, the coupled dictionary pair (Dx, Dz) and the
joint objective they are trained against:

    1/(Np) (||X - Dx A||_F^2 + (p lambda / r) ||A||_1)
  + 1/(Nq)  ||Z - Dz A||_F^2
  + 1/(Mq) (||Z' - Dz B||_F^2 + (q lambda / r) ||B||_1)

subject to every dictionary column having l2 norm at most one.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg

from .dense_matrix import as_dense, column_norms, frozen, require_cols, require_rows
from .errors import (
    DataValidationError,
    DeadCodesError,
    DimensionMismatchError,
    UnderCompleteDictionaryError,
)
from .hyper_params import HyperParams
from .sparse_opt import FistaOptions, batch_sparse_code

logger = logging.getLogger(__name__)

COLUMN_NORM_SLACK = 1e-9
RIDGE_SCALE = 1e-8


def _as_labels(values: Any, name: str) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim != 1:
        raise DataValidationError(f"{name} must be 1-D, got shape {array.shape}")
    if array.size and not np.all(np.equal(np.mod(array, 1), 0)):
        raise DataValidationError(f"{name} must hold integer class ids")
    return array.astype(np.int64)


@dataclass(frozen=True)
class SeenDataset:
    """Labeled visual features X (p x N) with class-specific attributes Z (q x N)"""
    features: np.ndarray
    attributes: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = as_dense(self.features, "features")
        attributes = as_dense(self.attributes, "attributes")
        labels = _as_labels(self.labels, "labels")
        n = features.shape[1]
        if attributes.shape[1] != n or labels.shape[0] != n:
            raise DimensionMismatchError(
                f"features have {n} columns, attributes have {attributes.shape[1]}, "
                f"labels have {labels.shape[0]} entries"
            )
        if n < 1:
            raise DataValidationError("seen dataset is empty")
        for cls in np.unique(labels):
            block = attributes[:, labels == cls]
            if not np.array_equal(block, np.broadcast_to(block[:, :1], block.shape)):
                raise DataValidationError(f"class {cls} has more than one attribute vector")
        object.__setattr__(self, "features", frozen(features))
        object.__setattr__(self, "attributes", frozen(attributes))
        object.__setattr__(self, "labels", labels)

    @property
    def p(self) -> int:
        return self.features.shape[0]

    @property
    def q(self) -> int:
        return self.attributes.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    def class_prototypes(self) -> "UnseenPrototypes":
        """Attribute vector of every seen class, one column per class"""
        classes = self.classes
        columns = [int(np.flatnonzero(self.labels == cls)[0]) for cls in classes]
        return UnseenPrototypes(self.attributes[:, columns], classes)

    def subset(self, mask: np.ndarray) -> "SeenDataset":
        return SeenDataset(self.features[:, mask], self.attributes[:, mask], self.labels[mask])


@dataclass(frozen=True)
class UnseenPrototypes:
    """Class-specific attribute prototypes Z' (q x M) of the unseen classes"""
    attributes: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        attributes = as_dense(self.attributes, "prototype attributes")
        labels = _as_labels(self.labels, "prototype labels")
        if labels.shape[0] != attributes.shape[1]:
            raise DimensionMismatchError(
                f"{attributes.shape[1]} prototypes but {labels.shape[0]} prototype labels"
            )
        if np.unique(labels).shape[0] != labels.shape[0]:
            raise DataValidationError("prototype labels must be distinct")
        if attributes.shape[1] > 1 and np.unique(attributes.T, axis=0).shape[0] != attributes.shape[1]:
            raise DataValidationError("prototype attribute columns must be pairwise distinct")
        object.__setattr__(self, "attributes", frozen(attributes))
        object.__setattr__(self, "labels", labels)

    @property
    def q(self) -> int:
        return self.attributes.shape[0]

    @property
    def n_prototypes(self) -> int:
        return self.attributes.shape[1]

    def require_disjoint(self, data: SeenDataset) -> None:
        overlap = np.intersect1d(self.labels, data.labels)
        if overlap.size:
            raise DataValidationError(f"seen and unseen label sets overlap: {overlap.tolist()}")

    def indices_of(self, labels: np.ndarray) -> np.ndarray:
        """Map class ids onto prototype column indices"""
        lookup = {int(label): index for index, label in enumerate(self.labels)}
        try:
            return np.array([lookup[int(label)] for label in labels], dtype=np.int64)
        except KeyError as e:
            raise DataValidationError(f"label {e.args[0]} has no prototype") from e


@dataclass(frozen=True)
class JointDictionary:
    """Coupled overcomplete dictionaries sharing r atoms"""
    dx: np.ndarray
    dz: np.ndarray

    def __post_init__(self):
        dx = as_dense(self.dx, "Dx")
        dz = as_dense(self.dz, "Dz")
        if dx.shape[1] != dz.shape[1]:
            raise DimensionMismatchError(f"Dx has {dx.shape[1]} atoms but Dz has {dz.shape[1]}")
        r = dx.shape[1]
        if r <= max(dx.shape[0], dz.shape[0]):
            raise UnderCompleteDictionaryError(
                f"under-complete dictionary: r={r} must exceed max(p, q)={max(dx.shape[0], dz.shape[0])}"
            )
        for name, matrix in (("Dx", dx), ("Dz", dz)):
            worst = float(column_norms(matrix).max())
            if worst > 1.0 + COLUMN_NORM_SLACK:
                raise DataValidationError(f"{name} has a column of norm {worst:.12g} > 1")
        object.__setattr__(self, "dx", frozen(dx))
        object.__setattr__(self, "dz", frozen(dz))

    @property
    def p(self) -> int:
        return self.dx.shape[0]

    @property
    def q(self) -> int:
        return self.dz.shape[0]

    @property
    def r(self) -> int:
        return self.dx.shape[1]

    def describe(self, codes: Optional[np.ndarray] = None) -> Dict[str, Any]:
        dx_norms = column_norms(self.dx)
        dz_norms = column_norms(self.dz)
        summary = {
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "dx_norm_min": float(dx_norms.min()),
            "dx_norm_max": float(dx_norms.max()),
            "dz_norm_min": float(dz_norms.min()),
            "dz_norm_max": float(dz_norms.max()),
        }
        if codes is not None:
            summary["atoms_used"] = int(np.count_nonzero(np.any(codes != 0.0, axis=1)))
        return summary


def init_dictionaries(p: int, q: int, params: HyperParams) -> JointDictionary:
    """
    Seeded standard-normal dictionaries with unit-norm columns

    Raises:
        UnderCompleteDictionaryError: When params.r <= max(p, q)
    """
    if params.r <= max(p, q):
        raise UnderCompleteDictionaryError(
            f"under-complete dictionary: r={params.r} must exceed max(p, q)={max(p, q)}"
        )
    rng = np.random.default_rng(params.seed)
    dx = rng.standard_normal((p, params.r))
    dz = rng.standard_normal((q, params.r))
    dx /= column_norms(dx)
    dz /= column_norms(dz)
    # renormalisation can land a hair above one
    return JointDictionary(project_columns(dx), project_columns(dz))


def project_columns(matrix: np.ndarray) -> np.ndarray:
    """Projection onto {every column norm <= 1}: long columns are rescaled, others untouched"""
    matrix = as_dense(matrix, "dictionary")
    norms = column_norms(matrix)
    scale = np.where(norms > 1.0, 1.0 / np.where(norms > 0.0, norms, 1.0), 1.0)
    return matrix * scale


def joint_objective(dictionary: JointDictionary, data: SeenDataset, protos: UnseenPrototypes,
                    codes_a: np.ndarray, codes_b: np.ndarray, params: HyperParams) -> float:
    """
    Value of the joint training objective

    The prototype term is dropped when there are no prototypes (M = 0).
    """
    codes_a = as_dense(codes_a, "A")
    codes_b = as_dense(codes_b, "B")
    require_rows(codes_a, dictionary.r, "A")
    require_cols(codes_a, data.n_samples, "A")
    require_rows(codes_b, dictionary.r, "B")
    require_cols(codes_b, protos.n_prototypes, "B")
    require_rows(data.features, dictionary.p, "features")
    require_rows(data.attributes, dictionary.q, "attributes")
    require_rows(protos.attributes, dictionary.q, "prototype attributes")

    n, p, q, r = data.n_samples, dictionary.p, dictionary.q, dictionary.r
    lam = params.lambda_
    visual = np.sum((data.features - dictionary.dx @ codes_a) ** 2)
    semantic = np.sum((data.attributes - dictionary.dz @ codes_a) ** 2)
    value = (visual + (p * lam / r) * np.abs(codes_a).sum()) / (n * p) + semantic / (n * q)
    m = protos.n_prototypes
    if m > 0:
        unseen = np.sum((protos.attributes - dictionary.dz @ codes_b) ** 2)
        value += (unseen + (q * lam / r) * np.abs(codes_b).sum()) / (m * q)
    return float(value)


def fit_dictionary(targets: np.ndarray, codes: np.ndarray, project: bool = True) -> np.ndarray:
    """
    Closed-form regression of targets on codes, ridge-stabilised

        D = T A^T (A A^T + eps I)^-1,   eps = 1e-8 * trace(A A^T) / r

    followed by the column projection.

    Raises:
        DeadCodesError: When every code is zero
    """
    targets = as_dense(targets, "targets")
    codes = as_dense(codes, "codes")
    require_cols(codes, targets.shape[1], "codes")
    if not np.any(codes):
        raise DeadCodesError("dead codes: lambda too large")
    r = codes.shape[0]
    gram = codes @ codes.T
    eps = RIDGE_SCALE * np.trace(gram) / r
    gram[np.diag_indices(r)] += eps
    # solve (A A^T + eps I) D^T = A T^T
    dictionary = scipy.linalg.solve(gram, codes @ targets.T, assume_a="pos").T
    return project_columns(dictionary) if project else dictionary


def joint_codes(dictionary: JointDictionary, features: np.ndarray, attributes: np.ndarray,
                params: HyperParams, init: Optional[np.ndarray] = None,
                opts: Optional[FistaOptions] = None) -> np.ndarray:
    """
    Codes minimising the seen-pair part of the joint objective for fixed dictionaries

    Per column: (1/p)||x - Dx a||^2 + (1/q)||z - Dz a||^2 + (lambda/r)||a||_1,
    solved as one LASSO on the stacked design [Dx / sqrt(p); Dz / sqrt(q)].
    """
    p, q = dictionary.p, dictionary.q
    design = np.vstack([dictionary.dx / np.sqrt(p), dictionary.dz / np.sqrt(q)])
    targets = np.vstack([as_dense(features, "features") / np.sqrt(p),
                         as_dense(attributes, "attributes") / np.sqrt(q)])
    return batch_sparse_code(design, targets, 1.0, params.l1_weight,
                             opts or params.fista_options, init=init)
