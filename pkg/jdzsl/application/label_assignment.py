#!/usr/bin/env python3
"""
Label Assignment - from predicted attributes to unseen-class labels

Inductive: nearest prototype in attribute space.
Transductive: embed prototypes and predictions together, build a kNN graph
over all of them and propagate the prototype labels to the test nodes.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from domain.dense_matrix import as_dense, require_rows
from domain.errors import DataValidationError
from domain.graph import knn_graph, label_propagate, seed_matrix
from domain.hyper_params import HyperParams
from domain.joint_dictionary import UnseenPrototypes
from domain.prediction import PredictionResult
from domain.tsne import ExactTSNE, default_perplexity

logger = logging.getLogger(__name__)

ASSIGN_STRATEGIES = ("nn", "taaw")


@dataclass
class TransductiveResult:
    """Labels of the test nodes plus everything needed to inspect the propagation"""
    labels: np.ndarray
    prototype_index: np.ndarray
    scores: np.ndarray
    embedding: np.ndarray
    n_prototypes: int

    @property
    def test_scores(self) -> np.ndarray:
        """l x M propagation scores of the test nodes"""
        return self.scores[self.n_prototypes:]


def nn_indices(predicted: np.ndarray, protos: UnseenPrototypes) -> np.ndarray:
    """Index of the nearest prototype per column; ties go to the lowest index"""
    predicted = as_dense(predicted, "predicted attributes")
    if protos.n_prototypes < 1:
        raise DataValidationError("nearest-prototype assignment needs at least one prototype")
    require_rows(predicted, protos.q, "predicted attributes")
    distances = cdist(predicted.T, protos.attributes.T, "sqeuclidean")
    return np.argmin(distances, axis=1)


def nn_assign(predicted: np.ndarray, protos: UnseenPrototypes) -> np.ndarray:
    """
    Args:
        predicted: q x l predicted attributes
        protos: Unseen prototypes (M >= 1)

    Returns:
        Class labels (prototype labels) of length l
    """
    return protos.labels[nn_indices(predicted, protos)]


def embed_points(points: np.ndarray, params: HyperParams, seed: Optional[int] = None) -> np.ndarray:
    """Low-dimensional coordinates for propagation: exact t-SNE or the points themselves"""
    if params.embedding == "identity":
        return np.array(points)
    n = points.shape[1]
    perplexity = params.tsne_perplexity if params.tsne_perplexity is not None else default_perplexity(n)
    tsne = ExactTSNE(out_dim=2, perplexity=perplexity, iters=params.tsne_iters,
                     seed=params.seed if seed is None else seed)
    embedding = tsne.embed(points)
    logger.debug("Embedded %d points with t-SNE (perplexity %.3g, KL %.4g -> %.4g)",
                 n, perplexity, tsne.kl_initial, tsne.kl_final)
    return embedding


def taaw_propagate(predicted: np.ndarray, protos: UnseenPrototypes, params: HyperParams,
                   seed: Optional[int] = None) -> TransductiveResult:
    """
    Transductive assignment with the full propagation state

    Args:
        predicted: q x l predicted attributes, l >= 3
        protos: Unseen prototypes
        params: knn_k, lp_alpha, embedding and t-SNE settings
        seed: Overrides params.seed for the embedding
    """
    predicted = as_dense(predicted, "predicted attributes")
    require_rows(predicted, protos.q, "predicted attributes")
    l, m = predicted.shape[1], protos.n_prototypes
    if l < 3:
        raise DataValidationError(f"transductive assignment needs at least 3 test samples, got {l}")
    if m < 1:
        raise DataValidationError("transductive assignment needs at least one prototype")

    points = np.hstack([protos.attributes, predicted])
    n = m + l
    embedding = embed_points(points, params, seed)
    k = params.knn_k
    if k >= n:
        k = n - 1
        logger.warning("knn_k=%d exceeds the %d available neighbours, using k=%d", params.knn_k, n - 1, k)
    graph = knn_graph(embedding, k)
    seeds = seed_matrix(n, np.arange(m), np.arange(m), m)
    distribution = label_propagate(graph, seeds, params.lp_alpha)
    index = distribution.hard_labels[m:]
    return TransductiveResult(labels=protos.labels[index], prototype_index=index,
                              scores=distribution.scores, embedding=embedding, n_prototypes=m)


def taaw_assign(predicted: np.ndarray, protos: UnseenPrototypes, params: HyperParams) -> np.ndarray:
    """Labels of the test columns after label propagation from the prototypes"""
    return taaw_propagate(predicted, protos, params).labels


def assign_labels(result: PredictionResult, protos: UnseenPrototypes, params: HyperParams,
                  strategy: str = "taaw") -> Optional[TransductiveResult]:
    """
    Fill result.labels from its predicted attributes

    Returns:
        The propagation state for "taaw", None for "nn"
    """
    if strategy not in ASSIGN_STRATEGIES:
        raise DataValidationError(f"Unknown strategy: {strategy} (expected one of {list(ASSIGN_STRATEGIES)})")
    if strategy == "nn":
        result.labels = nn_assign(result.predicted_attributes, protos)
        return None
    transductive = taaw_propagate(result.predicted_attributes, protos, params)
    result.labels = transductive.labels
    return transductive
