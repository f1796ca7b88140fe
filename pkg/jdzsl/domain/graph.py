#!/usr/bin/env python3
"""
Similarity graphs and label propagation

kNN graph with a Gaussian edge weight and the local-and-global-consistency
propagation F = (1 - alpha) (I - alpha S)^-1 Y, S = D^-1/2 W D^-1/2.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from .dense_matrix import as_dense
from .errors import DataValidationError, GraphConstructionError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class Graph:
    """Weighted undirected graph on n nodes"""
    weights: np.ndarray

    def __post_init__(self):
        weights = as_dense(self.weights, "graph weights")
        n = weights.shape[0]
        if weights.shape != (n, n):
            raise GraphConstructionError(f"weight matrix must be square, got {weights.shape}")
        if np.any(weights < 0):
            raise GraphConstructionError("edge weights must be nonnegative")
        if np.max(np.abs(weights - weights.T), initial=0.0) > SYMMETRY_TOL:
            raise GraphConstructionError("weight matrix is not symmetric")
        if np.any(np.diag(weights) != 0.0):
            raise GraphConstructionError("weight matrix diagonal must be zero")
        isolated = np.flatnonzero(weights.sum(axis=1) <= 0.0)
        if isolated.size:
            raise GraphConstructionError(f"isolated node(s): {isolated.tolist()}")
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class LabelDistribution:
    """Class scores F (n x C) and their row-wise argmax"""
    scores: np.ndarray
    hard_labels: np.ndarray

    @classmethod
    def from_scores(cls, scores: np.ndarray) -> "LabelDistribution":
        # np.argmax returns the first maximum: ties go to the lowest class index
        return cls(scores=scores, hard_labels=np.argmax(scores, axis=1))


def seed_matrix(n_nodes: int, seed_nodes: np.ndarray, seed_classes: np.ndarray, n_classes: int) -> np.ndarray:
    """One-hot rows for seed nodes, zero rows elsewhere"""
    seeds = np.zeros((n_nodes, n_classes))
    seeds[np.asarray(seed_nodes), np.asarray(seed_classes)] = 1.0
    return seeds


def nearest_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    """
    Indices of the k nearest other nodes of every node (columns are points)

    Ties are broken by the lower node index.
    """
    points = as_dense(points, "points")
    n = points.shape[1]
    if not 1 <= k < n:
        raise DataValidationError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    distances = cdist(points.T, points.T, "sqeuclidean")
    np.fill_diagonal(distances, np.inf)
    return np.argsort(distances, axis=1, kind="stable")[:, :k]


def knn_graph(points: np.ndarray, k: int) -> Graph:
    """
    Symmetric kNN graph with w_ij = exp(-||p_i - p_j||^2 / (2 sigma^2))

    An edge exists when either endpoint is among the other's k nearest
    neighbours; sigma is the median kNN distance over all nodes.

    Args:
        points: d x n matrix, one node per column
        k: Neighbour count, k < n
    """
    points = as_dense(points, "points")
    neighbors = nearest_neighbors(points, k)
    n = points.shape[1]
    distances = cdist(points.T, points.T, "euclidean")
    knn_distances = np.take_along_axis(distances, neighbors, axis=1)
    sigma = float(np.median(knn_distances))
    if sigma <= 0.0:
        positive = knn_distances[knn_distances > 0.0]
        sigma = float(positive.mean()) if positive.size else 1.0
        logger.debug("Median kNN distance is zero, using sigma=%.6g", sigma)

    adjacency = np.zeros((n, n), dtype=bool)
    adjacency[np.repeat(np.arange(n), k), neighbors.ravel()] = True
    adjacency |= adjacency.T
    weights = np.where(adjacency, np.exp(-distances ** 2 / (2.0 * sigma ** 2)), 0.0)
    weights = np.where(adjacency, np.maximum(weights, _TINY), 0.0)
    np.fill_diagonal(weights, 0.0)
    return Graph(weights)


def normalized_affinity(graph: Graph) -> np.ndarray:
    inv_sqrt = 1.0 / np.sqrt(graph.weights.sum(axis=1))
    return graph.weights * inv_sqrt[:, None] * inv_sqrt[None, :]


def label_propagate(graph: Graph, seeds: np.ndarray, alpha: float) -> LabelDistribution:
    """
    Spread seed labels over the graph by a direct linear solve

    Args:
        graph: Similarity graph
        seeds: n x C seed matrix (one-hot rows for labeled nodes, zero rows otherwise)
        alpha: Propagation weight in (0, 1)

    Returns:
        LabelDistribution with F = (1 - alpha) (I - alpha S)^-1 Y
    """
    seeds = as_dense(seeds, "seed matrix")
    if seeds.shape[0] != graph.n:
        raise DataValidationError(f"seed matrix has {seeds.shape[0]} rows, graph has {graph.n} nodes")
    if not 0.0 < alpha < 1.0:
        raise DataValidationError(f"alpha must lie in (0, 1), got {alpha}")
    unseeded = np.flatnonzero(~np.any(seeds != 0.0, axis=0))
    if unseeded.size:
        raise DataValidationError(f"class column(s) without a seed node: {unseeded.tolist()}")
    system = np.eye(graph.n) - alpha * normalized_affinity(graph)
    scores = (1.0 - alpha) * scipy.linalg.solve(system, seeds)
    return LabelDistribution.from_scores(scores)
