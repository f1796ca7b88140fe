#!/usr/bin/env python3
"""
Exact t-SNE

Dense (non-accelerated) t-SNE for desk-scale point sets: per-point Gaussian
bandwidths matched to a target perplexity by bisection, symmetrised joint
affinities, Student-t affinities in the embedding, and gradient descent with
momentum, per-dimension gains and early exaggeration.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .dense_matrix import as_dense
from .errors import DataValidationError

logger = logging.getLogger(__name__)

PERPLEXITY_TOL = 1e-5
BISECTION_STEPS = 50
LEARNING_RATE = 200.0
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
MOMENTUM_SWITCH_ITER = 250
EXAGGERATION = 4.0
EXAGGERATION_ITERS = 100
MIN_GAIN = 0.01
PROBABILITY_FLOOR = 1e-12
INIT_SCALE = 1e-4


def _entropy_and_probs(distances: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
    """Shannon entropy (nats) and conditional probabilities for one row"""
    # shifting by the row minimum leaves both outputs unchanged and avoids underflow
    shifted = distances - distances.min()
    weights = np.exp(-shifted * beta)
    total = weights.sum()
    entropy = np.log(total) + beta * np.sum(shifted * weights) / total
    return float(entropy), weights / total


def conditional_affinities(squared: np.ndarray, perplexity: float,
                           tol: float = PERPLEXITY_TOL,
                           max_steps: int = BISECTION_STEPS) -> np.ndarray:
    """
    Row-stochastic P_{j|i} with the entropy of every row matched to log(perplexity)

    Args:
        squared: n x n squared distances
        perplexity: Target perplexity
    """
    n = squared.shape[0]
    target = np.log(perplexity)
    conditional = np.zeros((n, n))
    for i in range(n):
        others = np.concatenate((np.arange(i), np.arange(i + 1, n)))
        row = squared[i, others]
        beta, beta_min, beta_max = 1.0, -np.inf, np.inf
        entropy, probs = _entropy_and_probs(row, beta)
        for _ in range(max_steps):
            diff = entropy - target
            if abs(diff) <= tol:
                break
            if diff > 0:
                beta_min = beta
                beta = beta * 2.0 if np.isinf(beta_max) else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if np.isinf(beta_min) else (beta + beta_min) / 2.0
            entropy, probs = _entropy_and_probs(row, beta)
        conditional[i, others] = probs
    return conditional


def joint_affinities(points: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrised P (rows are points), normalised to sum one and floored"""
    squared = cdist(points, points, "sqeuclidean")
    conditional = conditional_affinities(squared, perplexity)
    joint = conditional + conditional.T
    joint /= joint.sum()
    return np.maximum(joint, PROBABILITY_FLOOR)


def student_affinities(embedding: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(Q, unnormalised kernel) for an n x out_dim embedding"""
    kernel = 1.0 / (1.0 + cdist(embedding, embedding, "sqeuclidean"))
    np.fill_diagonal(kernel, 0.0)
    q = np.maximum(kernel / kernel.sum(), PROBABILITY_FLOOR)
    return q, kernel


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(p * np.log(p / q)))


class ExactTSNE:
    """
    Exact t-SNE with a fixed-seed initialisation

    Attributes set by embed():
        kl_initial: KL(P || Q) at the initial embedding
        kl_final: KL(P || Q) at the returned embedding
    """

    def __init__(self, out_dim: int = 2, perplexity: float = 30.0, iters: int = 1000, seed: int = 0):
        if out_dim < 1:
            raise DataValidationError(f"out_dim must be >= 1, got {out_dim}")
        if not perplexity > 0:
            raise DataValidationError(f"perplexity must be > 0, got {perplexity}")
        if iters < 0:
            raise DataValidationError(f"iters must be >= 0, got {iters}")
        self.out_dim = out_dim
        self.perplexity = perplexity
        self.iters = iters
        self.seed = seed
        self.kl_initial: Optional[float] = None
        self.kl_final: Optional[float] = None
        self.logger = logging.getLogger(__name__)

    def embed(self, points: np.ndarray) -> np.ndarray:
        """
        Args:
            points: d x n matrix, one point per column (duplicates allowed)

        Returns:
            out_dim x n embedding

        Raises:
            DataValidationError: When n < 4 or perplexity >= (n - 1) / 3
        """
        points = as_dense(points, "points")
        n = points.shape[1]
        if n < 4:
            raise DataValidationError(f"t-SNE needs at least 4 points, got {n}")
        if self.perplexity >= (n - 1) / 3.0:
            raise DataValidationError(
                f"perplexity {self.perplexity} must be below (n - 1) / 3 = {(n - 1) / 3.0:.4g}"
            )

        p = joint_affinities(points.T, self.perplexity)
        rng = np.random.default_rng(self.seed)
        embedding = INIT_SCALE * rng.standard_normal((n, self.out_dim))
        velocity = np.zeros_like(embedding)
        gains = np.ones_like(embedding)
        self.kl_initial = kl_divergence(p, student_affinities(embedding)[0])

        for iteration in range(self.iters):
            target = p * EXAGGERATION if iteration < EXAGGERATION_ITERS else p
            q, kernel = student_affinities(embedding)
            weights = (target - q) * kernel
            gradient = weights.sum(axis=1)[:, None] * embedding - weights @ embedding

            momentum = INITIAL_MOMENTUM if iteration < MOMENTUM_SWITCH_ITER else FINAL_MOMENTUM
            same_sign = (gradient > 0) == (velocity > 0)
            gains = np.where(same_sign, gains * 0.8, gains + 0.2)
            gains = np.maximum(gains, MIN_GAIN)
            velocity = momentum * velocity - LEARNING_RATE * gains * gradient
            embedding = embedding + velocity
            embedding -= embedding.mean(axis=0)

            if (iteration + 1) % 250 == 0:
                self.logger.debug("t-SNE iteration %d: KL %.6g", iteration + 1,
                                  kl_divergence(p, student_affinities(embedding)[0]))

        self.kl_final = kl_divergence(p, student_affinities(embedding)[0])
        self.logger.debug("t-SNE finished: KL %.6g -> %.6g", self.kl_initial, self.kl_final)
        return embedding.T.copy()


def default_perplexity(n: int) -> float:
    """min(30, (n - 1)/3 - 1), falling back to (n - 1)/6 for tiny point sets"""
    perplexity = min(30.0, (n - 1) / 3.0 - 1.0)
    if perplexity < 1.0:
        perplexity = (n - 1) / 6.0
    return perplexity


def tsne_embed(points: np.ndarray, out_dim: int = 2, perplexity: Optional[float] = None,
               iters: int = 1000, seed: int = 0) -> np.ndarray:
    """Functional wrapper around ExactTSNE; perplexity defaults by point count"""
    points = as_dense(points, "points")
    if perplexity is None:
        perplexity = default_perplexity(points.shape[1])
    return ExactTSNE(out_dim=out_dim, perplexity=perplexity, iters=iters, seed=seed).embed(points)
