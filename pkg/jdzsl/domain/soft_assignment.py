#!/usr/bin/env python3
"""
Soft assignment of predicted attributes to unseen prototypes

Student-t kernel with rho degrees of freedom:

    l_m = (1 + ||zhat - z'_m||^2 / rho) ^ (-(rho + 1) / 2),    p_m = l_m / sum_k l_k
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import entr, softmax

from .dense_matrix import as_vector
from .errors import DataValidationError, DimensionMismatchError


@dataclass(frozen=True)
class SoftAssignment:
    probs: np.ndarray
    entropy: float

    @property
    def best(self) -> int:
        return int(np.argmax(self.probs))


def _check_inputs(zhat: np.ndarray, prototypes: np.ndarray, rho: float) -> None:
    if prototypes.shape[1] < 1:
        raise DataValidationError("soft assignment needs at least one prototype")
    if zhat.shape[0] != prototypes.shape[0]:
        raise DimensionMismatchError(
            f"prediction has length {zhat.shape[0]} but prototypes have {prototypes.shape[0]} rows"
        )
    if not rho > 0:
        raise DataValidationError(f"rho must be > 0, got {rho}")


def log_kernels(zhat: np.ndarray, prototypes: np.ndarray, rho: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns:
        (log l_m, differences zhat - z'_m as a q x M matrix)
    """
    differences = zhat[:, None] - prototypes
    squared = np.einsum("ij,ij->j", differences, differences)
    return -0.5 * (rho + 1.0) * np.log1p(squared / rho), differences


def entropy_of(probs: np.ndarray) -> float:
    """Shannon entropy in nats with 0 log 0 = 0"""
    return float(entr(probs).sum())


def soft_assign(zhat: np.ndarray, protos, rho: float) -> SoftAssignment:
    """
    Args:
        zhat: Predicted attribute vector (length q)
        protos: UnseenPrototypes
        rho: Kernel parameter

    Returns:
        SoftAssignment over the M prototypes
    """
    zhat = as_vector(zhat, "zhat")
    prototypes = protos.attributes
    _check_inputs(zhat, prototypes, rho)
    logs, _ = log_kernels(zhat, prototypes, rho)
    probs = softmax(logs)
    return SoftAssignment(probs=probs, entropy=entropy_of(probs))


def entropy_gradient(codes: np.ndarray, dz: np.ndarray, prototypes: np.ndarray, rho: float) -> np.ndarray:
    """
    Gradient of H(p(a)) = -sum_m p_m log p_m with respect to the code a

    With u_m = grad log l_m = -(rho + 1) / (rho + s_m) * Dz^T (Dz a - z'_m) and
    ubar = sum_k p_k u_k, grad p_m = p_m (u_m - ubar), and since
    sum_m p_m (u_m - ubar) = 0 the gradient reduces to

        grad H = -sum_m p_m log p_m (u_m - ubar)
    """
    zhat = dz @ codes
    logs, differences = log_kernels(zhat, prototypes, rho)
    probs = softmax(logs)
    squared = np.einsum("ij,ij->j", differences, differences)
    u = (dz.T @ differences) * (-(rho + 1.0) / (rho + squared))
    u_bar = u @ probs
    weights = -entr(probs)
    return -(u @ weights - u_bar * weights.sum())
