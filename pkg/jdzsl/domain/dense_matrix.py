#!/usr/bin/env python3
"""
Dense matrix and vector validation

Every matrix in the package (features, attributes, dictionaries, codes) is a
2-D float64 numpy array, columns being samples or atoms. These helpers are the
single place where inputs are coerced and checked.
"""
from typing import Any

import numpy as np

from .errors import DataValidationError, DimensionMismatchError


def as_dense(value: Any, name: str = "matrix") -> np.ndarray:
    """
    Coerce to a finite 2-D float64 array

    Args:
        value: Array-like input
        name: Name used in error messages

    Returns:
        C-contiguous float64 array with ndim == 2

    Raises:
        DataValidationError: When the input is not 2-D or holds NaN/Inf
    """
    matrix = np.ascontiguousarray(value, dtype=np.float64)
    if matrix.ndim != 2:
        raise DataValidationError(f"{name} must be 2-D, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DataValidationError(f"{name} contains non-finite entries")
    return matrix


def as_vector(value: Any, name: str = "vector") -> np.ndarray:
    vector = np.ascontiguousarray(value, dtype=np.float64)
    if vector.ndim != 1:
        raise DataValidationError(f"{name} must be 1-D, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise DataValidationError(f"{name} contains non-finite entries")
    return vector


def require_rows(matrix: np.ndarray, rows: int, name: str) -> None:
    if matrix.shape[0] != rows:
        raise DimensionMismatchError(f"{name} has {matrix.shape[0]} rows, expected {rows}")


def require_cols(matrix: np.ndarray, cols: int, name: str) -> None:
    if matrix.shape[1] != cols:
        raise DimensionMismatchError(f"{name} has {matrix.shape[1]} columns, expected {cols}")


def frozen(matrix: np.ndarray) -> np.ndarray:
    """Return a read-only copy (safe to share between concurrent readers)"""
    copy = np.array(matrix, dtype=np.float64, copy=True)
    copy.flags.writeable = False
    return copy


def column_norms(matrix: np.ndarray) -> np.ndarray:
    return np.linalg.norm(matrix, axis=0)


def l2_normalize_columns(matrix: np.ndarray) -> np.ndarray:
    """Scale every nonzero column to unit norm; zero columns stay zero"""
    norms = column_norms(matrix)
    safe = np.where(norms > 0.0, norms, 1.0)
    return matrix / safe
