"""
Matrix files - dense float64 matrices on disk

Two formats, chosen by extension:
  .csv  comma-separated rows, 17 significant digits
  other raw binary: 8-byte magic b"JDZSLMAT", uint8 version (1), uint8 dtype
        (1 = little-endian float64), uint16 reserved (0), uint64 rows,
        uint64 cols, then rows * cols values in row-major order
"""
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from domain.dense_matrix import as_dense
from domain.errors import DataValidationError

logger = logging.getLogger(__name__)

MAGIC = b"JDZSLMAT"
VERSION = 1
DTYPE_FLOAT64 = 1
HEADER = struct.Struct("<8sBBHQQ")
VALUE_DTYPE = np.dtype("<f8")

PathLike = Union[str, Path]


def matrix_format(path: PathLike) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "raw"


def write_matrix(path: PathLike, matrix: np.ndarray) -> None:
    """Write a 2-D matrix in the format implied by the file extension"""
    path = Path(path)
    matrix = as_dense(matrix, str(path))
    path.parent.mkdir(parents=True, exist_ok=True)
    if matrix_format(path) == "csv":
        np.savetxt(path, matrix, delimiter=",", fmt="%.17g")
    else:
        path.write_bytes(encode_raw(matrix))
    logger.debug("Wrote %dx%d matrix to %s", matrix.shape[0], matrix.shape[1], path)


def encode_raw(matrix: np.ndarray) -> bytes:
    rows, cols = matrix.shape
    return HEADER.pack(MAGIC, VERSION, DTYPE_FLOAT64, 0, rows, cols) + matrix.astype(VALUE_DTYPE).tobytes(order="C")


def read_matrix(path: PathLike) -> np.ndarray:
    """
    Read a matrix written by write_matrix

    Raises:
        DataValidationError: When the file is missing, truncated or malformed
    """
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"Matrix file not found: {path}")
    if matrix_format(path) == "csv":
        try:
            matrix = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
        except ValueError as e:
            raise DataValidationError(f"Malformed csv matrix {path}: {e}") from e
        return as_dense(matrix, str(path))
    return decode_raw(path.read_bytes(), str(path))


def decode_raw(payload: bytes, name: str = "matrix") -> np.ndarray:
    if len(payload) < HEADER.size:
        raise DataValidationError(f"{name}: truncated header ({len(payload)} bytes)")
    magic, version, dtype, reserved, rows, cols = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise DataValidationError(f"{name}: bad magic {magic!r}")
    if version != VERSION:
        raise DataValidationError(f"{name}: unsupported version {version}")
    if dtype != DTYPE_FLOAT64:
        raise DataValidationError(f"{name}: unsupported dtype code {dtype}")
    if reserved != 0:
        raise DataValidationError(f"{name}: reserved header field is {reserved}, expected 0")
    expected = HEADER.size + rows * cols * VALUE_DTYPE.itemsize
    if len(payload) != expected:
        raise DataValidationError(f"{name}: {len(payload)} bytes for a {rows}x{cols} matrix, expected {expected}")
    values = np.frombuffer(payload, dtype=VALUE_DTYPE, offset=HEADER.size, count=rows * cols)
    return as_dense(values.reshape(rows, cols).copy(), name)


def write_labels(path: PathLike, labels: np.ndarray) -> None:
    """Labels are stored as a 1 x n matrix"""
    write_matrix(path, np.asarray(labels, dtype=np.float64).reshape(1, -1))


def read_labels(path: PathLike) -> np.ndarray:
    matrix = read_matrix(path)
    if 1 not in matrix.shape:
        raise DataValidationError(f"{path}: labels must be a single row or column, got {matrix.shape}")
    labels = matrix.ravel()
    if not np.all(np.equal(np.mod(labels, 1), 0)):
        raise DataValidationError(f"{path}: labels must be integer class ids")
    return labels.astype(np.int64)


def read_split(path: PathLike) -> np.ndarray:
    """Unseen-class split file: one class id per line, # comments allowed"""
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"Split file not found: {path}")
    ids = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            ids.append(int(text))
        except ValueError as e:
            raise DataValidationError(f"{path}:{number}: not a class id: {text!r}") from e
    return np.array(ids, dtype=np.int64)


def write_split(path: PathLike, class_ids: np.ndarray) -> None:
    Path(path).write_text("".join(f"{int(c)}\n" for c in class_ids), encoding="utf-8")
