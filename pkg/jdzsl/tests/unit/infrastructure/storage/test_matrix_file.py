"""
Unit tests for matrix and label files
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from domain.errors import DataValidationError
from infrastructure.storage.matrix_file import (
    HEADER,
    decode_raw,
    encode_raw,
    read_labels,
    read_matrix,
    read_split,
    write_labels,
    write_matrix,
    write_split,
)


class TestMatrixFile:
    """Test class for raw and csv matrices"""

    @given(matrix=arrays(np.float64, st.tuples(st.integers(0, 5), st.integers(0, 5)),
                         elements=st.floats(allow_nan=False, allow_infinity=False)))
    @settings(max_examples=50, deadline=None)
    def test_raw_bytes_are_exact(self, matrix):
        """Raw encoding keeps every bit, including empty shapes"""
        decoded = decode_raw(encode_raw(matrix))
        assert decoded.shape == matrix.shape
        np.testing.assert_array_equal(decoded, matrix)

    def test_raw_header_layout(self):
        payload = encode_raw(np.arange(6, dtype=float).reshape(2, 3))
        assert payload[:8] == b"JDZSLMAT"
        assert len(payload) == HEADER.size + 6 * 8
        assert HEADER.unpack_from(payload)[4:] == (2, 3)

    def test_csv_round_trip(self, tmp_path):
        """17 significant digits reproduce float64 values exactly"""
        matrix = np.random.default_rng(0).standard_normal((3, 4))
        path = tmp_path / "m.csv"
        write_matrix(path, matrix)
        np.testing.assert_array_equal(read_matrix(path), matrix)

    def test_single_column_csv(self, tmp_path):
        path = tmp_path / "column.csv"
        write_matrix(path, np.array([[1.0], [2.0], [3.0]]))
        assert read_matrix(path).shape == (3, 1)

    @pytest.mark.parametrize("mutate, message", [
        (lambda b: b"NOTMAGIC" + b[8:], "bad magic"),
        (lambda b: b[:8] + bytes([2]) + b[9:], "unsupported version"),
        (lambda b: b[:9] + bytes([7]) + b[10:], "dtype"),
        (lambda b: b[:10] + bytes([1, 0]) + b[12:], "reserved"),
        (lambda b: b[:-8], "expected"),
        (lambda b: b[:10], "truncated"),
    ])
    def test_malformed_raw(self, mutate, message):
        payload = encode_raw(np.ones((2, 2)))
        with pytest.raises(DataValidationError, match=message):
            decode_raw(mutate(payload))

    def test_non_finite_rejected(self):
        with pytest.raises(DataValidationError):
            decode_raw(encode_raw(np.array([[np.nan]])))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataValidationError, match="not found"):
            read_matrix(tmp_path / "absent.bin")


class TestLabelFiles:
    """Test class for labels and split files"""

    @pytest.mark.parametrize("name", ["labels.bin", "labels.csv"])
    def test_labels_round_trip(self, tmp_path, name):
        labels = np.array([3, 1, 4, 1, 5])
        write_labels(tmp_path / name, labels)
        np.testing.assert_array_equal(read_labels(tmp_path / name), labels)

    def test_fractional_labels_rejected(self, tmp_path):
        path = tmp_path / "labels.bin"
        write_matrix(path, np.array([[0.5, 1.0]]))
        with pytest.raises(DataValidationError, match="integer"):
            read_labels(path)

    def test_split_file(self, tmp_path):
        path = tmp_path / "split.txt"
        write_split(path, np.array([20, 21]))
        path.write_text(path.read_text() + "# trailing comment\n\n22\n")
        np.testing.assert_array_equal(read_split(path), [20, 21, 22])
