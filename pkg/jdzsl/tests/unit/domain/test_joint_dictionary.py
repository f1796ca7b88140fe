"""
Unit tests for the joint dictionary entities and objective
"""
import numpy as np
import pytest

from domain.dense_matrix import column_norms
from domain.errors import (
    DataValidationError,
    DeadCodesError,
    DimensionMismatchError,
    UnderCompleteDictionaryError,
)
from domain.hyper_params import HyperParams
from domain.joint_dictionary import (
    JointDictionary,
    SeenDataset,
    UnseenPrototypes,
    fit_dictionary,
    init_dictionaries,
    joint_codes,
    joint_objective,
    project_columns,
)


@pytest.fixture
def seen():
    """Six samples of three classes, p=4, q=3"""
    rng = np.random.default_rng(0)
    labels = np.array([0, 1, 2, 0, 1, 2])
    class_attributes = rng.standard_normal((3, 3))
    return SeenDataset(rng.standard_normal((4, 6)), class_attributes[:, labels], labels)


@pytest.fixture
def protos():
    rng = np.random.default_rng(1)
    return UnseenPrototypes(rng.standard_normal((3, 2)), np.array([10, 11]))


class TestSeenDataset:
    """Test class for SeenDataset"""

    def test_shapes(self, seen):
        assert (seen.p, seen.q, seen.n_samples) == (4, 3, 6)
        np.testing.assert_array_equal(seen.classes, [0, 1, 2])

    def test_attributes_must_be_class_specific(self):
        """Two attribute vectors for one class are rejected"""
        attributes = np.array([[1.0, 2.0]])
        with pytest.raises(DataValidationError, match="more than one attribute vector"):
            SeenDataset(np.ones((2, 2)), attributes, np.array([0, 0]))

    def test_column_counts_must_agree(self):
        with pytest.raises(DimensionMismatchError):
            SeenDataset(np.ones((2, 3)), np.ones((1, 2)), np.array([0, 0, 0]))

    def test_non_finite_features_rejected(self):
        features = np.ones((2, 2))
        features[0, 1] = np.nan
        with pytest.raises(DataValidationError):
            SeenDataset(features, np.ones((1, 2)), np.array([0, 0]))

    def test_class_prototypes_and_subset(self, seen):
        """One prototype column per class; subsets keep the pairing"""
        prototypes = seen.class_prototypes()
        assert prototypes.n_prototypes == 3
        np.testing.assert_array_equal(prototypes.attributes[:, 1], seen.attributes[:, 1])

        part = seen.subset(seen.labels != 2)
        assert part.n_samples == 4
        np.testing.assert_array_equal(part.classes, [0, 1])

    def test_stored_arrays_are_read_only(self, seen):
        with pytest.raises(ValueError):
            seen.features[0, 0] = 1.0


class TestUnseenPrototypes:
    """Test class for UnseenPrototypes"""

    def test_labels_must_be_distinct(self):
        with pytest.raises(DataValidationError):
            UnseenPrototypes(np.eye(2), np.array([3, 3]))

    def test_columns_must_be_distinct(self):
        with pytest.raises(DataValidationError, match="pairwise distinct"):
            UnseenPrototypes(np.ones((2, 2)), np.array([3, 4]))

    def test_disjoint_from_seen(self, seen):
        """Overlapping label sets are a data error"""
        with pytest.raises(DataValidationError, match="overlap"):
            UnseenPrototypes(np.eye(3)[:, :2], np.array([2, 7])).require_disjoint(seen)

    def test_indices_of(self, protos):
        np.testing.assert_array_equal(protos.indices_of(np.array([11, 10, 11])), [1, 0, 1])
        with pytest.raises(DataValidationError):
            protos.indices_of(np.array([5]))


class TestJointDictionary:
    """Test class for JointDictionary"""

    def test_must_be_overcomplete(self):
        """r must exceed max(p, q)"""
        with pytest.raises(UnderCompleteDictionaryError):
            JointDictionary(np.eye(4) * 0.5, np.ones((2, 4)) * 0.1)

    def test_atom_counts_must_agree(self):
        with pytest.raises(DimensionMismatchError):
            JointDictionary(np.zeros((2, 5)), np.zeros((2, 6)))

    def test_column_norms_bounded(self):
        dx = np.zeros((2, 5))
        dx[0, 0] = 1.5
        with pytest.raises(DataValidationError, match="norm"):
            JointDictionary(dx, np.zeros((2, 5)))

    def test_init_is_seeded_and_unit_norm(self):
        """Same seed, same dictionaries; every column norm is at most one"""
        params = HyperParams(r=12, seed=4)
        first = init_dictionaries(5, 3, params)
        second = init_dictionaries(5, 3, params)

        np.testing.assert_array_equal(first.dx, second.dx)
        assert np.all(column_norms(first.dx) <= 1.0 + 1e-9)
        np.testing.assert_allclose(column_norms(first.dz), 1.0, atol=1e-9)

    def test_init_rejects_under_complete(self):
        with pytest.raises(UnderCompleteDictionaryError, match="under-complete dictionary"):
            init_dictionaries(8, 3, HyperParams(r=8))

    def test_describe(self):
        dictionary = init_dictionaries(3, 2, HyperParams(r=5))
        codes = np.zeros((5, 4))
        codes[1, 0] = 1.0
        summary = dictionary.describe(codes)
        assert summary["r"] == 5
        assert summary["atoms_used"] == 1


class TestDictionaryOperations:
    """Test class for projection, regression and coding"""

    def test_project_columns(self):
        """Long columns are scaled to unit norm, short ones untouched"""
        matrix = np.array([[3.0, 0.3, 0.0], [4.0, 0.4, 0.0]])
        projected = project_columns(matrix)
        np.testing.assert_allclose(projected[:, 0], [0.6, 0.8])
        np.testing.assert_array_equal(projected[:, 1:], matrix[:, 1:])

    def test_fit_dictionary_recovers_linear_map(self):
        """Noise-free targets T = D A are reproduced"""
        rng = np.random.default_rng(5)
        truth = project_columns(rng.standard_normal((3, 4)) * 0.3)
        codes = rng.standard_normal((4, 50))
        fitted = fit_dictionary(truth @ codes, codes)
        np.testing.assert_allclose(fitted, truth, atol=1e-6)

    def test_fit_dictionary_solves_normal_equations(self):
        """Without projection the fit satisfies D (A A^T) = T A^T"""
        rng = np.random.default_rng(6)
        for _ in range(5):
            codes = rng.standard_normal((6, 30))
            targets = rng.standard_normal((4, 30))
            expected = np.linalg.solve(codes @ codes.T, codes @ targets.T).T
            np.testing.assert_allclose(fit_dictionary(targets, codes, project=False), expected,
                                       rtol=1e-6, atol=1e-6)

    def test_fit_dictionary_dead_codes(self):
        with pytest.raises(DeadCodesError, match="dead codes"):
            fit_dictionary(np.ones((2, 3)), np.zeros((4, 3)))

    def test_objective_at_zero_codes(self, seen, protos):
        """Zero codes leave only the squared data norms"""
        params = HyperParams(r=6, lambda_=0.3)
        dictionary = init_dictionaries(seen.p, seen.q, params)
        value = joint_objective(dictionary, seen, protos, np.zeros((6, 6)), np.zeros((6, 2)), params)
        expected = (np.sum(seen.features ** 2) / (6 * 4) + np.sum(seen.attributes ** 2) / (6 * 3)
                    + np.sum(protos.attributes ** 2) / (2 * 3))
        assert value == pytest.approx(expected)

    def test_objective_matches_sample_loop(self, seen, protos):
        """The vectorised objective equals a per-sample, per-entry sum"""
        rng = np.random.default_rng(7)
        params = HyperParams(r=6, lambda_=0.4)
        dictionary = JointDictionary(project_columns(rng.standard_normal((4, 6))),
                                     project_columns(rng.standard_normal((3, 6))))
        codes_a = rng.standard_normal((6, 6))
        codes_b = rng.standard_normal((6, 2))
        n, m, p, q, r = 6, 2, 4, 3, 6
        l1 = params.lambda_ / r

        expected = 0.0
        for i in range(n):
            visual = sum((seen.features[row, i] - sum(dictionary.dx[row, j] * codes_a[j, i] for j in range(r))) ** 2
                         for row in range(p))
            semantic = sum((seen.attributes[row, i] - sum(dictionary.dz[row, j] * codes_a[j, i] for j in range(r))) ** 2
                           for row in range(q))
            expected += (visual / p + semantic / q + l1 * sum(abs(codes_a[j, i]) for j in range(r))) / n
        for k in range(m):
            unseen = sum((protos.attributes[row, k] - sum(dictionary.dz[row, j] * codes_b[j, k] for j in range(r))) ** 2
                         for row in range(q))
            expected += (unseen / q + l1 * sum(abs(codes_b[j, k]) for j in range(r))) / m

        value = joint_objective(dictionary, seen, protos, codes_a, codes_b, params)

        assert value == pytest.approx(expected, rel=1e-10)

    def test_objective_without_prototypes(self, seen):
        """M = 0 drops the prototype term"""
        params = HyperParams(r=6)
        dictionary = init_dictionaries(seen.p, seen.q, params)
        empty = UnseenPrototypes(np.zeros((3, 0)), np.zeros(0, dtype=int))
        value = joint_objective(dictionary, seen, empty, np.zeros((6, 6)), np.zeros((6, 0)), params)
        assert value == pytest.approx(np.sum(seen.features ** 2) / 24 + np.sum(seen.attributes ** 2) / 18)

    def test_objective_shape_checks(self, seen, protos):
        params = HyperParams(r=6)
        dictionary = init_dictionaries(seen.p, seen.q, params)
        with pytest.raises(DimensionMismatchError):
            joint_objective(dictionary, seen, protos, np.zeros((6, 5)), np.zeros((6, 2)), params)

    def test_joint_codes_lower_the_seen_objective(self, seen, protos):
        """Coding both views beats the zero code on the joint objective"""
        params = HyperParams(r=6, lambda_=0.01)
        dictionary = init_dictionaries(seen.p, seen.q, params)
        codes = joint_codes(dictionary, seen.features, seen.attributes, params)
        zero_b = np.zeros((6, 2))
        coded = joint_objective(dictionary, seen, protos, codes, zero_b, params)
        uncoded = joint_objective(dictionary, seen, protos, np.zeros((6, 6)), zero_b, params)
        assert codes.shape == (6, 6)
        assert coded < uncoded
