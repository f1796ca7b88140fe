"""
Synthetic zero-shot data drawn from known coupled dictionaries

Every class owns a k-sparse code c with nonzeros sign * (1 + U(0,1)). Seen
samples of class c are x = Dx (c + jitter) with attributes z = Dz c, so
attributes stay class-specific. Unseen prototypes are Dz c for held-out
classes, and test features are

    x = Dx (c + jitter) + noise_sigma * N(0, I) + shift_sigma * u_c

with u_c a per-class unit direction, the domain shift between seen and unseen
feature distributions.
"""
import logging
from dataclasses import dataclass, fields
from typing import Any, Dict

import numpy as np

from domain.dense_matrix import l2_normalize_columns
from domain.errors import DataValidationError
from domain.joint_dictionary import JointDictionary, SeenDataset, UnseenPrototypes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthSpec:
    p: int = 32
    q: int = 16
    r_true: int = 64
    k_true: int = 4
    n: int = 400
    m: int = 8
    n_seen_classes: int = 20
    n_test_per_class: int = 25
    noise_sigma: float = 0.0
    shift_sigma: float = 0.0
    code_jitter: float = 0.05
    seed: int = 0

    def __post_init__(self):
        for name in ("p", "q", "r_true", "k_true", "n", "m", "n_seen_classes", "n_test_per_class"):
            if getattr(self, name) < 1:
                raise DataValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.k_true > self.r_true:
            raise DataValidationError(f"k_true={self.k_true} exceeds r_true={self.r_true}")
        if self.n < self.n_seen_classes:
            raise DataValidationError(
                f"n={self.n} seen samples cannot cover {self.n_seen_classes} seen classes"
            )
        for name in ("noise_sigma", "shift_sigma", "code_jitter"):
            if getattr(self, name) < 0:
                raise DataValidationError(f"{name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def from_config(cls, config_loader) -> "SynthSpec":
        section = config_loader.get("synthetic", {}) or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(section) - known)
        if unknown:
            raise DataValidationError(f"Unknown synthetic setting(s): {unknown}")
        return cls(**section)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class SyntheticData:
    seen: SeenDataset
    protos: UnseenPrototypes
    test_features: np.ndarray
    test_labels: np.ndarray
    test_codes: np.ndarray
    true_dx: np.ndarray
    true_dz: np.ndarray

    @property
    def true_dictionary(self) -> JointDictionary:
        """Only defined when r_true > max(p, q)"""
        return JointDictionary(self.true_dx, self.true_dz)


def class_codes(rng: np.random.Generator, r: int, k: int, n_classes: int) -> np.ndarray:
    """r x n_classes matrix of k-sparse codes"""
    codes = np.zeros((r, n_classes))
    for column in range(n_classes):
        support = rng.choice(r, size=k, replace=False)
        codes[support, column] = rng.choice([-1.0, 1.0], size=k) * (1.0 + rng.random(k))
    return codes


def jitter_codes(rng: np.random.Generator, codes: np.ndarray, scale: float) -> np.ndarray:
    """Perturb the nonzero entries only, keeping the supports"""
    return codes + scale * rng.standard_normal(codes.shape) * (codes != 0.0)


def gen_synthetic(spec: SynthSpec) -> SyntheticData:
    """Deterministic in spec.seed"""
    rng = np.random.default_rng(spec.seed)
    dx = l2_normalize_columns(rng.standard_normal((spec.p, spec.r_true)))
    dz = l2_normalize_columns(rng.standard_normal((spec.q, spec.r_true)))
    n_classes = spec.n_seen_classes + spec.m
    codes = class_codes(rng, spec.r_true, spec.k_true, n_classes)
    # one attribute column per class, indexed so samples of a class share it exactly
    class_attributes = dz @ codes

    seen_labels = np.arange(spec.n) % spec.n_seen_classes
    seen_codes = jitter_codes(rng, codes[:, seen_labels], spec.code_jitter)
    seen = SeenDataset(features=dx @ seen_codes, attributes=class_attributes[:, seen_labels], labels=seen_labels)

    unseen_labels = np.arange(spec.n_seen_classes, n_classes)
    protos = UnseenPrototypes(attributes=class_attributes[:, unseen_labels], labels=unseen_labels)

    test_labels = np.repeat(unseen_labels, spec.n_test_per_class)
    test_codes = jitter_codes(rng, codes[:, test_labels], spec.code_jitter)
    noise = spec.noise_sigma * rng.standard_normal((spec.p, test_labels.shape[0]))
    directions = l2_normalize_columns(rng.standard_normal((spec.p, spec.m)))
    shift = spec.shift_sigma * directions[:, test_labels - spec.n_seen_classes]
    test_features = dx @ test_codes + noise + shift

    logger.info("Generated %d seen samples (%d classes), %d unseen prototypes, %d test samples",
                spec.n, spec.n_seen_classes, spec.m, test_labels.shape[0])
    return SyntheticData(seen=seen, protos=protos, test_features=test_features, test_labels=test_labels,
                         test_codes=test_codes, true_dx=dx, true_dz=dz)
