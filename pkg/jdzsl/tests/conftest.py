"""
Shared synthetic fixtures
"""
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from domain.hyper_params import HyperParams
from infrastructure.synthetic.generator import SynthSpec, gen_synthetic


@pytest.fixture(scope="session")
def exact_data():
    """Noise-free test features drawn from a known dictionary pair (r_true > p)"""
    spec = SynthSpec(p=40, q=16, r_true=48, k_true=3, n=40, m=5, n_seen_classes=10,
                     n_test_per_class=4, code_jitter=0.0, seed=0)
    return gen_synthetic(spec)


@pytest.fixture
def exact_params():
    return HyperParams(r=48, lambda_=0.01, gamma=0.1, fista_max_iter=3000, fista_tol=1e-10,
                       aaw_max_iter=50, knn_k=3, embedding="identity")


@pytest.fixture(scope="session")
def shift_data():
    """Small domain-shift fixture: unseen test features are offset per class"""
    spec = SynthSpec(p=20, q=10, r_true=30, k_true=3, n=60, m=4, n_seen_classes=6,
                     n_test_per_class=5, noise_sigma=0.05, shift_sigma=0.5, code_jitter=0.05, seed=1)
    return gen_synthetic(spec)


@pytest.fixture(scope="session")
def small_data():
    """Seen data for quick training runs"""
    spec = SynthSpec(p=12, q=6, r_true=24, k_true=3, n=60, m=4, n_seen_classes=6,
                     n_test_per_class=3, seed=2)
    return gen_synthetic(spec)
