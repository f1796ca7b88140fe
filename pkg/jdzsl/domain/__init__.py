"""
jdzsl Domain Layer
Sparse coding, coupled dictionaries, graphs and metrics
"""
from .errors import (
    JdzslError,
    UsageError,
    DataValidationError,
    NumericalError,
)
from .hyper_params import HyperParams
from .joint_dictionary import JointDictionary, SeenDataset, UnseenPrototypes
from .metrics import EvalReport, hit_at_k

__all__ = [
    # errors.py
    'JdzslError',
    'UsageError',
    'DataValidationError',
    'NumericalError',
    # hyper_params.py
    'HyperParams',
    # joint_dictionary.py
    'JointDictionary',
    'SeenDataset',
    'UnseenPrototypes',
    # metrics.py
    'EvalReport',
    'hit_at_k',
]
