"""
jdzsl Application Layer
Training, prediction, label assignment and evaluation use cases
"""
from .dictionary_training import DictionaryTrainer
from .attribute_prediction import AttributePredictor
from .evaluation_service import EvaluationService

__all__ = [
    'DictionaryTrainer',
    'AttributePredictor',
    'EvaluationService',
]
