from .base import ConstantScorer, Scorer, plausibility
from .external import (
    BatchTimeout,
    ChildExited,
    ExternalScorer,
    ExternalScorerError,
    ProtocolViolation,
)
from .mlp import (
    MlpScorer,
    TrainConfig,
    TrainingDivergedError,
    TrainResult,
    gradient_check,
    load_model,
    save_model,
    train,
)
from .ngram import NGramScorer

__all__ = [
    "BatchTimeout",
    "ChildExited",
    "ConstantScorer",
    "ExternalScorer",
    "ExternalScorerError",
    "MlpScorer",
    "NGramScorer",
    "ProtocolViolation",
    "Scorer",
    "TrainConfig",
    "TrainResult",
    "TrainingDivergedError",
    "gradient_check",
    "load_model",
    "plausibility",
    "save_model",
    "train",
]
