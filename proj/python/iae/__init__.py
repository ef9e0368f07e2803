"""Independent asymmetric embedding for information cascade prediction."""

from ._iae import (
    CascadeDataset,
    ConfigError,
    EmbeddingModel,
    FormatError,
    IoError,
    ParseError,
    TrainConfig,
    UnknownSourceError,
    ValidationError,
    combination_table,
    critical_margin,
    evaluate,
    load_cascades,
    load_model,
    parse_cascades,
    split,
    synthesize,
    train,
)

__all__ = [
    "CascadeDataset",
    "ConfigError",
    "EmbeddingModel",
    "FormatError",
    "IoError",
    "ParseError",
    "TrainConfig",
    "UnknownSourceError",
    "ValidationError",
    "combination_table",
    "critical_margin",
    "evaluate",
    "load_cascades",
    "load_model",
    "parse_cascades",
    "split",
    "synthesize",
    "train",
]
