"""Gradient-free MLP classification trained by the whale optimization
algorithm, with feature-table fusion, binary classification metrics, and
a small CLI around the whole pipeline."""

from .benchmarks import BENCHMARKS, rastrigin, rosenbrock, sphere
from .errors import DataError, NumericError
from .feature_io import (
    FeatureTable,
    Normalizer,
    apply_normalizer,
    fit_normalizer,
    fuse,
    load_feature_table,
    save_feature_table,
    split,
)
from .metrics import ConfusionMatrix, MetricsReport, confusion, metrics_report
from .nn_core import (
    ConvLayerSpec,
    MlpTopology,
    cnn_layer_forward,
    flatten,
    mlp_forward,
    mlp_forward_batch,
    param_count,
    unflatten,
)
from .trainer import (
    TrainConfig,
    TrainedModel,
    fitness,
    load_model,
    predict,
    predict_many,
    save_model,
    train,
)
from .woa import WoaConfig, WoaState, optimize, save_history

__version__ = "0.1.0"

__all__ = [
    "BENCHMARKS",
    "ConfusionMatrix",
    "ConvLayerSpec",
    "DataError",
    "FeatureTable",
    "MetricsReport",
    "MlpTopology",
    "Normalizer",
    "NumericError",
    "TrainConfig",
    "TrainedModel",
    "WoaConfig",
    "WoaState",
    "apply_normalizer",
    "cnn_layer_forward",
    "confusion",
    "fit_normalizer",
    "fitness",
    "flatten",
    "fuse",
    "load_feature_table",
    "load_model",
    "metrics_report",
    "mlp_forward",
    "mlp_forward_batch",
    "optimize",
    "param_count",
    "predict",
    "predict_many",
    "rastrigin",
    "rosenbrock",
    "save_feature_table",
    "save_history",
    "save_model",
    "sphere",
    "split",
    "train",
    "unflatten",
]
