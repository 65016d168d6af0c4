"""Gradient-free MLP training: the flat weight vector is the optimizer's
search point and mean squared error against one-hot targets is the
objective.

Training spends the full iteration budget (no early stopping) inside a
symmetric box of half-width ``weight_bound``. Optionally the feature
columns are z-scored first; the fitted statistics travel with the model so
prediction sees the same transform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import woa
from .errors import DataError
from .feature_io import FeatureTable, Normalizer, apply_normalizer, fit_normalizer
from .nn_core import MlpTopology, mlp_forward_batch, param_count

__all__ = [
    "TrainConfig",
    "TrainedModel",
    "fitness",
    "train",
    "predict",
    "predict_many",
    "save_model",
    "load_model",
]


@dataclass(frozen=True, eq=False)
class TrainConfig:
    """Topology plus the optimizer run parameters.

    The optimizer dimension must equal the topology's parameter count and
    its box must be the symmetric ±weight_bound interval; `create` derives
    both so they cannot drift apart.
    """

    topology: MlpTopology
    woa: woa.WoaConfig
    weight_bound: float = 10.0
    normalize: bool = True

    def __post_init__(self):
        if not self.weight_bound > 0 or not np.isfinite(self.weight_bound):
            raise DataError("weight bound must be a finite positive number")
        expected = param_count(self.topology)
        if self.woa.dimension != expected:
            raise DataError(
                f"optimizer dimension {self.woa.dimension} differs from the "
                f"topology's parameter count {expected}"
            )
        if (self.woa.lower_bound != -self.weight_bound).any() or (
            self.woa.upper_bound != self.weight_bound
        ).any():
            raise DataError("optimizer bounds must equal ±weight_bound")

    @classmethod
    def create(
        cls,
        topology: MlpTopology,
        population_size: int,
        max_iterations: int,
        weight_bound: float = 10.0,
        spiral_shape: float = 1.0,
        seed: int = 0,
        normalize: bool = True,
    ) -> "TrainConfig":
        """Build a consistent config with the optimizer box derived from
        the topology and weight bound."""
        config = woa.WoaConfig(
            population_size=population_size,
            max_iterations=max_iterations,
            dimension=param_count(topology),
            lower_bound=-weight_bound,
            upper_bound=weight_bound,
            spiral_shape=spiral_shape,
            seed=seed,
        )
        return cls(
            topology=topology, woa=config, weight_bound=weight_bound, normalize=normalize
        )


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Topology, the best parameter vector found, the optional feature
    normalizer, the class order, and the convergence history."""

    topology: MlpTopology
    params: np.ndarray
    normalizer: Normalizer | None
    class_names: list[str]
    training_history: list[float]

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float).ravel()
        object.__setattr__(self, "params", params)
        if params.size != param_count(self.topology):
            raise DataError(
                f"parameter vector length {params.size} does not match topology"
            )
        if len(self.class_names) != self.topology.output_size:
            raise DataError(
                f"{len(self.class_names)} class names for an output layer of "
                f"size {self.topology.output_size}"
            )


def _one_hot(labels: list[str], class_names: list[str]) -> np.ndarray:
    index = {name: k for k, name in enumerate(class_names)}
    targets = np.zeros((len(labels), len(class_names)))
    for row, label in enumerate(labels):
        targets[row, index[label]] = 1.0
    return targets


def _mse(params, topology, features, targets) -> float:
    probs = mlp_forward_batch(topology, params, features)
    return float(np.mean((probs - targets) ** 2))


def fitness(params: np.ndarray, topology: MlpTopology, data: FeatureTable) -> float:
    """Mean squared error of the softmax outputs against one-hot labels,
    averaged over samples and output units."""
    if topology.output_size != len(data.class_names):
        raise DataError(
            f"topology outputs {topology.output_size} classes, table has "
            f"{len(data.class_names)}"
        )
    targets = _one_hot(data.labels, data.class_names)
    return _mse(params, topology, data.features, targets)


def train(config: TrainConfig, data: FeatureTable, workers: int = 1) -> TrainedModel:
    """Fit the MLP by minimizing the training MSE with the whale optimizer.

    Deterministic for a fixed config seed; `workers` only parallelizes the
    per-agent fitness evaluations and never changes the result.
    """
    topology = config.topology
    if topology.input_size != data.n_features:
        raise DataError(
            f"topology expects {topology.input_size} inputs, table has "
            f"{data.n_features} columns"
        )
    if topology.output_size != len(data.class_names):
        raise DataError(
            f"topology outputs {topology.output_size} classes, table has "
            f"{len(data.class_names)}"
        )
    counts = data.class_counts()
    missing = [name for name, count in counts.items() if count == 0]
    if missing:
        raise DataError(f"classes without training samples: {missing}")

    normalizer = None
    if config.normalize:
        normalizer = fit_normalizer(data)
        data = apply_normalizer(data, normalizer)

    features = data.features
    targets = _one_hot(data.labels, data.class_names)
    objective = lambda params: _mse(params, topology, features, targets)

    state = woa.optimize(objective, config.woa, workers=workers)
    return TrainedModel(
        topology=topology,
        params=state.best_position,
        normalizer=normalizer,
        class_names=list(data.class_names),
        training_history=list(state.history),
    )


def predict(model: TrainedModel, x: np.ndarray) -> tuple[str, np.ndarray]:
    """Classify one raw feature vector; returns (label, probabilities).

    Argmax ties break toward the lowest class index.
    """
    labels, probs = predict_many(model, np.asarray(x, dtype=float).reshape(1, -1))
    return labels[0], probs[0]


def predict_many(model: TrainedModel, features: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Classify a batch of raw feature rows."""
    features = np.asarray(features, dtype=float)
    if model.normalizer is not None:
        features = (features - model.normalizer.means) / model.normalizer.stddevs
    probs = mlp_forward_batch(model.topology, model.params, features)
    winners = np.argmax(probs, axis=1)
    labels = [model.class_names[k] for k in winners]
    return labels, probs


def save_model(model: TrainedModel, path) -> None:
    """Serialize to JSON with full float precision."""
    payload = {
        "topology": {
            "layers": list(model.topology.layer_sizes),
            "hidden_activation": model.topology.hidden_activation,
        },
        "params": model.params.tolist(),
        "normalizer": model.normalizer.to_dict() if model.normalizer else None,
        "class_names": list(model.class_names),
        "history": [float(v) for v in model.training_history],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path) -> TrainedModel:
    """Read a model saved by save_model; malformed content is rejected
    without producing a partial model."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed model file {path}: {exc}") from exc
    try:
        topology = MlpTopology(
            layer_sizes=tuple(payload["topology"]["layers"]),
            hidden_activation=payload["topology"]["hidden_activation"],
        )
        normalizer_data = payload["normalizer"]
        normalizer = (
            Normalizer.from_dict(normalizer_data) if normalizer_data is not None else None
        )
        return TrainedModel(
            topology=topology,
            params=np.asarray(payload["params"], dtype=float),
            normalizer=normalizer,
            class_names=list(payload["class_names"]),
            training_history=[float(v) for v in payload["history"]],
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed model file {path}: {exc}") from exc
