"""MLP topologies evaluated from flat parameter vectors, plus a single
convolution+ReLU+pooling reference layer.

A network is described by its layer sizes only; all weights and biases
live in one flat vector so a population-based optimizer can treat the
whole model as a point in a box. The flat layout is fixed: for each
consecutive layer pair, the weight matrix in row-major order with one row
per output neuron, followed by that layer's biases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError

__all__ = [
    "MlpTopology",
    "ConvLayerSpec",
    "param_count",
    "flatten",
    "unflatten",
    "mlp_forward",
    "mlp_forward_batch",
    "cnn_layer_forward",
]

HIDDEN_ACTIVATIONS = ("sigmoid", "tanh", "relu")
POOL_KINDS = ("max", "average", "sum")


@dataclass(frozen=True)
class MlpTopology:
    """Layer sizes (input, hidden..., output) and the hidden activation.

    The output layer is always softmax; `layer_sizes` of length 2 means no
    hidden layer at all.
    """

    layer_sizes: tuple[int, ...]
    hidden_activation: str = "sigmoid"

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2:
            raise DataError("topology needs at least input and output layers")
        if any(n < 1 for n in sizes):
            raise DataError(f"all layer sizes must be >= 1, got {sizes}")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise DataError(
                f"unknown hidden activation {self.hidden_activation!r}; "
                f"expected one of {HIDDEN_ACTIVATIONS}"
            )

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]


@dataclass(frozen=True)
class ConvLayerSpec:
    """One convolution layer: 2-D kernel, scalar bias, then n x n
    non-overlapping pooling of the chosen kind."""

    kernel: np.ndarray
    bias: float = 0.0
    pool_window: int = 1
    pool_kind: str = "max"

    def __post_init__(self):
        kernel = np.asarray(self.kernel, dtype=float)
        object.__setattr__(self, "kernel", kernel)
        if kernel.ndim != 2 or kernel.shape[0] < 1 or kernel.shape[1] < 1:
            raise DataError("kernel must be a 2-D matrix with positive dimensions")
        if self.pool_window < 1:
            raise DataError("pool window must be >= 1")
        if self.pool_kind not in POOL_KINDS:
            raise DataError(
                f"unknown pool kind {self.pool_kind!r}; expected one of {POOL_KINDS}"
            )


def param_count(topology: MlpTopology) -> int:
    """Total number of weights and biases for the topology."""
    sizes = topology.layer_sizes
    return sum(n_in * n_out + n_out for n_in, n_out in zip(sizes[:-1], sizes[1:]))


def unflatten(topology: MlpTopology, params: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into (weights, biases) per layer pair.

    Weight matrices have shape (n_out, n_in); row j holds the incoming
    weights of output neuron j.
    """
    params = np.asarray(params, dtype=float).ravel()
    expected = param_count(topology)
    if params.size != expected:
        raise DataError(
            f"parameter vector has length {params.size}, topology needs {expected}"
        )
    layers = []
    offset = 0
    sizes = topology.layer_sizes
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        w = params[offset : offset + n_in * n_out].reshape(n_out, n_in)
        offset += n_in * n_out
        b = params[offset : offset + n_out]
        offset += n_out
        layers.append((w, b))
    return layers


def flatten(layers: list[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Inverse of unflatten: concatenate weights then biases, layer by layer."""
    parts = []
    for w, b in layers:
        parts.append(np.asarray(w, dtype=float).ravel())
        parts.append(np.asarray(b, dtype=float).ravel())
    return np.concatenate(parts)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "sigmoid":
        # split by sign so exp never overflows
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    if kind == "tanh":
        return np.tanh(z)
    return np.maximum(z, 0.0)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def mlp_forward_batch(topology: MlpTopology, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Forward pass for a batch: x has one sample per row, the result one
    softmax distribution per row."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != topology.input_size:
        raise DataError(
            f"input has {x.shape[-1] if x.ndim else 0} columns, "
            f"topology expects {topology.input_size}"
        )
    layers = unflatten(topology, params)
    h = x
    for w, b in layers[:-1]:
        h = _activate(h @ w.T + b, topology.hidden_activation)
        if not np.isfinite(h).all():
            raise NumericError("non-finite activation in hidden layer")
    w, b = layers[-1]
    logits = h @ w.T + b
    if not np.isfinite(logits).all():
        raise NumericError("non-finite output logits")
    return _softmax(logits)


def mlp_forward(topology: MlpTopology, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Forward pass for a single input vector; returns class probabilities."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != topology.input_size:
        raise DataError(
            f"input has length {x.size}, topology expects {topology.input_size}"
        )
    return mlp_forward_batch(topology, params, x[np.newaxis, :])[0]


def cnn_layer_forward(image: np.ndarray, spec: ConvLayerSpec) -> np.ndarray:
    """Valid cross-correlation (stride 1) plus bias, ReLU, then
    non-overlapping pooling.

    Trailing rows/columns that do not fill a whole pool window are
    truncated, so the output is floor((H-kh+1)/n) x floor((W-kw+1)/n).
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise DataError("input must be a 2-D matrix")
    kh, kw = spec.kernel.shape
    h, w = image.shape
    if kh > h or kw > w:
        raise DataError(f"kernel {kh}x{kw} larger than input {h}x{w}")

    windows = np.lib.stride_tricks.sliding_window_view(image, (kh, kw))
    conv = np.tensordot(windows, spec.kernel, axes=((2, 3), (0, 1))) + spec.bias
    activated = np.maximum(conv, 0.0)

    n = spec.pool_window
    ch, cw = activated.shape
    ph, pw = ch // n, cw // n
    if ph < 1 or pw < 1:
        raise DataError(
            f"pool window {n}x{n} larger than convolved output {ch}x{cw}"
        )
    blocks = activated[: ph * n, : pw * n].reshape(ph, n, pw, n)
    if spec.pool_kind == "max":
        return blocks.max(axis=(1, 3))
    if spec.pool_kind == "average":
        return blocks.mean(axis=(1, 3))
    return blocks.sum(axis=(1, 3))
