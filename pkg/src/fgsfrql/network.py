"""
Dense feed-forward networks with exact gradients.

This module is the numerical engine behind every value head in the package:
- ParamVector: flat, immutable parameter vector plus its layer layout
- NetGradient: gradient congruent with a ParamVector
- net_init / net_forward / net_backward: initialization, evaluation and
  reverse-mode gradients of <cotangent, output>
- finite_diff_grad: central-difference oracle used by the gradient checks
- sgd_step: plain gradient descent

Hidden layers use tanh (smooth to every order), the output layer is affine.
Parameters are packed layer by layer as a row-major (fan_out, fan_in) weight
matrix followed by the fan_out biases.
"""

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from fgsfrql.errors import NumericError, ShapeError
from fgsfrql.validators import validate_layout, validate_positive

_COUNT_DTYPE = np.dtype('<u4')
_VALUE_DTYPE = np.dtype('<f8')


def layout_size(layout: Sequence[int]) -> int:
    """Number of scalars a layout needs: sum of (fan_in + 1) * fan_out."""
    return sum((fan_in + 1) * fan_out for fan_in, fan_out in zip(layout[:-1], layout[1:]))


def activation(z):
    """Hidden-layer activation."""
    return np.tanh(z)


def activation_derivative(z):
    t = np.tanh(z)
    return 1.0 - t * t


@dataclass(frozen=True)
class ParamVector:
    """Flat parameter vector of a dense network.

    Attributes:
        values (np.ndarray): Read-only float64 array of length layout_size(layout)
        layout (tuple): Input width, hidden widths, output width

    Example:
        >>> params = net_init([4, 8, 6], seed=7)
        >>> params.values.shape
        (94,)
    """

    values: np.ndarray
    layout: Tuple[int, ...]

    def __post_init__(self):
        layout = tuple(int(w) for w in self.layout)
        validate_layout(layout)
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != layout_size(layout):
            raise ShapeError(
                f"Layout {layout} needs {layout_size(layout)} values, got shape {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "values", values)

    @property
    def input_width(self) -> int:
        return self.layout[0]

    @property
    def output_width(self) -> int:
        return self.layout[-1]

    def layers(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Return (weights, biases) views for every layer."""
        return _split(self.values, self.layout)

    def to_bytes(self) -> bytes:
        """Serialize as little-endian: layer count and widths (uint32), then float64 values."""
        header = np.asarray([len(self.layout), *self.layout], dtype=_COUNT_DTYPE).tobytes()
        return header + self.values.astype(_VALUE_DTYPE).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ParamVector":
        """Inverse of :meth:`to_bytes`.

        Raises:
            ShapeError: If the payload is truncated or inconsistent with its header
        """
        if len(data) < _COUNT_DTYPE.itemsize:
            raise ShapeError("ParamVector payload is truncated")
        count = int(np.frombuffer(data, dtype=_COUNT_DTYPE, count=1)[0])
        header_len = (count + 1) * _COUNT_DTYPE.itemsize
        if len(data) < header_len:
            raise ShapeError("ParamVector header is truncated")
        layout = tuple(int(w) for w in np.frombuffer(data, dtype=_COUNT_DTYPE, count=count, offset=4))
        body = data[header_len:]
        if len(body) != layout_size(layout) * _VALUE_DTYPE.itemsize:
            raise ShapeError(f"ParamVector body has {len(body)} bytes, layout {layout} needs "
                             f"{layout_size(layout) * _VALUE_DTYPE.itemsize}")
        return cls(np.frombuffer(body, dtype=_VALUE_DTYPE).astype(np.float64), layout)


@dataclass(frozen=True)
class NetGradient:
    """Gradient with the same layout as the ParamVector it differentiates."""

    values: np.ndarray
    layout: Tuple[int, ...]

    def __post_init__(self):
        layout = tuple(int(w) for w in self.layout)
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != layout_size(layout):
            raise ShapeError(
                f"Layout {layout} needs {layout_size(layout)} values, got shape {values.shape}"
            )
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, layout) -> "NetGradient":
        return cls(np.zeros(layout_size(layout)), layout)

    def __add__(self, other: "NetGradient") -> "NetGradient":
        _check_congruent(self.layout, other.layout)
        return NetGradient(self.values + other.values, self.layout)

    def __sub__(self, other: "NetGradient") -> "NetGradient":
        _check_congruent(self.layout, other.layout)
        return NetGradient(self.values - other.values, self.layout)

    def scaled(self, factor: float) -> "NetGradient":
        return NetGradient(self.values * factor, self.layout)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _split(values, layout):
    layers = []
    offset = 0
    for fan_in, fan_out in zip(layout[:-1], layout[1:]):
        weights = values[offset:offset + fan_in * fan_out].reshape(fan_out, fan_in)
        offset += fan_in * fan_out
        biases = values[offset:offset + fan_out]
        offset += fan_out
        layers.append((weights, biases))
    return layers


def _check_congruent(a, b):
    if tuple(a) != tuple(b):
        raise ShapeError(f"Layouts differ: {tuple(a)} vs {tuple(b)}")


def _as_batch(params, inputs):
    x = np.asarray(inputs, dtype=np.float64)
    single = x.ndim == 1
    x2d = x[np.newaxis, :] if single else x
    if x2d.ndim != 2 or x2d.shape[1] != params.input_width:
        raise ShapeError(f"Input must have width {params.input_width}, got shape {x.shape}")
    return x2d, single


def net_init(layout: Sequence[int], seed: int) -> ParamVector:
    """Draw initial parameters.

    Weights are zero-mean normal with standard deviation 1/sqrt(fan_in),
    biases are exactly zero. The draw is a pure function of (layout, seed).

    Raises:
        ConfigurationError: If the layout is empty or has non-positive widths
    """
    validate_layout(layout)
    layout = tuple(int(w) for w in layout)
    rng = np.random.default_rng(seed)
    values = np.zeros(layout_size(layout))
    for weights, _ in _split(values, layout):
        fan_out, fan_in = weights.shape
        weights[...] = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_out, fan_in))
    return ParamVector(values, layout)


def _forward_trace(params, x2d):
    """Return per-layer outputs; trace[0] is the input, trace[-1] the net output."""
    trace = [x2d]
    layers = params.layers()
    h = x2d
    for index, (weights, biases) in enumerate(layers):
        z = h @ weights.T + biases
        h = activation(z) if index < len(layers) - 1 else z
        trace.append(h)
    return trace


def net_forward(params: ParamVector, inputs) -> np.ndarray:
    """Evaluate the network on one input vector or on a batch of rows.

    Raises:
        ShapeError: If the input width does not match the layout
    """
    x2d, single = _as_batch(params, inputs)
    out = _forward_trace(params, x2d)[-1]
    return out[0] if single else out


def net_backward(params: ParamVector, inputs, output_cotangent) -> NetGradient:
    """Gradient of <output_cotangent, net_forward(params, inputs)> w.r.t. params.

    For a batch, the cotangent has one row per input row and the per-row
    gradients are summed.

    Raises:
        ShapeError: If input or cotangent widths do not match the layout
    """
    x2d, single = _as_batch(params, inputs)
    cot = np.asarray(output_cotangent, dtype=np.float64)
    cot2d = cot[np.newaxis, :] if single and cot.ndim == 1 else cot
    if cot2d.shape != (x2d.shape[0], params.output_width):
        raise ShapeError(
            f"Cotangent must have shape {(x2d.shape[0], params.output_width)}, got {cot.shape}"
        )

    trace = _forward_trace(params, x2d)
    layers = params.layers()
    grad_values = np.zeros_like(params.values)
    grad_layers = _split(grad_values, params.layout)

    g = cot2d
    for index in range(len(layers) - 1, -1, -1):
        weights, _ = layers[index]
        grad_weights, grad_biases = grad_layers[index]
        grad_weights[...] = g.T @ trace[index]
        grad_biases[...] = g.sum(axis=0)
        if index > 0:
            h = trace[index]  # tanh output of the previous layer
            g = (g @ weights) * (1.0 - h * h)
    return NetGradient(grad_values, params.layout)


def finite_diff_grad(loss: Callable[[ParamVector], float], params: ParamVector,
                     eps: float = 1e-5) -> NetGradient:
    """Central-difference gradient of a scalar loss.

    Each coordinate is (loss(theta + eps e_i) - loss(theta - eps e_i)) / (2 eps).

    Raises:
        ConfigurationError: If eps is not positive
        NumericError: If any loss evaluation is not finite
    """
    validate_positive("eps", eps)
    base = np.array(params.values)
    grad = np.zeros_like(base)
    for i in range(base.shape[0]):
        original = base[i]
        base[i] = original + eps
        f_plus = float(loss(ParamVector(base, params.layout)))
        base[i] = original - eps
        f_minus = float(loss(ParamVector(base, params.layout)))
        base[i] = original
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NumericError(f"Non-finite loss while perturbing coordinate {i}")
        grad[i] = (f_plus - f_minus) / (2.0 * eps)
    return NetGradient(grad, params.layout)


def sgd_step(params: ParamVector, grad: NetGradient, alpha: float) -> ParamVector:
    """Return params - alpha * grad.

    Raises:
        ShapeError: If the layouts differ
        ConfigurationError: If alpha is negative
        NumericError: If the update produces non-finite values
    """
    _check_congruent(params.layout, grad.layout)
    validate_positive("alpha", alpha, allow_zero=True)
    updated = params.values - alpha * grad.values
    if not np.all(np.isfinite(updated)):
        raise NumericError("SGD step produced non-finite parameters")
    return ParamVector(updated, params.layout)
