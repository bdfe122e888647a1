"""Explicit feedforward networks: data model, evaluation, composition, JSON I/O."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import jsonschema
import numpy as np

from . import _kernels


class DimensionError(ValueError):
    pass


class NonDyadicError(ValueError):
    pass


class SchemaError(ValueError):
    pass


class Activation(str, Enum):
    RELU = "relu"
    STEP = "step"
    ID = "id"

    @property
    def code(self) -> int:
        return {"id": _kernels.ACT_ID, "relu": _kernels.ACT_RELU, "step": _kernels.ACT_STEP}[self.value]

    def apply(self, v):
        # works for floats and Fractions alike
        if self is Activation.RELU:
            return v if v > 0 else 0 * v
        if self is Activation.STEP:
            return 1 if v >= 0 else 0
        return v


_ACT_ALIASES = {"identity": Activation.ID}


def as_activation(tag) -> Activation:
    if isinstance(tag, Activation):
        return tag
    if tag in _ACT_ALIASES:
        return _ACT_ALIASES[tag]
    return Activation(tag)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _to_float_exact(v) -> tuple[float, bool]:
    """Return (float value, whether the float equals v exactly)."""
    if isinstance(v, str):
        v = Fraction(v)
    if isinstance(v, Fraction):
        f = float(v)
        return f, math.isfinite(f) and Fraction(f) == v
    f = float(v)
    return f, math.isfinite(f)


@dataclass(frozen=True, eq=False)
class Layer:
    """One affine map followed by per-neuron activations.

    ``dyadic`` is False only when some value was supplied as a rational that
    float64 cannot hold exactly (for instance ``Fraction(1, 3)``).
    """

    weights: np.ndarray
    bias: np.ndarray
    activations: tuple
    dyadic: bool = True

    @classmethod
    def build(cls, weights, bias, activations) -> "Layer":
        rows = [list(r) for r in (weights.tolist() if isinstance(weights, np.ndarray) else weights)]
        bias = list(bias.tolist() if isinstance(bias, np.ndarray) else bias)
        acts = tuple(as_activation(a) for a in activations)
        exact = True
        W = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=np.float64)
        for i, r in enumerate(rows):
            if len(r) != W.shape[1]:
                raise DimensionError("ragged weight matrix")
            for j, v in enumerate(r):
                W[i, j], ok = _to_float_exact(v)
                exact &= ok
        b = np.empty(len(bias), dtype=np.float64)
        for i, v in enumerate(bias):
            b[i], ok = _to_float_exact(v)
            exact &= ok
        return cls(W, b, acts, exact)

    def __post_init__(self):
        W = np.array(self.weights, dtype=np.float64)
        b = np.array(self.bias, dtype=np.float64).reshape(-1)
        if W.ndim != 2:
            raise DimensionError("weights must be a 2-D matrix")
        acts = tuple(as_activation(a) for a in self.activations)
        if not (W.shape[0] == b.shape[0] == len(acts)):
            raise DimensionError(
                f"layer rows={W.shape[0]}, bias={b.shape[0]}, activations={len(acts)} disagree")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise ValueError("non-finite weight or bias")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "bias", b)
        object.__setattr__(self, "activations", acts)

    @property
    def d_in(self) -> int:
        return self.weights.shape[1]

    @property
    def d_out(self) -> int:
        return self.weights.shape[0]

    @property
    def is_affine(self) -> bool:
        return all(a is Activation.ID for a in self.activations)


@dataclass(frozen=True, eq=False)
class Network:
    dx: int
    dy: int
    layers: tuple
    _packed: tuple = field(default=None, repr=False, compare=False)
    _exact: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise DimensionError("a network needs at least one layer")
        d = self.dx
        for i, layer in enumerate(layers):
            if layer.d_in != d:
                raise DimensionError(f"layer {i} expects input dim {layer.d_in}, got {d}")
            d = layer.d_out
        if d != self.dy:
            raise DimensionError(f"last layer outputs {d}, declared dy={self.dy}")
        if not layers[-1].is_affine:
            raise DimensionError("output layer must be affine (identity activations)")
        object.__setattr__(self, "layers", layers)

    @property
    def width(self) -> int:
        """Largest hidden-layer size; 0 when there are no hidden layers."""
        return max((l.d_out for l in self.layers[:-1]), default=0)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def n_params(self) -> int:
        return sum(l.weights.size + l.bias.size for l in self.layers)

    @property
    def dyadic(self) -> bool:
        return all(l.dyadic for l in self.layers)

    def uses(self, act) -> bool:
        act = as_activation(act)
        return any(act in l.activations for l in self.layers)

    def packed(self):
        if self._packed is None:
            triples = [(l.weights, l.bias, np.array([a.code for a in l.activations], dtype=np.int8))
                       for l in self.layers]
            object.__setattr__(self, "_packed", _kernels.pack(triples))
        return self._packed

    def exact_layers(self):
        if self._exact is None:
            if not self.dyadic:
                raise NonDyadicError("network has non-dyadic weights; exact mode unavailable")
            ex = []
            for l in self.layers:
                W = [[Fraction(v) for v in row] for row in l.weights.tolist()]
                b = [Fraction(v) for v in l.bias.tolist()]
                ex.append((W, b, l.activations))
            object.__setattr__(self, "_exact", ex)
        return self._exact

    def __call__(self, x, mode: str = "float64"):
        return evaluate(self, x, mode)


def network(layers: Sequence[Layer]) -> Network:
    layers = tuple(layers)
    return Network(layers[0].d_in, layers[-1].d_out, layers)


def _exact_input(v) -> Fraction:
    if isinstance(v, Fraction):
        q = v
    elif isinstance(v, str):
        q = Fraction(v)
    else:
        f = float(v)
        if not math.isfinite(f):
            raise NonDyadicError(f"non-finite input {v!r}")
        q = Fraction(f) if isinstance(v, (float, np.floating)) else Fraction(v)
    if not is_dyadic(q):
        raise NonDyadicError(f"input {v!r} is not a dyadic rational")
    return q


def _evaluate_exact(net: Network, x) -> list:
    h = [_exact_input(v) for v in x]
    for W, b, acts in net.exact_layers():
        h = [act.apply(sum((w * v for w, v in zip(row, h)), bi)) for row, bi, act in zip(W, b, acts)]
        h = [Fraction(v) for v in h]
    return h


def evaluate(net: Network, x, mode: str = "float64"):
    """Forward pass.

    ``x`` is one point (shape ``(dx,)``) or a batch (shape ``(n, dx)``).
    ``mode="dyadic"`` runs in exact rational arithmetic and returns
    Fractions (a list for one point, a list of lists for a batch).
    """
    if mode in ("dyadic", "dyadic-exact"):
        if not net.dyadic:
            raise NonDyadicError("dyadic mode requires dyadic weights")
        if len(x) and isinstance(x[0], (list, tuple, np.ndarray)):
            pts = [list(p) for p in x]
            for p in pts:
                if len(p) != net.dx:
                    raise DimensionError(f"expected {net.dx} inputs, got {len(p)}")
            return [_evaluate_exact(net, p) for p in pts]
        if len(x) != net.dx:
            raise DimensionError(f"expected {net.dx} inputs, got {len(x)}")
        return _evaluate_exact(net, list(x))
    if mode != "float64":
        raise ValueError(f"unknown numeric mode {mode!r}")
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != net.dx:
        raise DimensionError(f"expected input of width {net.dx}, got shape {np.shape(x)}")
    Y = _kernels.forward(X, net.packed())
    return Y[0] if single else Y


def evaluate_reference(net: Network, X) -> np.ndarray:
    """Numpy-only forward pass, independent of the selected backend."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return _kernels.forward_numpy(X, net.packed())


def compose(first: Network, second: Network) -> Network:
    """Network computing ``second(first(x))``.

    The affine output of ``first`` is folded into the first affine map of
    ``second``, so the junction adds no hidden layer.
    """
    if first.dy != second.dx:
        raise DimensionError(f"cannot compose: first.dy={first.dy}, second.dx={second.dx}")
    head, tail = first.layers[-1], second.layers[0]
    W = tail.weights @ head.weights
    b = tail.weights @ head.bias + tail.bias
    merged = Layer(W, b, tail.activations, head.dyadic and tail.dyadic)
    return Network(first.dx, second.dy, first.layers[:-1] + (merged,) + second.layers[1:])


def compose_all(*nets: Network) -> Network:
    out = nets[0]
    for n in nets[1:]:
        out = compose(out, n)
    return out


def affine_network(W, b) -> Network:
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    return network([Layer(W, b, (Activation.ID,) * W.shape[0])])


def identity_network(d: int) -> Network:
    return affine_network(np.eye(d), np.zeros(d))


# ---------------------------------------------------------------- documents

NETWORK_SCHEMA = {
    "type": "object",
    "required": ["version", "dx", "dy", "numeric", "layers"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": 1},
        "dx": {"type": "integer", "minimum": 1},
        "dy": {"type": "integer", "minimum": 1},
        "numeric": {"enum": ["float64", "dyadic"]},
        "layers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["weights", "bias", "activations"],
                "additionalProperties": False,
                "properties": {
                    "weights": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/$defs/num"}}},
                    "bias": {"type": "array", "items": {"$ref": "#/$defs/num"}},
                    "activations": {"type": "array", "items": {"enum": ["relu", "step", "id"]}},
                },
            },
        },
    },
    "$defs": {
        "num": {"anyOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]},
    },
}


def _num_out(v: float, numeric: str):
    if not math.isfinite(v):
        raise ValueError("non-finite weight")
    if numeric == "dyadic":
        q = Fraction(v)
        return f"{q.numerator}/{q.denominator}"
    return v


def serialize(net: Network, numeric: str = "float64") -> dict:
    if numeric not in ("float64", "dyadic"):
        raise ValueError(f"unknown numeric mode {numeric!r}")
    if numeric == "dyadic" and not net.dyadic:
        raise NonDyadicError("network has non-dyadic weights")
    return {
        "version": 1,
        "dx": net.dx,
        "dy": net.dy,
        "numeric": numeric,
        "layers": [
            {
                "weights": [[_num_out(v, numeric) for v in row] for row in l.weights.tolist()],
                "bias": [_num_out(v, numeric) for v in l.bias.tolist()],
                "activations": [a.value for a in l.activations],
            }
            for l in net.layers
        ],
    }


def _num_in(v, numeric: str):
    if isinstance(v, bool):
        raise SchemaError("boolean is not a weight")
    if isinstance(v, str):
        q = Fraction(v)
        if numeric == "dyadic" and not is_dyadic(q):
            raise SchemaError(f"{v!r} is not dyadic")
        return q
    if isinstance(v, float) and not math.isfinite(v):
        raise SchemaError("non-finite weight")
    return v


def deserialize(doc: dict) -> Network:
    try:
        jsonschema.validate(doc, NETWORK_SCHEMA)
    except jsonschema.ValidationError as e:
        raise SchemaError(e.message) from None
    numeric = doc["numeric"]
    layers = []
    for i, ld in enumerate(doc["layers"]):
        W = [[_num_in(v, numeric) for v in row] for row in ld["weights"]]
        b = [_num_in(v, numeric) for v in ld["bias"]]
        if len(W) != len(b) or len(b) != len(ld["activations"]):
            raise SchemaError(f"layer {i}: weights/bias/activations lengths disagree")
        try:
            layer = Layer.build(W, b, ld["activations"])
        except (DimensionError, ValueError) as e:
            raise SchemaError(f"layer {i}: {e}") from None
        if numeric == "dyadic" and not layer.dyadic:
            raise SchemaError(f"layer {i}: value not representable exactly")
        layers.append(layer)
    try:
        return Network(doc["dx"], doc["dy"], tuple(layers))
    except DimensionError as e:
        raise SchemaError(str(e)) from None


def dumps(net: Network, numeric: str = "float64") -> str:
    return json.dumps(serialize(net, numeric), separators=(",", ":"), allow_nan=False)


def loads(text: str) -> Network:
    try:
        doc = json.loads(text, parse_constant=lambda c: float(c))
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    return deserialize(doc)


def save(net: Network, path, numeric: str = "float64") -> None:
    with open(path, "w") as fh:
        fh.write(dumps(net, numeric))


def load(path) -> Network:
    with open(path) as fh:
        return loads(fh.read())
