"""Small helpers for assembling networks layer by layer."""
from __future__ import annotations

import numpy as np

from ..coding import BudgetError
from ..net import Activation, Layer, Network, network

RELU, STEP, ID = Activation.RELU, Activation.STEP, Activation.ID

# Builders may emit O(2^K) layers; refuse anything that would not fit in memory comfortably.
MAX_LAYERS = 250_000


def check_layers(n: int, what: str) -> None:
    if n > MAX_LAYERS:
        raise BudgetError(f"{what} would need {n} layers (limit {MAX_LAYERS})")


def layer(W, b, acts) -> Layer:
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    return Layer(W, np.asarray(b, dtype=np.float64).reshape(-1), tuple(acts))


def output(W, b) -> Layer:
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    return Layer(W, np.asarray(b, dtype=np.float64).reshape(-1), (ID,) * W.shape[0])


def embed(sub: Network, n: int, index: int) -> Network:
    """Run ``sub`` (1 input) on channel ``index`` of an n-channel state.

    The other channels ride along through ReLU neurons, so they must be
    nonnegative. The outputs of ``sub`` replace channel ``index`` in place.
    """
    if sub.dx != 1:
        raise ValueError("embed expects a single-input subnetwork")
    others = [i for i in range(n) if i != index]
    npass = len(others)
    layers = []
    last = len(sub.layers) - 1
    for k, L in enumerate(sub.layers):
        d_in = n if k == 0 else npass + L.d_in
        W = np.zeros((npass + L.d_out, d_in))
        b = np.zeros(npass + L.d_out)
        for r, ch in enumerate(others):
            W[r, ch if k == 0 else r] = 1.0
        cols = [index] if k == 0 else list(range(npass, npass + L.d_in))
        W[npass:, cols] = L.weights
        b[npass:] = L.bias
        acts = [ID if k == last else RELU] * npass + list(L.activations)
        if k == last:
            before = [r for r, ch in enumerate(others) if ch < index]
            after = [r for r, ch in enumerate(others) if ch > index]
            order = before + list(range(npass, npass + L.d_out)) + after
            W, b, acts = W[order], b[order], [acts[i] for i in order]
        layers.append(Layer(W, b, tuple(acts)))
    return network(layers)


def select_outputs(net: Network, rows) -> Network:
    last = net.layers[-1]
    rows = list(rows)
    return network(net.layers[:-1] + (Layer(last.weights[rows], last.bias[rows],
                                             tuple(last.activations[i] for i in rows)),))


class Tracker:
    """Builds a chain of hidden layers while tracking named affine readouts.

    Each tracked quantity is an affine function ``coef @ h + const`` of the
    most recent hidden layer ``h`` (initially the network input).
    """

    def __init__(self, d_in: int):
        self.width = d_in
        self.layers: list[Layer] = []
        self.exprs: dict[str, tuple[np.ndarray, float]] = {}

    def input(self, name: str, i: int = 0):
        coef = np.zeros(self.width)
        coef[i] = 1.0
        self.exprs[name] = (coef, 0.0)

    def const(self, name: str, value: float):
        self.exprs[name] = (np.zeros(self.width), float(value))

    def combo(self, terms: dict, const: float = 0.0):
        """Affine combination of tracked names: sum terms[name] * name + const."""
        coef = np.zeros(self.width)
        c = float(const)
        for name, w in terms.items():
            ec, ek = self.exprs[name]
            coef = coef + w * ec
            c += w * ek
        return coef, c

    def hidden(self, neurons: list, readouts: dict):
        """Add a hidden layer.

        ``neurons`` is a list of (activation, (coef, const)) built from
        ``combo``; ``readouts`` maps names to (terms over neuron indices, const)
        describing each tracked quantity afterwards.
        """
        W = np.array([c for _, (c, _) in neurons])
        b = np.array([k for _, (_, k) in neurons])
        self.layers.append(Layer(W, b, tuple(a for a, _ in neurons)))
        self.width = len(neurons)
        new = {}
        for name, (terms, const) in readouts.items():
            coef = np.zeros(self.width)
            for i, w in terms.items():
                coef[i] += w
            new[name] = (coef, float(const))
        self.exprs = new

    def finish(self, names) -> Network:
        W = np.array([self.exprs[n][0] for n in names])
        b = np.array([self.exprs[n][1] for n in names])
        return network(self.layers + [output(W, b)])
