"""ReLU+Step quantizer and encoder (width 2 and dx+1)."""
from __future__ import annotations

import numpy as np

from ..coding import check_bits
from ..net import Network, affine_network, compose_all, network
from ._blocks import RELU, STEP, check_layers, embed, layer, output


def _stage(l: int, K: int) -> Network:
    """Stage l of the quantizer: leaves x alone unless x >= l*h, where it snaps to l*h.

    Invariant on entry: x equals q_K(x0) if x0 < (l-1)h, else x0 itself.
    The last stage compares against 1 + h so that x0 = 1 maps to 1 - h.
    """
    h = 2.0 ** -K
    top = 1.0 + h if l == 2 ** K else l * h
    return network([
        layer([[1.0], [1.0]], [0.0, -top], [RELU, RELU]),             # u = x, v = (x - top)+
        layer([[1.0, 1.0], [1.0, 0.0]], [0.0, -(l - 1) * h], [RELU, RELU]),  # p = u + v, r = (u - (l-1)h)+
        layer([[1.0, -1.0], [1.0, 0.0]], [0.0, -top], [RELU, STEP]),   # p - r, [p >= top]
        output([[1.0, h]], [0.0]),
    ])


def build_step_quantizer_net(K: int) -> Network:
    """Width-2 ReLU+Step network equal to ``quantize(x, K)`` on [0, 1]."""
    check_bits(1, K, "quantizer")
    check_layers(3 * 2 ** K + 1, "quantizer")
    return compose_all(*(_stage(l, K) for l in range(1, 2 ** K + 1)))


def build_step_encoder_net(dx: int, K: int) -> Network:
    """Width-(dx+1) ReLU+Step network equal to ``encode(x, K)`` on [0, 1]^dx."""
    check_bits(dx, K, "encoder")
    check_layers(dx * (3 * 2 ** K + 1), "encoder")
    q = build_step_quantizer_net(K)
    parts = [embed(q, dx, i) for i in range(dx)]
    weights = 2.0 ** (-K * np.arange(dx))
    return compose_all(*parts, affine_network(weights[None, :], [0.0]))
