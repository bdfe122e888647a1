"""ReLU-only pieces: ramped staircase, decoder, clamp and the ReLU encoder."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coding import check_bits, encode
from ..net import Network, affine_network, compose_all, network
from ._blocks import RELU, Tracker, check_layers, embed, layer, output, select_outputs


def default_delta(bits: int) -> float:
    return 2.0 ** -(bits + 6)


def _clip_into(tr: Tracker, name: str):
    """Append 1 - relu(1 - relu(v)) for the tracked value ``name`` (two width-1 layers)."""
    tr.hidden([(RELU, tr.combo({name: 1.0}))], {"m": ({0: 1.0}, 0.0)})
    tr.hidden([(RELU, tr.combo({"m": -1.0}, 1.0))], {name: ({0: -1.0}, 1.0)})


def build_staircase_pair_net(M: int, delta: float | None = None) -> Network:
    """Width-2 ReLU network x -> (q_M(x), 2^M (x - q_M(x))) off the ramps.

    The input is clipped to [0, 1]; then the ramped staircase s is grown one
    step at a time by alternating max and min layers, with the clipped input
    riding along in the first neuron.
    """
    check_bits(1, M, "staircase")
    h = 2.0 ** -M
    delta = default_delta(M) if delta is None else float(delta)
    if not 0.0 < delta < h:
        raise ValueError(f"delta must lie in (0, 2^-M) = (0, {h})")
    check_layers(2 * 2 ** M + 3, "staircase")
    slope = h / delta
    tr = Tracker(1)
    tr.input("z")
    _clip_into(tr, "z")
    tr.const("s", 0.0)
    for l in range(1, 2 ** M):
        # R_l(z) = slope * (z - l h + delta) + (l - 1) h
        r0 = (l - 1) * h - slope * (l * h - delta)
        tr.hidden(
            [(RELU, tr.combo({"z": 1.0})), (RELU, tr.combo({"s": 1.0, "z": -slope}, -r0))],
            {"z": ({0: 1.0}, 0.0), "m": ({0: slope, 1: 1.0}, r0)},
        )
        tr.hidden(
            [(RELU, tr.combo({"z": 1.0})), (RELU, tr.combo({"m": -1.0}, l * h))],
            {"z": ({0: 1.0}, 0.0), "s": ({1: -1.0}, l * h)},
        )
    tr.exprs["y2"] = tr.combo({"z": 2.0 ** M, "s": -(2.0 ** M)})
    return tr.finish(["s", "y2"])


def _clip_net(d: int = 1) -> Network:
    I = np.eye(d)
    return network([layer(I, np.zeros(d), [RELU] * d),
                    layer(-I, np.ones(d), [RELU] * d),
                    output(-I, np.ones(d))])


def build_decoder_net(dy: int, M: int, delta: float | None = None) -> Network:
    """Width-dy ReLU network equal to ``decode(c, M, dy)`` on every codeword."""
    check_bits(dy, M, "decoder")
    delta = default_delta(dy * M) if delta is None else float(delta)
    if not 0.0 < delta < 2.0 ** -(dy * M):
        raise ValueError("delta must lie in (0, 2^-(dy*M))")
    if dy == 1:
        return _clip_net(1)
    check_layers((dy - 1) * (2 * 2 ** M + 3), "decoder")
    g = build_staircase_pair_net(M, delta)
    return compose_all(*(embed(g, k, k - 1) for k in range(1, dy)))


def _ramp_stage(dx: int, l: int, alpha: float, kind: str, only_self: bool = False) -> Network:
    """One sweep on coordinate ``l``: adds 10*h(x_l) to every coordinate (or only to x_l).

    kind "r" uses h1 = relu(1 - relu(1 - x_l)/alpha), which is 1 for x_l > 1;
    kind "s" uses h2 = 1 - relu(1 - relu(alpha - x_l)/alpha), 1 for x_l < 0.
    Both vanish on [alpha, 1 - alpha]. Coordinates pass through relu(x + 1) - 1.
    """
    n = dx + 1
    W1 = np.zeros((n, dx))
    b1 = np.ones(n)
    W1[:dx] = np.eye(dx)
    W1[dx, l] = -1.0
    b1[dx] = 1.0 if kind == "r" else alpha
    W2 = np.eye(n)
    W2[dx, dx] = -1.0 / alpha
    b2 = np.zeros(n)
    b2[dx] = 1.0
    W3 = np.zeros((dx, n))
    W3[:, :dx] = np.eye(dx)
    rows = [l] if only_self else list(range(dx))
    b3 = -np.ones(dx)
    if kind == "r":
        W3[rows, dx] = 10.0
    else:
        W3[rows, dx] = -10.0
        b3[rows] = 9.0
    return network([layer(W1, b1, [RELU] * n), layer(W2, b2, [RELU] * n), output(W3, b3)])


def build_clamp_net(dx: int, alpha: float, variant: str = "two-phase") -> Network:
    """Width-(dx+1) ReLU network: identity on [alpha, 1-alpha]^dx, all-ones off the cube, range in the cube.

    ``two-phase`` first pushes each coordinate's own out-of-range values above 9,
    then spreads any large coordinate to all others with r-sweeps. ``interleaved``
    applies s_1, r_1, ..., s_dx, r_dx to all coordinates directly; there a partial
    ramp on one coordinate can lift a negative coordinate back into the cube, so
    the all-ones clause fails on part of the band near the cube's faces.
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    stages = []
    if variant == "two-phase":
        for l in range(dx):
            stages += [_ramp_stage(dx, l, alpha, "s", only_self=True), _ramp_stage(dx, l, alpha, "r", only_self=True)]
        stages += [_ramp_stage(dx, l, alpha, "r") for l in range(dx)]
    elif variant == "interleaved":
        for l in range(dx):
            stages += [_ramp_stage(dx, l, alpha, "s"), _ramp_stage(dx, l, alpha, "r")]
    else:
        raise ValueError("variant must be 'two-phase' or 'interleaved'")
    return compose_all(*stages, _clip_net(dx))


@dataclass(frozen=True)
class EncoderArtifacts:
    net: Network
    gamma: float
    delta: float
    alpha: float
    sentinel: float
    dx: int
    K: int

    @property
    def measure_bound(self) -> float:
        return self.dx * 2 * self.alpha + self.dx * 2 ** self.K * self.delta

    @property
    def excluded(self) -> str:
        return (f"([0,1]^{self.dx} minus [{self.alpha:g},{1 - self.alpha:g}]^{self.dx}) union "
                f"{{x : some x_i in (i*2^-{self.K} - {self.delta:g}, i*2^-{self.K})}}")

    def in_excluded(self, X) -> np.ndarray:
        """Membership in the excluded set for points of the unit cube."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        margin = np.any((X < self.alpha) | (X > 1 - self.alpha), axis=1)
        scaled = X * 2.0 ** self.K
        up = np.ceil(scaled)
        on_ramp = (up - scaled > 0) & (up - scaled < self.delta * 2.0 ** self.K) & (up >= 1)
        return margin | np.any(on_ramp, axis=1)


def default_alpha(dx: int, gamma: float) -> float:
    # largest power of two strictly below gamma / (4 dx)
    t = gamma / (4 * dx)
    a = 2.0 ** np.floor(np.log2(t))
    return float(a / 2 if a >= t else a)


def default_encoder_delta(dx: int, K: int, gamma: float) -> float:
    t = gamma / (2 * dx * 2 ** K)
    d = 2.0 ** np.floor(np.log2(t))
    d = d / 2 if d >= t else d
    return float(min(default_delta(dx * K), d))


def build_relu_encoder_net(dx: int, K: int, alpha: float | None = None, delta: float | None = None,
                           gamma: float = 0.01) -> EncoderArtifacts:
    """Width-(dx+1) ReLU encoder exact off a set of measure below ``gamma``."""
    check_bits(dx, K, "encoder")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    alpha = default_alpha(dx, gamma) if alpha is None else float(alpha)
    delta = default_encoder_delta(dx, K, gamma) if delta is None else float(delta)
    if not 0.0 < alpha < 0.5 or not 0.0 < delta < 2.0 ** -K:
        raise ValueError("alpha must lie in (0, 0.5) and delta in (0, 2^-K)")
    bound = dx * 2 * alpha + dx * 2 ** K * delta
    if not bound < gamma:
        raise ValueError(f"infeasible: measure bound {bound:g} is not below gamma={gamma:g}")
    check_layers(3 * dx * 3 + dx * (2 * 2 ** K + 3), "encoder")
    q = select_outputs(build_staircase_pair_net(K, delta), [0])
    weights = 2.0 ** (-K * np.arange(dx))
    net = compose_all(build_clamp_net(dx, alpha), *(embed(q, dx, i) for i in range(dx)),
                      affine_network(weights[None, :], [0.0]))
    sentinel = encode(np.full(dx, 1.0), K)
    return EncoderArtifacts(net, float(gamma), delta, alpha, float(sentinel), dx, K)
