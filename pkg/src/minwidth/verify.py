"""Oracle-equivalence and range suites for each construction, shared by the CLI and tests."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import coding
from .construct import (PLScalarFunction, build_clamp_net, build_decoder_net, build_memorizer_net, build_pl_net,
                        build_relu_encoder_net, build_staircase_pair_net, build_step_encoder_net,
                        build_step_quantizer_net)
from .net import Activation, evaluate
from .targets import TargetFunction

TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def _max_err(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))))


def _exact_agree(net, X, expected) -> bool:
    got = evaluate(net, X, mode="dyadic")
    return all(Fraction(float(e)) == g for row_g, row_e in zip(got, np.atleast_2d(expected))
               for g, e in zip(row_g, row_e))


def verify_quantizer(K: int = 3, numeric: str = "float64", **_) -> list:
    net = build_step_quantizer_net(K)
    checks = [Check("width", net.width == 2, f"width={net.width}"),
              Check("uses step", net.uses(Activation.STEP))]
    n = 2 ** K * 100
    x = np.linspace(0.0, 1.0, n)
    err = _max_err(evaluate(net, x[:, None]).ravel(), coding.quantize(x, K))
    checks.append(Check("matches quantize", err <= TOL, f"{n} grid points, max error {err:.3g}"))
    if numeric == "dyadic":
        xd = np.arange(2 ** (K + 4) + 1) / 2.0 ** (K + 4)
        ok = _exact_agree(net, xd[:, None], coding.quantize(xd, K)[:, None])
        checks.append(Check("exact on dyadic points", ok, f"{len(xd)} points"))
    return checks


def verify_encoder_step(dx: int = 2, K: int = 3, grid: int = 129, **_) -> list:
    net = build_step_encoder_net(dx, K)
    axis = np.linspace(0.0, 1.0, grid)
    X = np.stack([m.ravel() for m in np.meshgrid(*([axis] * dx), indexing="ij")], axis=1)
    err = _max_err(evaluate(net, X).ravel(), coding.encode(X, K))
    return [Check("width", net.width == dx + 1, f"width={net.width}"),
            Check("matches encode", err <= TOL, f"{len(X)} grid points, max error {err:.3g}")]


def verify_encoder_relu(dx: int = 2, K: int = 3, gamma: float = 0.01, samples: int = 1_000_000,
                        seed: int = 0, alpha: float | None = None, delta: float | None = None, **_) -> list:
    art = build_relu_encoder_net(dx, K, alpha, delta, gamma)
    net = art.net
    rng = np.random.default_rng(seed)
    X = rng.random((samples, dx))
    got = evaluate(net, X).ravel()
    mismatch = np.abs(got - coding.encode(X, K)) > TOL
    frac = float(mismatch.mean())
    outside = bool(np.all(art.in_excluded(X[mismatch])))
    off = rng.uniform(-3, 4, (10_000, dx))
    off = off[np.any((off < 0) | (off > 1), axis=1)]
    sent = _max_err(evaluate(net, off).ravel(), art.sentinel)
    wide = evaluate(net, rng.uniform(-3, 4, (10_000, dx))).ravel()
    return [
        Check("width", net.width == dx + 1, f"width={net.width}"),
        Check("relu only", not net.uses(Activation.STEP)),
        Check("measure bound below gamma", art.measure_bound < gamma, f"{art.measure_bound:.3g} < {gamma}"),
        Check("mismatch fraction below gamma", frac < gamma, f"{frac:.3g} over {samples} samples"),
        Check("mismatches inside excluded set", outside),
        Check("sentinel off the cube", sent <= TOL, f"sentinel {art.sentinel}, max error {sent:.3g}"),
        Check("range in [0,1]", bool(np.all((wide >= -TOL) & (wide <= 1 + TOL)))),
    ]


def _square(dx: int) -> TargetFunction:
    if dx == 1:
        return TargetFunction(1, 1, lambda X: X ** 2, 2.0, "square")
    return TargetFunction(dx, 1, lambda X: np.prod(X, axis=1, keepdims=True), float(dx), "product")


def verify_memorizer(dx: int = 1, K: int = 3, M: int = 6, seed: int = 0, numeric: str = "float64", **_) -> list:
    table = coding.build_codebook(_square(dx), K, M)
    net = build_memorizer_net(table, (0.0, 1.0))
    got = evaluate(net, table.keys[:, None]).ravel()
    err = _max_err(got, table.values)
    s = np.random.default_rng(seed).random(10_000)
    vals = evaluate(net, s[:, None]).ravel()
    lo, hi = table.values.min(), table.values.max()
    checks = [Check("width", net.width == 2, f"width={net.width}"),
              Check("exact on all keys", err <= TOL, f"{len(table)} codewords, max error {err:.3g}"),
              Check("range within table values", bool(np.all((vals >= lo - TOL) & (vals <= hi + TOL))))]
    if numeric == "dyadic" and net.dyadic:
        checks.append(Check("exact on all keys (dyadic)", _exact_agree(net, table.keys[:, None], table.values[:, None])))
    return checks


def verify_decoder(dy: int = 2, M: int = 3, seed: int = 0, numeric: str = "float64", delta: float | None = None,
                   **_) -> list:
    net = build_decoder_net(dy, M, delta)
    codes = coding.grid(dy * M)
    got = evaluate(net, codes[:, None]).reshape(len(codes), dy)
    err = _max_err(got, coding.decode(codes, M, dy))
    pts = np.random.default_rng(seed).uniform(-2, 3, 10_000)
    Y = evaluate(net, pts[:, None]).reshape(-1, dy)
    checks = [Check("width", net.width == dy, f"width={net.width}"),
              Check("relu only", not net.uses(Activation.STEP)),
              Check("exact on all codewords", err <= TOL, f"{len(codes)} codewords, max error {err:.3g}"),
              Check("range in [0,1]^dy", bool(np.all((Y >= -TOL) & (Y <= 1 + TOL))), "10^4 points")]
    if numeric == "dyadic":
        checks.append(Check("exact on all codewords (dyadic)",
                            _exact_agree(net, codes[:, None], coding.decode(codes, M, dy).reshape(len(codes), dy))))
    return checks


def verify_staircase(M: int = 2, delta: float = 0.01, seed: int = 0, **_) -> list:
    net = build_staircase_pair_net(M, delta)
    h = 2.0 ** -M
    rng = np.random.default_rng(seed)
    x = rng.random(20_000)
    up = np.ceil(x / h) * h
    keep = ~((up - x > 0) & (up - x < delta) & (up < 1))
    x = x[keep][:10_000]
    q = coding.quantize(x, M)
    got = evaluate(net, x[:, None])
    err = _max_err(got, np.stack([q, 2 ** M * (x - q)], axis=1))
    Y = evaluate(net, rng.uniform(-5, 6, 10_000)[:, None])
    in_range = bool(np.all((Y[:, 0] >= -TOL) & (Y[:, 0] <= 1 - h + TOL) & (Y[:, 1] >= -TOL) & (Y[:, 1] <= 1 + TOL)))
    return [Check("width", net.width == 2, f"width={net.width}"),
            Check("matches (q_M, 2^M (x - q_M)) off the ramps", err <= TOL, f"{len(x)} points, max error {err:.3g}"),
            Check("range", in_range, "10^4 points of R")]


def verify_clamp(dx: int = 2, alpha: float = 0.1, seed: int = 0, **_) -> list:
    net = build_clamp_net(dx, alpha)
    rng = np.random.default_rng(seed)
    inner = rng.uniform(alpha, 1 - alpha, (10_000, dx))
    outer = rng.uniform(-5, 6, (40_000, dx))
    outer = outer[np.any((outer < 0) | (outer > 1), axis=1)][:10_000]
    wide = rng.uniform(-5, 6, (10_000, dx))
    e1 = _max_err(evaluate(net, inner), inner)
    e2 = _max_err(evaluate(net, outer), 1.0)
    Y = evaluate(net, wide)
    return [Check("width", net.width == dx + 1, f"width={net.width}"),
            Check("identity on the inner cube", e1 <= TOL, f"max error {e1:.3g}"),
            Check("all-ones off the cube", e2 <= TOL, f"max error {e2:.3g}"),
            Check("range in the cube", bool(np.all((Y >= -TOL) & (Y <= 1 + TOL))))]


def random_pl(rng: np.random.Generator, max_pieces: int = 16) -> PLScalarFunction:
    n = int(rng.integers(1, max_pieces + 1))
    lo = float(rng.uniform(-2, 0))
    xs = np.sort(np.concatenate([[lo], lo + np.cumsum(rng.uniform(0.05, 1.0, n))]))
    return PLScalarFunction(xs, rng.uniform(-3, 3, n + 1))


def verify_pl(count: int = 100, seed: int = 0, **_) -> list:
    rng = np.random.default_rng(seed)
    worst, widths_ok = 0.0, True
    for _ in range(count):
        g = random_pl(rng)
        net = build_pl_net(g)
        widths_ok &= net.width == 2
        pts = np.concatenate([g.xs, (g.xs[:-1] + g.xs[1:]) / 2])
        worst = max(worst, _max_err(evaluate(net, pts[:, None]).ravel(), g(pts)))
    return [Check("width 2", widths_ok),
            Check("exact at breakpoints and midpoints", worst <= TOL, f"{count} functions, max error {worst:.3g}")]


SUITES = {
    "quantizer": verify_quantizer,
    "encoder-step": verify_encoder_step,
    "encoder-relu": verify_encoder_relu,
    "memorizer": verify_memorizer,
    "decoder": verify_decoder,
    "staircase": verify_staircase,
    "clamp": verify_clamp,
    "pl": verify_pl,
}


def run_suite(name: str, **params) -> list:
    if name not in SUITES:
        raise KeyError(f"unknown lemma {name!r}; choose from {', '.join(SUITES)}")
    params = {k: v for k, v in params.items() if v is not None}
    return SUITES[name](**params)
