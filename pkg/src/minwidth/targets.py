"""Target functions on the unit box and the builtin registry."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator


@dataclass(frozen=True)
class TargetFunction:
    """A map ``[0,1]^dx -> [0,1]^dy`` with a sup-norm Lipschitz constant.

    ``fn`` is vectorized: it takes an ``(n, dx)`` array and returns ``(n, dy)``.
    """

    dx: int
    dy: int
    fn: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    name: str = "target"

    def __call__(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        Y = np.asarray(self.fn(np.atleast_2d(X)), dtype=np.float64).reshape(-1, self.dy)
        return Y[0] if single else Y

    def modulus(self, delta: float) -> float:
        return self.lipschitz * delta

    def check(self, n: int = 2000, seed: int = 0, slack: float = 1e-12) -> None:
        """Sample-check the codomain box and the declared Lipschitz constant."""
        rng = np.random.default_rng(seed)
        X = rng.random((n, self.dx))
        Y = self(X)
        if Y.shape != (n, self.dy):
            raise ValueError(f"{self.name}: expected output shape {(n, self.dy)}, got {Y.shape}")
        if np.any(Y < -slack) or np.any(Y > 1 + slack):
            raise ValueError(f"{self.name}: values leave [0,1]^{self.dy}")
        X2 = np.clip(X + rng.uniform(-0.05, 0.05, X.shape), 0, 1)
        dX = np.max(np.abs(X - X2), axis=1)
        dY = np.max(np.abs(Y - self(X2)), axis=1)
        ok = dX > 0
        if np.any(dY[ok] > self.lipschitz * dX[ok] + slack):
            worst = float(np.max(dY[ok] / dX[ok]))
            raise ValueError(f"{self.name}: difference quotient {worst:.4g} exceeds L={self.lipschitz}")


def identity(d: int = 1) -> TargetFunction:
    return TargetFunction(d, d, lambda X: X.copy(), 1.0, "identity")


def constant(dx: int = 1, dy: int = 1, value: float = 0.5) -> TargetFunction:
    return TargetFunction(dx, dy, lambda X: np.full((len(X), dy), value), 0.0, "constant")


def product(dx: int = 2) -> TargetFunction:
    # |prod x - prod y| <= sum |x_i - y_i| on the unit box
    return TargetFunction(dx, 1, lambda X: np.prod(X, axis=1, keepdims=True), float(dx), "product")


def mean(dx: int = 2) -> TargetFunction:
    return TargetFunction(dx, 1, lambda X: np.mean(X, axis=1, keepdims=True), 1.0, "mean")


def absdiff() -> TargetFunction:
    return TargetFunction(2, 1, lambda X: np.abs(X[:, :1] - X[:, 1:2]), 2.0, "absdiff")


def product_mean_absdiff() -> TargetFunction:
    """(x1*x2/2, (x1+x2)/2, |x1-x2|/2): product and absdiff halved so L = 1."""

    def fn(X):
        a, b = X[:, 0], X[:, 1]
        return np.stack([a * b / 2, (a + b) / 2, np.abs(a - b) / 2], axis=1)

    return TargetFunction(2, 3, fn, 1.0, "product-mean-absdiff")


def _builtin(name: str, dx: int | None, dy: int | None) -> TargetFunction:
    if name == "identity":
        return identity(dx or dy or 1)
    if name == "constant":
        return constant(dx or 1, dy or 1)
    if name == "product":
        return product(dx or 2)
    if name == "mean":
        return mean(dx or 2)
    if name == "absdiff":
        return absdiff()
    if name in ("product-mean-absdiff", "trio"):
        return product_mean_absdiff()
    raise KeyError(f"unknown builtin target {name!r}")


BUILTINS = ("identity", "constant", "product", "mean", "absdiff", "product-mean-absdiff")


def table_target(path, dx: int, dy: int, lipschitz: float) -> TargetFunction:
    """Target from a CSV grid with columns x1..x_dx, y1..y_dy, linearly interpolated."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    xs = np.array([[float(r[f"x{i + 1}"]) for i in range(dx)] for r in rows])
    ys = np.array([[float(r[f"y{j + 1}"]) for j in range(dy)] for r in rows])
    axes = [np.unique(xs[:, i]) for i in range(dx)]
    shape = tuple(len(a) for a in axes)
    if int(np.prod(shape)) != len(rows):
        raise ValueError("table rows do not form a full tensor grid")
    idx = tuple(np.searchsorted(axes[i], xs[:, i]) for i in range(dx))
    values = np.empty(shape + (dy,))
    values[idx] = ys
    interp = RegularGridInterpolator(axes, values, bounds_error=False, fill_value=None)
    return TargetFunction(dx, dy, lambda X: interp(X), float(lipschitz), f"table:{path}")


def pl_target(path) -> TargetFunction:
    """Piecewise-linear target on [0,1] from a CSV with columns t, y1, y2, ..."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    t, Y = data[:, 0], data[:, 1:]
    if np.any(np.diff(t) <= 0):
        raise ValueError("PL breakpoints must be strictly increasing")
    slopes = np.abs(np.diff(Y, axis=0)) / np.diff(t)[:, None]

    def fn(X):
        return np.stack([np.interp(X[:, 0], t, Y[:, j]) for j in range(Y.shape[1])], axis=1)

    return TargetFunction(1, Y.shape[1], fn, float(slopes.max()) if len(slopes) else 0.0, f"pl:{path}")


def resolve(spec: str, dx: int | None = None, dy: int | None = None,
            lipschitz: float | None = None) -> TargetFunction:
    """Resolve ``builtin:<name>``, ``table:<csv>`` or ``pl:<csv>``."""
    kind, _, arg = spec.partition(":")
    if kind == "builtin":
        t = _builtin(arg, dx, dy)
    elif kind == "table":
        if dx is None or dy is None or lipschitz is None:
            raise ValueError("table targets need dx, dy and lipschitz")
        return table_target(arg, dx, dy, lipschitz)
    elif kind == "pl":
        t = pl_target(arg)
    else:
        raise ValueError(f"target spec must start with builtin:, table: or pl:, got {spec!r}")
    if (dx is not None and dx != t.dx) or (dy is not None and dy != t.dy):
        raise ValueError(f"{spec}: dims ({t.dx}, {t.dy}) do not match requested ({dx}, {dy})")
    if lipschitz is not None and lipschitz < t.lipschitz:
        raise ValueError(f"{spec}: declared Lipschitz {lipschitz} is below the true {t.lipschitz}")
    return t
