"""Width-2 ReLU realizations of continuous piecewise-linear maps on an interval."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coding import CodebookTable
from ._blocks import RELU, Tracker, check_layers


@dataclass(frozen=True)
class PLScalarFunction:
    """Continuous PL map given by its values at ``lo = x0 < x1 < ... < xN = hi``."""

    xs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        vs = np.asarray(self.values, dtype=np.float64)
        if xs.ndim != 1 or xs.shape != vs.shape[:1] or len(xs) < 2:
            raise ValueError("need at least two breakpoints with matching values")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vs)

    @classmethod
    def from_pieces(cls, lo, hi, breaks, slopes, intercepts, tol=1e-12):
        """Build from per-piece ``a_i * x + b_i``; adjacent pieces must agree at breaks."""
        breaks = list(breaks)
        if len(slopes) != len(breaks) + 1 or len(intercepts) != len(slopes):
            raise ValueError("need one slope/intercept per piece")
        for i, x in enumerate(breaks):
            left = slopes[i] * x + intercepts[i]
            right = slopes[i + 1] * x + intercepts[i + 1]
            if abs(left - right) > tol * max(1.0, abs(left)):
                raise ValueError(f"pieces {i} and {i + 1} disagree at x={x}")
        xs = [lo] + breaks + [hi]
        vals = [slopes[0] * lo + intercepts[0]]
        vals += [slopes[i] * x + intercepts[i] for i, x in enumerate(breaks)]
        vals.append(slopes[-1] * hi + intercepts[-1])
        return cls(np.array(xs), np.array(vals))

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    @property
    def n_pieces(self) -> int:
        return len(self.xs) - 1

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values, axis=0) / np.diff(self.xs).reshape((-1,) + (1,) * (self.values.ndim - 1))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.values.ndim == 1:
            return np.interp(x, self.xs, self.values)
        return np.stack([np.interp(x, self.xs, self.values[:, j]) for j in range(self.values.shape[1])], axis=-1)


def _piece_floor(f: PLScalarFunction) -> np.ndarray:
    # lower bound of every affine piece over the whole interval (per output column)
    V = f.values.reshape(len(f.xs), -1)
    a = np.diff(V, axis=0) / np.diff(f.xs)[:, None]
    at_lo = V[:-1] + a * (f.lo - f.xs[:-1, None])
    at_hi = V[:-1] + a * (f.hi - f.xs[:-1, None])
    return np.minimum(at_lo, at_hi).min(axis=0)


def _build(f: PLScalarFunction, pair: bool):
    """Shared induction over breakpoints.

    Hidden layer j holds A = relu(x - x_{j-1}) and, per output column,
    B = relu(Z - floor) where Z is the running PL function with j pieces;
    the pending slope change c_j turns (A, B) back into Z = B + floor + c_j A.
    """
    V = f.values.reshape(len(f.xs), -1)
    dy = V.shape[1]
    a = np.diff(V, axis=0) / np.diff(f.xs)[:, None]
    floor = _piece_floor(f)
    P = f.n_pieces
    check_layers(P + 1, "PL network")
    tr = Tracker(1)
    tr.input("x")
    coef_x, _ = tr.combo({"x": 1.0})
    neurons = [(RELU, (coef_x, -f.lo))]
    neurons += [(RELU, (0 * coef_x, V[0, k] - floor[k])) for k in range(dy)]
    c = a[0].copy()
    tr.hidden(neurons, {"A": ({0: 1.0}, 0.0), **{f"B{k}": ({1 + k: 1.0}, 0.0) for k in range(dy)}})
    for j in range(1, P):
        step = f.xs[j] - f.xs[j - 1]
        neurons = [(RELU, tr.combo({"A": 1.0}, -step))]
        neurons += [(RELU, tr.combo({f"B{k}": 1.0, "A": c[k]})) for k in range(dy)]
        tr.hidden(neurons, {"A": ({0: 1.0}, 0.0), **{f"B{k}": ({1 + k: 1.0}, 0.0) for k in range(dy)}})
        c = a[j] - a[j - 1]
    for k in range(dy):
        coef, const = tr.combo({f"B{k}": 1.0, "A": c[k]}, floor[k])
        tr.exprs[f"Z{k}"] = (coef, const)
    names = (["A"] if pair else []) + [f"Z{k}" for k in range(dy)]
    return tr.finish(names)


def build_pl_net(g: PLScalarFunction, pair: bool = False):
    """Width-2 ReLU network equal to ``g`` on its interval.

    With ``pair=True`` the network returns ``(relu(x - x_last), g(x))`` where
    ``x_last`` is the last interior breakpoint (or ``lo`` for one piece).
    """
    if g.values.ndim != 1:
        raise ValueError("scalar PL function expected; use build_pl_vector_net")
    return _build(g, pair)


def build_pl_vector_net(g: PLScalarFunction):
    """ReLU network of width ``1 + dy`` equal to a PL curve ``[lo, hi] -> R^dy``."""
    if g.values.ndim != 2:
        raise ValueError("vector-valued PL function expected")
    return _build(g, pair=False)


def memorizer_function(keys, values, interval) -> PLScalarFunction:
    """Interpolate keys linearly, constant beyond the extreme keys."""
    lo, hi = map(float, interval)
    keys = np.asarray(keys, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(keys) == 0:
        raise ValueError("empty table")
    if keys[0] < lo or keys[-1] > hi:
        raise ValueError("table keys fall outside the interval")
    if hi <= lo:
        raise ValueError("interval must have positive length")
    xs, vs = list(keys), list(values)
    if keys[0] > lo:
        xs.insert(0, lo)
        vs.insert(0, values[0])
    if keys[-1] < hi:
        xs.append(hi)
        vs.append(values[-1])
    return PLScalarFunction(np.array(xs), np.array(vs))


def build_memorizer_net(table: CodebookTable, interval=(0.0, 1.0)):
    """Width-2 ReLU network hitting every table entry exactly."""
    return build_pl_net(memorizer_function(table.keys, table.values, interval))
