"""Error measurement: grid sup norm, L^p quadrature and exact sup distance between planar PL curves."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .net import DimensionError, Network, evaluate

CHUNK = 1 << 16


@dataclass(frozen=True)
class Quadrature:
    """Sampling rule on the unit cube.

    ``grid`` uses ``resolution`` points per axis (endpoints included for the
    sup norm, cell midpoints for L^p); ``monte-carlo`` draws ``resolution``
    uniform samples from ``seed``.
    """

    kind: str = "grid"
    resolution: int = 201
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("grid", "monte-carlo"):
            raise ValueError("quadrature kind must be 'grid' or 'monte-carlo'")
        if int(self.resolution) < 2:
            raise ValueError("resolution must be at least 2")

    def points(self, d: int, midpoints: bool = False) -> np.ndarray:
        if self.kind == "monte-carlo":
            return np.random.default_rng(self.seed).random((self.resolution, d))
        n = self.resolution
        axis = (np.arange(n) + 0.5) / n if midpoints else np.linspace(0.0, 1.0, n)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _check_dims(net: Network, target) -> None:
    if net.dx != target.dx or net.dy != target.dy:
        raise DimensionError(f"network maps R^{net.dx}->R^{net.dy} but target maps "
                             f"R^{target.dx}->R^{target.dy}")


def _chunks(net: Network, target, X):
    for i in range(0, len(X), CHUNK):
        xb = X[i:i + CHUNK]
        yield evaluate(net, xb) - target(xb)


def pointwise_error(net: Network, target, X) -> np.ndarray:
    """Per-point sup-norm error ``||net(x) - f(x)||_inf``."""
    _check_dims(net, target)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return np.concatenate([np.max(np.abs(d), axis=1) for d in _chunks(net, target, X)])


def sup_error(net: Network, target, q: Quadrature = Quadrature()) -> float:
    """Largest sampled ``||net(x) - f(x)||_inf``; a lower bound on the true sup."""
    return float(pointwise_error(net, target, q.points(target.dx)).max())


def lp_error(net: Network, target, p: float = 2.0, q: Quadrature = Quadrature()) -> float:
    """Quadrature estimate of ``(integral ||net - f||_p^p)^(1/p)`` over [0,1]^dx."""
    if not p >= 1 or not np.isfinite(p):
        raise ValueError("p must lie in [1, inf)")
    _check_dims(net, target)
    X = q.points(target.dx, midpoints=True)
    total = sum(float(np.sum(np.abs(d) ** p)) for d in _chunks(net, target, X))
    return (total / len(X)) ** (1.0 / p)


@dataclass(frozen=True)
class ErrorReport:
    norm: str
    p: float | None
    value: float
    bound: float | None
    resolution: int
    seed: int | None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ErrorReport":
        return cls(**json.loads(text))

    @property
    def within_bound(self) -> bool | None:
        return None if self.bound is None else self.value <= self.bound


def error_report(net: Network, target, norm: str = "sup", p: float | None = None,
                 q: Quadrature = Quadrature(), bound: float | None = None) -> ErrorReport:
    if norm == "sup":
        return ErrorReport("sup", None, sup_error(net, target, q), bound, q.resolution, q.seed)
    if norm == "lp":
        p = 2.0 if p is None else float(p)
        return ErrorReport("lp", p, lp_error(net, target, p, q), bound, q.resolution, q.seed)
    raise ValueError("norm must be 'sup' or 'lp'")


def _breakpoints(curve):
    """(ts, points) as Fractions from a curve object or a (ts, points) pair."""
    if hasattr(curve, "ts") and hasattr(curve, "points"):
        ts, pts = curve.ts, curve.points
    else:
        ts, pts = curve
    ts = [Fraction(t) for t in ts]
    pts = [tuple(Fraction(c) for c in p) for p in pts]
    if len(ts) != len(pts) or len(ts) < 2:
        raise ValueError("a PL curve needs at least two breakpoints with matching points")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("curve breakpoints must be strictly increasing")
    return ts, pts


def _at(ts, pts, t):
    # affine interpolation on the piece containing t (t assumed inside [ts[0], ts[-1]])
    lo, hi = 0, len(ts) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= t:
            lo = mid
        else:
            hi = mid
    a, b = ts[lo], ts[hi]
    w = (t - a) / (b - a)
    return tuple(p + w * (q - p) for p, q in zip(pts[lo], pts[hi]))


def pl_sup_distance(A, B) -> Fraction:
    """Exact ``sup_t ||A(t) - B(t)||_inf`` for PL curves on a shared parameter interval.

    Between consecutive breakpoints of either curve the difference is affine,
    so its sup norm is convex there and peaks at a breakpoint.
    """
    ta, pa = _breakpoints(A)
    tb, pb = _breakpoints(B)
    if ta[0] != tb[0] or ta[-1] != tb[-1]:
        raise ValueError("curves must share their parameter interval")
    best = Fraction(0)
    for t in sorted(set(ta) | set(tb)):
        u, v = _at(ta, pa, t), _at(tb, pb, t)
        best = max(best, max(abs(x - y) for x, y in zip(u, v)))
    return best
