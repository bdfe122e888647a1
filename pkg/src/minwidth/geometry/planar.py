"""Exact planar primitives: affine maps, parameterized polylines, quadrants and boxes.

Coordinates are ``Fraction`` in exact mode; the same code also runs on floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


def exact(v) -> Fraction:
    """Promote a number to an exact rational (floats convert without rounding)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(float(v))


def cross(ax, ay, bx, by):
    return ax * by - ay * bx


@dataclass(frozen=True)
class Affine:
    """x -> A x + b with ``A`` given as a tuple of rows."""

    A: tuple
    b: tuple

    @classmethod
    def from_arrays(cls, A, b, as_exact: bool = True) -> "Affine":
        conv = exact if as_exact else float
        return cls(tuple(tuple(conv(v) for v in row) for row in np.asarray(A, dtype=object).tolist()),
                   tuple(conv(v) for v in np.asarray(b, dtype=object).tolist()))

    @property
    def d_in(self) -> int:
        return len(self.A[0])

    @property
    def d_out(self) -> int:
        return len(self.A)

    def __call__(self, x):
        return tuple(sum(a * v for a, v in zip(row, x)) + c for row, c in zip(self.A, self.b))

    def after(self, inner: "Affine") -> "Affine":
        """self o inner."""
        cols = list(zip(*inner.A))
        A = tuple(tuple(sum(r[k] * cols[j][k] for k in range(len(r))) for j in range(len(cols)))
                  for r in self.A)
        return Affine(A, self(inner.b))

    def det(self):
        (a, b), (c, d) = self.A
        return a * d - b * c

    def inverse(self) -> "Affine":
        (a, b), (c, d) = self.A
        det = a * d - b * c
        if det == 0:
            raise ZeroDivisionError("singular affine map")
        Ai = ((d / det, -b / det), (-c / det, a / det))
        e, f = self.b
        return Affine(Ai, (-(Ai[0][0] * e + Ai[0][1] * f), -(Ai[1][0] * e + Ai[1][1] * f)))

    def to_float(self) -> "Affine":
        return Affine(tuple(tuple(float(v) for v in r) for r in self.A), tuple(float(v) for v in self.b))


@dataclass(frozen=True)
class Polyline:
    """Curve t -> R^2, linear between vertices, with strictly increasing parameters."""

    ts: tuple
    points: tuple

    def __post_init__(self):
        if len(self.ts) != len(self.points) or len(self.ts) < 1:
            raise ValueError("polyline needs matching, nonempty parameter and point lists")
        if any(b <= a for a, b in zip(self.ts, self.ts[1:])):
            raise ValueError("polyline parameters must be strictly increasing")

    @classmethod
    def from_vertices(cls, ts: Sequence, points: Sequence, as_exact: bool = True) -> "Polyline":
        conv = exact if as_exact else float
        return cls(tuple(conv(t) for t in ts), tuple((conv(p[0]), conv(p[1])) for p in points))

    def __len__(self):
        return len(self.ts)

    @property
    def vertices(self):
        return list(zip(self.ts, self.points))

    @property
    def t_range(self):
        return self.ts[0], self.ts[-1]

    def segments(self):
        return list(zip(self.points, self.points[1:]))

    def __call__(self, t):
        ts = self.ts
        if t < ts[0] or t > ts[-1]:
            raise ValueError("parameter outside the polyline's range")
        lo, hi = 0, len(ts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ts[mid] <= t:
                lo = mid
            else:
                hi = mid
        if hi == lo:
            return self.points[lo]
        w = (t - ts[lo]) / (ts[hi] - ts[lo])
        (ax, ay), (bx, by) = self.points[lo], self.points[hi]
        return (ax + w * (bx - ax), ay + w * (by - ay))

    def evaluate_float(self, t) -> np.ndarray:
        ts = np.array([float(v) for v in self.ts])
        P = np.array([[float(x), float(y)] for x, y in self.points])
        t = np.asarray(t, dtype=np.float64)
        return np.stack([np.interp(t, ts, P[:, 0]), np.interp(t, ts, P[:, 1])], axis=-1)

    def restrict(self, a, b) -> "Polyline":
        """Sub-curve on [a, b], with vertices inserted at the ends."""
        inner = [(t, p) for t, p in zip(self.ts, self.points) if a < t < b]
        verts = [(a, self(a))] + inner + ([(b, self(b))] if b > a else [])
        return Polyline(tuple(t for t, _ in verts), tuple(p for _, p in verts))

    def map(self, f: Affine) -> "Polyline":
        return Polyline(self.ts, tuple(f(p) for p in self.points))

    def to_float(self) -> "Polyline":
        return Polyline(tuple(float(t) for t in self.ts), tuple((float(x), float(y)) for x, y in self.points))

    def simplified(self) -> "Polyline":
        """Drop vertices that lie exactly on the parametric interpolation of their neighbours."""
        if len(self.ts) <= 2:
            return self
        ts, ps = [self.ts[0]], [self.points[0]]
        for i in range(1, len(self.ts) - 1):
            t0, p0 = ts[-1], ps[-1]
            t1, p1 = self.ts[i + 1], self.points[i + 1]
            w = (self.ts[i] - t0) / (t1 - t0)
            guess = (p0[0] + w * (p1[0] - p0[0]), p0[1] + w * (p1[1] - p0[1]))
            if guess != self.points[i]:
                ts.append(self.ts[i])
                ps.append(self.points[i])
        ts.append(self.ts[-1])
        ps.append(self.points[-1])
        return Polyline(tuple(ts), tuple(ps))

    def to_csv_rows(self):
        return [(float(t), float(x), float(y)) for t, (x, y) in zip(self.ts, self.points)]


@dataclass(frozen=True)
class Quadrant:
    """S = {x : <a1, x> + b1 >= 0, <a2, x> + b2 >= 0}, i.e. phi(x) >= 0 coordinatewise."""

    a1: tuple
    a2: tuple
    b1: object
    b2: object

    @classmethod
    def of(cls, phi: Affine) -> "Quadrant":
        return cls(phi.A[0], phi.A[1], phi.b[0], phi.b[1])

    def values(self, x):
        return (self.a1[0] * x[0] + self.a1[1] * x[1] + self.b1,
                self.a2[0] * x[0] + self.a2[1] * x[1] + self.b2)

    def contains(self, x) -> bool:
        u, v = self.values(x)
        return u >= 0 and v >= 0

    def on_boundary(self, x) -> bool:
        u, v = self.values(x)
        return u >= 0 and v >= 0 and (u == 0 or v == 0)


@dataclass(frozen=True)
class Box:
    """Open axis-aligned rectangle (x0, x1) x (y0, y1)."""

    x0: Fraction = Fraction(-2)
    x1: Fraction = Fraction(2)
    y0: Fraction = Fraction(-1)
    y1: Fraction = Fraction(1)

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("box must be nonempty")

    @property
    def corners(self):
        return [(self.x0, self.y0), (self.x1, self.y0), (self.x1, self.y1), (self.x0, self.y1)]

    @property
    def edge_midpoints(self):
        mx, my = (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2
        return [(mx, self.y0), (self.x1, my), (mx, self.y1), (self.x0, my)]

    def boundary(self) -> list:
        c = self.corners
        return c + [c[0]]

    def contains(self, p) -> bool:
        return self.x0 < p[0] < self.x1 and self.y0 < p[1] < self.y1


def point_on_segment(p, a, b) -> bool:
    if cross(b[0] - a[0], b[1] - a[1], p[0] - a[0], p[1] - a[1]) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _orient(a, b, c):
    v = cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1])
    return (v > 0) - (v < 0)


def segments_intersect(a, b, c, d) -> bool:
    """Closed segments [a, b] and [c, d] share a point."""
    if (max(a[0], b[0]) < min(c[0], d[0]) or max(c[0], d[0]) < min(a[0], b[0])
            or max(a[1], b[1]) < min(c[1], d[1]) or max(c[1], d[1]) < min(a[1], b[1])):
        return False
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and point_on_segment(c, a, b)) or (o2 == 0 and point_on_segment(d, a, b))
            or (o3 == 0 and point_on_segment(a, c, d)) or (o4 == 0 and point_on_segment(b, c, d)))


def polylines_intersect(P: Polyline, Q: Polyline) -> bool:
    segs_p = P.segments() or [(P.points[0], P.points[0])]
    segs_q = Q.segments() or [(Q.points[0], Q.points[0])]
    for a, b in segs_p:
        bx0, bx1 = min(a[0], b[0]), max(a[0], b[0])
        by0, by1 = min(a[1], b[1]), max(a[1], b[1])
        for c, d in segs_q:
            if max(c[0], d[0]) < bx0 or min(c[0], d[0]) > bx1 or max(c[1], d[1]) < by0 or min(c[1], d[1]) > by1:
                continue
            if segments_intersect(a, b, c, d):
                return True
    return False


def sup_point_segment(p, a, b):
    """min over the segment of the sup-norm distance to ``p`` (exact).

    The distance along the segment is convex and piecewise linear in the
    segment parameter; its minimum sits at an endpoint, where one coordinate
    gap vanishes, or where the two gaps have equal magnitude.
    """
    dx, dy = b[0] - a[0], b[1] - a[1]
    ex, ey = a[0] - p[0], a[1] - p[1]
    cands = {0, 1}
    if dx != 0:
        cands.add(-ex / dx)
    if dy != 0:
        cands.add(-ey / dy)
    if dx != dy:
        cands.add((ey - ex) / (dx - dy))
    if dx != -dy:
        cands.add(-(ex + ey) / (dx + dy))
    best = None
    for s in cands:
        if 0 <= s <= 1:
            v = max(abs(ex + s * dx), abs(ey + s * dy))
            best = v if best is None or v < best else best
    return best


def sup_segment_segment(a, b, c, d):
    """Exact sup-norm distance between two closed segments."""
    if segments_intersect(a, b, c, d):
        return Fraction(0) if isinstance(a[0], Fraction) else 0.0
    return min(sup_point_segment(a, c, d), sup_point_segment(b, c, d),
               sup_point_segment(c, a, b), sup_point_segment(d, a, b))
