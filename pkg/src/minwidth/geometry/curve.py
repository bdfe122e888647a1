"""The planar target curve that width-2 ReLU networks cannot approximate uniformly."""
from __future__ import annotations

import csv
from fractions import Fraction as F
from functools import lru_cache

from .planar import Box, Polyline, polylines_intersect, sup_segment_segment

P1 = F(1, 3)
P2 = F(2, 3)
# red part: (4,3) -> (0,3) on [0, 1/6], then (0,3) -> (0,0) on [1/6, 1/3]
Q = F(11, 36)
Q_POINT = (F(0), F(1, 2))
TOLERANCE = F(1, 100)
NEAR = F(2, 100)

_VERTICES = [
    (F(0), (4, 3)),
    (F(1, 6), (0, 3)),
    (P1, (0, 0)),
    (P2, (-1, 0)),
    (P2 + F(1, 15), (-1, 6)),
    (P2 + F(2, 15), (6, 6)),
    (P2 + F(3, 15), (6, 2)),
    (P2 + F(4, 15), (1, 2)),
    (F(1), (1, 0)),
]


def _crossings(curve: Polyline, box: Box):
    """Points where the curve meets the top edge of the box."""
    out = []
    for (a, b) in curve.segments():
        if (a[1] - box.y1) * (b[1] - box.y1) <= 0 and a[1] != b[1]:
            s = (box.y1 - a[1]) / (b[1] - a[1])
            out.append((a[0] + s * (b[0] - a[0]), box.y1))
    return out


def red_blue_separation(curve: Polyline):
    red, blue = curve.restrict(F(0), P1), curve.restrict(P2, F(1))
    return min(sup_segment_segment(a, b, c, d) for a, b in red.segments() for c, d in blue.segments())


def _near(p, c) -> bool:
    return max(abs(p[0] - c[0]), abs(p[1] - c[1])) <= NEAR


def _check(curve: Polyline) -> None:
    box = Box()
    red, blue = curve.restrict(F(0), P1), curve.restrict(P2, F(1))
    blue_cross = _crossings(blue, box)
    checks = {
        "endpoints": curve(F(0)) == (4, 3) and curve(F(1)) == (1, 0),
        "waypoints": curve(P1) == (0, 0) and curve(P2) == (-1, 0),
        "q": curve(Q) == Q_POINT and 0 < Q < P1,
        "disjoint": not polylines_intersect(red, blue),
        "separation": red_blue_separation(curve) >= 1,
        "red entry": any(_near(p, (0, 1)) for p in _crossings(red, box)),
        "blue crossings": any(_near(p, (-1, 1)) for p in blue_cross) and any(_near(p, (1, 1)) for p in blue_cross),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise AssertionError(f"counterexample curve violates: {', '.join(failed)}")


@lru_cache(maxsize=1)
def counterexample_curve() -> Polyline:
    """Red (4,3)->(0,3)->(0,0) on [0,1/3], black to (-1,0) on [1/3,2/3], blue loop back to (1,0)."""
    curve = Polyline(tuple(t for t, _ in _VERTICES), tuple((F(x), F(y)) for _, (x, y) in _VERTICES))
    _check(curve)
    return curve


def write_curve_csv(path, curve: Polyline | None = None) -> None:
    curve = counterexample_curve() if curve is None else curve
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for t, (x, y) in zip(curve.ts, curve.points):
            w.writerow([float(t), float(x), float(y)])
