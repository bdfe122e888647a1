"""Even-odd parity of a point against closed polygonal barriers, with exact predicates."""
from __future__ import annotations

from fractions import Fraction

from .planar import Box, Polyline, cross, exact, point_on_segment

# eight rational directions spread around the circle, none axis-aligned
FAN = tuple((Fraction(x), Fraction(y)) for x, y in
            [(7, 2), (2, 7), (-3, 8), (-8, 3), (-7, -2), (-2, -7), (3, -8), (8, -3)])


class OnBarrierError(ValueError):
    pass


class InconsistentParityError(ArithmeticError):
    pass


def loop_segments(loop) -> list:
    """Segments of a closed loop; an open vertex list is closed by its chord."""
    pts = list(loop.points if isinstance(loop, Polyline) else loop)
    pts = [(exact(x), exact(y)) for x, y in pts]
    if pts[0] != pts[-1]:
        pts.append(pts[0])
    return [(a, b) for a, b in zip(pts, pts[1:]) if a != b]


def barrier_segments(loops=(), box: Box | None = None) -> list:
    segs = []
    for loop in loops:
        segs.extend(loop_segments(loop))
    if box is not None:
        segs.extend(loop_segments(box.corners))
    return segs


def _count(x, d, segs):
    """Number of proper crossings of the ray x + s d (s > 0); None when degenerate."""
    n = 0
    for a, b in segs:
        ex, ey = b[0] - a[0], b[1] - a[1]
        wx, wy = a[0] - x[0], a[1] - x[1]
        denom = cross(d[0], d[1], ex, ey)
        if denom == 0:
            if cross(wx, wy, d[0], d[1]) == 0:
                # collinear: degenerate if the segment reaches the ray
                sa = wx * d[0] + wy * d[1]
                sb = (b[0] - x[0]) * d[0] + (b[1] - x[1]) * d[1]
                if sa >= 0 or sb >= 0:
                    return None
            continue
        s = cross(wx, wy, ex, ey) / denom
        u = cross(wx, wy, d[0], d[1]) / denom
        if s <= 0 or u < 0 or u > 1:
            continue
        if u == 0 or u == 1:
            return None
        n += 1
    return n & 1


def parity_along(point, segs, direction, max_tries: int = 64) -> int:
    """Parity along one fan direction, nudged deterministically past degeneracies."""
    d = direction
    for k in range(max_tries):
        r = _count(point, d, segs)
        if r is not None:
            return r
        # rotate by a small rational step
        step = Fraction(1, 97 + k)
        d = (d[0] - step * d[1], d[1] + step * d[0])
    raise ArithmeticError("no non-degenerate ray found")  # pragma: no cover


def parity_fan(point, loops=(), box: Box | None = None) -> list:
    x = (exact(point[0]), exact(point[1]))
    segs = barrier_segments(loops, box)
    for a, b in segs:
        if point_on_segment(x, a, b):
            raise OnBarrierError(f"point {point} lies on the barrier")
    return [parity_along(x, segs, d) for d in FAN]


def parity(point, loops=(), box: Box | None = None) -> int:
    """1 if ``point`` is in a bounded component of the complement of the barrier, else 0.

    ``loops`` are closed polylines (or vertex lists closed by their chord);
    ``box`` adds a rectangle boundary. Every ray in the fan must agree.
    """
    votes = parity_fan(point, loops, box)
    if len(set(votes)) != 1:
        raise InconsistentParityError(f"ray fan disagrees: {votes}")
    return votes[0]
