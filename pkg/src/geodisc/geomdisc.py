"""Discrepancy of planar point sets with respect to convex test sets.

Three test-set shapes are supported: halfplanes intersected with the unit
square, discs on the torus ``(R/Z)^2`` and convex polygons.  The supremum
over halfplanes is computed exactly; the isotropic (all convex sets) and
smooth-boundary (toroidal disc) discrepancies are reported as lower bounds.

Halfplane exactness rests on two facts.  Translating a line without
crossing a point changes the area monotonically, so an extremal line
touches a point.  Rotating a line about a point ``p`` changes the area at
rate ``(r_+^2 - r_-^2) / 2``, where ``r_+`` and ``r_-`` are the chord
lengths on either side of ``p``; the area is stationary exactly when ``p``
bisects the chord.  Candidates are therefore all lines through two points
plus, for every point, the lines it bisects (and the axis-parallel lines
through it), each evaluated with the on-line points in and out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boxdisc import DiscrepancyResult, as_points, star_disc_grid_exact, BudgetExceededError
from .pointset import make_rng

__all__ = [
    "HalfPlane",
    "TorusDisc",
    "ConvexPolygon",
    "UNIT_SQUARE",
    "clip_polygon",
    "polygon_area",
    "halfplane_square_area",
    "convex_hull",
    "local_convex_discrepancy",
    "halfplane_disc_exact",
    "halfplane_disc_sweep",
    "torus_disc_disc",
    "convex_hull_lowerbound",
    "HALFPLANE_BUDGET",
]

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
HALFPLANE_BUDGET = 2000
_TOL = 1e-12


def polygon_area(vertices) -> float:
    """Shoelace area (positive for counter-clockwise order)."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def clip_polygon(vertices, a: float, b: float, c: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to ``a x + b y <= c``."""
    out = []
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    for i in range(n):
        cur, nxt = v[i], v[(i + 1) % n]
        fc = a * cur[0] + b * cur[1] - c
        fn = a * nxt[0] + b * nxt[1] - c
        if fc <= 0:
            out.append(cur)
        if (fc < 0 < fn) or (fn < 0 < fc):
            w = fc / (fc - fn)
            out.append(cur + w * (nxt - cur))
    return np.array(out).reshape(-1, 2)


def _mean_clip(lo, hi):
    """Average of ``clip(u, 0, 1)`` over ``u in [lo, hi]`` (elementwise, ``lo <= hi``)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    mid_lo = np.clip(lo, 0.0, 1.0)
    mid_hi = np.clip(hi, 0.0, 1.0)
    ramp = (mid_hi - mid_lo) * (mid_lo + mid_hi) / 2.0
    top = np.maximum(hi - np.maximum(lo, 1.0), 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = (ramp + top) / width
    return np.where(width > 0, avg, np.clip(lo, 0.0, 1.0))


def halfplane_square_area(a, b, c):
    """Area of ``{a x + b y <= c}`` intersected with the unit square (vectorized).

    Integrates along the axis with the larger coefficient so the slice
    boundary is a bounded-slope linear function of the other coordinate.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    swap = np.abs(b) > np.abs(a)
    A = np.where(swap, b, a)
    B = np.where(swap, a, b)
    zero = A == 0
    A_safe = np.where(zero, 1.0, A)
    u0 = c / A_safe
    u1 = (c - B) / A_safe
    frac = _mean_clip(np.minimum(u0, u1), np.maximum(u0, u1))
    area = np.where(A > 0, frac, 1.0 - frac)
    area = np.where(zero, (c >= 0).astype(float), area)
    return np.clip(area, 0.0, 1.0)


@dataclass(frozen=True)
class HalfPlane:
    """``{x : <normal, x> <= offset}`` intersected with the unit square."""

    normal: tuple
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if n.shape != (2,) or not np.all(np.isfinite(n)) or np.hypot(*n) == 0:
            raise ValueError(f"invalid halfplane normal {self.normal!r}")

    def contains(self, pts, strict: bool = False) -> np.ndarray:
        r = np.asarray(pts, dtype=float) @ np.asarray(self.normal, dtype=float) - self.offset
        return r < 0 if strict else r <= 0

    def area(self) -> float:
        a, b = self.normal
        return float(halfplane_square_area(a, b, self.offset))


@dataclass(frozen=True)
class TorusDisc:
    """Disc on the torus ``(R/Z)^2``; radius at most 1/2 so it never overlaps itself."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.shape != (2,) or np.any(c < 0) or np.any(c >= 1):
            raise ValueError(f"disc center must lie in [0,1)^2, got {self.center!r}")
        if not 0.0 <= self.radius <= 0.5:
            raise ValueError(f"disc radius must be in [0, 1/2], got {self.radius}")

    def contains(self, pts, strict: bool = False) -> np.ndarray:
        d = _torus_dist(np.asarray(pts, dtype=float), np.asarray(self.center, dtype=float))
        return d < self.radius if strict else d <= self.radius

    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs at least three 2-d vertices")
        e = np.roll(v, -1, axis=0) - v
        turn = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        if np.any(turn <= 0):
            raise ValueError("polygon vertices must be strictly convex and counter-clockwise")

    def contains(self, pts, strict: bool = False) -> np.ndarray:
        v = np.asarray(self.vertices, dtype=float)
        return _in_convex(np.asarray(pts, dtype=float), v, strict)

    def area(self) -> float:
        """Area of the part inside the unit square."""
        poly = np.asarray(self.vertices, dtype=float)
        for a, b, c in ((-1, 0, 0), (1, 0, 1), (0, -1, 0), (0, 1, 1)):
            poly = clip_polygon(poly, a, b, c)
            if len(poly) < 3:
                return 0.0
        return polygon_area(poly)


def _torus_dist(pts: np.ndarray, center: np.ndarray) -> np.ndarray:
    d = np.abs(pts - center)
    d = np.minimum(d, 1.0 - d)
    return np.hypot(d[..., 0], d[..., 1])


def _in_convex(pts: np.ndarray, v: np.ndarray, strict: bool) -> np.ndarray:
    e = np.roll(v, -1, axis=0) - v
    rel = pts[:, None, :] - v[None, :, :]
    cross = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
    return (cross > _TOL).all(axis=1) if strict else (cross >= -_TOL).all(axis=1)


def local_convex_discrepancy(P, C, strict: bool = False) -> float:
    """Signed ``#{x in C}/N - area(C)`` for a planar point set."""
    P = as_points(P)
    if P.s != 2:
        raise ValueError("convex test sets need s = 2")
    if not isinstance(C, (HalfPlane, TorusDisc, ConvexPolygon)):
        raise TypeError(f"unsupported test set {type(C).__name__}")
    count = np.count_nonzero(C.contains(P.coords, strict=strict))
    return count / P.n_points - C.area()


def _bisector_directions(p: np.ndarray) -> np.ndarray:
    """Directions ``q - p`` for which ``p`` is the midpoint of the chord through it.

    The chord endpoints are the intersections of the square boundary with its
    point reflection through ``p``.
    """
    px, py = p
    lo_x, hi_x = 2 * px - 1, 2 * px
    lo_y, hi_y = 2 * py - 1, 2 * py
    qs = []
    for X in (0.0, 1.0):
        if lo_x <= X <= hi_x:
            for Y in (lo_y, hi_y):
                if 0.0 <= Y <= 1.0:
                    qs.append((X, Y))
            # collinear overlap of vertical edges
            for Y in (max(0.0, lo_y), min(1.0, hi_y)):
                if X in (lo_x, hi_x) and max(0.0, lo_y) <= min(1.0, hi_y):
                    qs.append((X, Y))
    for Y in (0.0, 1.0):
        if lo_y <= Y <= hi_y:
            for X in (lo_x, hi_x):
                if 0.0 <= X <= 1.0:
                    qs.append((X, Y))
            for X in (max(0.0, lo_x), min(1.0, hi_x)):
                if Y in (lo_y, hi_y) and max(0.0, lo_x) <= min(1.0, hi_x):
                    qs.append((X, Y))
    d = np.array(qs, dtype=float).reshape(-1, 2) - p
    return d[np.hypot(d[:, 0], d[:, 1]) > 0]


def _eval_lines(X: np.ndarray, p: np.ndarray, dirs: np.ndarray) -> float:
    """Best ``max(closed/N - area, area - open/N)`` over lines through ``p`` along ``dirs``."""
    if len(dirs) == 0:
        return 0.0
    N = X.shape[0]
    n = np.column_stack([-dirs[:, 1], dirs[:, 0]])
    rel = X - p
    resid = n @ rel.T  # (lines, points)
    tol = _TOL * np.hypot(n[:, 0], n[:, 1])[:, None]
    closed = np.count_nonzero(resid <= tol, axis=1)
    opened = np.count_nonzero(resid < -tol, axis=1)
    area = halfplane_square_area(n[:, 0], n[:, 1], n @ p)
    return float(max(np.max(closed / N - area), np.max(area - opened / N)))


def halfplane_disc_exact(P, max_points: int = HALFPLANE_BUDGET) -> DiscrepancyResult:
    """Exact supremum of ``|Delta|`` over halfplanes intersected with the unit square.

    ``O(N^3)`` time.  The value is tagged ``convex`` since halfplane sections
    are convex test sets.
    """
    P = as_points(P)
    if P.s != 2:
        raise ValueError("halfplane discrepancy needs s = 2")
    N = P.n_points
    if N > max_points:
        raise BudgetExceededError(f"N = {N} exceeds the halfplane budget {max_points}")
    # canonical order makes the result independent of point labels bit for bit
    X = P.coords[np.lexsort(P.coords.T[::-1])]
    axes = np.array([[1.0, 0.0], [0.0, 1.0]])
    best = 0.0
    for i in range(N):
        p = X[i]
        d = X[i + 1 :] - p
        d = d[np.hypot(d[:, 0], d[:, 1]) > 0]
        dirs = np.vstack([d, _bisector_directions(p), axes])
        best = max(best, _eval_lines(X, p, dirs))
    return DiscrepancyResult(min(best, 1.0), "convex", math.inf, "exact", n_points=N, dim=2)


def halfplane_disc_sweep(P, n_angles: int) -> float:
    """Exact sup over offsets for each of ``n_angles`` equispaced normal directions.

    For a fixed normal the area grows with the offset, so the supremum is
    attained at point projections (taking both one-sided limits).
    """
    P = as_points(P)
    X = P.coords
    N = X.shape[0]
    best = 0.0
    for theta in np.arange(n_angles) * (2 * math.pi / n_angles):
        a, b = math.cos(theta), math.sin(theta)
        proj = np.sort(X @ np.array([a, b]))
        area = halfplane_square_area(a, b, proj)
        # at offset proj[k]: closed count >= k+1 (ties only raise it), open count <= k
        closed = np.searchsorted(proj, proj, side="right")
        opened = np.searchsorted(proj, proj, side="left")
        best = max(best, float(np.max(closed / N - area)), float(np.max(area - opened / N)))
    return best


def torus_disc_disc(P, n_centers: int, n_radii: int) -> DiscrepancyResult:
    """Lower bound for the discrepancy over toroidal discs.

    Centers run over the grid ``(i/n, j/n)``, radii over ``k/(2 n_radii)`` for
    ``k = 1..n_radii``; containment uses toroidal distance, closed and open.
    """
    P = as_points(P)
    if P.s != 2:
        raise ValueError("torus discs need s = 2")
    N = P.n_points
    best = 0.0
    if n_centers > 0 and n_radii > 0:
        radii = np.arange(1, n_radii + 1) / (2.0 * n_radii)
        area = math.pi * radii**2
        g = np.arange(n_centers) / n_centers
        for cx in g:
            centers = np.column_stack([np.full(n_centers, cx), g])
            d = _torus_dist(P.coords[None, :, :], centers[:, None, :])
            d.sort(axis=1)
            for row in d:
                closed = np.searchsorted(row, radii, side="right")
                opened = np.searchsorted(row, radii, side="left")
                best = max(best, float(np.max(closed / N - area)), float(np.max(area - opened / N)))
    return DiscrepancyResult(min(best, 1.0), "smooth_convex", math.inf, "lower_bound", n_points=N, dim=2)


def convex_hull(pts) -> np.ndarray:
    """Counter-clockwise hull vertices by Andrew's monotone chain (collinear points dropped)."""
    pts = np.unique(np.asarray(pts, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _hull_counts(X: np.ndarray, hull: np.ndarray):
    """(closed count, open count, area) of the hull polygon, degenerate hulls included."""
    if len(hull) >= 3:
        return (np.count_nonzero(_in_convex(X, hull, False)),
                np.count_nonzero(_in_convex(X, hull, True)),
                polygon_area(hull))
    if len(hull) == 1:
        return np.count_nonzero((X == hull[0]).all(axis=1)), 0, 0.0
    a, b = hull
    ab = b - a
    rel = X - a
    cross = ab[0] * rel[:, 1] - ab[1] * rel[:, 0]
    t = rel @ ab / (ab @ ab)
    on = (np.abs(cross) <= _TOL) & (t >= -_TOL) & (t <= 1 + _TOL)
    return np.count_nonzero(on), 0, 0.0


def convex_hull_lowerbound(P, n_trials: int, seed: int = 0, n_angles: int = 64,
                           max_points=None) -> DiscrepancyResult:
    """Lower bound for the isotropic discrepancy (supremum over all convex sets).

    Candidates: every anchored box (through the exact star discrepancy),
    halfplanes with ``n_angles`` normal directions, and convex hulls of
    ``n_trials`` random point subsets.  Because anchored boxes are convex,
    the result is at least the anchored-box star discrepancy.
    """
    P = as_points(P)
    if P.s != 2:
        raise ValueError("convex hull search needs s = 2")
    # canonical order, so the random subsets do not depend on point labels
    X, N = P.coords[np.lexsort(P.coords.T[::-1])], P.n_points
    best = star_disc_grid_exact(P, max_points=max_points).value
    if n_angles > 0:
        best = max(best, halfplane_disc_sweep(P, n_angles))
    rng = make_rng(seed)
    for _ in range(n_trials):
        k = int(rng.integers(1, N + 1))
        subset = X[rng.choice(N, size=k, replace=False)]
        closed, opened, area = _hull_counts(X, convex_hull(subset))
        best = max(best, closed / N - area, area - opened / N)
    return DiscrepancyResult(float(min(best, 1.0)), "convex", math.inf, "lower_bound", n_points=N, dim=2)
