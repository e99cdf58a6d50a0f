"""Discrepancy with respect to boxes anchored at the origin.

Conventions
-----------
The half-open boxes ``[0, t)`` and the closed boxes ``[0, t]`` give the same
local discrepancy except when a point lies on the box boundary.  Every
supremum computed here is taken over both one-sided limits, i.e. over the
counts ``#{x < t}`` and ``#{x <= t}`` (componentwise) at each candidate
anchor, so it equals the supremum over either family.  :func:`local_box_discrepancy`
uses closed boxes by default.

Large pairwise sums are accumulated per row block with numpy and the block
partials are combined with :func:`math.fsum`, so results do not depend on
the blocking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .pointset import UnitCubePoints, make_rng

__all__ = [
    "DiscrepancyResult",
    "BudgetExceededError",
    "FunctionSpec1D",
    "KoksmaReport",
    "EXACT_BUDGET",
    "FAMILIES",
    "METHODS",
    "as_points",
    "local_box_discrepancy",
    "star_disc_1d_exact",
    "star_disc_grid_exact",
    "star_disc_estimate",
    "l2_star_closed_form",
    "lq_disc_1d_exact",
    "lq_disc_mc",
    "koksma_check",
    "builtin_functions",
]

FAMILIES = ("anchored_box", "convex", "smooth_convex", "spherical_cap", "weighted_box", "pushback")
METHODS = ("exact", "lower_bound", "estimate")

# Max N for exact anchored-box enumeration, per dimension.
EXACT_BUDGET = {1: None, 2: 512, 3: 128}

_ROW_BLOCK = 256


class BudgetExceededError(ValueError):
    """An exact enumeration would exceed its configured size budget."""


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    family: str
    q: float
    method: str
    error_hint: Optional[float] = None
    n_points: Optional[int] = None
    dim: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.value >= 0.0 and self.value <= 1.0 + 1e-12):
            raise ValueError(f"discrepancy value {self.value!r} outside [0, 1]")
        if self.method == "exact" and self.error_hint is not None:
            raise ValueError("exact results carry no error hint")
        if self.error_hint is not None and self.error_hint < 0:
            raise ValueError("error hint must be non-negative")
        if not (self.q >= 1.0):
            raise ValueError(f"exponent q must be >= 1, got {self.q}")

    def __float__(self) -> float:
        return float(self.value)

    def as_row(self) -> list:
        """``family,q,method,N,s,value,error_hint`` with 17 significant digits."""
        q = "inf" if math.isinf(self.q) else f"{self.q:.17g}"
        hint = "" if self.error_hint is None else f"{self.error_hint:.17g}"
        n = "" if self.n_points is None else str(self.n_points)
        s = "" if self.dim is None else str(self.dim)
        return [self.family, q, self.method, n, s, f"{self.value:.17g}", hint]


RESULT_HEADER = ["family", "q", "method", "N", "s", "value", "error_hint"]


def as_points(P) -> UnitCubePoints:
    return P if isinstance(P, UnitCubePoints) else UnitCubePoints(P)


def _fsum_blocks(func, n_rows: int, block: int = _ROW_BLOCK) -> float:
    """fsum of ``func(lo, hi)`` over fixed row blocks of ``range(n_rows)``."""
    return math.fsum(float(func(lo, min(lo + block, n_rows))) for lo in range(0, n_rows, block))


def local_box_discrepancy(P, t, closed: bool = True) -> float:
    """Signed local discrepancy ``#{x in [0,t]}/N - prod(t)``.

    With ``closed=False`` the half-open box ``[0, t)`` is used instead.
    """
    P = as_points(P)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (P.s,):
        raise ValueError(f"anchor must have {P.s} coordinates, got shape {t.shape}")
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError("anchor must lie in [0, 1]^s")
    inside = P.coords <= t if closed else P.coords < t
    return float(np.count_nonzero(inside.all(axis=1)) / P.n_points - np.prod(t))


def star_disc_1d_exact(P) -> DiscrepancyResult:
    """Exact star discrepancy of a one-dimensional point set.

    With sorted points ``y_1 <= ... <= y_N`` the supremum is
    ``max_n max(n/N - y_n, y_n - (n-1)/N)``.
    """
    P = as_points(P)
    if P.s != 1:
        raise ValueError("star_disc_1d_exact needs s = 1")
    y = np.sort(P.coords[:, 0], kind="stable")
    N = y.size
    n = np.arange(1, N + 1)
    value = float(max(np.max(n / N - y), np.max(y - (n - 1) / N)))
    return DiscrepancyResult(value, "anchored_box", math.inf, "exact", n_points=N, dim=1)


def _axis_grid(col: np.ndarray):
    """Sorted unique coordinates with 1 appended, and each point's rank."""
    vals, ranks = np.unique(col, return_inverse=True)
    return np.append(vals, 1.0), ranks


def star_disc_grid_exact(P, max_points: Optional[int] = None) -> DiscrepancyResult:
    """Exact anchored-box star discrepancy for ``s <= 3`` by grid enumeration.

    Candidate anchors are the products of per-axis coordinate values (with 1
    appended).  Closed counts come from a cumulative histogram over the rank
    grid; the open count at an anchor equals the closed count at the
    componentwise predecessor.  The supremum is
    ``max(C(t)/N - vol(t), vol(t) - O(t)/N)`` over all candidates.

    Raises
    ------
    BudgetExceededError
        If ``N`` exceeds ``max_points`` (default ``EXACT_BUDGET[s]``).
    """
    P = as_points(P)
    s, N = P.s, P.n_points
    if s not in EXACT_BUDGET:
        raise ValueError(f"exact grid enumeration supports s <= 3, got s = {s}")
    limit = EXACT_BUDGET[s] if max_points is None else max_points
    if limit is not None and N > limit:
        raise BudgetExceededError(
            f"N = {N} exceeds the exact budget {limit} for s = {s}; use star_disc_estimate"
        )
    grids, ranks = zip(*(_axis_grid(P.coords[:, j]) for j in range(s)))
    shape = tuple(g.size for g in grids)
    hist = np.zeros(shape, dtype=np.int64)
    np.add.at(hist, tuple(ranks), 1)

    if s <= 2:
        closed = hist
        for ax in range(s):
            closed = np.cumsum(closed, axis=ax)
        vol = grids[0] if s == 1 else np.multiply.outer(grids[0], grids[1])
        opened = np.zeros_like(closed)
        opened[(slice(1, None),) * s] = closed[(slice(None, -1),) * s]
        value = max(np.max(closed / N - vol), np.max(vol - opened / N))
    else:
        # sweep the first axis, holding a running 2-d cumulative plane
        plane_vol = np.multiply.outer(grids[1], grids[2])
        running = np.zeros(shape[1:], dtype=np.int64)
        value = 0.0
        for i, t0 in enumerate(grids[0]):
            prev = running
            running = prev + np.cumsum(np.cumsum(hist[i], axis=0), axis=1)
            vol = t0 * plane_vol
            opened = np.zeros_like(prev)
            opened[1:, 1:] = prev[:-1, :-1]
            value = max(value, np.max(running / N - vol), np.max(vol - opened / N))
    return DiscrepancyResult(float(value), "anchored_box", math.inf, "exact", n_points=N, dim=s)


def _candidate_anchors(P: UnitCubePoints, n_candidates: int, seed: int) -> np.ndarray:
    """Deterministic anchor stream; a shorter stream is a prefix of a longer one.

    Even slots combine random point coordinates per axis (or 1); odd slots
    are random points of the dyadic grid one level finer than ``N``.  Each
    axis draws from its sorted coordinates, so the stream does not depend on
    the order of the points.
    """
    rng = make_rng(seed)
    s, N = P.s, P.n_points
    level = max(1, int(math.ceil(math.log2(N))) + 1)
    pool = np.vstack([np.sort(P.coords, axis=0), np.ones((1, s))])
    out = np.empty((n_candidates, s))
    for k in range(n_candidates):
        if k % 2 == 0:
            rows = rng.integers(0, N + 1, size=s)
            out[k] = pool[rows, np.arange(s)]
        else:
            out[k] = rng.integers(1, (1 << level) + 1, size=s) / float(1 << level)
    return out


def _sup_at_anchors(coords: np.ndarray, anchors: np.ndarray) -> float:
    N = coords.shape[0]
    best = 0.0
    for lo in range(0, anchors.shape[0], _ROW_BLOCK):
        T = anchors[lo : lo + _ROW_BLOCK]
        le = (coords[None, :, :] <= T[:, None, :]).all(axis=2).sum(axis=1)
        lt = (coords[None, :, :] < T[:, None, :]).all(axis=2).sum(axis=1)
        vol = T.prod(axis=1)
        best = max(best, float(np.max(le / N - vol)), float(np.max(vol - lt / N)))
    return best


def star_disc_estimate(P, n_candidates: int, seed: int = 0) -> DiscrepancyResult:
    """Lower bound on the star discrepancy from ``n_candidates`` sampled anchors.

    Works in any dimension.  Candidate streams are nested in
    ``n_candidates``, so the bound is nondecreasing in it.
    """
    P = as_points(P)
    if n_candidates < 0:
        raise ValueError("n_candidates must be >= 0")
    value = 0.0
    if n_candidates:
        value = _sup_at_anchors(P.coords, _candidate_anchors(P, n_candidates, seed))
    return DiscrepancyResult(value, "anchored_box", math.inf, "lower_bound", n_points=P.n_points, dim=P.s)


def l2_star_closed_form(P) -> DiscrepancyResult:
    """L2 star discrepancy via the pairwise-product expansion of ``int Delta^2``:

    ``3^-s - (2/N) sum_n prod_j (1 - x_nj^2)/2 + (1/N^2) sum_{n,m} prod_j (1 - max(x_nj, x_mj))``.
    """
    P = as_points(P)
    X = P.coords
    N, s = X.shape
    single = math.fsum(np.prod((1.0 - X**2) / 2.0, axis=1))

    def pair_block(lo, hi):
        return np.prod(1.0 - np.maximum(X[lo:hi, None, :], X[None, :, :]), axis=2).sum()

    pair = _fsum_blocks(pair_block, N)
    sq = math.fsum([3.0**-s, -2.0 * single / N, pair / N**2])
    if sq < -1e-12:
        raise ArithmeticError(f"negative squared L2 discrepancy {sq!r}")
    return DiscrepancyResult(math.sqrt(max(sq, 0.0)), "anchored_box", 2.0, "exact", n_points=N, dim=s)


def lq_disc_1d_exact(P, q: float) -> DiscrepancyResult:
    """Exact ``(int_0^1 |Delta(t)|^q dt)^(1/q)`` for ``s = 1``.

    Between consecutive sorted points ``Delta(t) = k/N - t``; each piece is
    integrated with the antiderivative ``(t - c)|t - c|^q / (q + 1)``.
    """
    P = as_points(P)
    if P.s != 1:
        raise ValueError("lq_disc_1d_exact needs s = 1")
    if not (1.0 <= q < math.inf):
        raise ValueError(f"q must satisfy 1 <= q < inf, got {q}")
    y = np.sort(P.coords[:, 0], kind="stable")
    N = y.size
    knots = np.concatenate([[0.0], y, [1.0]])
    a, b = knots[:-1], knots[1:]
    c = np.arange(N + 1) / N

    def G(t):
        d = t - c
        return d * np.abs(d) ** q / (q + 1.0)

    total = math.fsum(G(b) - G(a))
    return DiscrepancyResult(max(total, 0.0) ** (1.0 / q), "anchored_box", float(q), "exact", n_points=N, dim=1)


def lq_disc_mc(P, q: float, n_samples: int, seed: int = 0, n_boot: int = 200) -> DiscrepancyResult:
    """Monte Carlo estimate of the L^q discrepancy over uniform anchors.

    ``error_hint`` is the bootstrap standard error of the estimate.
    """
    P = as_points(P)
    if not (1.0 <= q < math.inf):
        raise ValueError(f"q must satisfy 1 <= q < inf, got {q}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = make_rng(seed)
    X, N = P.coords, P.n_points
    T = rng.random((n_samples, P.s))
    vals = np.empty(n_samples)
    for lo in range(0, n_samples, 4096):
        Tb = T[lo : lo + 4096]
        cnt = (X[None, :, :] <= Tb[:, None, :]).all(axis=2).sum(axis=1)
        vals[lo : lo + 4096] = np.abs(cnt / N - Tb.prod(axis=1)) ** q
    est = math.fsum(vals) / n_samples
    value = est ** (1.0 / q)
    hint = 0.0
    if n_samples > 1 and n_boot > 0:
        idx = rng.integers(0, n_samples, size=(n_boot, n_samples))
        boots = vals[idx].mean(axis=1) ** (1.0 / q)
        hint = float(np.std(boots, ddof=1))
    return DiscrepancyResult(float(min(value, 1.0)), "anchored_box", float(q), "estimate", hint, N, P.s)


@dataclass
class FunctionSpec1D:
    """A test integrand on ``[0, 1]`` with its derivative and exact integral.

    ``norms`` maps an exponent ``p`` to the exact value of ``||f'||_p``;
    other exponents fall back to adaptive quadrature.
    """

    name: str
    f: Callable
    f_prime: Callable
    integral: float
    norms: dict = field(default_factory=dict)

    def variation_norm(self, p: float) -> float:
        if p in self.norms:
            return self.norms[p]
        if math.isinf(p):
            grid = np.linspace(0.0, 1.0, 100_001)
            return float(np.max(np.abs(self.f_prime(grid))))
        val, _ = integrate.quad(lambda t: abs(self.f_prime(t)) ** p, 0.0, 1.0, limit=200)
        return val ** (1.0 / p)


def builtin_functions() -> list:
    """Integrands used by the Koksma inequality checks."""
    pi = math.pi
    return [
        FunctionSpec1D("linear", lambda x: x, lambda x: np.ones_like(x), 0.5, {1: 1.0, 2: 1.0, math.inf: 1.0}),
        FunctionSpec1D("square", lambda x: x**2, lambda x: 2 * x, 1 / 3, {1: 1.0, 2: 2 / math.sqrt(3), math.inf: 2.0}),
        FunctionSpec1D("cubic", lambda x: x**3 - x, lambda x: 3 * x**2 - 1, 0.25 - 0.5),
        FunctionSpec1D("sine", lambda x: np.sin(pi * x), lambda x: pi * np.cos(pi * x), 2 / pi,
                       {1: 2.0, 2: pi / math.sqrt(2), math.inf: pi}),
        FunctionSpec1D("exp", np.exp, np.exp, math.e - 1,
                       {1: math.e - 1, 2: math.sqrt((math.e**2 - 1) / 2), math.inf: math.e}),
        FunctionSpec1D("cos2pi", lambda x: np.cos(2 * pi * x), lambda x: -2 * pi * np.sin(2 * pi * x), 0.0,
                       {1: 4.0, math.inf: 2 * pi}),
        FunctionSpec1D("sqrt_shift", lambda x: np.sqrt(x + 0.1), lambda x: 0.5 / np.sqrt(x + 0.1),
                       (2 / 3) * (1.1**1.5 - 0.1**1.5), {1: math.sqrt(1.1) - math.sqrt(0.1)}),
        FunctionSpec1D("kink", lambda x: np.abs(x - 0.3), lambda x: np.sign(x - 0.3), (0.3**2 + 0.7**2) / 2,
                       {1: 1.0, 2: 1.0, math.inf: 1.0}),
    ]


@dataclass(frozen=True)
class KoksmaReport:
    lhs: float
    rhs: float
    holds: bool
    p: float
    q: float


def _conjugate(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lq_or_star_1d(P, q: float) -> float:
    return star_disc_1d_exact(P).value if math.isinf(q) else lq_disc_1d_exact(P, q).value


def koksma_check(f: FunctionSpec1D, P, p: float, q: Optional[float] = None) -> KoksmaReport:
    """Check ``|int f - mean f(x_n)| <= ||f'||_p * L^q(P)`` for Hölder conjugates p, q."""
    P = as_points(P)
    if P.s != 1:
        raise ValueError("koksma_check needs a one-dimensional point set")
    if p < 1:
        raise ValueError(f"Hölder exponent p must be >= 1, got {p}")
    qq = _conjugate(p)
    if q is not None and not (q == qq or math.isclose(q, qq, rel_tol=1e-12)):
        raise ValueError(f"p = {p} and q = {q} are not Hölder conjugates")
    lhs = abs(f.integral - math.fsum(np.asarray(f.f(P.coords[:, 0]), dtype=float)) / P.n_points)
    rhs = f.variation_norm(p) * lq_or_star_1d(P, qq)
    return KoksmaReport(lhs, rhs, lhs <= rhs + 1e-12, p, qq)
