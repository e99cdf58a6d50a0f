"""Point sets on the 2-sphere and their spherical cap L2 discrepancy.

A cap ``C(x, t) = {z : <z, x> > t}`` has normalized surface measure
``(1 - t) / 2``.  The squared cap L2 discrepancy is

    int_{-1}^{1} int_{S^2} ( #{z_n in C(x,t)} / N - (1 - t)/2 )^2 dsigma(x) dt

with ``sigma`` the normalized surface measure.  (For general exponents q the
integrand is ``|.|^q`` and the outer power ``1/q``.)

Two independent routes are provided: a direct tensor quadrature over cap
centers and heights, and the sum-of-distances identity

    L2^2 = STOLARSKY_C2 * (MEAN_DISTANCE_S2 - (1/N^2) sum_{n,m} |z_n - z_m|),

which costs ``O(N^2)``.  Both constants were calibrated with
``scripts/calibrate_sphere.py`` (Monte Carlo for the mean distance, a
least-squares match against the quadrature route for the factor); see that
script for the recorded numbers.

The Lambert map sends the bottom edge ``y = 0`` of the square to the north
pole and ``y = 1`` to the south pole; no special handling is needed there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boxdisc import DiscrepancyResult, as_points, _fsum_blocks
from .pointset import sobol_net

__all__ = [
    "SpherePoints",
    "SphericalCap",
    "MEAN_DISTANCE_S2",
    "STOLARSKY_C2",
    "lambert_map",
    "inverse_lambert",
    "cap_local_discrepancy",
    "mean_pairwise_distance",
    "cap_l2_disc_closed_form",
    "cap_l2_disc_quadrature",
    "figure1_experiment",
    "FIG1_MAX_M",
]

# Calibrated and frozen; see module docstring.
MEAN_DISTANCE_S2 = 4.0 / 3.0
STOLARSKY_C2 = 0.25

FIG1_MAX_M = 14


@dataclass(frozen=True)
class SpherePoints:
    """Unit vectors in R^3 stored as an ``(N, 3)`` array."""

    coords: np.ndarray
    d: int = 2

    def __post_init__(self):
        if self.d != 2:
            raise ValueError("only the 2-sphere is supported")
        arr = np.array(self.coords, dtype=float).reshape(-1, 3)
        if arr.shape[0] < 1:
            raise ValueError("need at least one point")
        norms = np.linalg.norm(arr, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("sphere points must have unit norm (to 1e-12)")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class SphericalCap:
    center: tuple
    height: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.shape != (3,) or abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise ValueError("cap center must be a unit vector in R^3")
        if not -1.0 <= self.height <= 1.0:
            raise ValueError(f"cap height must lie in [-1, 1], got {self.height}")

    @property
    def measure(self) -> float:
        return (1.0 - self.height) / 2.0


def lambert_map(P) -> SpherePoints:
    """Area-preserving map from the unit square onto the 2-sphere.

    ``(x, y) -> (2 cos(2 pi x) r, 2 sin(2 pi x) r, 1 - 2y)`` with
    ``r = sqrt(y - y^2)``.
    """
    P = as_points(P)
    if P.s != 2:
        raise ValueError("the Lambert map needs s = 2")
    x, y = P.coords[:, 0], P.coords[:, 1]
    r = 2.0 * np.sqrt(y - y * y)
    Z = np.column_stack([r * np.cos(2 * np.pi * x), r * np.sin(2 * np.pi * x), 1.0 - 2.0 * y])
    # renormalize away last-bit rounding
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return SpherePoints(Z)


def inverse_lambert(Z) -> np.ndarray:
    """Preimage in ``[0,1)^2`` of sphere points (longitude of the poles is 0)."""
    Z = np.asarray(Z, dtype=float).reshape(-1, 3)
    x = np.mod(np.arctan2(Z[:, 1], Z[:, 0]) / (2 * np.pi), 1.0)
    x = np.where(x >= 1.0, 0.0, x)
    y = np.clip((1.0 - Z[:, 2]) / 2.0, 0.0, 1.0)
    return np.column_stack([x, y])


def _as_sphere(S) -> SpherePoints:
    return S if isinstance(S, SpherePoints) else SpherePoints(S)


def cap_local_discrepancy(S, cap: SphericalCap) -> float:
    """``#{<z_n, x> > t} / N - (1 - t)/2``; boundary points count as outside."""
    S = _as_sphere(S)
    inside = S.coords @ np.asarray(cap.center, dtype=float) > cap.height
    return np.count_nonzero(inside) / S.n_points - cap.measure


def mean_pairwise_distance(S) -> float:
    """``(1/N^2) sum_{n,m} |z_n - z_m|`` with blockwise compensated summation."""
    Z = _as_sphere(S).coords
    N = Z.shape[0]

    def block(lo, hi):
        diff = Z[lo:hi, None, :] - Z[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).sum()

    return _fsum_blocks(block, N) / N**2


def cap_l2_disc_closed_form(S) -> DiscrepancyResult:
    """Cap L2 discrepancy from the mean pairwise Euclidean distance, ``O(N^2)``."""
    S = _as_sphere(S)
    sq = STOLARSKY_C2 * (MEAN_DISTANCE_S2 - mean_pairwise_distance(S))
    if sq < -1e-12:
        raise ArithmeticError(f"negative squared cap discrepancy {sq!r}")
    return DiscrepancyResult(math.sqrt(max(sq, 0.0)), "spherical_cap", 2.0, "exact",
                             n_points=S.n_points, dim=2)


def _quadrature_sq(Z: np.ndarray, centers: np.ndarray, t: np.ndarray, w: np.ndarray) -> float:
    N = Z.shape[0]
    meas = (1.0 - t) / 2.0
    partial = []
    for lo in range(0, centers.shape[0], 64):
        proj = centers[lo : lo + 64] @ Z.T  # (chunk, N)
        counts = (proj[:, :, None] > t[None, None, :]).sum(axis=1)
        delta = counts / N - meas
        partial.append(float((delta**2 @ w).sum()))
    return math.fsum(partial) / centers.shape[0]


def _sobol_centers(n: int) -> np.ndarray:
    m = max(0, int(math.ceil(math.log2(n))))
    P = sobol_net(m, 2).coords[:n]
    # nudge off the pole row y = 0 so no center is degenerate
    P = (P + 0.5 / (1 << m)) % 1.0
    return lambert_map(P).coords


def cap_l2_disc_quadrature(S, n_centers: int = 4096, n_heights: int = 512,
                           t_nodes=None) -> DiscrepancyResult:
    """Direct quadrature of the cap L2 discrepancy.

    Cap centers are a Lambert-mapped Sobol net (shifted by half a cell);
    heights are the midpoint grid with ``n_heights`` nodes on ``[-1, 1]``, or
    the explicit ``t_nodes`` (equal weights ``2 / len(t_nodes)``).
    ``error_hint`` is the largest change in value over two successive halvings
    of both grids.
    """
    S = _as_sphere(S)
    if n_centers < 8 or n_heights < 8:
        raise ValueError("need at least 8 centers and 8 heights")
    Z = S.coords

    def heights(n):
        if t_nodes is not None:
            t = np.asarray(t_nodes, dtype=float)
            return t, np.full(t.size, 2.0 / t.size)
        return -1.0 + (np.arange(n) + 0.5) * (2.0 / n), np.full(n, 2.0 / n)

    levels = [
        math.sqrt(max(_quadrature_sq(Z, _sobol_centers(n_centers >> k), *heights(n_heights >> k)), 0.0))
        for k in range(3)
    ]
    value = levels[0]
    # one refinement step alone can agree by accident; take the larger of two
    hint = max(abs(levels[0] - levels[1]), abs(levels[1] - levels[2]))
    return DiscrepancyResult(min(value, 1.0), "spherical_cap", 2.0, "estimate", hint, S.n_points, 2)


def figure1_experiment(m_min: int, m_max: int) -> list:
    """Squared cap L2 discrepancy of Lambert-mapped 2-d Sobol nets, ``N = 2^m``.

    Returns rows ``(m, N, disc_sq, N^-1.5, 2.25 N^-1.5)``.
    """
    if m_max > FIG1_MAX_M:
        raise ValueError(f"m_max = {m_max} exceeds the O(N^2) budget m <= {FIG1_MAX_M}")
    if m_min < 0 or m_min > m_max:
        raise ValueError(f"invalid range m = {m_min}..{m_max}")
    rows = []
    for m in range(m_min, m_max + 1):
        S = lambert_map(sobol_net(m, 2))
        N = S.n_points
        sq = cap_l2_disc_closed_form(S).value ** 2
        rows.append((m, N, sq, N**-1.5, 2.25 * N**-1.5))
    return rows
