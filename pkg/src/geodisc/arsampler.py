"""Acceptance-rejection sampling driven by arbitrary point sets.

A proposal ``(x_1, ..., x_s, x_{s+1})`` in ``[0,1]^{s+1}`` is accepted when
``L * x_{s+1} <= psi(x_1, ..., x_s)``, i.e. when it lies under the graph of
the scaled density; the accepted projections then follow the normalized
density ``psi / C`` with ``C = int_{[0,1]^s} psi``.  (The opposite inequality,
``psi <= L x_{s+1}``, would accept the region above the graph and produce
the law of ``L - psi`` instead.)

The normalizer ``C`` is always the integral over the whole domain, so that
``(1/C) int_{[0,t)} psi`` is a distribution function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .boxdisc import DiscrepancyResult, _ROW_BLOCK
from .pointset import UnitCubePoints, make_rng, random_uniform, sobol_net

__all__ = [
    "DensitySpec",
    "AcceptedSample",
    "EmptySampleError",
    "accept_reject",
    "uniform_density",
    "quadratic_density",
    "poly_sine_density",
    "poly_sine_cdf_original",
    "product_density",
    "weighted_star_disc_1d",
    "weighted_star_disc_estimate",
    "region_local_discrepancy",
    "figure3_experiment",
    "DENSITIES",
]


class EmptySampleError(ValueError):
    """No proposal was accepted, so the sample discrepancy is undefined."""


@dataclass(frozen=True)
class DensitySpec:
    """Unnormalized density on ``[0,1]^s`` with bound ``L`` and normalizer ``C``.

    ``cdf`` is the normalized distribution function (``s = 1`` only);
    ``box_measure(t)`` returns ``(1/C) int_{[0,t)} psi`` for an ``(k, s)``
    array of anchors.  When ``box_measure`` is absent it is obtained from
    ``cdf`` (``s = 1``) or by tensor Gauss-Legendre quadrature.
    """

    s: int
    psi: Callable
    L: float
    C: float
    cdf: Optional[Callable] = None
    box_measure_fn: Optional[Callable] = None
    C_exact: bool = True
    name: str = ""

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("density dimension must be >= 1")
        if not (self.L > 0 and self.C > 0):
            raise ValueError("need L > 0 and C > 0")
        n = 2001 if self.s == 1 else (201 if self.s == 2 else 21)
        axis = np.linspace(0.0, 1.0, n)
        grid = np.stack(np.meshgrid(*([axis] * self.s), indexing="ij"), axis=-1).reshape(-1, self.s)
        vals = np.asarray(self.psi(grid if self.s > 1 else grid[:, 0]), dtype=float)
        if np.any(vals < -1e-12):
            raise ValueError(f"density {self.name!r} is negative somewhere on the grid")
        if np.any(vals > self.L * (1 + 1e-12)):
            raise ValueError(f"density {self.name!r} exceeds its bound L = {self.L}")
        if self.cdf is not None:
            if self.s != 1:
                raise ValueError("cdf is only supported for s = 1")
            F = np.asarray(self.cdf(axis), dtype=float)
            if abs(F[0]) > 1e-12 or abs(F[-1] - 1) > 1e-12 or np.any(np.diff(F) < -1e-12):
                raise ValueError(f"cdf of {self.name!r} is not a distribution function")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.asarray(self.psi(x[:, 0] if self.s == 1 else x), dtype=float)

    def box_measure(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(np.asarray(t, dtype=float))
        if self.box_measure_fn is not None:
            return np.asarray(self.box_measure_fn(t), dtype=float)
        if self.s == 1 and self.cdf is not None:
            return np.asarray(self.cdf(t[:, 0]), dtype=float)
        return _tensor_box_measure(self, t)


def _tensor_box_measure(density: DensitySpec, t: np.ndarray, order: int = 48) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    u, w = (nodes + 1) / 2, weights / 2
    out = np.empty(len(t))
    for k, anchor in enumerate(t):
        axes = [u * a for a in anchor]
        wts = [w * a for a in anchor]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, density.s)
        W = np.prod(np.stack(np.meshgrid(*wts, indexing="ij"), axis=-1).reshape(-1, density.s), axis=1)
        out[k] = float(W @ density.evaluate(grid)) / density.C
    return out


@dataclass(frozen=True)
class AcceptedSample:
    points: Optional[UnitCubePoints]
    accepted_count: int
    proposal_count: int
    accepted_index: np.ndarray

    def __post_init__(self):
        n = 0 if self.points is None else self.points.n_points
        if n != self.accepted_count or self.accepted_count > self.proposal_count:
            raise ValueError("inconsistent accepted sample counts")

    @property
    def accept_ratio(self) -> float:
        return self.accepted_count / self.proposal_count


def accept_reject(P, density: DensitySpec) -> AcceptedSample:
    """Keep proposals with ``L * x_{s+1} <= psi(x_1..x_s)``; order is preserved.

    Equality is accepted.  Proposals may be a :class:`UnitCubePoints` or an
    array in the closed cube ``[0, 1]^{s+1}``.
    """
    X = P.coords if isinstance(P, UnitCubePoints) else np.atleast_2d(np.asarray(P, dtype=float))
    if X.ndim != 2 or X.shape[1] != density.s + 1:
        raise ValueError(f"proposals must have dimension {density.s + 1}, got shape {X.shape}")
    if not np.all(np.isfinite(X)) or np.any(X < 0.0) or np.any(X > 1.0):
        raise ValueError("proposals must lie in the closed unit cube")
    keep = density.L * X[:, -1] <= density.evaluate(X[:, :-1])
    idx = np.flatnonzero(keep)
    pts = UnitCubePoints(X[idx, :-1]) if idx.size else None
    return AcceptedSample(pts, int(idx.size), X.shape[0], idx)


def uniform_density(s: int = 1) -> DensitySpec:
    if s == 1:
        return DensitySpec(1, lambda x: np.ones_like(x), 1.0, 1.0, cdf=lambda t: np.clip(t, 0, 1), name="uniform")
    return DensitySpec(s, lambda x: np.ones(len(x)), 1.0, 1.0,
                       box_measure_fn=lambda t: np.prod(t, axis=1), name="uniform")


def _quad_psi(x):
    return 0.75 - (np.asarray(x) - 0.5) ** 2


def _quad_cdf(t):
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return 1.5 * (0.75 * t - (t - 0.5) ** 3 / 3.0 - 1.0 / 24.0)


def quadratic_density() -> DensitySpec:
    """``psi(x) = 3/4 - (x - 1/2)^2`` on ``[0, 1]``: ``L = 3/4``, ``C = 2/3``."""
    return DensitySpec(1, _quad_psi, 0.75, 2.0 / 3.0, cdf=_quad_cdf, name="quad")


def poly_sine_cdf_original(x):
    """Normalized CDF of ``x^2 + sin(pi x)`` on ``[0, 2]`` (normalizer 8/3).

    ``x^3/8 + 3 (1 - cos(pi x)) / (8 pi)``.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 2.0)
    return x**3 / 8.0 + 3.0 * (1.0 - np.cos(np.pi * x)) / (8.0 * np.pi)


def poly_sine_density() -> DensitySpec:
    """``x^2 + sin(pi x)`` on ``[0, 2]``, carried to ``u = x/2`` in ``[0, 1]``.

    The rescaled density is ``2 psi(2u)`` (change of variables), so the
    normalizer stays ``8/3`` and ``L = 2 max psi = 8`` (attained at ``x = 2``).
    """
    psi = lambda u: 2.0 * ((2.0 * np.asarray(u)) ** 2 + np.sin(2.0 * np.pi * np.asarray(u)))
    cdf = lambda u: poly_sine_cdf_original(2.0 * np.asarray(u))
    return DensitySpec(1, psi, 8.0, 8.0 / 3.0, cdf=cdf, name="polysine")


def product_density(factors) -> DensitySpec:
    """Product of one-dimensional densities; box measures factorize."""
    factors = list(factors)
    s = len(factors)

    def psi(x):
        x = np.atleast_2d(x)
        return np.prod([f.psi(x[:, j]) for j, f in enumerate(factors)], axis=0)

    def box(t):
        return np.prod([f.box_measure(t[:, [j]]) for j, f in enumerate(factors)], axis=0)

    return DensitySpec(s, psi, math.prod(f.L for f in factors), math.prod(f.C for f in factors),
                       box_measure_fn=box, name="x".join(f.name for f in factors))


DENSITIES = {"quad": quadratic_density, "polysine": poly_sine_density, "uniform": uniform_density}


def _sample_points(Q) -> UnitCubePoints:
    pts = Q.points if isinstance(Q, AcceptedSample) else Q
    if pts is None:
        raise EmptySampleError("no accepted points; the discrepancy is undefined")
    return pts if isinstance(pts, UnitCubePoints) else UnitCubePoints(pts)


def weighted_star_disc_1d(Q, density: DensitySpec) -> DiscrepancyResult:
    """Exact ``sup_t |#{y < t}/N - F(t)|`` for a one-dimensional sample.

    With ``F`` the normalized CDF and sorted ``y_1 <= ... <= y_N`` this is
    ``max_n max(n/N - F(y_n), F(y_n) - (n-1)/N)``.
    """
    pts = _sample_points(Q)
    if pts.s != 1 or density.s != 1 or density.cdf is None:
        raise ValueError("weighted_star_disc_1d needs s = 1 and a density with an exact CDF")
    y = np.sort(pts.coords[:, 0], kind="stable")
    N = y.size
    F = np.asarray(density.cdf(y), dtype=float)
    n = np.arange(1, N + 1)
    value = float(max(np.max(n / N - F), np.max(F - (n - 1) / N)))
    return DiscrepancyResult(value, "weighted_box", math.inf, "exact", n_points=N, dim=1)


def weighted_star_disc_estimate(Q, density: DensitySpec, n_candidates: int, seed: int = 0,
                                anchors=None) -> DiscrepancyResult:
    """Lower bound on the weighted star discrepancy from candidate anchors.

    Candidates are random combinations of sorted sample coordinates (or 1)
    per axis, unless ``anchors`` is given explicitly.  Both one-sided counts are
    evaluated at each anchor.
    """
    pts = _sample_points(Q)
    X, N, s = pts.coords, pts.n_points, pts.s
    if s != density.s:
        raise ValueError("sample and density dimensions differ")
    if anchors is None:
        rng = make_rng(seed)
        pool = np.vstack([np.sort(X, axis=0), np.ones((1, s))])
        anchors = pool[rng.integers(0, N + 1, size=(n_candidates, s)), np.arange(s)]
    anchors = np.asarray(anchors, dtype=float).reshape(-1, s)
    best = 0.0
    for lo in range(0, len(anchors), _ROW_BLOCK):
        T = anchors[lo : lo + _ROW_BLOCK]
        le = (X[None] <= T[:, None]).all(axis=2).sum(axis=1)
        lt = (X[None] < T[:, None]).all(axis=2).sum(axis=1)
        mu = density.box_measure(T)
        best = max(best, float(np.max(le / N - mu)), float(np.max(mu - lt / N)))
    return DiscrepancyResult(min(best, 1.0), "weighted_box", math.inf, "lower_bound", n_points=N, dim=s)


def region_local_discrepancy(P, density: DensitySpec, t) -> float:
    """Local discrepancy of the proposals for the set ``A ∩ [0, t)`` in ``[0,1]^2``.

    ``A`` is the acceptance region under the scaled graph.  The volume
    ``int_0^{t_1} min(psi(x)/L, t_2) dx`` is computed by adaptive quadrature.
    Only ``s = 1`` densities are supported.
    """
    if density.s != 1:
        raise ValueError("region view implemented for s = 1")
    P = P if isinstance(P, UnitCubePoints) else UnitCubePoints(P)
    t1, t2 = float(t[0]), float(t[1])
    X = P.coords
    inside = (density.L * X[:, 1] <= density.evaluate(X[:, :1])) & (X[:, 0] < t1) & (X[:, 1] < t2)
    vol, _ = integrate.quad(lambda x: min(float(density.psi(x)) / density.L, t2), 0.0, t1,
                            limit=200, epsabs=1e-13, epsrel=1e-13)
    return np.count_nonzero(inside) / P.n_points - vol


def figure3_experiment(m_min: int, m_max: int, proposal_kind: str = "sobol_net", seed=None,
                       density: Optional[DensitySpec] = None) -> list:
    """Weighted star discrepancy of AR samples for ``M = 2^m`` proposals.

    Returns rows ``(m, M, N, D*(Q), N^-0.7, N^-0.5, N/M)``.  Random proposals
    require ``seed``; proposal set ``m`` then uses seed ``seed + m``.
    """
    if proposal_kind not in ("sobol_net", "random"):
        raise ValueError(f"unknown proposal kind {proposal_kind!r}")
    if proposal_kind == "random" and seed is None:
        raise ValueError("random proposals require an explicit seed")
    density = density or quadratic_density()
    rows = []
    for m in range(m_min, m_max + 1):
        M = 1 << m
        if proposal_kind == "sobol_net":
            P = sobol_net(m, density.s + 1)
        else:
            P = random_uniform(M, density.s + 1, seed + m)
        Q = accept_reject(P, density)
        N = Q.accepted_count
        disc = weighted_star_disc_1d(Q, density).value
        rows.append((m, M, N, disc, N**-0.7, N**-0.5, N / M))
    return rows
