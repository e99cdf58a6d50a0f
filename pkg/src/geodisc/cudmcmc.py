"""Driver sequences, Markov chains run from them, and push-back discrepancy.

A chain on a one-dimensional state space is driven by blocks
``u_n in [0,1)^s`` of a scalar driver sequence via ``x_n = phi(x_{n-1}; u_{n-1})``.
Full-period linear congruential generators stand in for completely uniformly
distributed drivers: their parameters are checked for full period when the
driver is built.

Push-back discrepancy measures the driver through the preimages
``C_n(A) = {z in [0,1]^{ns} : phi_n(x0; z) in A}`` of state-space test sets.
The preimages are keyed on the starting state ``x0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .boxdisc import DiscrepancyResult, star_disc_grid_exact
from .pointset import UnitCubePoints, make_rng, radical_inverse

__all__ = [
    "DriverSequence",
    "ChainSpec",
    "TestSetFamily",
    "StateSpaceError",
    "lcg_driver",
    "vdc_driver",
    "random_driver",
    "block",
    "cud_disc_profile",
    "shift_chain",
    "metropolis_chain",
    "run_chain",
    "consistency_gap",
    "pushback_disc_shift",
    "pushback_disc_mc",
    "DEFAULT_LCG",
    "PUSHBACK_MAX_DIM",
]

# modulus 2^10; a = 1 (mod 4) and odd c give full period (Hull-Dobell).
# Among those multipliers, 353 has a strictly decreasing exact star
# discrepancy along dyadic prefixes in s = 1, 2, 3 and the smallest
# combined full-period value for s = 2, 3 (0.0064 and 0.0515).
DEFAULT_LCG = {"modulus": 1024, "multiplier": 353, "increment": 1, "seed": 0}
PUSHBACK_MAX_DIM = 24
_CYCLE_CHECK_LIMIT = 1 << 20


class StateSpaceError(RuntimeError):
    """The chain update left the declared state space."""


class DriverSequence:
    """Scalar driver ``u_0, u_1, ...`` in ``[0, 1)``.

    ``kind`` is one of ``full_period_congruential``, ``van_der_corput``,
    ``pseudo_random`` or ``explicit`` (a fixed array of values).
    ``length`` is the number of values available (``None`` = unbounded); a
    congruential driver supplies exactly one period.
    """

    KINDS = ("full_period_congruential", "van_der_corput", "pseudo_random", "explicit")

    def __init__(self, kind: str, **params):
        if kind not in self.KINDS:
            raise ValueError(f"unknown driver kind {kind!r}")
        self.kind = kind
        self.params = params
        self._cache = None
        if kind == "full_period_congruential":
            self._check_lcg()
            self.length = int(params["modulus"])
        elif kind == "explicit":
            vals = np.asarray(params["values"], dtype=float).ravel()
            if np.any(vals < 0) or np.any(vals >= 1):
                raise ValueError("driver values must lie in [0, 1)")
            self._cache = vals
            self.length = vals.size
        else:
            self.length = None

    @classmethod
    def from_values(cls, values) -> "DriverSequence":
        return cls("explicit", values=values)

    def __repr__(self):
        return f"DriverSequence({self.kind!r}, {self.params if self.kind != 'explicit' else '...'})"

    def _check_lcg(self):
        m, a, c = (int(self.params[k]) for k in ("modulus", "multiplier", "increment"))
        x0 = int(self.params.get("seed", 0)) % m
        if m < 2 or not (0 < a < m) or not (0 <= c < m):
            raise ValueError(f"invalid congruential parameters m={m}, a={a}, c={c}")
        if m <= _CYCLE_CHECK_LIMIT:
            x = x0
            for k in range(1, m + 1):
                x = (a * x + c) % m
                if x == x0:
                    break
            if k != m or x != x0:
                raise ValueError(f"congruential generator (m={m}, a={a}, c={c}) has period {k} < {m}")
        else:
            # beyond the cycle-check limit, fall back to the Hull-Dobell conditions for m = 2^k
            if m & (m - 1) or c % 2 == 0 or a % 4 != 1:
                raise ValueError("cannot certify full period for this modulus")

    def values(self, n: int) -> np.ndarray:
        """The first ``n`` driver values."""
        if n < 0:
            raise ValueError("n must be >= 0")
        if self.length is not None and n > self.length:
            raise ValueError(f"driver supplies {self.length} values, {n} requested")
        if self.kind == "van_der_corput":
            return radical_inverse(np.arange(n), int(self.params.get("b", 2)))
        if self.kind == "pseudo_random":
            return make_rng(self.params["seed"]).random(n)
        if self._cache is None:
            m, a, c = (int(self.params[k]) for k in ("modulus", "multiplier", "increment"))
            x = int(self.params.get("seed", 0)) % m
            out = np.empty(m, dtype=np.int64)
            for k in range(m):
                out[k] = x
                x = (a * x + c) % m
            self._cache = out / float(m)
        return self._cache[:n]


def lcg_driver(modulus=None, multiplier=None, increment=None, seed=None) -> DriverSequence:
    p = dict(DEFAULT_LCG)
    for k, v in (("modulus", modulus), ("multiplier", multiplier), ("increment", increment), ("seed", seed)):
        if v is not None:
            p[k] = v
    return DriverSequence("full_period_congruential", **p)


def vdc_driver(b: int = 2) -> DriverSequence:
    return DriverSequence("van_der_corput", b=b)


def random_driver(seed: int) -> DriverSequence:
    return DriverSequence("pseudo_random", seed=seed)


def block(seq: DriverSequence, N: int, s: int) -> UnitCubePoints:
    """Non-overlapping blocks: row ``n`` is ``(u_{ns}, ..., u_{ns+s-1})``."""
    if N < 1 or s < 1:
        raise ValueError("need N >= 1 and s >= 1")
    return UnitCubePoints(seq.values(N * s).reshape(N, s))


def cud_disc_profile(seq: DriverSequence, N: int, s_max: int, max_points=None) -> list:
    """Exact star discrepancy of the blocked driver for ``s = 1..s_max``.

    Returns ``[(s, D*), ...]``.  Budget errors from the exact enumeration
    propagate.
    """
    if not 1 <= s_max <= 3:
        raise ValueError("s_max must be in [1, 3] for exact star discrepancy")
    return [(s, star_disc_grid_exact(block(seq, N, s), max_points=max_points).value)
            for s in range(1, s_max + 1)]


@dataclass
class ChainSpec:
    """Update-function Markov chain on ``[lo, hi]`` or the circle ``[0, 1)``.

    ``update(x, u)`` must accept an array of states and an array of driver
    blocks with trailing axis ``s`` and return the new states.
    """

    update: Callable
    s: int
    x0: float
    state_space: tuple = (0.0, 1.0)
    circle: bool = False
    target: Optional[object] = None
    name: str = ""

    def in_space(self, x) -> np.ndarray:
        x = np.asarray(x)
        lo, hi = self.state_space
        return (x >= lo) & ((x < hi) if self.circle else (x <= hi))


def shift_chain(x0: float = 0.0) -> ChainSpec:
    """``phi(x; u) = frac(x + u)`` on the circle; its invariant law is uniform."""

    def update(x, u):
        return np.mod(x + u[..., 0], 1.0)

    return ChainSpec(update, 1, x0, (0.0, 1.0), circle=True, name="shift")


def metropolis_chain(target, x0: float = 0.5) -> ChainSpec:
    """Independence Metropolis sampler with uniform proposals on ``[0, 1]``.

    Each step uses ``u = (u_1, u_2)``: propose ``y = u_1`` and accept when
    ``u_2 <= psi(y) / psi(x)``.
    """
    if target.s != 1:
        raise ValueError("metropolis_chain needs a one-dimensional target")
    psi = target.psi

    def update(x, u):
        x = np.asarray(x, dtype=float)
        y = u[..., 0]
        px = np.asarray(psi(x), dtype=float)
        if np.any(px <= 0):
            raise StateSpaceError("target density vanishes at the current state")
        accept = u[..., 1] <= np.minimum(np.asarray(psi(y), dtype=float) / px, 1.0)
        return np.where(accept, y, x)

    return ChainSpec(update, 2, x0, (0.0, 1.0), target=target, name="metropolis")


def run_chain(chain: ChainSpec, seq: DriverSequence, N: int, burn_in: int = 0) -> np.ndarray:
    """States ``x_1, ..., x_N`` (after discarding ``burn_in`` further steps)."""
    total = N + burn_in
    U = seq.values(total * chain.s).reshape(total, chain.s)
    x = np.asarray(chain.x0, dtype=float)
    path = np.empty(total)
    for n in range(total):
        x = chain.update(x, U[n])
        if not chain.in_space(x):
            raise StateSpaceError(f"state {float(x)!r} left the state space at step {n + 1}")
        path[n] = x
    return path[burn_in:]


def consistency_gap(path, f: Callable, reference: float):
    """``|mean f(x_n) - reference|`` and the running gaps at dyadic ``N``.

    Returns ``(gap, [(N, gap_N), ...])``.
    """
    vals = np.asarray(f(np.asarray(path, dtype=float)), dtype=float) * np.ones(len(path))
    csum = np.cumsum(vals)
    running = []
    N = 1
    while N <= len(vals):
        running.append((N, abs(csum[N - 1] / N - reference)))
        N *= 2
    gap = abs(math.fsum(vals) / len(vals) - reference)
    return gap, running


@dataclass(frozen=True)
class TestSetFamily:
    """Interval test sets in ``[0, 1]``.

    ``kind="anchored"`` gives ``[0, a)``, ``kind="interval"`` gives ``[a, b)``.
    With ``resolution=g`` the endpoints run over ``k/g``; with ``None`` the
    family is the full continuum.
    """

    kind: str = "anchored"
    resolution: Optional[int] = None

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.kind not in ("anchored", "interval"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.resolution is not None and self.resolution < 1:
            raise ValueError("resolution must be >= 1")

    def members(self) -> np.ndarray:
        """``(k, 2)`` array of ``[a, b)`` endpoints (finite families only)."""
        if self.resolution is None:
            raise ValueError("a continuous family has no finite member list")
        g = self.resolution
        if self.kind == "anchored":
            return np.column_stack([np.zeros(g), np.arange(1, g + 1) / g])
        i, j = np.triu_indices(g + 1, k=1)
        return np.column_stack([i / g, j / g])


def _interval_counts(states: np.ndarray, members: np.ndarray) -> np.ndarray:
    return ((states[None, :] >= members[:, :1]) & (states[None, :] < members[:, 1:])).sum(axis=1)


def _sup_continuous(states: np.ndarray, kind: str) -> float:
    """Exact sup of ``|#{x in I}/N - |I||`` over all anchored or general intervals."""
    x = np.sort(states)
    N = x.size
    cand = np.unique(np.concatenate([x, [0.0, 1.0]]))
    below = np.searchsorted(x, cand, side="left")   # #{x < c}
    upto = np.searchsorted(x, cand, side="right")   # #{x <= c}
    if kind == "anchored":
        return float(max(np.max(upto / N - cand), np.max(cand - below / N)))
    # [a, b) with one-sided limits at both ends: most points when a is
    # approached from below and b from above, fewest the other way round
    most = (upto[None, :] - below[:, None]) / N
    least = (below[None, :] - upto[:, None]) / N
    length = cand[None, :] - cand[:, None]
    ok = length >= 0
    return float(max(np.max(np.where(ok, most - length, 0.0)),
                     np.max(np.where(ok, length - np.maximum(least, 0), 0.0))))


def pushback_disc_shift(x0: float, seq: DriverSequence, N: int, family: TestSetFamily) -> DiscrepancyResult:
    """Push-back discrepancy for the circle shift chain, computed exactly.

    For this chain ``lambda(C_n(A)) = |A|`` for every ``n``, so the local
    discrepancy is ``(1/N) sum_n [1{x_n in A} - |A|]``.
    """
    states = run_chain(shift_chain(x0), seq, N)
    if family.resolution is None:
        value = _sup_continuous(states, family.kind)
    else:
        mem = family.members()
        value = float(np.max(np.abs(_interval_counts(states, mem) / N - (mem[:, 1] - mem[:, 0]))))
    return DiscrepancyResult(min(value, 1.0), "pushback", math.inf, "exact", n_points=N, dim=1)


def pushback_disc_mc(chain: ChainSpec, seq: DriverSequence, N: int, family: TestSetFamily,
                     M: int, seed: int) -> DiscrepancyResult:
    """Push-back discrepancy with preimage volumes estimated by Monte Carlo.

    ``lambda(C_n(A))`` is the fraction of ``M`` uniform driver draws whose
    chain lands in ``A`` after ``n`` steps.  ``error_hint`` is the largest,
    over the family, of ``(1/N) sum_n sqrt(p(1-p)/M)``.
    """
    if family.resolution is None:
        raise ValueError("Monte Carlo push-back needs a finite (gridded) family")
    if N * chain.s > PUSHBACK_MAX_DIM:
        raise ValueError(f"N*s = {N * chain.s} exceeds the push-back limit {PUSHBACK_MAX_DIM}")
    if M < 10_000:
        raise ValueError("M must be >= 10^4 oracle samples")
    states = run_chain(chain, seq, N)
    mem = family.members()
    rng = make_rng(seed)
    Z = rng.random((N, M, chain.s))
    x = np.full(M, float(chain.x0))
    hits = np.empty((len(mem), N))
    for n in range(N):
        x = chain.update(x, Z[n])
        hits[:, n] = _interval_counts(x, mem)
    p = hits / M
    actual = ((states[None, :] >= mem[:, :1]) & (states[None, :] < mem[:, 1:])).astype(float)
    delta = (actual - p).mean(axis=1)
    se = np.sqrt(p * (1 - p) / M).mean(axis=1)
    return DiscrepancyResult(float(min(np.max(np.abs(delta)), 1.0)), "pushback", math.inf, "estimate",
                             float(np.max(se)), N, chain.s)
