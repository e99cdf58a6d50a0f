"""Point set generators on the unit cube.

All generators return :class:`UnitCubePoints` with coordinates in the
half-open cube ``[0, 1)^s``.  Deterministic constructions (van der Corput,
Halton, Sobol nets, Fibonacci lattices) are pure functions of their
parameters; randomized ones take an explicit integer seed and draw from a
Philox4x64-10 counter-based stream keyed by that seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "UnitCubePoints",
    "GeneratorSpec",
    "PRIMES",
    "make_rng",
    "radical_inverse",
    "van_der_corput",
    "halton",
    "hammersley",
    "sobol_net",
    "sobol_generator_matrices",
    "fibonacci",
    "fibonacci_lattice",
    "stratified",
    "random_uniform",
    "generate",
    "write_points_csv",
    "read_points_csv",
]

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)

# Joe-Kuo primitive polynomial initialisation for Sobol dimensions 2..10:
# (degree, interior polynomial coefficients a, initial direction integers m).
# Dimension 1 uses the identity matrix (base-2 van der Corput).
_SOBOL_TABLE = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
    (5, 4, (1, 1, 5, 5, 5)),
    (5, 7, (1, 1, 7, 11, 19)),
)
SOBOL_MAX_DIM = 10
SOBOL_MAX_M = 20


@dataclass(frozen=True)
class UnitCubePoints:
    """N points in ``[0, 1)^s`` stored as an ``(N, s)`` float array."""

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty (N, s) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if np.any(arr < 0.0) or np.any(arr >= 1.0):
            raise ValueError("coordinates must lie in [0, 1)")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def s(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.n_points

    def column(self, j: int) -> np.ndarray:
        return self.coords[:, j]


@dataclass(frozen=True)
class GeneratorSpec:
    """Named generator plus its parameters, e.g. ``GeneratorSpec("sobol_net", {"m": 4, "s": 2})``."""

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("van_der_corput", "halton", "sobol_net", "hammersley", "fibonacci", "random", "stratified")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {self.KINDS}")
        p = self.params
        if p.get("b", 2) < 2:
            raise ValueError("base b must be >= 2")
        if p.get("m", 2) < (2 if self.kind == "fibonacci" else 0):
            raise ValueError(f"invalid exponent m={p['m']} for {self.kind}")
        if p.get("k", 0) < 0:
            raise ValueError("stratification level k must be >= 0")

    def build(self) -> UnitCubePoints:
        return generate(self.kind, **self.params)


def make_rng(seed: int) -> np.random.Generator:
    """Philox4x64-10 stream keyed directly by ``seed`` (counter starts at 0)."""
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    return np.random.Generator(np.random.Philox(key=seed))


def radical_inverse(n: np.ndarray, b: int) -> np.ndarray:
    """Base-``b`` digit reversal of the non-negative integers ``n``."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    n = np.asarray(n, dtype=np.int64).copy()
    out = np.zeros(n.shape, dtype=float)
    scale = 1.0 / b
    while np.any(n > 0):
        n, digit = np.divmod(n, b)
        out += digit * scale
        scale /= b
    return out


def van_der_corput(N: int, b: int = 2) -> UnitCubePoints:
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    _check_count(N)
    return UnitCubePoints(radical_inverse(np.arange(N), b))


def halton(N: int, s: int) -> UnitCubePoints:
    """First ``N`` Halton points; column ``j`` uses the ``j``-th prime base."""
    _check_count(N)
    if not 1 <= s <= len(PRIMES):
        raise ValueError(f"Halton dimension must be in [1, {len(PRIMES)}], got {s}")
    idx = np.arange(N)
    return UnitCubePoints(np.column_stack([radical_inverse(idx, b) for b in PRIMES[:s]]))


def hammersley(N: int, s: int) -> UnitCubePoints:
    """``(n/N, halton_{s-1}(n))``; the first coordinate is the regular grid."""
    _check_count(N)
    if not 1 <= s <= len(PRIMES) + 1:
        raise ValueError(f"Hammersley dimension must be in [1, {len(PRIMES) + 1}], got {s}")
    idx = np.arange(N)
    cols = [idx / N] + [radical_inverse(idx, b) for b in PRIMES[: s - 1]]
    return UnitCubePoints(np.column_stack(cols))


def sobol_generator_matrices(s: int, m: int) -> np.ndarray:
    """Binary generator matrices ``C_j`` as a ``(s, m, m)`` array of 0/1.

    Column ``k`` of ``C_j`` holds the binary digits (most significant first)
    of the ``k``-th direction number of dimension ``j``.
    """
    if not 1 <= s <= SOBOL_MAX_DIM:
        raise ValueError(f"Sobol dimension must be in [1, {SOBOL_MAX_DIM}], got {s}")
    if not 0 <= m <= SOBOL_MAX_M:
        raise ValueError(f"Sobol exponent must be in [0, {SOBOL_MAX_M}], got {m}")
    mats = np.zeros((s, m, m), dtype=np.uint8)
    for j in range(s):
        ints = _direction_integers(j, m)
        for k, v in enumerate(ints):
            # v is an odd integer < 2^(k+1); digit r of v / 2^(k+1) is bit (k - r)
            for r in range(k + 1):
                mats[j, r, k] = (v >> (k - r)) & 1
    return mats


def _direction_integers(j: int, m: int) -> list:
    if j == 0:
        return [1] * m
    deg, a, init = _SOBOL_TABLE[j - 1]
    ints = list(init)
    for k in range(deg, m):
        v = ints[k - deg] ^ (ints[k - deg] << deg)
        for i in range(1, deg):
            if (a >> (deg - 1 - i)) & 1:
                v ^= ints[k - i] << i
        ints.append(v)
    return ints[:m]


def sobol_net(m: int, s: int) -> UnitCubePoints:
    """The first ``2^m`` points of the unscrambled Sobol sequence, in natural order.

    Point ``n`` in dimension ``j`` is ``sum_k v_{j,k}`` (XOR) over the set bits
    ``k`` of ``n``, where ``v_{j,k}`` are the direction numbers.  These ``2^m``
    points form a digital net in base 2.
    """
    mats = sobol_generator_matrices(s, m)
    N = 1 << m
    if m == 0:
        return UnitCubePoints(np.zeros((1, s)))
    # direction numbers as m-bit integers: v_{j,k} = sum_r C_j[r, k] 2^(m-1-r)
    weights = (1 << np.arange(m - 1, -1, -1)).astype(np.int64)
    dirs = np.einsum("jrk,r->jk", mats.astype(np.int64), weights)
    idx = np.arange(N, dtype=np.int64)
    out = np.zeros((N, s), dtype=np.int64)
    for k in range(m):
        bit = ((idx >> k) & 1).astype(bool)
        out[bit] ^= dirs[:, k]
    return UnitCubePoints(out / float(N))


def fibonacci(m: int) -> int:
    """``F_m`` with ``F_0 = 0, F_1 = 1``."""
    a, b = 0, 1
    for _ in range(m):
        a, b = b, a + b
    return a


def fibonacci_lattice(m: int) -> UnitCubePoints:
    """Two-dimensional Fibonacci lattice with ``F_m`` points.

    Point ``n`` is ``(n / F_m, frac(n F_{m-1} / F_m))``; the fractional part
    is taken in integer arithmetic so it is exact up to the final division.
    """
    if m < 2:
        raise ValueError(f"Fibonacci index must be >= 2, got {m}")
    Fm, Fm1 = fibonacci(m), fibonacci(m - 1)
    n = np.arange(Fm, dtype=np.int64)
    return UnitCubePoints(np.column_stack([n / Fm, (n * Fm1 % Fm) / Fm]))


def stratified(k: int, s: int, seed: int) -> UnitCubePoints:
    """One uniform point in each dyadic subcube of side ``2^-k``.

    Cells are visited in lexicographic order of their integer corner.
    """
    if k < 0 or s < 1:
        raise ValueError("need k >= 0 and s >= 1")
    if k * s > 24:
        raise ValueError(f"2^(k*s) = 2^{k * s} points exceeds the 2^24 limit")
    side = 1 << k
    corners = np.indices((side,) * s).reshape(s, -1).T
    u = make_rng(seed).random(corners.shape)
    pts = (corners + u) / side
    # guard against rounding up to the next cell boundary
    pts = np.minimum(pts, np.nextafter((corners + 1) / side, 0.0))
    return UnitCubePoints(pts)


def random_uniform(N: int, s: int, seed: int) -> UnitCubePoints:
    _check_count(N)
    if s < 1:
        raise ValueError("dimension must be >= 1")
    return UnitCubePoints(make_rng(seed).random((N, s)))


def generate(kind: str, **params) -> UnitCubePoints:
    """Dispatch by generator name (the ``generate`` CLI entry point)."""
    table = {
        "van_der_corput": lambda p: van_der_corput(p["N"], p.get("b", 2)),
        "halton": lambda p: halton(p["N"], p["s"]),
        "hammersley": lambda p: hammersley(p["N"], p["s"]),
        "sobol_net": lambda p: sobol_net(p["m"], p["s"]),
        "fibonacci": lambda p: fibonacci_lattice(p["m"]),
        "random": lambda p: random_uniform(p["N"], p["s"], p["seed"]),
        "stratified": lambda p: stratified(p["k"], p["s"], p["seed"]),
    }
    if kind not in table:
        raise ValueError(f"unknown generator kind {kind!r}")
    try:
        return table[kind](params)
    except KeyError as exc:
        raise ValueError(f"generator {kind!r} is missing parameter {exc.args[0]!r}") from None


def write_points_csv(points, path, header=None) -> None:
    """Write one row per point with 17 significant digits (round-trip exact)."""
    arr = points.coords if isinstance(points, UnitCubePoints) else np.asarray(points)
    if header is None:
        header = [f"dim{j}" for j in range(arr.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in arr:
            w.writerow([f"{v:.17g}" for v in row])


def read_points_csv(path) -> UnitCubePoints:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: no points")
    return UnitCubePoints(np.array([[float(v) for v in r] for r in rows[1:]]))


def _check_count(N: int) -> None:
    if N < 1:
        raise ValueError(f"point count must be >= 1, got {N}")
