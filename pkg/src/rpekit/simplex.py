"""Geometry, sampling, and quadrature on the unit simplex and its truncations.

The unit simplex in R^K is

    Delta = {x : x_k >= 0, sum_k x_k = 1},

and the truncated simplex with a per-coordinate floor f is
{x : x_k >= f, sum_k x_k = 1}, nonempty iff K*f <= 1.

Conventions used throughout the package:

* single distributions are :class:`ActionDistribution` values (validated,
  immutable);
* bulk samples and grids are plain ``(n, K)`` float arrays whose rows are
  simplex points, which is what the numeric code consumes directly;
* all randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so
  sample sequences are reproducible for a pinned numpy version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

SUM_TOL = 1e-12

_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def as_weights(x, K: int | None = None) -> np.ndarray:
    """Coerce an ActionDistribution or array-like to a 1-D float array."""
    if isinstance(x, ActionDistribution):
        arr = x.weights
    else:
        arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D weight vector, got shape {arr.shape}")
    if K is not None and arr.shape[0] != K:
        raise ValueError(f"expected {K} coordinates, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class ActionDistribution:
    """A point of the unit simplex: one probability per action.

    Weights must be nonnegative and sum to 1 within ``1e-12`` (absolute).
    Tiny negative values within the same tolerance are clamped to zero on
    construction; anything worse is rejected.
    """

    weights: np.ndarray

    def __post_init__(self):
        arr = np.array(self.weights, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("weights must be a nonempty 1-D vector")
        if np.min(arr) < -SUM_TOL:
            raise ValueError(f"negative weight {np.min(arr)} in {arr.tolist()}")
        np.clip(arr, 0.0, None, out=arr)
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1 within {SUM_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    @property
    def K(self) -> int:
        return int(self.weights.shape[0])

    def __len__(self) -> int:
        return self.K

    def __getitem__(self, k: int) -> float:
        return float(self.weights[k])

    def __iter__(self):
        return iter(self.weights.tolist())

    def tolist(self) -> list[float]:
        return self.weights.tolist()

    def __repr__(self) -> str:
        return f"ActionDistribution({self.weights.tolist()})"


@dataclass(frozen=True)
class TruncatedSimplex:
    """The simplex truncated by a per-coordinate lower bound."""

    K: int
    floor: float

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.floor < 0.0:
            raise ValueError("floor must be nonnegative")
        if self.K * self.floor > 1.0 + SUM_TOL:
            raise ValueError(
                f"empty truncated simplex: K*floor = {self.K * self.floor} > 1"
            )

    def contains(self, x, tol: float = SUM_TOL) -> bool:
        arr = as_weights(x, self.K)
        if abs(float(arr.sum()) - 1.0) > tol:
            return False
        return bool(np.min(arr) >= self.floor - tol)


def project_truncated(x, floor: float) -> ActionDistribution:
    """Euclidean projection onto {y : sum(y) = 1, y_k >= floor}.

    Exact sort-based projection: substitute y = floor + z and project z onto
    the simplex of total mass 1 - K*floor.  O(K log K), idempotent.
    """
    arr = as_weights(x)
    K = arr.shape[0]
    if floor < 0.0 or floor > 1.0 / K + SUM_TOL:
        raise ValueError(f"floor {floor} outside [0, 1/K] for K={K}")
    mass = 1.0 - K * floor
    if mass <= SUM_TOL:
        return ActionDistribution(np.full(K, 1.0 / K))
    z = arr - floor
    u = np.sort(z)[::-1]
    css = np.cumsum(u) - mass
    idx = np.arange(1, K + 1)
    theta = css / idx
    # largest k with u_k > theta_k; exists because sum constraint is active
    k = np.nonzero(u > theta)[0][-1]
    y = np.clip(z - theta[k], 0.0, None)
    # redistribute floating-point residual (large inputs lose absolute precision)
    for _ in range(3):
        resid = float(y.sum()) - mass
        if abs(resid) <= 1e-15:
            break
        pos = y > 0.0
        y[pos] -= resid / int(pos.sum())
        np.clip(y, 0.0, None, out=y)
    return ActionDistribution(y + floor)


def uniform_samples(K: int, n: int, seed: int) -> np.ndarray:
    """Draw n points uniformly from the K-simplex; rows are simplex points.

    Uses the exponential trick: normalize K independent unit-rate exponential
    variates (flat Dirichlet).  Deterministic given the seed (PCG64 stream).
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_exponential((n, K))
    return g / g.sum(axis=1, keepdims=True)


def beta_pdf(x: np.ndarray, a: int, b: int) -> np.ndarray:
    """Beta(a, b) density with positive integer parameters (a polynomial)."""
    log_norm = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, math.exp(log_norm))
    if a > 1:
        out = out * x ** (a - 1)
    if b > 1:
        out = out * (1.0 - x) ** (b - 1)
    return out


def _leggauss(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if nodes not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[nodes] = np.polynomial.legendre.leggauss(nodes)
    return _LEGGAUSS_CACHE[nodes]


def beta_marginal_expectation(
    c: Callable[[np.ndarray], np.ndarray],
    k: int,
    K: int,
    nodes: int = 64,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integral of c against the law of a sum of k coordinates of a flat
    Dirichlet on the K-simplex, i.e. against Beta(k, K-k) on [0, 1].

    Fixed-order Gauss-Legendre quadrature per segment; piecewise integrands
    should declare their interior breakpoints so each segment is smooth (the
    integrand times the polynomial Beta density is then integrated exactly
    for polynomial pieces up to degree 2*nodes-1).
    """
    if not 1 <= k < K:
        if k == K:
            raise ValueError("k == K: the coordinate sum is identically 1; evaluate c(1) directly")
        raise ValueError(f"need 1 <= k < K, got k={k}, K={K}")
    cuts = sorted({float(b) for b in breakpoints if 0.0 < float(b) < 1.0})
    edges = [0.0] + cuts + [1.0]
    xs, ws = _leggauss(nodes)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0.0:
            continue
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid + half * xs
        vals = np.asarray(c(pts), dtype=float)
        if vals.shape != pts.shape:
            vals = np.array([float(c(p)) for p in pts])
        total += half * float(np.sum(ws * vals * beta_pdf(pts, k, K - k)))
    return total


def simplex_grid(K: int, m: int) -> np.ndarray:
    """All points of the K-simplex whose coordinates are multiples of 1/m.

    Returns a ``(binom(m+K-1, K-1), K)`` array in lexicographic order of the
    integer compositions (first coordinate descending).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    out: list[list[int]] = []

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for v in range(remaining, -1, -1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], m, K)
    return np.array(out, dtype=float) / m


def grid_size(K: int, m: int) -> int:
    """Number of points of simplex_grid(K, m)."""
    return math.comb(m + K - 1, K - 1)
