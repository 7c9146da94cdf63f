"""Optimal ratios in closed form and their distributional cross-checks.

Under the equal-revenue prior (``Pr[v > x] = 1/x`` on ``[1, inf)``, i.i.d.
across bidders) every truthful auction earns expected revenue exactly ``n``,
so the expectation of a benchmark divided by ``n`` lower-bounds its
competitive ratio.  For the two built-in benchmarks those expectations have
closed forms:

* fixed-price with two winners:
  ``lambda_n = 1 - sum_{i=2..n} (-1/n)^(i-1) * i/(i-1) * C(n-1, i-1)``,
* best k-item Vickrey: ``gamma_n = (n/(n-1))^(n-1) - 1``.

The Vickrey expectation comes from the tail law of the order-statistic
maxima ``F_{n,k} = max_i (k+i-1) V_i``, which satisfies both a recursion and
a closed form; keeping the two independent provides an identity test.  The
module also carries a seeded sampler, a median-of-means estimator robust to
the heavy upper tails, and exact rational benchmark expectations over
discrete grids for refinement tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from compauction.benchmarks import BenchmarkTable, builtin_table
from compauction.grid import BidGrid


def lambda_n(n: int) -> Fraction:
    """Optimal ratio of the fixed-price benchmark, exact.

    The alternating sum cancels catastrophically in floating point, so every
    term is an exact rational.
    """
    if n < 2:
        raise ValueError("need at least two bidders")
    total = Fraction(1)
    for i in range(2, n + 1):
        term = (
            Fraction(-1, n) ** (i - 1) * Fraction(i, i - 1) * math.comb(n - 1, i - 1)
        )
        total -= term
    return total


def gamma_n(n: int) -> Fraction:
    """Optimal ratio of the best k-item Vickrey benchmark, exact."""
    if n < 2:
        raise ValueError("need at least two bidders")
    return Fraction(n, n - 1) ** (n - 1) - 1


def f_nk_tail(n: int, k: int, z: Fraction | int | float) -> Fraction:
    """Closed-form tail ``Pr[max_i (k+i-1) V_i >= z]`` under the prior.

    Defined for ``z >= n+k-1`` (below that the event is certain); ``n = 0``
    is the empty maximum, whose tail is zero everywhere.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if n == 0:
        return Fraction(0)
    z = Fraction(z)
    if z < n + k - 1:
        raise ValueError(f"tail defined for z >= {n + k - 1}, got {z}")
    if z == n + k - 1:
        return Fraction(1)
    return 1 - (z - n - k + 1) * (z + 1 - k) ** (n - 1) / z**n


def f_nk_tail_recursive(n: int, k: int, z: Fraction | int | float) -> Fraction:
    """The same tail by its recursion; an independent identity check.

    Conditioning on the largest index ``i`` whose scaled order statistic
    clears ``z`` gives
    ``Pr[F_{n,k} >= z] = sum_i C(n,i) ((k+i-1)/z)^i Pr[F_{n-i,k+i} < z]``
    with the empty maximum as the base case.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    z = Fraction(z)
    if n > 0 and z < n + k - 1:
        raise ValueError(f"tail defined for z >= {n + k - 1}, got {z}")

    @lru_cache(maxsize=None)
    def tail(m: int, j: int) -> Fraction:
        if m == 0:
            return Fraction(0)
        # every node of the recursion shares the floor m+j-1 = n+k-1, where
        # the event is certain; below it the scaled order statistics cannot
        # all fit and the recursion's z-powers are meaningless
        if z == m + j - 1:
            return Fraction(1)
        total = Fraction(0)
        for i in range(1, m + 1):
            total += (
                math.comb(m, i)
                * Fraction(j + i - 1, 1) ** i
                / z**i
                * (1 - tail(m - i, j + i))
            )
        return total

    return tail(n, k)


def maxv_tail(n: int, z: Fraction | int | float) -> Fraction:
    """Tail of the Vickrey benchmark under the prior; 1 below its floor n-1."""
    if n < 2:
        raise ValueError("need at least two bidders")
    z = Fraction(z)
    if z <= n - 1:
        return Fraction(1)
    return f_nk_tail(n, 0, z)


def expected_maxv(n: int) -> Fraction:
    """Exact ``E[maxV]`` under the prior: ``n (n/(n-1))^(n-1) - n``."""
    if n < 2:
        raise ValueError("need at least two bidders")
    return n * Fraction(n, n - 1) ** (n - 1) - n


def bids_from_uniform(u: np.ndarray | float) -> np.ndarray:
    """Inverse CDF of the prior: ``u`` on (0, 1] maps to ``v = 1/u >= 1``."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0) or np.any(arr > 1):
        raise ValueError("uniform draws must lie in (0, 1]")
    return 1.0 / arr


@dataclass
class EqualRevenueSampler:
    """Seeded i.i.d. sampler of the equal-revenue prior via inverse CDF."""

    n: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one bidder")
        self._rng = np.random.default_rng(self.seed)

    def sample(self, size: int) -> np.ndarray:
        """``size`` bid vectors as a ``(size, n)`` array of floats >= 1."""
        u = 1.0 - self._rng.random((size, self.n))  # uniform on (0, 1]
        return bids_from_uniform(u)


def sample_bids(sampler: EqualRevenueSampler) -> np.ndarray:
    """One bid vector of length n."""
    return sampler.sample(1)[0]


def f2_statistic(bids: np.ndarray) -> np.ndarray:
    """Vectorized fixed-price benchmark over rows of a (m, n) bid array."""
    ordered = -np.sort(-bids, axis=1)
    ks = np.arange(2, bids.shape[1] + 1)
    return np.max(ordered[:, 1:] * ks, axis=1)


def maxv_statistic(bids: np.ndarray) -> np.ndarray:
    """Vectorized Vickrey benchmark over rows of a (m, n) bid array."""
    ordered = -np.sort(-bids, axis=1)
    ks = np.arange(1, bids.shape[1])
    return np.max(ordered[:, 1:] * ks, axis=1)


def mc_expected(
    stat: Callable[[np.ndarray], np.ndarray],
    n: int,
    samples: int,
    blocks: int,
    seed: int = 0,
) -> tuple[float, float]:
    """Median-of-means estimate of ``E[stat]`` under the prior.

    The benchmark statistics have finite mean but heavy upper tails, so the
    plain sample mean is fragile; the median over independent blocks is not.
    Returns ``(estimate, error)`` with a MAD-based standard error (zero for a
    constant statistic).  Deterministic for a fixed seed: each block draws
    from its own generator spawned from the seed.
    """
    if not samples >= blocks >= 1:
        raise ValueError("need samples >= blocks >= 1")
    block_size = samples // blocks
    seeds = np.random.SeedSequence(seed).spawn(blocks)
    means = np.empty(blocks)
    for b, s in enumerate(seeds):
        rng = np.random.default_rng(s)
        u = 1.0 - rng.random((block_size, n))
        means[b] = float(np.mean(stat(bids_from_uniform(u))))
    estimate = float(np.median(means))
    mad = float(np.median(np.abs(means - estimate)))
    error = 1.4826 * mad / math.sqrt(blocks)
    return estimate, error


def expected_benchmark_discrete(table: BenchmarkTable) -> Fraction:
    """Exact grid expectation ``sum_b w(b) f(b)`` under the discrete prior.

    Accumulated as one big integer over a common denominator: the level
    weights are ``(P-Q) Q^t P^(N-t)`` and ``Q^N P`` over ``P^(N+1)`` where
    ``1 + delta = P/Q``, so only the table values contribute extra
    denominators.  This keeps the quadratic-size sums of refinement tests
    (hundreds of levels) in integer arithmetic.
    """
    grid = table.grid
    ratio = 1 + grid.delta
    P, Q = ratio.numerator, ratio.denominator
    N = grid.top
    level_num = [(P - Q) * Q**t * P ** (N - t) for t in range(N)] + [Q**N * P]
    value_den = math.lcm(*(v.denominator for v in table.values.values()))
    total = 0
    for point, value in table.values.items():
        w = 1
        for t in point:
            w *= level_num[t]
        total += w * (value.numerator * (value_den // value.denominator))
    return Fraction(total, P ** ((N + 1) * grid.n) * value_den)


@dataclass
class RestrictedTightness:
    """Exact discrete sums against their continuous targets.

    ``g_*`` concerns the benchmark with one extra bidder pinned at the floor
    (pointwise ``max(n+1, f)``), whose grid expectation approaches
    ``lambda_(n+1) * n``; ``h_*`` concerns the decreasing complement
    ``max(0, n+1 - f)`` with target ``(lambda_(n+1) - lambda_n) * n``.
    """

    g_sum: Fraction
    g_target: Fraction
    h_sum: Fraction
    h_target: Fraction


def check_gn_tight(n: int, grid: BidGrid) -> RestrictedTightness:
    """Grid expectations of the pinned benchmark and its complement.

    Exact sums; how close they land to the targets depends on the grid
    resolution, so tolerances belong to the caller.
    """
    if grid.n != n or n < 2:
        raise ValueError("grid must carry the same n >= 2 bidders")
    base = builtin_table(grid, "f2")
    shift = Fraction(n + 1)
    g_vals = {p: max(shift, v) for p, v in base.values.items()}
    h_vals = {p: max(Fraction(0), shift - v) for p, v in base.values.items()}
    g_sum = expected_benchmark_discrete(BenchmarkTable(grid, g_vals))
    h_sum = expected_benchmark_discrete(BenchmarkTable(grid, h_vals))
    return RestrictedTightness(
        g_sum=g_sum,
        g_target=lambda_n(n + 1) * n,
        h_sum=h_sum,
        h_target=(lambda_n(n + 1) - lambda_n(n)) * n,
    )
