"""Bid-independent auctions as price-offer tables, and their evaluation.

An auction is described by tables ``z_i(b_-i, p)``: the probability of
offering price ``p`` to bidder ``i`` when the others bid ``b_-i``.  Bidder
``i`` accepts iff ``p <= b_i``.  Because the table for bidder ``i`` is keyed
only by the other bids, truthfulness holds by construction.

Also here: the scaling reduction that runs an n-bidder auction on n+1 bids by
dividing out the smallest competing bid, used to lift optimal auctions for a
floor-pinned benchmark to one more bidder.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from compauction.benchmarks import BenchmarkTable
from compauction.grid import BidGrid, Point


class GridOverflowError(ValueError):
    """A rescaled bid climbed past the top level of the inner grid."""


# z[i][others][level] = probability of offering that level's value to bidder i
OfferTables = list[dict[Point, dict[int, Fraction]]]


@dataclass
class AuctionProfile:
    grid: BidGrid
    z: OfferTables

    def offer_row(self, i: int, others: Point) -> dict[int, Fraction]:
        return self.z[i].get(others, {})


def expected_revenue(profile: AuctionProfile, point: Point) -> Fraction:
    """Expected revenue on one bid vector: sum of accepted offers.

    Bidder ``i`` pays an offered price ``p`` exactly when ``p <= b_i``, so the
    revenue from ``i`` is the price-weighted mass of offers at or below the
    bid.
    """
    grid = profile.grid
    total = Fraction(0)
    for i in range(grid.n):
        others = point[:i] + point[i + 1 :]
        row = profile.offer_row(i, others)
        for level, prob in row.items():
            if level <= point[i]:
                total += grid.level_value(level) * prob
    return total


@dataclass
class RatioReport:
    """Worst-case benchmark/revenue ratio; ``ratio is None`` means unbounded."""

    ratio: Fraction | None
    argmax: Point | None

    @property
    def unbounded(self) -> bool:
        return self.ratio is None


def competitive_ratio(profile: AuctionProfile, table: BenchmarkTable) -> RatioReport:
    """Maximum of f(b) / expected revenue over the grid.

    Unbounded when the benchmark is positive somewhere the auction earns
    nothing.  Points with zero benchmark contribute nothing.
    """
    best: Fraction | None = None
    argmax: Point | None = None
    for p in sorted(table.grid.points()):
        fv = table[p]
        if fv == 0:
            continue
        rev = expected_revenue(profile, p)
        if rev == 0:
            return RatioReport(ratio=None, argmax=p)
        ratio = fv / rev
        if best is None or ratio > best:
            best = ratio
            argmax = p
    if best is None:
        return RatioReport(ratio=Fraction(0), argmax=None)
    return RatioReport(ratio=best, argmax=argmax)


def check_profile_valid(
    profile: AuctionProfile,
) -> tuple[bool, tuple[int, Point] | None]:
    """Probability sanity: entries in [0, 1], row sums at most 1.

    Returns ``(False, (bidder, others))`` for the first offending offer row.
    """
    grid = profile.grid
    if len(profile.z) != grid.n:
        return False, None
    for i in range(grid.n):
        for others in grid.others_points():
            row = profile.offer_row(i, others)
            total = Fraction(0)
            for level, prob in row.items():
                if not 0 <= level <= grid.top or prob < 0 or prob > 1:
                    return False, (i, others)
                total += prob
            if total > 1:
                return False, (i, others)
    return True, None


def _level_of(delta: Fraction, value: Fraction) -> int:
    """Exact ladder index of a bid value; rejects off-ladder bids."""
    step = 1 + delta
    v = Fraction(1)
    t = 0
    while v < value:
        v *= step
        t += 1
    if v != value:
        raise ValueError(f"bid {value} is not a power of {step}")
    return t


def _argmin_largest_index(values: Sequence[Fraction], skip: int | None = None) -> int:
    best = None
    for j, v in enumerate(values):
        if j == skip:
            continue
        if best is None or v <= values[best]:
            best = j
    assert best is not None
    return best


def scale_reduce(
    inner: AuctionProfile, bids: Sequence[Fraction | int]
) -> list[dict[Fraction, Fraction]]:
    """Run an n-bidder auction on n+1 bids by rescaling away the smallest.

    For each bidder ``i``, let ``i*`` be the smallest competing bid (largest
    index on ties).  Bidder ``i`` is offered ``p * b_(i*)`` where ``p`` is the
    inner auction's offer on the remaining bids divided by ``b_(i*)``.  The
    globally smallest bidder ``j*`` is skipped (no acceptable offer), matching
    the revenue accounting of the reduction: the remaining bidders alone earn
    ``b_(j*)`` times the inner auction's revenue on the rescaled vector.

    Returns one price-to-probability table per outer bidder.
    """
    grid = inner.grid
    values = [Fraction(b) for b in bids]
    if len(values) != grid.n + 1:
        raise ValueError(f"expected {grid.n + 1} bids, got {len(values)}")
    levels = [_level_of(grid.delta, v) for v in values]
    j_star = _argmin_largest_index(values)

    offers: list[dict[Fraction, Fraction]] = []
    for i in range(len(values)):
        if i == j_star:
            offers.append({})
            continue
        i_star = _argmin_largest_index(values, skip=i)
        base = levels[i_star]
        rescaled = tuple(
            levels[j] - base for j in range(len(values)) if j not in (i, i_star)
        )
        if any(t > grid.top for t in rescaled):
            raise GridOverflowError(
                f"rescaled bids {rescaled} exceed inner grid level {grid.top}"
            )
        inner_bidder = i if i < i_star else i - 1
        row = inner.offer_row(inner_bidder, rescaled)
        scale = values[i_star]
        offers.append(
            {grid.level_value(t) * scale: prob for t, prob in sorted(row.items())}
        )
    return offers
