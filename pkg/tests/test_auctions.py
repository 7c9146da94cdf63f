"""Auction profiles: revenue, worst-case ratio, and the scaling reduction."""

from fractions import Fraction

import pytest

from compauction.attainability import optimal_ratio
from compauction.auctions import (
    AuctionProfile,
    GridOverflowError,
    _argmin_largest_index,
    check_profile_valid,
    competitive_ratio,
    expected_revenue,
    scale_reduce,
)
from compauction.benchmarks import BenchmarkTable, builtin_table
from compauction.grid import BidGrid
from compauction.synthesis import synthesize, x_to_z
from tests.conftest import random_monotone_table, small_grids, two_tier_table

G22 = BidGrid(Fraction(1), 2, 2)
H = Fraction(1, 2)


def two_tier_profile() -> AuctionProfile:
    return x_to_z(synthesize(two_tier_table(), Fraction(1)))


def zero_profile(grid) -> AuctionProfile:
    return AuctionProfile(grid, [{o: {} for o in grid.others_points()}
                                 for _ in range(grid.n)])


def test_expected_revenue_worked_example():
    profile = two_tier_profile()
    assert expected_revenue(profile, (1, 1)) == Fraction(3, 2) + 2
    assert expected_revenue(profile, (0, 0)) == H + 1
    assert expected_revenue(profile, (1, 0)) == Fraction(3, 2)
    assert expected_revenue(profile, (0, 1)) == Fraction(3, 2)
    assert expected_revenue(zero_profile(G22), (1, 1)) == 0


def test_revenue_matches_revenue_tables(rng):
    for grid in small_grids():
        table = random_monotone_table(grid, rng, nonzero=True)
        revenue = synthesize(table, optimal_ratio(table).ratio)
        profile = x_to_z(revenue)
        for p in grid.points():
            assert expected_revenue(profile, p) == revenue.revenue_at(p)


def test_competitive_ratio_examples():
    profile = two_tier_profile()
    assert competitive_ratio(profile, two_tier_table()).ratio == 1
    assert competitive_ratio(profile, two_tier_table().scaled(3)).ratio == 3

    report = competitive_ratio(zero_profile(G22), builtin_table(G22, "f2"))
    assert report.unbounded and report.ratio is None
    assert report.argmax is not None

    zeros = BenchmarkTable(G22, {p: Fraction(0) for p in G22.points()})
    report = competitive_ratio(zero_profile(G22), zeros)
    assert report.ratio == 0 and not report.unbounded


def test_check_profile_valid():
    assert check_profile_valid(two_tier_profile()) == (True, None)
    assert check_profile_valid(zero_profile(G22)) == (True, None)

    overloaded = zero_profile(G22)
    overloaded.z[0][(0,)] = {0: Fraction(5, 8), 1: Fraction(5, 8)}
    ok, witness = check_profile_valid(overloaded)
    assert not ok and witness == (0, (0,))

    negative = zero_profile(G22)
    negative.z[1][(1,)] = {0: Fraction(-1, 4)}
    ok, witness = check_profile_valid(negative)
    assert not ok and witness == (1, (1,))


def test_argmin_tie_rule_takes_the_largest_index():
    vals = [Fraction(4), Fraction(2), Fraction(2)]
    assert _argmin_largest_index(vals) == 2
    assert _argmin_largest_index(vals, skip=2) == 1
    assert _argmin_largest_index([Fraction(1), Fraction(4), Fraction(1)]) == 2


def test_scale_reduce_worked_example():
    # inner auction on two bidders, outer bids (2, 1, 1)
    offers = scale_reduce(two_tier_profile(), [2, 1, 1])
    assert offers[0] == {Fraction(1): H, Fraction(2): H}
    assert offers[1] == {Fraction(2): Fraction(1)}
    assert offers[2] == {}  # the globally smallest bidder is skipped


def test_scale_reduce_tie_handling():
    # bids (4, 2, 2): for the first bidder the competing minimum ties and the
    # largest index wins, so the inner auction sees the rescaled bid 1
    profile = two_tier_profile()
    offers = scale_reduce(profile, [4, 2, 2])
    # first bidder: inner row at rescaled others (1,), prices scaled by 2
    assert offers[0] == {Fraction(2): H, Fraction(4): H}
    # second bidder: rescaled others (4/2)=2; offered that bid, scaled back
    assert offers[1] == {Fraction(4): Fraction(1)}
    assert offers[2] == {}


def test_scale_reduce_all_equal_bids():
    profile = two_tier_profile()
    c = Fraction(2)
    offers = scale_reduce(profile, [c, c, c])
    # every rescaled vector is all-ones; the kept bidders get the inner
    # offers at the all-ones row, scaled by c
    assert offers[0] == {c * 1: H, c * 2: H}
    assert offers[1] == {c * 1: Fraction(1)}
    assert offers[2] == {}


def test_scale_reduce_revenue_accounting(rng):
    # total revenue from the kept bidders equals the smallest bid times the
    # inner auction's revenue on the rescaled vector
    grid = BidGrid(Fraction(1), 3, 2)
    table = random_monotone_table(grid, rng, nonzero=True)
    profile = x_to_z(synthesize(table, optimal_ratio(table).ratio))
    bids = [Fraction(4), Fraction(4), Fraction(2)]
    offers = scale_reduce(profile, bids)
    total = Fraction(0)
    for i, table_i in enumerate(offers):
        for price, prob in table_i.items():
            if price <= bids[i]:
                total += price * prob
    inner_point = (1, 1)  # bids (4,4)/2 at level 1 each
    assert total == Fraction(2) * expected_revenue(profile, inner_point)


def test_scale_reduce_rejects_bad_inputs():
    profile = two_tier_profile()
    with pytest.raises(ValueError):
        scale_reduce(profile, [2, 1])  # needs n+1 bids
    with pytest.raises(ValueError):
        scale_reduce(profile, [3, 1, 1])  # off the ladder
    with pytest.raises(GridOverflowError):
        scale_reduce(profile, [8, 1, 1])  # rescaled bid above the top level
