"""Benchmark formulas, tables, and derived constructions."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compauction.benchmarks import (
    BenchmarkTable,
    builtin_table,
    check_monotone,
    check_symmetric,
    f2,
    fix_lowest_coordinate,
    limited_supply_bounds,
    maxv,
    validate_table,
)
from compauction.grid import BidGrid
from tests.conftest import random_monotone_table, small_grids, two_tier_table

G22 = BidGrid(Fraction(1), 2, 2)


def test_f2_examples():
    assert f2([2, 2]) == 4
    assert f2([4, 1]) == 2
    assert f2([4, 2, 2]) == 6
    with pytest.raises(ValueError):
        f2([5])


def test_maxv_examples():
    assert maxv([4, 2]) == 2
    assert maxv([4, 2, 1]) == 2
    for n in range(2, 6):
        c = Fraction(7, 3)
        assert maxv([c] * n) == (n - 1) * c
    with pytest.raises(ValueError):
        maxv([5])


def test_builtin_tables_two_by_two():
    table = builtin_table(G22, "f2")
    assert dict(table.values) == {
        (0, 0): 2,
        (0, 1): 2,
        (1, 0): 2,
        (1, 1): 4,
    }
    table = builtin_table(G22, "maxv")
    assert dict(table.values) == {
        (0, 0): 1,
        (0, 1): 1,
        (1, 0): 1,
        (1, 1): 2,
    }
    with pytest.raises(ValueError):
        builtin_table(G22, "nope")
    with pytest.raises(ValueError):
        builtin_table(BidGrid(Fraction(1), 2, 1), "f2")


@pytest.mark.parametrize("grid", small_grids(), ids=str)
@pytest.mark.parametrize("kind", ["f2", "maxv"])
def test_builtin_tables_monotone_and_symmetric(grid, kind):
    table = builtin_table(grid, kind)
    ok, witness = check_monotone(table)
    assert ok and witness is None
    assert check_symmetric(table)
    validate_table(table)


def test_check_monotone_witness():
    values = {(0, 0): Fraction(0), (0, 1): Fraction(1), (1, 0): Fraction(0),
              (1, 1): Fraction(0)}
    ok, witness = check_monotone(BenchmarkTable(G22, values))
    assert not ok
    assert witness == ((0, 1), (1, 1))
    constant = BenchmarkTable(G22, {p: Fraction(5) for p in G22.points()})
    assert check_monotone(constant) == (True, None)


def test_check_symmetric():
    assert check_symmetric(two_tier_table())
    lopsided = {(0, 0): Fraction(0), (0, 1): Fraction(2), (1, 0): Fraction(1),
                (1, 1): Fraction(2)}
    assert not check_symmetric(BenchmarkTable(G22, lopsided))


def test_validate_table_rejects_bad_input():
    with pytest.raises(ValueError):
        validate_table(BenchmarkTable(G22, {p: Fraction(-1) for p in G22.points()}))
    gap = {p: Fraction(1) for p in G22.points()}
    del gap[(1, 1)]
    with pytest.raises(ValueError):
        validate_table(BenchmarkTable(G22, gap))


rational_bids = st.fractions(min_value=Fraction(1), max_value=Fraction(50))


@given(
    st.lists(rational_bids, min_size=2, max_size=5),
    st.fractions(min_value=Fraction(1, 7), max_value=Fraction(9)),
)
def test_benchmarks_scale_linearly(bids, t):
    assert f2([t * b for b in bids]) == t * f2(bids)
    assert maxv([t * b for b in bids]) == t * maxv(bids)


@given(st.lists(rational_bids, min_size=2, max_size=5), rational_bids)
def test_benchmarks_ignore_raising_the_top_bid(bids, bump):
    top = max(range(len(bids)), key=lambda k: bids[k])
    raised = list(bids)
    raised[top] = raised[top] + bump
    assert f2(raised) == f2(bids)
    assert maxv(raised) == maxv(bids)


@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=10**6))
def test_shifted_complement_is_decreasing(seed):
    import random as _random

    grid = BidGrid(Fraction(1), 2, 3)
    table = random_monotone_table(grid, _random.Random(seed))
    c = Fraction(grid.n + 1)
    h = {p: max(Fraction(0), c - table[p]) for p in grid.points()}
    for p in grid.points():
        for j in range(grid.n):
            if p[j] < grid.top:
                q = p[:j] + (p[j] + 1,) + p[j + 1 :]
                assert h[q] <= h[p]


def _top_k_levels(point, k):
    return tuple(sorted(point, reverse=True))[:k]


def test_limited_supply_on_top_k_only_benchmark():
    # fixed-price revenue restricted to at most two winners depends only on
    # the top two bids, so both bounds collapse onto the benchmark itself
    grid = BidGrid(Fraction(1), 2, 3)
    levels = grid.values()
    values = {
        p: 2 * sorted((levels[t] for t in p), reverse=True)[1] for p in grid.points()
    }
    table = BenchmarkTable(grid, values, kind="custom")
    upper, lower = limited_supply_bounds(table, 2)
    for p in grid.points():
        key = _top_k_levels(p, 2)
        assert upper[key] == table[p] == lower[key]


def test_limited_supply_on_constant_benchmark():
    grid = BidGrid(Fraction(1), 2, 3)
    table = BenchmarkTable(grid, {p: Fraction(5, 2) for p in grid.points()})
    upper, lower = limited_supply_bounds(table, 2)
    assert all(v == Fraction(5, 2) for v in upper.values.values())
    assert all(v == Fraction(5, 2) for v in lower.values.values())


def test_limited_supply_sandwich_random(rng):
    grid = BidGrid(Fraction(1), 2, 3)
    for _ in range(30):
        table = random_monotone_table(grid, rng)
        upper, lower = limited_supply_bounds(table, 2)
        for p in grid.points():
            key = _top_k_levels(p, 2)
            assert upper[key] >= table[p] >= lower[key]
        for derived in (upper, lower):
            ok, _ = check_monotone(derived)
            assert ok


def test_limited_supply_builtin_drops_to_zero():
    # with literal zeros appended, only the top-k terms of the formula survive
    grid = BidGrid(Fraction(1), 2, 3)
    table = builtin_table(grid, "f2")
    _, lower = limited_supply_bounds(table, 2)
    levels = grid.values()
    for u in lower.grid.points():
        expected = 2 * min(levels[t] for t in u)
        assert lower[u] == expected


def test_limited_supply_invalid_k():
    grid = BidGrid(Fraction(1), 2, 3)
    table = builtin_table(grid, "f2")
    for bad in (1, 3, 0):
        with pytest.raises(ValueError):
            limited_supply_bounds(table, bad)


def test_fix_lowest_coordinate_identity():
    grid3 = BidGrid(Fraction(1), 2, 3)
    pinned = fix_lowest_coordinate(builtin_table(grid3, "f2"))
    grid2 = pinned.grid
    assert (grid2.num_levels, grid2.n) == (2, 2)
    base = builtin_table(grid2, "f2")
    for z in grid2.points():
        assert pinned[z] == max(Fraction(3), base[z])
    assert pinned[(0, 0)] == 3
    ok, _ = check_monotone(pinned)
    assert ok


def test_fix_lowest_coordinate_needs_three_bidders():
    with pytest.raises(ValueError):
        fix_lowest_coordinate(builtin_table(G22, "f2"))


def test_scaled_table():
    table = two_tier_table()
    doubled = table.scaled(2)
    assert doubled[(1, 1)] == 7
    assert doubled[(0, 0)] == 3
