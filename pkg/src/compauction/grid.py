"""Discrete geometric bid domains, equal-revenue weights, and upward-closed sets.

The bid domain is a geometric ladder ``{(1+delta)^t : t = 0..N}`` shared by all
``n`` bidders, so a bid vector is a tuple of level indices.  The ladder carries
a discrete equal-revenue weight: level ``t`` has mass ``delta/(1+delta)^(t+1)``
and the top level absorbs the remaining tail ``(1+delta)^(-N)``, which makes
every tail sum telescope exactly to ``(1+delta)^(-k)``.  Under this weight any
fixed posted price earns expected revenue exactly 1, which is what makes it the
worst-case prior for competitive analysis.

Everything here is an exact :class:`fractions.Fraction`.  Tightness detection
in the synthesis procedure compares rationals for equality, so no floating
point is allowed in the core.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

Point = tuple[int, ...]

DEFAULT_POINT_CAP = 16


class DomainTooLargeError(ValueError):
    """An exhaustive scan was asked to cover more grid points than its cap."""


@dataclass(frozen=True)
class BidGrid:
    """A shared bid ladder: ``n`` bidders, levels ``(1+delta)^0 .. (1+delta)^N``.

    ``num_levels`` is N+1, so every level index lies in ``range(num_levels)``.
    Level 0 always has value 1 and values are strictly increasing.
    """

    delta: Fraction
    num_levels: int
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.delta <= 0:
            raise ValueError("grid ratio delta must be positive")
        if self.num_levels < 1:
            raise ValueError("grid needs at least one level")
        if self.n < 1:
            raise ValueError("grid needs at least one bidder")

    @property
    def top(self) -> int:
        """Largest level index N."""
        return self.num_levels - 1

    def level_value(self, t: int) -> Fraction:
        """Bid value ``(1+delta)^t`` at level index ``t``."""
        if not 0 <= t <= self.top:
            raise ValueError(f"level index {t} outside [0, {self.top}]")
        return (1 + self.delta) ** t

    def values(self) -> tuple[Fraction, ...]:
        return tuple(self.level_value(t) for t in range(self.num_levels))

    def point_count(self) -> int:
        return self.num_levels**self.n

    def points(self) -> Iterator[Point]:
        """All bid vectors, lexicographically."""
        return itertools.product(range(self.num_levels), repeat=self.n)

    def others_points(self) -> Iterator[Point]:
        """All (n-1)-dimensional vectors of the remaining bidders."""
        return itertools.product(range(self.num_levels), repeat=self.n - 1)

    def point_values(self, point: Point) -> tuple[Fraction, ...]:
        return tuple(self.level_value(t) for t in point)


def weight_level(grid: BidGrid, t: int) -> Fraction:
    """Equal-revenue mass of ladder level ``t``.

    ``delta/(1+delta)^(t+1)`` below the top; the top level takes the whole
    remaining tail ``(1+delta)^(-N)`` so the masses sum to 1.
    """
    if not 0 <= t <= grid.top:
        raise ValueError(f"level index {t} outside [0, {grid.top}]")
    if t == grid.top:
        return Fraction(1) / (1 + grid.delta) ** grid.top
    return grid.delta / (1 + grid.delta) ** (t + 1)


def weight_tail(grid: BidGrid, k: int) -> Fraction:
    """Mass of all levels >= k; telescopes to ``(1+delta)^(-k)`` exactly."""
    if not 0 <= k <= grid.top:
        raise ValueError(f"level index {k} outside [0, {grid.top}]")
    return Fraction(1) / (1 + grid.delta) ** k


def weight_vector(grid: BidGrid, point: Point) -> Fraction:
    """Product weight of a full bid vector; sums to 1 over the whole grid."""
    if len(point) != grid.n:
        raise ValueError(f"expected {grid.n} coordinates, got {len(point)}")
    w = Fraction(1)
    for t in point:
        w *= weight_level(grid, t)
    return w


def weight_others(grid: BidGrid, others: Point) -> Fraction:
    """Product weight of an (n-1)-dimensional vector of the other bidders."""
    if len(others) != grid.n - 1:
        raise ValueError(f"expected {grid.n - 1} coordinates, got {len(others)}")
    w = Fraction(1)
    for t in others:
        w *= weight_level(grid, t)
    return w


def is_upward_closed(points: Iterable[Point], num_levels: int, n: int) -> bool:
    """True iff the set is closed under raising any coordinate by one level."""
    pts = frozenset(points)
    top = num_levels - 1
    for p in pts:
        for j in range(n):
            if p[j] < top:
                q = p[:j] + (p[j] + 1,) + p[j + 1 :]
                if q not in pts:
                    return False
    return True


@dataclass(frozen=True)
class Upset:
    """An upward-closed set of bid vectors on a ``num_levels^n`` grid.

    Stored as a full membership set rather than its minimal antichain: grids
    are tiny by construction and membership queries dominate.  Closure is
    checked on construction; unions and intersections of upsets stay upsets.
    """

    num_levels: int
    n: int
    points: frozenset[Point] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", frozenset(self.points))
        for p in self.points:
            if len(p) != self.n or not all(0 <= t < self.num_levels for t in p):
                raise ValueError(f"point {p} outside the grid")
        if not is_upward_closed(self.points, self.num_levels, self.n):
            raise ValueError("set is not upward closed")

    @classmethod
    def of(cls, grid: BidGrid, points: Iterable[Point]) -> "Upset":
        return cls(grid.num_levels, grid.n, frozenset(points))

    @classmethod
    def full(cls, grid: BidGrid) -> "Upset":
        return cls(grid.num_levels, grid.n, frozenset(grid.points()))

    @classmethod
    def empty(cls, grid: BidGrid) -> "Upset":
        return cls(grid.num_levels, grid.n, frozenset())

    def __contains__(self, point: Point) -> bool:
        return point in self.points

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(sorted(self.points))

    def union(self, other: "Upset") -> "Upset":
        self._check_compatible(other)
        return Upset(self.num_levels, self.n, self.points | other.points)

    def intersection(self, other: "Upset") -> "Upset":
        self._check_compatible(other)
        return Upset(self.num_levels, self.n, self.points & other.points)

    def issubset(self, other: "Upset") -> bool:
        self._check_compatible(other)
        return self.points <= other.points

    def _check_compatible(self, other: "Upset") -> None:
        if (self.num_levels, self.n) != (other.num_levels, other.n):
            raise ValueError("upsets live on different grids")

    def is_symmetric(self) -> bool:
        """Invariant under every permutation of the coordinates."""
        return all(
            tuple(q) in self.points
            for p in self.points
            for q in itertools.permutations(p)
        )


def project(upset: Upset, i: int) -> frozenset[Point]:
    """Projection along coordinate ``i``: drop that coordinate from each member.

    For an upward-closed set this equals exactly the slices that still contain
    the top level in coordinate ``i``.
    """
    if not 0 <= i < upset.n:
        raise ValueError(f"coordinate {i} outside [0, {upset.n - 1}]")
    return frozenset(p[:i] + p[i + 1 :] for p in upset.points)


def _point_cap_guard(grid: BidGrid, point_cap: int) -> None:
    if grid.point_count() > point_cap:
        raise DomainTooLargeError(
            f"grid has {grid.point_count()} points, above the enumeration cap "
            f"of {point_cap}"
        )


def enumerate_upsets(grid: BidGrid, point_cap: int = DEFAULT_POINT_CAP) -> list[Upset]:
    """Every upward-closed subset of the grid, exactly once, in a fixed order.

    Points are decided from the top of the grid down; a point may enter only
    when all its upward covers are already in.  The empty set comes first and
    the full grid last.
    """
    _point_cap_guard(grid, point_cap)
    order = sorted(grid.points(), key=lambda p: (sum(p), p), reverse=True)
    top = grid.top
    results: list[Upset] = []
    members: set[Point] = set()

    def covers(p: Point) -> Iterator[Point]:
        for j in range(grid.n):
            if p[j] < top:
                yield p[:j] + (p[j] + 1,) + p[j + 1 :]

    def walk(idx: int) -> None:
        if idx == len(order):
            results.append(Upset(grid.num_levels, grid.n, frozenset(members)))
            return
        p = order[idx]
        walk(idx + 1)
        if all(q in members for q in covers(p)):
            members.add(p)
            walk(idx + 1)
            members.remove(p)

    walk(0)
    return results


def enumerate_symmetric_upsets(
    grid: BidGrid, point_cap: int = DEFAULT_POINT_CAP
) -> list[Upset]:
    """Only the upsets invariant under all coordinate permutations."""
    return [s for s in enumerate_upsets(grid, point_cap) if s.is_symmetric()]
