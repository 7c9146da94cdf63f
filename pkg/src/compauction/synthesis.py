"""Constructive synthesis of an optimal truthful auction from its benchmark.

Once a benchmark ``f`` passes the attainability condition at ratio ``lam``,
a feasible solution of the revenue system exists and can be built greedily.
The working state holds a copy of ``f`` (driven down to zero), per-direction
mass budgets ``g_i(b_-i)`` (starting at 1), the accumulated revenue tables
``x_i(b_-i, t)``, and a strictly decreasing chain of upward-closed sets

    R = S_0 > S_1 > ... > S_m = empty,

where R is the support of the working ``f`` and every S_j (j >= 1) keeps the
g-weighted attainability inequality tight.  Each round picks the smallest
coordinate ``i`` such that some ``b_-i`` projects out of ``S_1`` but not out
of ``R`` and still has budget, finds the lowest level ``c_i(b_-i)`` where
``f`` is positive, and pushes mass ``eps`` onto ``x_i(b_-i, t)`` for all
``t >= c_i``.  Instead of growing ``x`` the update shrinks ``f`` by
``lam*eps`` on the same points and ``g_i`` by ``eps/c_i``, which leaves every
inequality's slack moving linearly in ``eps``.  ``eps`` grows until the first
of three boundary events, handled in this order:

* a value of ``f`` reaches zero: recompute R, intersect the chain with it,
  contract duplicates;
* a budget ``g_i`` reaches zero: pick a fresh direction;
* some set's inequality becomes tight: splice its union with ``S_1`` into the
  chain.

Each event shrinks the support, spends a budget, or grows the chain, so the
loop terminates; when ``f`` is identically zero the accumulated ``x`` solves
the revenue system at ratio ``lam`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from compauction.attainability import check_attainable
from compauction.auctions import AuctionProfile
from compauction.benchmarks import BenchmarkTable
from compauction.grid import (
    DEFAULT_POINT_CAP,
    BidGrid,
    Point,
    Upset,
    enumerate_upsets,
    project,
    weight_level,
    weight_others,
    weight_vector,
)

DEFAULT_STEP_CAP = 10**6


class NotAttainableError(ValueError):
    """The benchmark fails the attainability condition at the given ratio."""


class IterationLimitError(RuntimeError):
    """Step cap exceeded; termination is guaranteed, so this flags a bug."""


class SynthesisInvariantError(RuntimeError):
    """An internal invariant of the procedure broke; flags a bug."""


class StepEvent(Enum):
    F_ZERO = "f-zero"
    G_ZERO = "g-zero"
    NEW_TIGHT = "new-tight"


@dataclass
class SynthesisState:
    grid: BidGrid
    lam: Fraction
    f: dict[Point, Fraction]
    g: list[dict[Point, Fraction]]
    x: list[dict[Point, list[Fraction]]]
    chain: list[Upset]
    upsets: list[Upset]


@dataclass
class Direction:
    i: int
    members: list[Point]  # the b_-i with budget left, sorted
    cut: dict[Point, int]  # lowest level index where f is positive


@dataclass
class StepOutcome:
    eps: Fraction
    f_hits: list[Point]
    g_hits: list[Point]
    new_tight: list[Upset]
    handled: StepEvent


@dataclass
class RevenueTables:
    """Per-bidder expected revenue ``x_i(b_-i, t)``, monotone in ``t``."""

    grid: BidGrid
    x: list[dict[Point, list[Fraction]]]

    def revenue_at(self, point: Point) -> Fraction:
        total = Fraction(0)
        for i in range(self.grid.n):
            others = point[:i] + point[i + 1 :]
            total += self.x[i][others][point[i]]
        return total


def _insert_at(others: Point, i: int, t: int) -> Point:
    return others[:i] + (t,) + others[i:]


def support_upset(state: SynthesisState) -> Upset:
    """Points where the working benchmark is still positive."""
    pts = frozenset(p for p, v in state.f.items() if v > 0)
    return Upset(state.grid.num_levels, state.grid.n, pts)


def eq_sides(state: SynthesisState, upset: Upset) -> tuple[Fraction, Fraction]:
    """Sides of the g-weighted inequality ``lhs <= lam * rhs`` for one upset."""
    grid = state.grid
    lhs = Fraction(0)
    for p in upset.points:
        lhs += weight_vector(grid, p) * state.f[p]
    rhs = Fraction(0)
    for i in range(grid.n):
        for others in project(upset, i):
            rhs += state.g[i][others] * weight_others(grid, others)
    return lhs, rhs


def eq_slack(state: SynthesisState, upset: Upset) -> Fraction:
    lhs, rhs = eq_sides(state, upset)
    return state.lam * rhs - lhs


def pick_direction(state: SynthesisState) -> Direction:
    """Smallest coordinate with budgeted mass projecting out of S_1 only."""
    grid = state.grid
    head, second = state.chain[0], state.chain[1]
    for i in range(grid.n):
        fringe = project(head, i) - project(second, i)
        members = sorted(o for o in fringe if state.g[i][o] > 0)
        if members:
            cut = {}
            for others in members:
                cut[others] = min(
                    t
                    for t in range(grid.num_levels)
                    if state.f[_insert_at(others, i, t)] > 0
                )
            return Direction(i, members, cut)
    raise SynthesisInvariantError("no coordinate has budgeted mass left")


def _slack_rate(state: SynthesisState, upset: Upset, d: Direction) -> Fraction:
    """How fast the upset's slack shrinks per unit of eps (can be <= 0).

    The right side loses ``lam * w(b_-i)/c_i`` for every direction member
    whose projection meets the set; the left side loses ``lam * w(b_-i)``
    times the weight of the set's fiber above the cut.  Sets whose fibers are
    full above the cut lose equally on both sides and never bind.
    """
    grid = state.grid
    proj = project(upset, d.i)
    gain = Fraction(0)
    for others in d.members:
        w_o = weight_others(grid, others)
        cl = d.cut[others]
        if others in proj:
            gain += w_o / grid.level_value(cl)
        fiber = Fraction(0)
        for t in range(cl, grid.num_levels):
            if _insert_at(others, d.i, t) in upset:
                fiber += weight_level(grid, t)
        gain -= w_o * fiber
    return state.lam * gain


def max_step(state: SynthesisState, d: Direction) -> StepOutcome:
    """Largest admissible eps and the boundary events that stop it.

    If an already-tight set outside the chain would lose slack, eps is zero
    and the set is folded into the chain before any real motion.
    """
    grid = state.grid
    lam = state.lam
    bound_f: Fraction | None = None
    for others in d.members:
        for t in range(d.cut[others], grid.num_levels):
            val = state.f[_insert_at(others, d.i, t)] / lam
            if bound_f is None or val < bound_f:
                bound_f = val
    bound_g: Fraction | None = None
    for others in d.members:
        val = state.g[d.i][others] * grid.level_value(d.cut[others])
        if bound_g is None or val < bound_g:
            bound_g = val
    assert bound_f is not None and bound_g is not None

    stuck: list[Upset] = []
    binding: list[tuple[Fraction, Upset]] = []
    for upset in state.upsets:
        if not upset.points:
            continue
        slack = eq_slack(state, upset)
        rate = _slack_rate(state, upset, d)
        if slack == 0:
            if rate > 0 and upset not in state.chain:
                stuck.append(upset)
        elif rate > 0:
            binding.append((slack / rate, upset))

    if stuck:
        return StepOutcome(Fraction(0), [], [], stuck, StepEvent.NEW_TIGHT)

    eps = min([bound_f, bound_g] + [e for e, _ in binding])
    f_hits = sorted(
        _insert_at(others, d.i, t)
        for others in d.members
        for t in range(d.cut[others], grid.num_levels)
        if state.f[_insert_at(others, d.i, t)] == lam * eps
    )
    g_hits = sorted(
        others
        for others in d.members
        if state.g[d.i][others] * grid.level_value(d.cut[others]) == eps
    )
    new_tight = [u for e, u in binding if e == eps]
    if f_hits:
        handled = StepEvent.F_ZERO
    elif g_hits:
        handled = StepEvent.G_ZERO
    else:
        handled = StepEvent.NEW_TIGHT
    return StepOutcome(eps, f_hits, g_hits, new_tight, handled)


def apply_step(state: SynthesisState, d: Direction, eps: Fraction) -> None:
    """Shift mass eps onto x along the direction; shrink f and g to match."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0:
        return
    grid = state.grid
    lam = state.lam
    for others in d.members:
        cl = d.cut[others]
        state.g[d.i][others] -= eps / grid.level_value(cl)
        if state.g[d.i][others] < 0:
            raise SynthesisInvariantError("mass budget went negative")
        row = state.x[d.i][others]
        for t in range(cl, grid.num_levels):
            p = _insert_at(others, d.i, t)
            state.f[p] -= lam * eps
            if state.f[p] < 0:
                raise SynthesisInvariantError("working benchmark went negative")
            row[t] += eps


def handle_event(state: SynthesisState, outcome: StepOutcome) -> None:
    """Update the chain according to the event that stopped the step."""
    if outcome.handled is StepEvent.F_ZERO:
        support = support_upset(state)
        rebuilt: list[Upset] = []
        for s in state.chain:
            cut = s.intersection(support)
            if not rebuilt or rebuilt[-1] != cut:
                rebuilt.append(cut)
        state.chain = rebuilt
        return
    if outcome.handled is StepEvent.G_ZERO:
        return

    head = state.chain[0]
    inserted = 0
    order = sorted(outcome.new_tight, key=lambda s: (len(s), sorted(s.points)))
    for fresh in order:
        trimmed = fresh.intersection(head)
        if eq_slack(state, trimmed) != 0:
            raise SynthesisInvariantError("trimmed tight set lost tightness")
        merged = trimmed.union(state.chain[1])
        if merged == state.chain[1]:
            continue
        if not merged.points < head.points:
            raise SynthesisInvariantError("tight set spans the whole support")
        state.chain.insert(1, merged)
        inserted += 1
    if inserted == 0:
        raise SynthesisInvariantError("tight-set event produced no chain growth")


def synthesize(
    table: BenchmarkTable,
    lam: Fraction,
    observer: "TraceRecorder | None" = None,
    point_cap: int = DEFAULT_POINT_CAP,
    max_steps: int = DEFAULT_STEP_CAP,
    validate_steps: bool = False,
) -> RevenueTables:
    """Build revenue tables solving the system at ratio ``lam``.

    Raises :class:`NotAttainableError` when the benchmark fails the
    attainability condition.  ``validate_steps`` re-checks every invariant
    after every step (meant for tests on tiny grids).
    """
    lam = Fraction(lam)
    grid = table.grid
    verdict = check_attainable(table, lam, point_cap=point_cap)
    if not verdict.attainable:
        raise NotAttainableError(
            f"benchmark is not attainable at ratio {lam}; "
            f"witness set of size {len(verdict.witness) if verdict.witness else 0}"
        )

    state = SynthesisState(
        grid=grid,
        lam=lam,
        f={p: Fraction(v) for p, v in table.values.items()},
        g=[
            {o: Fraction(1) for o in grid.others_points()} for _ in range(grid.n)
        ],
        x=[
            {o: [Fraction(0)] * grid.num_levels for o in grid.others_points()}
            for _ in range(grid.n)
        ],
        chain=[],
        upsets=enumerate_upsets(grid, point_cap),
    )
    support = support_upset(state)
    state.chain = [support, Upset.empty(grid)]
    if observer is not None:
        observer.initial(state)
    if not support.points:
        if observer is not None:
            observer.finished(0)
        return RevenueTables(grid, state.x)

    steps = 0
    while any(v > 0 for v in state.f.values()):
        if steps >= max_steps:
            raise IterationLimitError(f"no termination within {max_steps} steps")
        steps += 1
        direction = pick_direction(state)
        outcome = max_step(state, direction)
        apply_step(state, direction, outcome.eps)
        handle_event(state, outcome)
        if validate_steps:
            check_invariants(state, original=table)
        if observer is not None:
            observer.step(steps, state, direction, outcome)
    if observer is not None:
        observer.finished(steps)
    return RevenueTables(grid, state.x)


def check_invariants(
    state: SynthesisState, original: BenchmarkTable | None = None
) -> None:
    """Assert every invariant the procedure promises to preserve.

    Meant for tests and debugging on enumeration-scale grids: the g-weighted
    inequality for every upset, tightness of every chain set, monotone
    non-negative working benchmark, budgets decreasing along each chain
    layer, monotone non-negative revenue rows, and exact accounting between
    the original benchmark, the working one, and the revenue collected.
    """
    grid = state.grid

    for upset in state.upsets:
        if eq_slack(state, upset) < 0:
            raise SynthesisInvariantError(f"inequality violated for {sorted(upset)}")
    for s in state.chain[1:]:
        if s.points and eq_slack(state, s) != 0:
            raise SynthesisInvariantError(f"chain set {sorted(s)} lost tightness")
    for a, b in zip(state.chain, state.chain[1:]):
        if not b.points < a.points:
            raise SynthesisInvariantError("chain is not strictly decreasing")
    if state.chain and state.chain[0] != support_upset(state):
        raise SynthesisInvariantError("chain head differs from the support")

    for p, v in state.f.items():
        if v < 0:
            raise SynthesisInvariantError(f"working benchmark negative at {p}")
        for j in range(grid.n):
            if p[j] < grid.top:
                q = p[:j] + (p[j] + 1,) + p[j + 1 :]
                if state.f[q] < v:
                    raise SynthesisInvariantError("working benchmark not monotone")

    for i in range(grid.n):
        for others, val in state.g[i].items():
            if val < 0:
                raise SynthesisInvariantError(f"budget negative at i={i} {others}")
    for upper, lower in zip(state.chain, state.chain[1:]):
        for i in range(grid.n):
            layer = sorted(project(upper, i) - project(lower, i))
            for a in layer:
                for b in layer:
                    if a != b and all(s <= t for s, t in zip(a, b)):
                        if state.g[i][a] < state.g[i][b]:
                            raise SynthesisInvariantError(
                                f"budget increases along layer at i={i}: {a} -> {b}"
                            )

    for i in range(grid.n):
        for others, row in state.x[i].items():
            last = Fraction(0)
            for t, val in enumerate(row):
                if val < 0 or val < last:
                    raise SynthesisInvariantError("revenue row not monotone")
                last = val

    if original is not None:
        rev = RevenueTables(grid, state.x)
        for p in grid.points():
            if original[p] != state.f[p] + state.lam * rev.revenue_at(p):
                raise SynthesisInvariantError(f"accounting mismatch at {p}")


def x_to_z(revenue: RevenueTables) -> AuctionProfile:
    """Differentiate revenue tables into price-offer probabilities.

    ``z_i(b_-i, t)`` is the increment of ``x_i`` at level ``t`` divided by the
    level's value; monotonicity of ``x_i`` makes the result non-negative, and
    the weighted-mass bound caps the offer mass at one.  Rebuilding ``x``
    from ``z`` is exact.
    """
    grid = revenue.grid
    z: list[dict[Point, dict[int, Fraction]]] = []
    for i in range(grid.n):
        rows: dict[Point, dict[int, Fraction]] = {}
        for others, row in revenue.x[i].items():
            prev = Fraction(0)
            offers: dict[int, Fraction] = {}
            for t, val in enumerate(row):
                if val < prev:
                    raise ValueError("revenue table is not monotone in the level")
                prob = (val - prev) / grid.level_value(t)
                if prob:
                    offers[t] = prob
                prev = val
            rows[others] = offers
        z.append(rows)
    return AuctionProfile(grid, z)


def verify_ls2(
    revenue: RevenueTables, table: BenchmarkTable, lam: Fraction
) -> bool:
    """Exact check of all four revenue-system constraint families."""
    lam = Fraction(lam)
    grid = revenue.grid
    for p in grid.points():
        if lam * revenue.revenue_at(p) < table[p]:
            return False
    for i in range(grid.n):
        for others in grid.others_points():
            row = revenue.x[i][others]
            mass = Fraction(0)
            prev = Fraction(0)
            for t, val in enumerate(row):
                if val < 0 or val < prev:
                    return False
                mass += weight_level(grid, t) * val
                prev = val
            if mass > 1:
                return False
    return True


def _format_value(value: Fraction) -> str:
    """Integers bare, short terminating decimals as decimals, else p/q."""
    if value.denominator == 1:
        return str(value.numerator)
    rest = value.denominator
    for prime in (2, 5):
        while rest % prime == 0:
            rest //= prime
    if rest != 1:
        return f"{value.numerator}/{value.denominator}"
    places = 1
    while (10**places) % value.denominator != 0:
        places += 1
        if places > 6:
            return f"{value.numerator}/{value.denominator}"
    digits = abs(value.numerator) * (10**places) // value.denominator
    sign = "-" if value.numerator < 0 else ""
    whole, frac = divmod(digits, 10**places)
    return f"{sign}{whole}.{str(frac).zfill(places)}"


def _format_point(grid: BidGrid, point: Point) -> str:
    vals = ",".join(_format_value(grid.level_value(t)) for t in point)
    return f"({vals})"


def _format_others(grid: BidGrid, others: Point) -> str:
    if len(others) == 1:
        return _format_value(grid.level_value(others[0]))
    return _format_point(grid, others)


def _format_upset(grid: BidGrid, upset: Upset) -> str:
    return "{" + ", ".join(_format_point(grid, p) for p in sorted(upset.points)) + "}"


class TraceRecorder:
    """Collects a step-by-step textual trace of a synthesis run.

    Grids with two bidders print as 2-D tables: rows are the second bid
    descending, columns the first bid ascending.  Larger grids fall back to
    one ``f(point) = value`` line per point.
    """

    def __init__(self, grid: BidGrid, lam: Fraction):
        self.grid = grid
        delta = _format_value(grid.delta)
        lam_s = _format_value(Fraction(lam))
        self.lines: list[str] = [
            "synthesis trace",
            f"grid: delta={delta} levels={grid.num_levels} bidders={grid.n}",
            f"lambda: {lam_s}",
        ]

    def initial(self, state: SynthesisState) -> None:
        self.lines.append("")
        self.lines.append("initial")
        self._chain(state)
        self._tables(state)

    def step(
        self,
        number: int,
        state: SynthesisState,
        direction: Direction,
        outcome: StepOutcome,
    ) -> None:
        grid = self.grid
        members = ", ".join(_format_others(grid, o) for o in direction.members)
        cuts = ", ".join(
            f"{_format_others(grid, o)}: "
            f"{_format_value(grid.level_value(direction.cut[o]))}"
            for o in direction.members
        )
        self.lines.append("")
        self.lines.append(f"step {number}")
        self.lines.append(
            f"direction: i={direction.i + 1}  T=[{members}]  c={{{cuts}}}"
        )
        self.lines.append(f"eps: {_format_value(outcome.eps)}")
        events = []
        if outcome.f_hits:
            pts = ", ".join(_format_point(grid, p) for p in outcome.f_hits)
            events.append(f"f=0 at {pts}")
        if outcome.g_hits:
            pts = ", ".join(_format_others(grid, o) for o in outcome.g_hits)
            events.append(f"g{direction.i + 1}=0 at {pts}")
        if outcome.new_tight:
            sets = ", ".join(_format_upset(grid, s) for s in outcome.new_tight)
            events.append(f"new tight {sets}")
        self.lines.append("events: " + "; ".join(events))
        self._chain(state)
        self._tables(state)

    def finished(self, steps: int) -> None:
        self.lines.append("")
        self.lines.append(f"done after {steps} steps")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def _chain(self, state: SynthesisState) -> None:
        parts = " > ".join(_format_upset(self.grid, s) for s in state.chain)
        self.lines.append(f"chain: {parts}")

    def _tables(self, state: SynthesisState) -> None:
        grid = self.grid
        self._grid_block("f", {p: state.f[p] for p in grid.points()})
        for i in range(grid.n):
            row = ", ".join(
                f"{_format_others(grid, o)}: {_format_value(state.g[i][o])}"
                for o in sorted(state.g[i])
            )
            self.lines.append(f"g{i + 1}: {{{row}}}")
        for i in range(grid.n):
            table = {
                _insert_at(others, i, t): row[t]
                for others, row in state.x[i].items()
                for t in range(grid.num_levels)
            }
            self._grid_block(f"x{i + 1}", table)

    def _grid_block(self, name: str, values: dict[Point, Fraction]) -> None:
        grid = self.grid
        self.lines.append(f"{name}:")
        if grid.n == 2:
            cells = {
                p: _format_value(v) for p, v in values.items()
            }
            width = max(len(s) for s in cells.values())
            for b2 in range(grid.top, -1, -1):
                row = "  ".join(
                    cells[(b1, b2)].rjust(width) for b1 in range(grid.num_levels)
                )
                self.lines.append(f"  {row}")
        else:
            for p in sorted(values):
                self.lines.append(
                    f"  {name}{_format_point(grid, p)} = {_format_value(values[p])}"
                )
