"""JSON document formats shared by the command-line tools.

Rationals travel as strings ("3/4", "2") so no precision is lost to JSON
numbers.  Every document a command emits parses back through this module
unchanged, and emission is deterministic: fixed key order, sorted rows,
two-space indentation.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from compauction.attainability import Verdict
from compauction.auctions import AuctionProfile, RatioReport
from compauction.benchmarks import (
    BUILTIN_KINDS,
    BenchmarkTable,
    builtin_table,
    validate_table,
)
from compauction.grid import BidGrid, Point, Upset


class FormatError(ValueError):
    """A document failed to parse or failed validation."""


def fraction_to_str(value: Fraction) -> str:
    return str(Fraction(value))


def parse_fraction(text: Any) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise FormatError(f"expected a rational string, got {text!r}")
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}: {exc}") from None


def _expect(doc: Any, key: str, kind: type) -> Any:
    if not isinstance(doc, dict):
        raise FormatError(f"expected an object with field {key!r}")
    if key not in doc:
        raise FormatError(f"missing field {key!r}")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FormatError(f"field {key!r} must be an integer")
    if kind is not int and not isinstance(value, kind):
        raise FormatError(f"field {key!r} must be {kind.__name__}")
    return value


def grid_to_doc(grid: BidGrid) -> dict:
    return {
        "delta": fraction_to_str(grid.delta),
        "levels": grid.num_levels,
        "n": grid.n,
    }


def grid_from_doc(doc: Any) -> BidGrid:
    delta = parse_fraction(_expect(doc, "delta", str))
    levels = _expect(doc, "levels", int)
    n = _expect(doc, "n", int)
    try:
        return BidGrid(delta, levels, n)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _point_from_doc(doc: Any, grid: BidGrid, width: int) -> Point:
    if not isinstance(doc, list) or len(doc) != width:
        raise FormatError(f"expected a list of {width} level indices, got {doc!r}")
    point = []
    for t in doc:
        if isinstance(t, bool) or not isinstance(t, int) or not 0 <= t <= grid.top:
            raise FormatError(f"level index {t!r} outside [0, {grid.top}]")
        point.append(t)
    return tuple(point)


def table_to_doc(table: BenchmarkTable) -> dict:
    doc: dict = {"grid": grid_to_doc(table.grid), "kind": table.kind}
    if table.kind not in BUILTIN_KINDS:
        doc["values"] = [
            {"levels": list(p), "value": fraction_to_str(v)}
            for p, v in sorted(table.values.items())
        ]
    return doc


def table_from_doc(doc: Any) -> BenchmarkTable:
    grid = grid_from_doc(_expect(doc, "grid", dict))
    kind = _expect(doc, "kind", str)
    if kind in BUILTIN_KINDS:
        return builtin_table(grid, kind)
    if kind != "custom":
        raise FormatError(f"unknown benchmark kind {kind!r}")
    rows = _expect(doc, "values", list)
    values: dict[Point, Fraction] = {}
    for row in rows:
        point = _point_from_doc(_expect(row, "levels", list), grid, grid.n)
        if point in values:
            raise FormatError(f"duplicate value row for levels {list(point)}")
        values[point] = parse_fraction(_expect(row, "value", str))
    table = BenchmarkTable(grid, values, kind="custom")
    try:
        validate_table(table)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return table


def profile_to_doc(profile: AuctionProfile) -> dict:
    grid = profile.grid
    rows = []
    for i in range(grid.n):
        for others in sorted(grid.others_points()):
            offers = profile.offer_row(i, others)
            rows.append(
                {
                    "bidder": i + 1,
                    "others": list(others),
                    "prices": [
                        {"level": t, "prob": fraction_to_str(p)}
                        for t, p in sorted(offers.items())
                        if p != 0
                    ],
                }
            )
    return {"grid": grid_to_doc(grid), "z": rows}


def profile_from_doc(doc: Any) -> AuctionProfile:
    grid = grid_from_doc(_expect(doc, "grid", dict))
    z: list[dict[Point, dict[int, Fraction]]] = [{} for _ in range(grid.n)]
    seen: set[tuple[int, Point]] = set()
    for row in _expect(doc, "z", list):
        bidder = _expect(row, "bidder", int)
        if not 1 <= bidder <= grid.n:
            raise FormatError(f"bidder index {bidder} outside 1..{grid.n}")
        others = _point_from_doc(_expect(row, "others", list), grid, grid.n - 1)
        offers: dict[int, Fraction] = {}
        for price in _expect(row, "prices", list):
            level = _expect(price, "level", int)
            if not 0 <= level <= grid.top:
                raise FormatError(f"price level {level} outside [0, {grid.top}]")
            prob = parse_fraction(_expect(price, "prob", str))
            if prob < 0 or prob > 1:
                raise FormatError(f"offer probability {prob} outside [0, 1]")
            if level in offers:
                raise FormatError(f"duplicate price level {level}")
            offers[level] = prob
        if (bidder, others) in seen:
            raise FormatError(
                f"duplicate offer row for bidder {bidder}, others {list(others)}"
            )
        seen.add((bidder, others))
        z[bidder - 1][others] = offers
    return AuctionProfile(grid, z)


def verdict_to_doc(verdict: Verdict) -> dict:
    witness = None
    if verdict.witness is not None:
        witness = [list(p) for p in sorted(verdict.witness.points)]
    return {
        "attainable": verdict.attainable,
        "lambda": fraction_to_str(verdict.lam),
        "witness_upset": witness,
        "method": verdict.method,
    }


def upset_from_doc(doc: Any, grid: BidGrid) -> Upset:
    if not isinstance(doc, list):
        raise FormatError("witness upset must be a list of level vectors")
    points = frozenset(_point_from_doc(p, grid, grid.n) for p in doc)
    try:
        return Upset(grid.num_levels, grid.n, points)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def ratio_to_doc(report: RatioReport) -> dict:
    return {
        "ratio": "unbounded" if report.ratio is None else fraction_to_str(report.ratio),
        "argmax_bid": None if report.argmax is None else list(report.argmax),
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None


def load_file(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return loads(handle.read())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
