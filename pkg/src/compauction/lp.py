"""Exact linear programming over the rationals.

A small dense two-phase simplex for the feasibility and ratio-minimization
systems used as the independent oracle against upset enumeration.  All
arithmetic is :class:`fractions.Fraction`; pivots follow Bland's rule, which
guarantees termination without any tolerance knobs.  Problems here are tiny
(tens of variables), so a dense tableau is the right tool.

Conventions: minimize ``c . x`` subject to ``A_ub x <= b_ub``,
``A_eq x = b_eq`` and ``x >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

_PIVOT_CAP = 10**6


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: LPStatus
    x: list[Fraction] | None = None
    objective: Fraction | None = None


def _pivot(tableau: list[list[Fraction]], obj: list[Fraction], row: int, col: int,
           basis: list[int]) -> None:
    prow = tableau[row]
    inv = Fraction(1) / prow[col]
    if inv != 1:
        tableau[row] = prow = [v * inv for v in prow]
    for r, other in enumerate(tableau):
        if r == row:
            continue
        factor = other[col]
        if factor:
            tableau[r] = [a - factor * b for a, b in zip(other, prow)]
    factor = obj[col]
    if factor:
        obj[:] = [a - factor * b for a, b in zip(obj, prow)]
    basis[row] = col


def _run_simplex(tableau: list[list[Fraction]], obj: list[Fraction],
                 basis: list[int]) -> LPStatus:
    """Minimize until all reduced costs are non-negative (Bland's rule)."""
    ncols = len(obj) - 1
    for _ in range(_PIVOT_CAP):
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return LPStatus.OPTIMAL
        row = None
        best: Fraction | None = None
        for r, line in enumerate(tableau):
            if line[col] > 0:
                ratio = line[-1] / line[col]
                if best is None or ratio < best or (
                    ratio == best and row is not None and basis[r] < basis[row]
                ):
                    best = ratio
                    row = r
        if row is None:
            return LPStatus.UNBOUNDED
        _pivot(tableau, obj, row, col, basis)
    raise RuntimeError("simplex pivot cap exceeded")


def solve_lp(
    c: Sequence[Fraction],
    A_ub: Sequence[Sequence[Fraction]] = (),
    b_ub: Sequence[Fraction] = (),
    A_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> LPResult:
    """Exact two-phase simplex; variables are implicitly non-negative."""
    nx = len(c)
    rows = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(A_ub, b_ub)]
    neq = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(A_eq, b_eq)]
    n_ub = len(rows)
    m = n_ub + len(neq)

    # Columns: x vars, one slack per <= row, artificials appended as needed.
    ncols = nx + n_ub
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    art_rows: list[int] = []
    for i, row in enumerate(rows + neq):
        body, rhs = row[:-1], row[-1]
        body = body + [Fraction(0)] * (nx - len(body))
        slacks = [Fraction(0)] * n_ub
        if i < n_ub:
            slacks[i] = Fraction(1)
        line = body + slacks
        if rhs < 0:
            line = [-v for v in line]
            rhs = -rhs
        if i < n_ub and line[nx + i] == 1:
            basis.append(nx + i)
        else:
            basis.append(-1)  # placeholder, artificial assigned below
            art_rows.append(i)
        tableau.append(line + [rhs])

    n_art = len(art_rows)
    for k, i in enumerate(art_rows):
        for r, line in enumerate(tableau):
            line.insert(ncols + k, Fraction(1 if r == i else 0))
        basis[i] = ncols + k
    total = ncols + n_art

    # Phase 1: minimize the sum of artificials.
    obj = [Fraction(0)] * (total + 1)
    for k in range(n_art):
        obj[ncols + k] = Fraction(1)
    for i in art_rows:
        obj = [a - b for a, b in zip(obj, tableau[i])]
    if m and _run_simplex(tableau, obj, basis) != LPStatus.OPTIMAL:
        raise RuntimeError("phase one cannot be unbounded")
    if -obj[-1] > 0:
        return LPResult(LPStatus.INFEASIBLE)

    # Drive leftover artificials out of the basis; drop redundant rows.
    for r in range(m - 1, -1, -1):
        if basis[r] >= ncols:
            col = next((j for j in range(ncols) if tableau[r][j] != 0), None)
            if col is None:
                del tableau[r]
                del basis[r]
            else:
                _pivot(tableau, obj, r, col, basis)
    for line in tableau:
        del line[ncols:total]

    # Phase 2: the real objective, expressed in reduced costs over the basis.
    obj = list(map(Fraction, c)) + [Fraction(0)] * (ncols - nx) + [Fraction(0)]
    for r, b in enumerate(basis):
        if obj[b]:
            factor = obj[b]
            obj = [a - factor * v for a, v in zip(obj, tableau[r])]
    status = _run_simplex(tableau, obj, basis)
    if status == LPStatus.UNBOUNDED:
        return LPResult(LPStatus.UNBOUNDED)

    x = [Fraction(0)] * nx
    for r, b in enumerate(basis):
        if b < nx:
            x[b] = tableau[r][-1]
    return LPResult(LPStatus.OPTIMAL, x=x, objective=-obj[-1])


def feasible(
    A_ub: Sequence[Sequence[Fraction]] = (),
    b_ub: Sequence[Fraction] = (),
    A_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
    num_vars: int | None = None,
) -> bool:
    """Exact feasibility of ``A_ub x <= b_ub, A_eq x = b_eq, x >= 0``."""
    if num_vars is None:
        widths = [len(r) for r in A_ub] + [len(r) for r in A_eq]
        num_vars = max(widths, default=0)
    zero = [Fraction(0)] * num_vars
    return solve_lp(zero, A_ub, b_ub, A_eq, b_eq).status != LPStatus.INFEASIBLE
