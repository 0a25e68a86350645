"""Sparse Gauss-Jordan elimination over the rational-function field."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import Inconsistent, SingularSystem, Underdetermined
from .field import ZERO_RF, RationalFunction, as_rf
from .symbols import Symbol


@dataclass
class Elimination:
    """Outcome of :func:`eliminate`.

    ``solution`` maps each pivot unknown to an expression in the free
    unknowns and the remaining symbols.  ``residuals`` are the reduced rows
    that contain no pivot-eligible unknown; they are the conditions under
    which the system is consistent.
    """

    solution: dict
    pivots: list
    free: list
    residuals: list = field(default_factory=list)
    pivot_entries: list = field(default_factory=list)


def linear_rows(equations: Iterable, unknowns: Sequence[Symbol]):
    """Split each affine equation into ``({unknown: coeff}, constant)``."""
    unk = set(unknowns)
    rows = []
    for k, e in enumerate(equations):
        e = as_rf(e)
        if e.is_zero():
            rows.append(({}, ZERO_RF))
            continue
        if e.denominator().depends_on(unk.__contains__):
            raise ValueError(f"equation {k} has an unknown in its denominator")
        coeffs = {}
        const = ZERO_RF
        for mono, c in e.split(unknowns).items():
            if not mono:
                const = c
            elif len(mono) == 1 and mono[0][1] == 1:
                coeffs[mono[0][0]] = c
            else:
                raise ValueError(f"equation {k} is not affine in the unknowns")
        rows.append((coeffs, const))
    return rows


def eliminate(equations, unknowns: Sequence[Symbol], pivot_candidates: Iterable[Symbol] | None = None) -> Elimination:
    """Reduce an affine system to row-echelon form.

    Pivots are chosen by (number of eligible entries in the row, size of the
    entry, position of the unknown, row index), which keeps the fill-in low.
    Columns outside ``pivot_candidates`` are never pivoted and stay symbolic.
    """
    return eliminate_rows(linear_rows(equations, unknowns), unknowns, pivot_candidates)


def eliminate_rows(rows, unknowns: Sequence[Symbol], pivot_candidates: Iterable[Symbol] | None = None, priority: Sequence | None = None) -> Elimination:
    """:func:`eliminate` on rows already split as ``({unknown: coeff}, constant)``.

    ``priority`` optionally ranks rows (lower first) ahead of the sparsity key.
    """
    order = {s: i for i, s in enumerate(unknowns)}
    eligible = set(unknowns if pivot_candidates is None else pivot_candidates)
    prio = list(priority) if priority is not None else [0] * len(rows)
    rows = [({c: as_rf(v) for c, v in r.items() if not as_rf(v).is_zero()}, as_rf(b)) for r, b in rows]
    keep = [k for k, r in enumerate(rows) if r[0] or not r[1].is_zero()]
    rows = [rows[k] for k in keep]
    prio = [prio[k] for k in keep]
    pivots: list = []
    pivot_rows: list = []
    pivot_entries: list = []
    active = list(range(len(rows)))
    while True:
        best = None
        for r in active:
            row = rows[r][0]
            cols = [c for c in row if c in eligible]
            if not cols or (best is not None and (prio[r], len(cols)) > best[0][:2]):
                continue
            for col in cols:
                key = (prio[r], len(cols), row[col].node_count(), order[col], r)
                if best is None or key < best[0]:
                    best = (key, r, col)
        if best is None:
            break
        _, r, col = best
        coeffs, const = rows[r]
        p = coeffs[col]
        pivot_entries.append(p)
        inv = p.inverse()
        coeffs = {c: (v * inv) for c, v in coeffs.items()}
        coeffs[col] = as_rf(1)
        const = const * inv
        rows[r] = (coeffs, const)
        active.remove(r)
        for o in range(len(rows)):
            if o == r:
                continue
            oc, ob = rows[o]
            f = oc.get(col)
            if f is None:
                continue
            new = dict(oc)
            del new[col]
            for c, v in coeffs.items():
                if c == col:
                    continue
                nv = new.get(c, ZERO_RF) - f * v
                if nv.is_zero():
                    new.pop(c, None)
                else:
                    new[c] = nv
            rows[o] = (new, ob - f * const)
        pivots.append(col)
        pivot_rows.append(r)
    solution = {}
    for col, r in zip(pivots, pivot_rows):
        coeffs, const = rows[r]
        val = -const
        for c, v in coeffs.items():
            if c != col:
                val = val - v * as_rf(c)
        solution[col] = val
    free = [s for s in unknowns if s not in solution]
    residuals = []
    for r in active:
        coeffs, const = rows[r]
        if not coeffs and const.is_zero():
            continue
        val = const
        for c, v in coeffs.items():
            val = val + v * as_rf(c)
        if not val.is_zero():
            residuals.append(val)
    return Elimination(solution, pivots, free, residuals, pivot_entries)


def back_substitute(equations, solution: dict) -> list:
    """Residuals of ``equations`` after substituting ``solution``."""
    return [as_rf(e).subs(solution, rename_opaque=False) for e in equations]


def solve_linear(equations, unknowns: Sequence[Symbol]) -> dict:
    """Unique solution of an affine system, verified by back-substitution."""
    equations = [as_rf(e) for e in equations]
    unknowns = list(unknowns)
    if len(equations) < len(unknowns):
        raise Underdetermined(f"{len(equations)} equations for {len(unknowns)} unknowns", unknowns)
    el = eliminate(equations, unknowns)
    if len(el.pivots) < len(unknowns) and len(equations) == len(unknowns):
        raise SingularSystem("coefficient matrix is singular")
    if el.residuals:
        raise Inconsistent("system has no solution", el.residuals)
    if el.free:
        raise Underdetermined("solution is not unique", el.free)
    for k, res in enumerate(back_substitute(equations, el.solution)):
        if not res.is_zero():
            raise AssertionError(f"back-substitution left a nonzero residual in equation {k}")
    return {s: el.solution[s] for s in unknowns}


def matrix_rank(rows: Sequence[Sequence]) -> tuple:
    """Generic rank over the function field and the pivot entries used."""
    m = [[as_rf(v) for v in row] for row in rows]
    if not m:
        return 0, []
    ncols = len(m[0])
    pivots = []
    rank = 0
    used = [False] * len(m)
    for c in range(ncols):
        best = None
        for r in range(len(m)):
            if not used[r] and not m[r][c].is_zero():
                key = m[r][c].node_count()
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            continue
        r = best[1]
        used[r] = True
        p = m[r][c]
        pivots.append(p)
        rank += 1
        inv = p.inverse()
        for o in range(len(m)):
            if o != r and not used[o] and not m[o][c].is_zero():
                f = m[o][c] * inv
                m[o] = [m[o][k] - f * m[r][k] for k in range(ncols)]
    return rank, pivots


def determinant(matrix: Sequence[Sequence]) -> RationalFunction:
    """Cofactor-free determinant by fraction-tracking elimination."""
    m = [[as_rf(v) for v in row] for row in matrix]
    n = len(m)
    det = as_rf(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
        if piv is None:
            return ZERO_RF
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        inv = p.inverse()
        for r in range(c + 1, n):
            if not m[r][c].is_zero():
                f = m[r][c] * inv
                m[r] = [m[r][k] - f * m[c][k] for k in range(n)]
    return det


def laplace_determinant(matrix: Sequence[Sequence]) -> RationalFunction:
    """Determinant by cofactor expansion along the first row (division-free)."""
    m = [[as_rf(v) for v in row] for row in matrix]
    n = len(m)
    if n == 0:
        return as_rf(1)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    out = ZERO_RF
    for c in range(n):
        if m[0][c].is_zero():
            continue
        t = m[0][c] * laplace_determinant([row[:c] + row[c + 1:] for row in m[1:]])
        out = out + t if c % 2 == 0 else out - t
    return out


def cofactor(matrix: Sequence[Sequence], i: int, j: int) -> RationalFunction:
    """Signed cofactor of entry ``(i, j)`` (0-based)."""
    minor = [[v for c, v in enumerate(row) if c != j] for r, row in enumerate(matrix) if r != i]
    c = laplace_determinant(minor)
    return -c if (i + j) % 2 else c


def adjugate(matrix: Sequence[Sequence]) -> list:
    n = len(matrix)
    if n == 1:
        return [[as_rf(1)]]
    return [[cofactor(matrix, j, i) for j in range(n)] for i in range(n)]
