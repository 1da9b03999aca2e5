"""Two-phase tableau simplex over exact rationals with Bland's anti-cycling rule.

Solves::

    minimize    c . x
    subject to  A_ub x <= b_ub
                x_j >= 0   unless j is listed in ``free``

Sizes here are tiny (a few dozen rows), so a dense tableau of Fractions is fine.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[list[Fraction]]
    value: Optional[Fraction]


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, col: int, obj: list[Fraction], obj_rhs: list[Fraction]):
        row = self.rows[r]
        piv = row[col]
        if piv != 1:
            inv = 1 / piv
            row[:] = [v * inv for v in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            factor = other[col]
            if factor:
                other[:] = [a - factor * b for a, b in zip(other, row)]
                self.rhs[i] -= factor * self.rhs[r]
        factor = obj[col]
        if factor:
            obj[:] = [a - factor * b for a, b in zip(obj, row)]
            obj_rhs[0] -= factor * self.rhs[r]
        self.basis[r] = col

    def optimize(self, obj: list[Fraction], obj_rhs: list[Fraction], allowed: int) -> bool:
        """Minimize; ``obj`` holds reduced costs. Returns False if unbounded."""
        while True:
            col = next((j for j in range(allowed) if obj[j] < 0), None)
            if col is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], col, obj, obj_rhs)


def solve(
    c: Sequence,
    A_ub: Sequence[Sequence],
    b_ub: Sequence,
    free: Iterable[int] = (),
) -> LpSolution:
    free = set(free)
    nvar = len(c)
    # column layout: original vars (x_j or x_j^+), then x_j^- for free vars, then slacks
    neg_col = {}
    for j in sorted(free):
        neg_col[j] = nvar + len(neg_col)
    n_struct = nvar + len(neg_col)
    m = len(A_ub)
    n_cols = n_struct + m

    rows, rhs, needs_art = [], [], []
    for i, (arow, bi) in enumerate(zip(A_ub, b_ub)):
        row = [Fraction(0)] * n_cols
        for j, a in enumerate(arow):
            a = Fraction(a)
            row[j] = a
            if j in neg_col:
                row[neg_col[j]] = -a
        row[n_struct + i] = Fraction(1)
        bi = Fraction(bi)
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
            needs_art.append(i)
        rows.append(row)
        rhs.append(bi)

    # artificial columns appended after slacks
    n_art = len(needs_art)
    for row in rows:
        row.extend([Fraction(0)] * n_art)
    basis = [n_struct + i for i in range(m)]
    for k, i in enumerate(needs_art):
        rows[i][n_cols + k] = Fraction(1)
        basis[i] = n_cols + k
    tab = _Tableau(rows, rhs, basis)
    total = n_cols + n_art

    if n_art:
        obj = [Fraction(0)] * total
        for k in range(n_art):
            obj[n_cols + k] = Fraction(1)
        obj_rhs = [Fraction(0)]
        for i in needs_art:
            obj = [a - b for a, b in zip(obj, rows[i])]
            obj_rhs[0] -= rhs[i]
        tab.optimize(obj, obj_rhs, total)
        if -obj_rhs[0] != 0:
            return LpSolution("infeasible", None, None)
        # drive remaining artificials out of the basis
        for r in range(len(tab.rows) - 1, -1, -1):
            if tab.basis[r] >= n_cols:
                col = next((j for j in range(n_cols) if tab.rows[r][j] != 0), None)
                if col is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                else:
                    tab.pivot(r, col, obj, obj_rhs)
        for row in tab.rows:
            del row[n_cols:]

    obj = [Fraction(0)] * n_cols
    for j, cj in enumerate(c):
        obj[j] = Fraction(cj)
        if j in neg_col:
            obj[neg_col[j]] = -Fraction(cj)
    obj_rhs = [Fraction(0)]
    for r, b in enumerate(tab.basis):
        if obj[b]:
            factor = obj[b]
            obj = [a - factor * v for a, v in zip(obj, tab.rows[r])]
            obj_rhs[0] -= factor * tab.rhs[r]
    if not tab.optimize(obj, obj_rhs, n_cols):
        return LpSolution("unbounded", None, None)

    values = [Fraction(0)] * n_cols
    for r, b in enumerate(tab.basis):
        values[b] = tab.rhs[r]
    x = [values[j] - (values[neg_col[j]] if j in neg_col else 0) for j in range(nvar)]
    return LpSolution("optimal", x, -obj_rhs[0])
