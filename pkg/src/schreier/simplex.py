"""Exact-rational two-phase simplex for small dense linear programs.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0  with
Fraction arithmetic and Bland's rule, so there is no cycling and no
rounding.  Problem sizes here are tiny (tens of rows), so a dense tableau
is the right tool.
"""

from __future__ import annotations

from fractions import Fraction


class LPError(RuntimeError):
    pass


def _pivot(tableau, basis, row: int, col: int):
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col]:
            factor = line[col]
            tableau[r] = [v - factor * w for v, w in zip(line, tableau[row])]
    basis[row] = col


def _run(tableau, basis, cost, allowed, ncols):
    """Optimize the tableau in place; cost is indexed by column."""
    m = len(basis)
    while True:
        # reduced costs under the current basis
        reduced = list(cost)
        for r in range(m):
            cb = cost[basis[r]]
            if cb:
                row = tableau[r]
                for j in range(ncols):
                    reduced[j] -= cb * row[j]
        enter = -1
        for j in range(ncols):
            if allowed[j] and reduced[j] < 0:
                enter = j
                break
        if enter < 0:
            value = Fraction(0)
            for r in range(m):
                value += cost[basis[r]] * tableau[r][ncols]
            return value
        leave, best = -1, None
        for r in range(m):
            coef = tableau[r][enter]
            if coef > 0:
                ratio = tableau[r][ncols] / coef
                if best is None or ratio < best or \
                        (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave < 0:
            raise LPError("linear program is unbounded")
        _pivot(tableau, basis, leave, enter)


def solve_lp(c, a_ub=(), b_ub=(), a_eq=(), b_eq=()):
    """Returns (x, value) minimizing c.x; raises LPError when infeasible."""
    n = len(c)
    m1, m2 = len(a_ub), len(a_eq)
    ncols = n + m1 + m2
    tableau = []
    basis = []
    for i, (row, b) in enumerate(zip(a_ub, b_ub)):
        b = Fraction(b)
        if b < 0:
            raise LPError("rows must be normalized to nonnegative rhs")
        line = [Fraction(v) for v in row] + [Fraction(0)] * (m1 + m2)
        line[n + i] = Fraction(1)
        line.append(b)
        tableau.append(line)
        basis.append(n + i)
    for i, (row, b) in enumerate(zip(a_eq, b_eq)):
        b = Fraction(b)
        if b < 0:
            row = [-Fraction(v) for v in row]
            b = -b
        line = [Fraction(v) for v in row] + [Fraction(0)] * (m1 + m2)
        line[n + m1 + i] = Fraction(1)
        line.append(b)
        tableau.append(line)
        basis.append(n + m1 + i)

    allowed = [True] * ncols
    if m2:
        phase1 = [Fraction(0)] * ncols
        for j in range(n + m1, ncols):
            phase1[j] = Fraction(1)
        value = _run(tableau, basis, phase1, allowed, ncols)
        if value != 0:
            raise LPError("linear program is infeasible")
        # pivot surviving artificials out or leave them at zero, but never
        # let them re-enter
        for j in range(n + m1, ncols):
            allowed[j] = False
        for r in range(len(basis)):
            if basis[r] >= n + m1:
                for j in range(n + m1):
                    if tableau[r][j]:
                        _pivot(tableau, basis, r, j)
                        break

    cost = [Fraction(v) for v in c] + [Fraction(0)] * (m1 + m2)
    value = _run(tableau, basis, cost, allowed, ncols)
    x = [Fraction(0)] * n
    for r, b in enumerate(basis):
        if b < n:
            x[b] = tableau[r][ncols]
    return x, value
