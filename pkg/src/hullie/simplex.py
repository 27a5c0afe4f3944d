"""Exact linear feasibility via two-phase simplex over the rationals.

The interface is feasibility-only: equality systems A x = b with per-variable
sign masks (nonnegative, strictly positive, or free).  Strict positivity is
reduced to maximizing an auxiliary slack t subject to x_j >= t and t <= 1 and
testing whether the exact optimum is positive.  Bland's lowest-index rule is
used for entering and leaving variables, so every run terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exact import ONE, Rat, Vec, ZERO, vdot


@dataclass(frozen=True)
class FeasibilitySystem:
    """Equality system A x = b with sign masks.

    nonneg[j] requires x_j >= 0 (otherwise x_j is free); strict[j] requires
    x_j > 0 and implies nonneg[j].
    """

    eq_rows: tuple
    rhs: Vec
    nonneg: tuple
    strict: tuple

    def __post_init__(self):
        ncols = len(self.nonneg)
        if len(self.strict) != ncols:
            raise ValueError("mask length mismatch")
        if any(s and not n for s, n in zip(self.strict, self.nonneg)):
            raise ValueError("strict variables must also be nonnegative")
        if len(self.eq_rows) != len(self.rhs):
            raise ValueError("row/rhs count mismatch")
        for row in self.eq_rows:
            if len(row) != ncols:
                raise ValueError("row length mismatch")

    @property
    def ncols(self) -> int:
        return len(self.nonneg)


def _pivot(tab, basis, r, c):
    inv = ONE / tab[r][c]
    tab[r] = [a * inv for a in tab[r]]
    prow = tab[r]
    for i in range(len(tab)):
        if i != r and tab[i][c] != 0:
            f = tab[i][c]
            tab[i] = [a - f * b for a, b in zip(tab[i], prow)]
    basis[r] = c


def _simplex_min(tab, basis, ncols):
    """Run simplex on a tableau whose last row holds reduced costs.

    Minimizes; tab has m constraint rows plus the objective row, each of
    length ncols+1 with the rhs last.  Returns True on optimality, False if
    the objective is unbounded below.
    """
    m = len(tab) - 1
    while True:
        obj = tab[m]
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            return True
        leave = None
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return False
        _pivot(tab, basis, leave, enter)


def _phase1(rows, rhs):
    """Find a basic feasible solution of A x = b, x >= 0.

    Returns (tableau, basis, ncols) restricted to the original columns, or
    None if infeasible.  Redundant rows are dropped.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    tab = []
    for row, b in zip(rows, rhs):
        if b < 0:
            tab.append([-a for a in row] + [ZERO] * m + [-b])
        else:
            tab.append(list(row) + [ZERO] * m + [b])
    for i in range(m):
        tab[i][n + i] = ONE
    basis = [n + i for i in range(m)]
    obj = [ZERO] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            obj[j] -= tab[i][j]
        obj[n + m] -= tab[i][n + m]
    tab.append(obj)
    _simplex_min(tab, basis, n + m)
    if tab[m][n + m] != 0:  # optimum of sum of artificials is -tab[m][-1]
        return None
    # Drive leftover artificials out of the basis.
    drop = []
    for i in range(m):
        if basis[i] >= n:
            c = next((j for j in range(n) if tab[i][j] != 0), None)
            if c is None:
                drop.append(i)
            else:
                _pivot(tab, basis, i, c)
    tab.pop()
    for i in sorted(drop, reverse=True):
        tab.pop(i)
        basis.pop(i)
    tab = [row[:n] + [row[n + m]] for row in tab]
    return tab, basis, n


def _phase2_max(tab, basis, ncols, objective):
    """Maximize objective . x from a basic feasible tableau; returns value."""
    m = len(tab)
    cost = [-c for c in objective]  # minimize the negation
    # Reduced costs c_j - c_B B^-1 A_j read off the current tableau.
    obj = [ZERO] * (ncols + 1)
    for j in range(ncols + 1):
        s = cost[j] if j < ncols else ZERO
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0:
                s -= cb * tab[i][j]
        obj[j] = s
    full = [row[:] for row in tab]
    full.append(obj)
    if not _simplex_min(full, basis, ncols):
        raise RuntimeError("unbounded objective in slack maximization")
    for i in range(m):
        tab[i] = full[i]
    # Objective row ends at -z for the minimized cost = -objective, i.e. +max.
    return full[m][ncols]


def _basic_solution(tab, basis, ncols):
    x = [ZERO] * ncols
    for i, b in enumerate(basis):
        x[b] = tab[i][ncols]
    return x


def lp_feasible(system: FeasibilitySystem):
    """Exact feasibility of the system; returns (feasible, witness).

    The witness satisfies every equality exactly and every mask (including
    strict positivity) when feasible; otherwise it is None.
    """
    n = system.ncols
    # Standard form: split free variables x_j = u_j - v_j.
    colmap = []  # per original var: (plus_col, minus_col or None)
    cols = 0
    for j in range(n):
        if system.nonneg[j]:
            colmap.append((cols, None))
            cols += 1
        else:
            colmap.append((cols, cols + 1))
            cols += 2
    strict_cols = [colmap[j][0] for j in range(n) if system.strict[j]]

    def expand_row(row):
        out = [ZERO] * cols
        for j, a in enumerate(row):
            if a != 0:
                p, m = colmap[j]
                out[p] = a
                if m is not None:
                    out[m] = -a
        return out

    rows = [expand_row(r) for r in system.eq_rows]
    rhs = list(system.rhs)

    if not strict_cols:
        got = _phase1(rows, rhs)
        if got is None:
            return False, None
        tab, basis, ncols = got
        x = _basic_solution(tab, basis, ncols)
        return True, _fold(x, colmap)

    # Auxiliary slack: x_j - t - s_j = 0 for strict j, t + s0 = 1, max t.
    t_col = cols
    s0_col = cols + 1
    ext = cols + 2 + len(strict_cols)
    ext_rows = []
    for row in rows:
        ext_rows.append(row + [ZERO] * (ext - cols))
    for k, c in enumerate(strict_cols):
        row = [ZERO] * ext
        row[c] = ONE
        row[t_col] = -ONE
        row[cols + 2 + k] = -ONE
        ext_rows.append(row)
    rhs = rhs + [ZERO] * len(strict_cols)
    row = [ZERO] * ext
    row[t_col] = ONE
    row[s0_col] = ONE
    ext_rows.append(row)
    rhs.append(ONE)

    got = _phase1(ext_rows, rhs)
    if got is None:
        return False, None
    tab, basis, ncols = got
    objective = [ZERO] * ncols
    objective[t_col] = ONE
    top = _phase2_max(tab, basis, ncols, objective)
    if top <= 0:
        return False, None
    x = _basic_solution(tab, basis, ncols)
    return True, _fold(x, colmap)


def _fold(x, colmap):
    out = []
    for p, m in colmap:
        out.append(x[p] if m is None else x[p] - x[m])
    return tuple(out)


def check_witness(system: FeasibilitySystem, witness: Vec) -> bool:
    """Exact re-evaluation of every constraint at the witness."""
    for row, b in zip(system.eq_rows, system.rhs):
        if vdot(row, witness) != b:
            return False
    for j, x in enumerate(witness):
        if system.strict[j]:
            if not x > 0:
                return False
        elif system.nonneg[j] and x < 0:
            return False
    return True
