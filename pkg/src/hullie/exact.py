"""Exact rational scalars, vectors and dense linear algebra.

Every coordinate in this package is an arbitrary-precision rational and
nothing here ever rounds.  gmpy2's mpq is used when available (roughly an
order of magnitude faster than fractions.Fraction); Fraction is a drop-in
fallback.  Both keep values canonical (positive denominator, reduced), so
equality is structural and hashing is consistent.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)

#: A point or direction: fixed-length tuple of rationals.
Vec = tuple


def rat(value, den=None) -> Rat:
    """Coerce an int, string "p/q", Fraction or Rat to a canonical rational."""
    if den is not None:
        return Rat(value, den)
    if isinstance(value, float):
        raise TypeError("refusing to build an exact rational from a float")
    return Rat(value)


def vec(coords: Iterable) -> Vec:
    return tuple(rat(c) for c in coords)


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vscale(s, a: Vec) -> Vec:
    return tuple(s * x for x in a)


def vdot(a: Vec, b: Vec):
    return sum((x * y for x, y in zip(a, b)), ZERO)


def mat_apply(rows: Sequence[Vec], x: Vec) -> Vec:
    return tuple(vdot(r, x) for r in rows)


def _rref(rows, ncols):
    """Reduced row echelon form in place of a copy.

    Returns (rows, pivot_columns).  Pivot choice is the first nonzero entry
    scanning rows top-down, columns left-right: deterministic everywhere.
    """
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = ONE / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        piv_row = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], piv_row)]
        pivots.append(c)
        r += 1
    return rows, pivots


def linear_rank(rows: Sequence[Vec]) -> int:
    if not rows:
        return 0
    _, pivots = _rref(rows, len(rows[0]))
    return len(pivots)


def affine_rank(points: Sequence[Vec]) -> int:
    """Dimension of the affine hull of the points (0 for a single point)."""
    if not points:
        raise ValueError("empty point set")
    base = points[0]
    diffs = [vsub(p, base) for p in points[1:]]
    return linear_rank(diffs) if diffs else 0


def solve_linear(rows: Sequence[Vec], rhs: Vec) -> Optional[Vec]:
    """One exact solution of A x = b, or None if inconsistent.

    Free variables are set to zero; the pivot rule is fixed, so the returned
    solution is deterministic.
    """
    if len(rows) != len(rhs):
        raise ValueError("matrix/vector shape mismatch")
    if not rows:
        return ()
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = _rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [ZERO] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    return tuple(x)


def nullspace(rows: Sequence[Vec], ncols: Optional[int] = None) -> list[Vec]:
    """Basis of the kernel of A, in a deterministic order."""
    if not rows:
        return [tuple(ONE if i == j else ZERO for i in range(ncols or 0)) for j in range(ncols or 0)]
    ncols = len(rows[0])
    red, pivots = _rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for i, c in enumerate(pivots):
            v[c] = -red[i][free]
        basis.append(tuple(v))
    return basis


def quotient_map(directions: Sequence[Vec], dim: int) -> list[Vec]:
    """Rows of a linear map R^dim -> R^(dim-r) whose kernel is span(directions).

    Used to decide whether an affine flat meets a hull: intersecting the flat
    is equivalent to hull membership of the projected anchor in the quotient.
    """
    r = len(directions)
    if r == 0:
        return [tuple(ONE if j == i else ZERO for j in range(dim)) for i in range(dim)]
    _, pivots = _rref(directions, dim)
    if len(pivots) != r:
        raise ValueError("directions are linearly dependent")
    nonpiv = [c for c in range(dim) if c not in set(pivots)]
    # Columns (directions..., e_j for j nonpivot) form a basis of R^dim; the
    # quotient coordinates of x are the e_j-components of x in that basis.
    cols = [list(u) for u in directions] + [
        [ONE if i == j else ZERO for i in range(dim)] for j in nonpiv
    ]
    aug = [[cols[j][i] for j in range(dim)] + [ONE if k == i else ZERO for k in range(dim)]
           for i in range(dim)]
    red, piv = _rref(aug, 2 * dim)
    if piv != list(range(dim)):
        raise ValueError("degenerate basis in quotient construction")
    inv_rows = [tuple(red[i][dim:]) for i in range(dim)]
    return inv_rows[r:]


def det(rows: Sequence[Vec]) -> Rat:
    """Determinant of a square matrix by exact Gaussian elimination."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    m = [list(r) for r in rows]
    sign = 1
    result = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        result *= m[c][c]
        inv = ONE / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return result if sign == 1 else -result


def gram_det(vectors: Sequence[Vec]) -> Rat:
    g = [[vdot(u, v) for v in vectors] for u in vectors]
    return det(g)


def exact_sqrt(q) -> Optional[Rat]:
    """Square root of a nonnegative rational if it is rational, else None."""
    if q < 0:
        raise ValueError("square root of a negative rational")
    num = int(q.numerator)
    den = int(q.denominator)
    sn = math.isqrt(num)
    sd = math.isqrt(den)
    if sn * sn == num and sd * sd == den:
        return Rat(sn, sd)
    return None


def homogeneous_basis_extend(basis, vector):
    """Extend an echelonized basis (list of (pivot, row)) by one vector.

    Returns the same list object if the vector is dependent, else a new list.
    Rows are kept pivot-normalized; only forward reduction is needed for rank
    tracking.
    """
    v = list(vector)
    for pivot, row in basis:
        f = v[pivot]
        if f != 0:
            v = [a - f * b for a, b in zip(v, row)]
    p = next((i for i, a in enumerate(v) if a != 0), None)
    if p is None:
        return basis
    inv = ONE / v[p]
    row = tuple(a * inv for a in v)
    out = list(basis)
    out.append((p, row))
    out.sort(key=lambda t: t[0])
    return out
