"""Exact geometric predicates over labelled point configurations.

A Configuration is an ordered multiset of rational points with 1-based
labels; sub-hulls are selected by label subsets.  Every predicate reduces to
an exact rational feasibility query or a rank computation: no floats, no
epsilons, and no general-position assumptions anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exact import ONE, Rat, Vec, ZERO, affine_rank, linear_rank, rat, vec, vsub
from .simplex import FeasibilitySystem, lp_feasible


class HypothesisError(ValueError):
    """A theorem hypothesis fails; callers report this as usage, not as a bug."""


class EnumerationLimitError(RuntimeError):
    """An exponential enumeration guard was exceeded."""


@dataclass(frozen=True)
class Configuration:
    """n labelled points in R^dim; duplicates are distinct labels."""

    dim: int
    points: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("ambient dimension must be >= 1")
        if not self.points:
            raise ValueError("a configuration needs at least one point")
        for p in self.points:
            if len(p) != self.dim:
                raise ValueError("point length differs from ambient dimension")

    @property
    def n(self) -> int:
        return len(self.points)

    def point(self, label: int) -> Vec:
        return self.points[label - 1]

    def all_labels(self) -> tuple:
        return tuple(range(1, self.n + 1))

    def hull_dim(self) -> int:
        return affine_rank(self.points)


def configuration(dim: int, points: Iterable) -> Configuration:
    """Build a Configuration, coercing coordinates to exact rationals."""
    return Configuration(dim, tuple(vec(p) for p in points))


@dataclass(frozen=True)
class AffineFlat:
    """anchor + span(directions); the directions must be independent."""

    anchor: Vec
    directions: tuple

    def __post_init__(self):
        for u in self.directions:
            if len(u) != len(self.anchor):
                raise ValueError("direction length differs from anchor")
        if self.directions and linear_rank(self.directions) != len(self.directions):
            raise ValueError("flat directions must be linearly independent")

    @property
    def dim(self) -> int:
        return len(self.directions)

    @property
    def ambient(self) -> int:
        return len(self.anchor)


def affine_flat(anchor: Iterable, directions: Iterable = ()) -> AffineFlat:
    return AffineFlat(vec(anchor), tuple(vec(u) for u in directions))


def normalize_labels(cfg: Configuration, labels, allow_empty=False) -> tuple:
    out = tuple(sorted(set(int(i) for i in labels)))
    if not out and not allow_empty:
        raise ValueError("empty index set")
    for i in out:
        if not 1 <= i <= cfg.n:
            raise ValueError(f"label {i} outside 1..{cfg.n}")
    return out


def _check_point(cfg: Configuration, x: Vec):
    if len(x) != cfg.dim:
        raise ValueError("query point has wrong dimension")


def _check_flat(cfg: Configuration, flat: AffineFlat):
    if flat.ambient != cfg.dim:
        raise ValueError("flat lives in a different ambient space")


def _combination_system(cfg, labels, x, strict, extra_dirs=()):
    """lambda >= 0 (or > 0), sum lambda = 1, sum lambda_i X_i (+ mu.dirs) = x."""
    k = len(labels)
    m = len(extra_dirs)
    rows = []
    for c in range(cfg.dim):
        row = [cfg.point(i)[c] for i in labels] + [-u[c] for u in extra_dirs]
        rows.append(tuple(row))
    rows.append(tuple([ONE] * k + [ZERO] * m))
    rhs = tuple(x) + (ONE,)
    nonneg = tuple([True] * k + [False] * m)
    strict_mask = tuple([strict] * k + [False] * m)
    return FeasibilitySystem(tuple(rows), rhs, nonneg, strict_mask)


def hull_contains(cfg: Configuration, I, x) -> bool:
    """Is x in the convex hull of the points labelled by I?"""
    labels = normalize_labels(cfg, I)
    x = vec(x)
    _check_point(cfg, x)
    ok, _ = lp_feasible(_combination_system(cfg, labels, x, strict=False))
    return ok


def relint_contains(cfg: Configuration, I, x) -> bool:
    """Is x in the relative interior of the sub-hull?

    A point is in the relative interior of conv(X_i : i in I) exactly when it
    is a strictly positive convex combination of all the X_i, which is one
    strict feasibility query.
    """
    labels = normalize_labels(cfg, I)
    x = vec(x)
    _check_point(cfg, x)
    ok, _ = lp_feasible(_combination_system(cfg, labels, x, strict=True))
    return ok


def flat_meets_hull(cfg: Configuration, I, flat: AffineFlat) -> bool:
    """Does the affine flat intersect the sub-hull?"""
    labels = normalize_labels(cfg, I)
    _check_flat(cfg, flat)
    sys = _combination_system(cfg, labels, flat.anchor, strict=False,
                              extra_dirs=flat.directions)
    return lp_feasible(sys)[0]


def flat_meets_relint(cfg: Configuration, I, flat: AffineFlat) -> bool:
    """Does the affine flat intersect the relative interior of the sub-hull?"""
    labels = normalize_labels(cfg, I)
    _check_flat(cfg, flat)
    sys = _combination_system(cfg, labels, flat.anchor, strict=True,
                              extra_dirs=flat.directions)
    return lp_feasible(sys)[0]


def hulls_intersect(cfg1, I1, cfg2, I2, relints=False) -> bool:
    """Do two sub-hulls share a point (of their relative interiors)?"""
    if cfg1.dim != cfg2.dim:
        raise ValueError("hulls live in different ambient spaces")
    a = normalize_labels(cfg1, I1)
    b = normalize_labels(cfg2, I2)
    rows = []
    for c in range(cfg1.dim):
        rows.append(tuple([cfg1.point(i)[c] for i in a] +
                          [-cfg2.point(j)[c] for j in b]))
    rows.append(tuple([ONE] * len(a) + [ZERO] * len(b)))
    rows.append(tuple([ZERO] * len(a) + [ONE] * len(b)))
    rhs = tuple([ZERO] * cfg1.dim + [ONE, ONE])
    nn = tuple([True] * (len(a) + len(b)))
    st = tuple([relints] * (len(a) + len(b)))
    return lp_feasible(FeasibilitySystem(tuple(rows), rhs, nn, st))[0]


def is_vertex(cfg: Configuration, J, i: int) -> bool:
    """Is X_i a vertex of the sub-hull over J?

    Labels whose point coincides with X_i are excluded from the opposing
    hull, so a duplicated vertex still counts as a vertex.
    """
    labels = normalize_labels(cfg, J)
    if i not in labels:
        raise ValueError(f"label {i} not in the index set")
    x = cfg.point(i)
    others = [k for k in labels if cfg.point(k) != x]
    if not others:
        return True
    return not hull_contains(cfg, others, x)


def is_clean_face(cfg: Configuration, I, J) -> bool:
    """Is the sub-hull over I a clean face of the sub-hull over J?

    Decided by one exact feasibility query: the face is clean exactly when
    the affine hull of the I-points misses the hull of the J\\I-points.
    """
    I = normalize_labels(cfg, I)
    J = normalize_labels(cfg, J)
    if not set(I) <= set(J):
        raise ValueError("I must be a subset of J")
    rest = [k for k in J if k not in set(I)]
    if not rest:
        return True
    # alpha free with sum 1 over I, lambda >= 0 with sum 1 over rest,
    # sum alpha_i X_i - sum lambda_k X_k = 0; clean iff infeasible.
    rows = []
    for c in range(cfg.dim):
        rows.append(tuple([cfg.point(i)[c] for i in I] +
                          [-cfg.point(k)[c] for k in rest]))
    rows.append(tuple([ONE] * len(I) + [ZERO] * len(rest)))
    rows.append(tuple([ZERO] * len(I) + [ONE] * len(rest)))
    rhs = tuple([ZERO] * cfg.dim + [ONE, ONE])
    nn = tuple([False] * len(I) + [True] * len(rest))
    st = tuple([False] * (len(I) + len(rest)))
    sys = FeasibilitySystem(tuple(rows), rhs, nn, st)
    return not lp_feasible(sys)[0]


def face_closure(cfg: Configuration, I, J) -> tuple:
    """All labels of J whose point lies in the sub-hull over I."""
    I = normalize_labels(cfg, I)
    J = normalize_labels(cfg, J)
    extra = [k for k in J if k not in set(I) and hull_contains(cfg, I, cfg.point(k))]
    return tuple(sorted(set(I) | set(extra)))


def is_face(cfg: Configuration, I, J) -> bool:
    """Is the sub-hull over I a (closed) face of the sub-hull over J?

    Faces include the improper face (I spanning the full sub-hull).  The
    generator set is first closed under membership, after which face and
    clean face coincide.
    """
    I = normalize_labels(cfg, I)
    J = normalize_labels(cfg, J)
    if not set(I) <= set(J):
        raise ValueError("I must be a subset of J")
    closed = face_closure(cfg, I, J)
    return is_clean_face(cfg, closed, J)


def is_r_general_position(cfg: Configuration, r: int) -> bool:
    """No r-dimensional affine flat carries more than r+1 of the points."""
    if not 1 <= r <= cfg.dim:
        raise ValueError("r must be between 1 and the ambient dimension")
    n = cfg.n
    if n >= r + 2 and len(set(cfg.points)) < n:
        return False
    for combo in itertools.combinations(range(n), r + 2):
        if affine_rank([cfg.points[i] for i in combo]) < r + 1:
            return False
    return True
