"""Per-subset predicate tables over bitmasks.

The identity checks sum geometric predicates over all 2^n label subsets.
Running one LP per subset is wasteful: hull membership of a fixed target is
monotone in the subset, generated by its minimal witnesses (affinely
independent subcollections carrying the target with strictly positive
barycentric weights, at most d+1 points each by Caratheodory).  One pass per
witness fills the whole table, and the union of witnesses below a mask also
decides relative-interior membership: the target is in the relative interior
exactly when that union covers the mask.

The LP predicates in `geometry` remain the ground truth; the test suite
cross-checks these tables against them subset by subset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import (ONE, Vec, ZERO, homogeneous_basis_extend, mat_apply,
                    quotient_map, _rref)
from .geometry import AffineFlat, Configuration


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.uint32)
    return np.bitwise_count(masks).astype(np.int64)


@lru_cache(maxsize=None)
def subset_signs(n: int) -> np.ndarray:
    """(-1)^(popcount-1) per mask (sign of a subset term in the sums)."""
    pc = popcounts(n)
    return np.where(pc % 2 == 1, 1, -1).astype(np.int64)


def _strict_barycentric(points, combo, target, dim):
    """Unique strictly positive barycentric weights of target over combo.

    Returns the weight tuple when the combo is affinely independent, the
    system is consistent and every weight is positive; None otherwise.
    """
    k = len(combo)
    aug = []
    for c in range(dim):
        aug.append([points[i][c] for i in combo] + [target[c]])
    aug.append([ONE] * k + [ONE])
    red, pivots = _rref(aug, k + 1)
    if pivots and pivots[-1] == k:
        return None  # inconsistent
    if len(pivots) < k:
        return None  # affinely dependent; smaller witnesses cover this combo
    lam = [red[i][k] for i in range(k)]
    if all(v > 0 for v in lam):
        return tuple(lam)
    return None


def minimal_witnesses(points, target) -> list:
    """Bitmasks of the minimal subcollections whose hull holds the target."""
    n = len(points)
    dim = len(target)
    if n == 0:
        return []
    lo = [min(p[c] for p in points) for c in range(dim)]
    hi = [max(p[c] for p in points) for c in range(dim)]
    if any(t < a or t > b for t, a, b in zip(target, lo, hi)):
        return []
    out = []
    max_size = min(n, dim + 1)
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(range(n), size):
            ok = True
            for c in range(dim):
                vals = [points[i][c] for i in combo]
                if target[c] < min(vals) or target[c] > max(vals):
                    ok = False
                    break
            if not ok:
                continue
            if _strict_barycentric(points, combo, target, dim) is not None:
                out.append(sum(1 << i for i in combo))
    return out


@dataclass(frozen=True)
class MembershipTables:
    """member[m]: target in hull of mask m; relint[m]: in its relative interior."""

    n: int
    witnesses: tuple
    member: np.ndarray
    relint: np.ndarray


def membership_tables(points, target) -> MembershipTables:
    n = len(points)
    wit = minimal_witnesses(points, target)
    size = 1 << n
    masks = np.arange(size, dtype=np.uint32)
    member = np.zeros(size, dtype=bool)
    union = np.zeros(size, dtype=np.uint32)
    for w in wit:
        w32 = np.uint32(w)
        sel = (masks & w32) == w32
        member |= sel
        union[sel] |= w32
    relint = member & (union == masks)
    member.setflags(write=False)
    relint.setflags(write=False)
    return MembershipTables(n, tuple(wit), member, relint)


def meets_tables(points, flat: AffineFlat) -> MembershipTables:
    """Tables for "the flat meets the hull of the mask".

    Reduction: quotient out the flat's direction space; the flat meets a hull
    exactly when the projected anchor lies in the projected hull, and meets
    its relative interior exactly when the projected anchor lies in the
    projected relative interior (linear images preserve hulls and relative
    interiors).
    """
    dim = len(flat.anchor)
    q = quotient_map(flat.directions, dim)
    proj = [mat_apply(q, p) for p in points]
    t = mat_apply(q, flat.anchor)
    return membership_tables(proj, t)


def dim_table(points) -> np.ndarray:
    """Affine-hull dimension per mask (-1 for the empty mask).

    Incremental rank of homogenized points: each mask extends the basis of
    the mask without its lowest label, so the whole table costs one reduction
    per mask.
    """
    n = len(points)
    size = 1 << n
    dims = np.full(size, -1, dtype=np.int8)
    bases = [None] * size
    bases[0] = []
    hom = [tuple(p) + (ONE,) for p in points]
    for m in range(1, size):
        low = m & -m
        rest = m ^ low
        i = low.bit_length() - 1
        bases[m] = homogeneous_basis_extend(bases[rest], hom[i])
        dims[m] = len(bases[m]) - 1
    dims.setflags(write=False)
    return dims


@lru_cache(maxsize=8)
def config_dim_table(cfg: Configuration) -> np.ndarray:
    return dim_table(cfg.points)


@lru_cache(maxsize=64)
def config_membership(cfg: Configuration, target: Vec) -> MembershipTables:
    return membership_tables(cfg.points, target)


@lru_cache(maxsize=8)
def config_point_tables(cfg: Configuration) -> tuple:
    """Membership tables of each configuration point as the target."""
    return tuple(config_membership(cfg, p) for p in cfg.points)


@lru_cache(maxsize=8)
def closure_table(cfg: Configuration) -> np.ndarray:
    """closure[m] = m plus every label whose point lies in the hull of m.

    The hull over a mask equals the hull over its closure, so per-subset
    geometric quantities can be memoized per distinct closure.
    """
    n = cfg.n
    masks = np.arange(1 << n, dtype=np.uint32)
    clo = masks.copy()
    tabs = config_point_tables(cfg)
    for k in range(n):
        clo[tabs[k].member] |= np.uint32(1 << k)
    clo.setflags(write=False)
    return clo


def clear_caches():
    config_dim_table.cache_clear()
    config_membership.cache_clear()
    config_point_tables.cache_clear()
    closure_table.cache_clear()
