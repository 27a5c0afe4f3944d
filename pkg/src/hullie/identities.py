"""Evaluation of the inclusion-exclusion identities over a configuration.

Every check enumerates label subsets (guarded, default n <= 20), evaluates
both sides of its identity and returns a structured report.  Exact checks
carry tolerance 0 and compare rationals/integers structurally; the numeric
intrinsic-volume cases carry an explicit tolerance.

The subset loops run on the witness tables from `tables`, memoized per
configuration; the LP predicates in `geometry` define the same quantities
one subset at a time and the tests hold the two routes against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exact import (ONE, Rat, Vec, ZERO, affine_rank, nullspace, solve_linear,
                    vec, vsub, _rref)
from .faces import FACE_LIMIT, enumerate_faces, f_vector, faces_meeting_flat, \
    faces_meeting_polytope
from .geometry import (AffineFlat, Configuration, EnumerationLimitError,
                       HypothesisError, flat_meets_hull, flat_meets_relint,
                       hull_contains, hulls_intersect, is_r_general_position,
                       normalize_labels)
from .tables import (closure_table, config_dim_table, config_membership,
                     config_point_tables, meets_tables, membership_tables,
                     popcounts, subset_signs)
from .volumes import MCParams, intrinsic_volume, polytope_volume

SUBSET_LIMIT = 20


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    lhs: object
    rhs: object
    side_data: dict
    tolerance: float
    passed: bool


def make_report(identity, lhs, rhs, side_data, tolerance=0.0) -> IdentityReport:
    if tolerance == 0.0:
        passed = lhs == rhs
    else:
        passed = abs(float(lhs) - float(rhs)) <= tolerance
    return IdentityReport(identity, lhs, rhs, side_data, tolerance, bool(passed))


def _guard_n(cfg: Configuration, limit: int):
    if cfg.n > limit:
        raise EnumerationLimitError(
            f"subset enumeration limit: n={cfg.n} exceeds {limit}")


def _mask_labels(mask: int) -> tuple:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _count_by_size(flags: np.ndarray, n: int) -> list:
    """c_k = number of k-subsets whose flag is set, k = 1..n."""
    pc = popcounts(n)
    counts = np.bincount(pc[flags], minlength=n + 1)
    return [int(c) for c in counts[1:]]


def _alternating(counts, start_sign=1) -> int:
    total = 0
    sign = start_sign
    for c in counts:
        total += sign * c
        sign = -sign
    return total


def cowan_check(cfg: Configuration, x, limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Alternating count of sub-hulls containing x vs the relative-interior sign."""
    _guard_n(cfg, limit_n)
    x = vec(x)
    if len(x) != cfg.dim:
        raise ValueError("query point has wrong dimension")
    tabs = config_membership(cfg, x)
    ck = _count_by_size(tabs.member, cfg.n)
    lhs = _alternating(ck)
    dim_hull = cfg.hull_dim()
    in_relint = bool(tabs.relint[(1 << cfg.n) - 1])
    rhs = (-1) ** dim_hull if in_relint else 0
    side = {"c": ck, "dim": dim_hull, "relint": in_relint}
    return make_report("cowan", lhs, rhs, side)


def dual_cowan_check(cfg: Configuration, x, limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Signed relative-interior indicator sum vs plain hull membership at x."""
    _guard_n(cfg, limit_n)
    x = vec(x)
    if len(x) != cfg.dim:
        raise ValueError("query point has wrong dimension")
    tabs = config_membership(cfg, x)
    dims = config_dim_table(cfg)
    signs = subset_signs(cfg.n)
    dim_parity = np.where(dims % 2 == 0, 1, -1).astype(np.int64)
    lhs = int((signs * dim_parity * tabs.relint)[1:].sum())
    rhs = 1 if tabs.member[(1 << cfg.n) - 1] else 0
    side = {"relint_count": int(tabs.relint[1:].sum())}
    return make_report("dual-cowan", lhs, rhs, side)


def euler_intersection_check(cfg: Configuration, J, flat: AffineFlat,
                             limit: int = FACE_LIMIT) -> IdentityReport:
    """Alternating count of faces met by a flat vs the interior-intersection sign."""
    a = faces_meeting_flat(cfg, J, flat, limit)
    lhs = _alternating(a, start_sign=1)
    codim = cfg.dim - flat.dim
    labels = normalize_labels(cfg, J if J is not None else cfg.all_labels())
    rhs = (-1) ** codim if flat_meets_relint(cfg, labels, flat) else 0
    side = {"a": a, "flat_dim": flat.dim}
    return make_report("euler-cut", lhs, rhs, side)


def euler_touch_check(cfg1: Configuration, J1, cfg2: Configuration, J2,
                      limit: int = FACE_LIMIT) -> IdentityReport:
    """Faces of one polytope meeting a touching polytope cancel alternately."""
    J1n = normalize_labels(cfg1, J1 if J1 is not None else cfg1.all_labels())
    J2n = normalize_labels(cfg2, J2 if J2 is not None else cfg2.all_labels())
    if not hulls_intersect(cfg1, J1n, cfg2, J2n):
        raise HypothesisError("polytopes do not touch")
    if hulls_intersect(cfg1, J1n, cfg2, J2n, relints=True):
        raise HypothesisError("polytopes do not touch (relative interiors overlap)")
    counts = faces_meeting_polytope(cfg1, J1n, cfg2, J2n, limit)
    lhs = _alternating(counts, start_sign=1)
    side = {"counts": counts}
    return make_report("euler-touch", lhs, 0, side)


def cowan_affine_check(cfg: Configuration, flat: AffineFlat,
                       limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Alternating count of sub-hulls meeting a flat vs the interior sign."""
    _guard_n(cfg, limit_n)
    if flat.ambient != cfg.dim:
        raise ValueError("flat lives in a different ambient space")
    if cfg.hull_dim() != cfg.dim:
        raise HypothesisError("theorem requires full dimension")
    tabs = meets_tables(cfg.points, flat)
    ck = _count_by_size(tabs.member, cfg.n)
    lhs = _alternating(ck)
    meets_int = bool(tabs.relint[(1 << cfg.n) - 1])
    rhs = (-1) ** (cfg.dim - flat.dim) if meets_int else 0
    side = {"c": ck, "flat_dim": flat.dim, "meets_interior": meets_int}
    return make_report("cowan-affine", lhs, rhs, side)


def intrinsic_identity_check(cfg: Configuration, r: int, tol: float = 5e-3,
                             mc: MCParams = None, limit_n: int = SUBSET_LIMIT,
                             project: bool = False) -> IdentityReport:
    """Signed sum of V_r over all sub-hulls vs (-1)^r V_r of the full hull.

    Exact (tolerance 0) when r = 0 or r = dim; float with the given tolerance
    in between, where face volumes and Monte Carlo angles enter.
    """
    _guard_n(cfg, limit_n)
    if r < 0 or r > cfg.dim:
        raise ValueError("r must be between 0 and the ambient dimension")
    m = cfg.hull_dim()
    if m != cfg.dim and not project:
        raise HypothesisError(
            "theorem requires full dimension (project_to_affine_hull to override)")
    n = cfg.n
    full = (1 << n) - 1
    signs = subset_signs(n)
    if r == 0:
        lhs = int(signs[1:].sum())
        return make_report("intrinsic", lhs, 1, {"r": 0, "dim": m})
    if r > m:
        return make_report("intrinsic", 0, 0, {"r": r, "dim": m, "trivial": True})

    clo = closure_table(cfg)
    dims = config_dim_table(cfg)
    coef = np.zeros(1 << n, dtype=np.int64)
    np.add.at(coef, clo[1:], signs[1:])
    closures = [int(c) for c in np.nonzero(coef)[0]]

    if r == m:
        lhs = ZERO
        for c in closures:
            if dims[c] != m:
                continue
            vol = polytope_volume([cfg.points[i] for i in range(n) if c >> i & 1])
            lhs += int(coef[c]) * vol
        vol_full = polytope_volume(list(cfg.points))
        rhs = vol_full if m % 2 == 0 else -vol_full
        side = {"r": r, "dim": m, "volume": vol_full, "closures": len(closures)}
        return make_report("intrinsic", lhs, rhs, side)

    mc = mc or MCParams()
    exact_part = ZERO
    float_terms = []
    v_full = None
    for c in sorted(closures):
        if dims[c] < r:
            continue
        labels = _mask_labels(c)
        v = intrinsic_volume(cfg, labels, r, mc)
        if c == full:
            v_full = v
        if isinstance(v, float):
            float_terms.append(int(coef[c]) * v)
        else:
            exact_part += int(coef[c]) * v
    if v_full is None:
        v_full = intrinsic_volume(cfg, cfg.all_labels(), r, mc)
    lhs = float(exact_part) + math.fsum(float_terms)
    rhs = float(v_full) if r % 2 == 0 else -float(v_full)
    side = {"r": r, "dim": m, "v_full": float(v_full), "closures": len(closures)}
    return make_report("intrinsic", lhs, rhs, side, tolerance=tol)


def _aff_direction_basis(points) -> tuple:
    base = points[0]
    diffs = [vsub(p, base) for p in points[1:]]
    if not diffs:
        return ()
    red, pivots = _rref(diffs, len(base))
    return tuple(tuple(row) for row in red[:len(pivots)])


def _meets_complement(cfg: Configuration, I_labels):
    """Tables of "aff(I-points) meets conv(K)" over complement masks.

    The flat/hull meet is quotiented to hull membership, making the full
    superset sweep one witness enumeration instead of 2^(n-#I) LPs.
    """
    ipts = [cfg.point(i) for i in I_labels]
    dirs = _aff_direction_basis(ipts)
    flat = AffineFlat(ipts[0], dirs)
    comp = [k for k in range(1, cfg.n + 1) if k not in set(I_labels)]
    tabs = meets_tables([cfg.point(k) for k in comp], flat)
    return comp, tabs


def b_vectors(cfg: Configuration, I, limit_n: int = SUBSET_LIMIT):
    """(b_j, b*_j) for j = #I..n: supersets where the sub-hull is a face/clean face."""
    _guard_n(cfg, limit_n)
    I_labels = normalize_labels(cfg, I)
    r0 = len(I_labels)
    comp, tabs = _meets_complement(cfg, I_labels)
    nc = len(comp)
    inhull = 0
    for pos, k in enumerate(comp):
        if hull_contains(cfg, I_labels, cfg.point(k)):
            inhull |= 1 << pos
    masks = np.arange(1 << nc, dtype=np.uint32)
    pc = popcounts(nc)
    clean = ~tabs.member
    face = ~tabs.member[masks & np.uint32(((1 << nc) - 1) ^ inhull)]
    b = [0] * (cfg.n + 1)
    b_star = [0] * (cfg.n + 1)
    for size, cnt in enumerate(np.bincount(pc[face], minlength=nc + 1)):
        b[r0 + size] = int(cnt)
    for size, cnt in enumerate(np.bincount(pc[clean], minlength=nc + 1)):
        b_star[r0 + size] = int(cnt)
    return b[r0:], b_star[r0:], inhull


def _on_boundary_flat(cfg: Configuration, I_labels) -> bool:
    """Does the affine hull of the I-points miss the relative interior of the hull?

    This is the dichotomy the superset sums obey: it agrees with "the
    sub-hull is a face" whenever that face exists, and extends it to
    sub-hulls merely contained in a proper face (e.g. a diagonal of a facet),
    where the alternating sums still vanish.
    """
    ipts = [cfg.point(i) for i in I_labels]
    flat = AffineFlat(ipts[0], _aff_direction_basis(ipts))
    return not flat_meets_relint(cfg, cfg.all_labels(), flat)


def _b_rhs(cfg: Configuration, I_labels, boundary: bool) -> int:
    if boundary:
        return 0
    dim_hull = cfg.hull_dim()
    dim_sub = affine_rank([cfg.point(i) for i in I_labels])
    return (-1) ** (dim_hull + len(I_labels) - 1 - dim_sub)


def b_star_sum_check(cfg: Configuration, I, limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Alternating clean-face superset counts vs the face-or-not sign."""
    I_labels = normalize_labels(cfg, I)
    b, b_star, inhull = b_vectors(cfg, I_labels, limit_n)
    r0 = len(I_labels)
    lhs = sum((-1) ** (j - 1) * b_star[j - r0] for j in range(r0, cfg.n + 1))
    boundary = _on_boundary_flat(cfg, I_labels)
    rhs = _b_rhs(cfg, I_labels, boundary)
    side = {"b_star": b_star, "b": b, "first_j": r0, "on_boundary": boundary}
    return make_report("faces-clean", lhs, rhs, side)


def b_sum_check(cfg: Configuration, I, limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Alternating face superset counts; requires no outside point in the sub-hull."""
    I_labels = normalize_labels(cfg, I)
    b, b_star, inhull = b_vectors(cfg, I_labels, limit_n)
    if inhull:
        raise HypothesisError("hypothesis Π_I ∩ (X_k : k∉I) = ∅ fails")
    r0 = len(I_labels)
    lhs = sum((-1) ** (j - 1) * b[j - r0] for j in range(r0, cfg.n + 1))
    boundary = _on_boundary_flat(cfg, I_labels)
    rhs = _b_rhs(cfg, I_labels, boundary)
    side = {"b": b, "first_j": r0, "on_boundary": boundary}
    return make_report("faces", lhs, rhs, side)


def face_count_identity_check(cfg: Configuration, r: int,
                              limit_n: int = SUBSET_LIMIT,
                              project: bool = False) -> IdentityReport:
    """Signed sum of f_r over all sub-hulls vs (-1)^d (C(n, r+1) - f_r(hull)).

    Requires r-general position and a full-dimensional hull; also verifies
    the two parity corollaries (n-d odd and even).
    """
    import itertools

    _guard_n(cfg, limit_n)
    d_eff = cfg.hull_dim()
    if d_eff != cfg.dim and not project:
        raise HypothesisError(
            "theorem requires full dimension (project_to_affine_hull to override)")
    if not 1 <= r <= d_eff:
        raise HypothesisError("r must be between 1 and the hull dimension")
    if not is_r_general_position(cfg, r):
        raise HypothesisError("points are not in r-general position")
    n = cfg.n
    lhs = 0
    f_r_full = 0
    sign_r = (-1) ** r
    for combo in itertools.combinations(range(1, n + 1), r + 1):
        if affine_rank([cfg.point(i) for i in combo]) != r:
            continue
        comp, tabs = _meets_complement(cfg, combo)
        nc = len(comp)
        pc = popcounts(nc)
        s = np.where(pc % 2 == 0, 1, -1).astype(np.int64)
        lhs += sign_r * int(s[~tabs.member].sum())
        face_of_hull = not tabs.member[(1 << nc) - 1]
        if face_of_hull:
            f_r_full += 1
        # The identity needs "lies in a supporting hyperplane" and "is a
        # face of the hull" to coincide for every candidate subset (true
        # almost surely for continuous samples; a facet diagonal or the
        # improper face of a simplex breaks it, and then the identity
        # genuinely fails).
        if face_of_hull != _on_boundary_flat(cfg, combo):
            raise HypothesisError(
                "a boundary subset is not a face of the hull (supporting-"
                "hyperplane degeneracy; the identity genuinely fails here)")
    choose = math.comb(n, r + 1)
    rhs = (-1) ** d_eff * (choose - f_r_full)
    s_proper = lhs - (-1) ** (n - 1) * f_r_full
    if (n - d_eff) % 2 == 1:
        parity_ok = 2 * f_r_full == choose + (-1) ** n * s_proper
        parity = {"kind": "odd", "ok": parity_ok}
    else:
        parity_ok = s_proper == (-1) ** d_eff * choose
        parity = {"kind": "even", "ok": parity_ok}
    side = {"r": r, "f_r_hull": f_r_full, "binomial": choose,
            "proper_sum": s_proper, "parity": parity}
    report = make_report("face-counts", lhs, rhs, side)
    if not parity_ok:
        report = IdentityReport(report.identity, report.lhs, report.rhs,
                                report.side_data, report.tolerance, False)
    return report


def simplex_lift_crosscheck(cfg: Configuration, x,
                            limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Membership counts equal the face counts of a lifted standard simplex.

    The points become the images of the vertices of a full-dimensional corner
    simplex under an affine map; c_k of the original configuration must match
    a_(k-1) of the simplex faces met by the preimage flat of x, computed
    independently with one feasibility query per face.
    """
    _guard_n(cfg, limit_n)
    x = vec(x)
    if len(x) != cfg.dim:
        raise ValueError("query point has wrong dimension")
    n, d = cfg.n, cfg.dim
    tabs = config_membership(cfg, x)
    ck = _count_by_size(tabs.member, n)
    lhs = _alternating(ck)

    if n == 1:
        a = [1 if x == cfg.point(1) else 0]
        rhs = _alternating(a, start_sign=1)
        side = {"c": ck, "a": a, "flat_dim": 0}
        return make_report("simplex-lift", lhs, rhs, side)

    last = cfg.point(n)
    rows = [tuple(cfg.point(i)[c] - last[c] for i in range(1, n)) for c in range(d)]
    rhs_vec = vsub(x, last)
    anchor = solve_linear(rows, rhs_vec)
    if anchor is None:
        a = [0] * n
        side = {"c": ck, "a": a, "flat_empty": True}
        return make_report("simplex-lift", lhs, _alternating(a, 1),
                           {**side, "vector_match": all(c == 0 for c in ck)})

    dirs = nullspace(rows, n - 1)
    flat = AffineFlat(anchor, tuple(dirs))
    simplex_pts = [tuple(ONE if j == i else ZERO for j in range(n - 1))
                   for i in range(n - 1)]
    simplex_pts.append(tuple(ZERO for _ in range(n - 1)))
    lifted = Configuration(n - 1, tuple(simplex_pts))
    if affine_rank(lifted.points) != n - 1:
        raise RuntimeError("corner simplex is not full-dimensional")

    a = [0] * n
    for mask in range(1, 1 << n):
        labels = _mask_labels(mask)
        if flat_meets_hull(lifted, labels, flat):
            a[len(labels) - 1] += 1
    rhs = _alternating(a, start_sign=1)
    euler_rhs = ((-1) ** ((n - 1) - flat.dim)
                 if flat_meets_relint(lifted, lifted.all_labels(), flat) else 0)
    vector_match = all(ck[k - 1] == a[k - 1] for k in range(1, n + 1))
    side = {"c": ck, "a": a, "flat_dim": flat.dim, "euler_rhs": euler_rhs,
            "vector_match": vector_match}
    report = make_report("simplex-lift", lhs, rhs, side)
    if not (vector_match and rhs == euler_rhs):
        report = IdentityReport(report.identity, report.lhs, report.rhs,
                                report.side_data, report.tolerance, False)
    return report


def buchta_pointwise_check(cfg: Configuration, l: int,
                           limit_n: int = SUBSET_LIMIT) -> IdentityReport:
    """Vertex-set indicator vs its signed containment expansion.

    Requires pairwise distinct points, under which "the labels above l are
    not vertices" is equivalent to containment of those points in the hull
    of the first l.
    """
    _guard_n(cfg, limit_n)
    n = cfg.n
    if not 1 <= l <= n:
        raise ValueError("l must be between 1 and n")
    if len(set(cfg.points)) != n:
        raise HypothesisError("duplicate points")
    tabs = config_point_tables(cfg)
    full = (1 << n) - 1
    vertex = [not tabs[i].member[full ^ (1 << i)] for i in range(n)]
    lhs = int(all(vertex[:l]) and not any(vertex[l:]))
    rhs = 0
    low = (1 << l) - 1
    sub = low
    while True:
        j = sub.bit_count()
        ind = all(tabs[i].member[sub] for i in range(n) if not sub >> i & 1)
        rhs += (-1) ** (l - j) * int(ind)
        if sub == 0:
            break
        sub = (sub - 1) & low
    side = {"vertices": [i + 1 for i in range(n) if vertex[i]], "l": l}
    return make_report("buchta-pointwise", lhs, rhs, side)
