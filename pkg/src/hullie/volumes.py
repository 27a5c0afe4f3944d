"""Polytope volumes and intrinsic volumes.

Top-dimensional volumes come from an exact fan triangulation (lowest-index
vertex over enumerated facets): full-ambient-dimension simplices contribute
rational determinants, lower-dimensional ones exact Gram determinants whose
square roots stay exact whenever they are rational.  Intrinsic volumes V_r
for 0 < r < dim combine r-face volumes with external angles; angles are
exact when the normal space has dimension <= 1 and otherwise estimated by
seeded Monte Carlo over the unit sphere of the face's normal space, one
counter-based stream per face.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import (ONE, Rat, Vec, ZERO, affine_rank, det, exact_sqrt,
                    gram_det, nullspace, vdot, vsub, _rref)
from .faces import FACE_LIMIT, enumerate_faces
from .geometry import Configuration, normalize_labels
from .simplex import FeasibilitySystem, lp_feasible


@dataclass(frozen=True)
class MCParams:
    """Sample count and seed for Monte Carlo external angles."""

    samples: int = 1_000_000
    seed: int = 0
    chunk: int = 1 << 16


def _in_hull_raw(points, others, target) -> bool:
    rows = [tuple(points[i][c] for i in others) for c in range(len(target))]
    rows.append(tuple(ONE for _ in others))
    rhs = tuple(target) + (ONE,)
    nn = tuple(True for _ in others)
    st = tuple(False for _ in others)
    return lp_feasible(FeasibilitySystem(tuple(rows), rhs, nn, st))[0]


def _project_full_dim(points):
    """Coordinates on the pivot columns: injective on the affine hull."""
    base = points[0]
    diffs = [vsub(p, base) for p in points[1:]]
    if not diffs:
        return [(ZERO,) * 0 for _ in points], 0
    _, pivots = _rref(diffs, len(base))
    coords = [tuple(p[c] for c in pivots) for p in points]
    return coords, len(pivots)


def _facet_onsets(idx, coords, k):
    """On-index-sets of the supporting hyperplanes of a full-dim subset."""
    import itertools

    onsets = set()
    pts = {i: coords[i] for i in idx}
    for combo in itertools.combinations(idx, k):
        base = pts[combo[0]]
        diffs = [vsub(pts[i], base) for i in combo[1:]]
        kern = nullspace(diffs, k) if diffs else nullspace([], k)
        if len(kern) != 1:
            continue  # dependent combo; spanned by a smaller one
        normal = kern[0]
        offset = vdot(normal, base)
        pos = neg = False
        on = []
        for i in idx:
            s = vdot(normal, pts[i]) - offset
            if s > 0:
                pos = True
            elif s < 0:
                neg = True
            else:
                on.append(i)
            if pos and neg:
                break
        if pos and neg:
            continue
        onsets.add(tuple(sorted(on)))
    return sorted(onsets)


def _lowest_vertex(idx, coords):
    for cand in idx:
        others = [i for i in idx if i != cand and coords[i] != coords[cand]]
        if not others or not _in_hull_raw(coords, others, coords[cand]):
            return cand
    raise RuntimeError("no vertex found in a nonempty point set")


def _fan(idx, coords):
    sub = [coords[i] for i in idx]
    k = affine_rank(sub)
    if k == 0:
        return [(idx[0],)]
    if k == 1:
        c = next(c for c in range(len(sub[0])) if any(p[c] != sub[0][c] for p in sub))
        lo = min(idx, key=lambda i: (coords[i][c], i))
        hi = max(idx, key=lambda i: (coords[i][c], -i))
        return [(lo, hi)]
    proj = {i: None for i in idx}
    pcoords, _ = _project_full_dim(sub)
    local = dict(zip(idx, pcoords))
    apex = _lowest_vertex(idx, local)
    simplices = []
    for onset in _facet_onsets(idx, local, k):
        if apex in onset:
            continue
        for s in _fan(list(onset), local):
            simplices.append(tuple(sorted((apex,) + s)))
    return simplices


def triangulate(points) -> list:
    """Simplices (index tuples into points) triangulating the convex hull.

    Fan triangulation from the lowest-index vertex over enumerated facets,
    recursively; exact in every degenerate case.
    """
    if not points:
        raise ValueError("empty point set")
    return _fan(list(range(len(points))), list(points))


def simplex_content(points, indices):
    """Volume of one simplex, exact when it is rational.

    Full-ambient simplices use a plain determinant (always rational); lower
    dimensional ones the square root of a Gram determinant, kept exact when
    the root is rational.
    """
    k = len(indices) - 1
    if k == 0:
        return ONE
    base = points[indices[0]]
    diffs = [vsub(points[i], base) for i in indices[1:]]
    if k == len(base):
        return abs(det(diffs)) / math.factorial(k)
    g = gram_det(diffs)
    s = exact_sqrt(g)
    if s is not None:
        return s / math.factorial(k)
    return math.sqrt(float(g)) / math.factorial(k)


def polytope_volume(points):
    """Volume of conv(points) in the dimension of its affine hull.

    Returns an exact rational whenever every simplex volume is rational
    (always the case for full-dimensional hulls), a float otherwise.
    """
    simplices = triangulate(points)
    exact_part = ZERO
    float_part = []
    for s in simplices:
        v = simplex_content(points, s)
        if isinstance(v, float):
            float_part.append(v)
        else:
            exact_part += v
    if float_part:
        return float(exact_part) + math.fsum(float_part)
    return exact_part


def _stream_key(*parts) -> list:
    h = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return [int.from_bytes(h[i:i + 8], "big") for i in range(0, 16, 8)]


def _float_pts(cfg, labels):
    return np.array([[float(c) for c in cfg.point(i)] for i in labels], dtype=float)


def _normal_space_basis(cfg, hull_labels, face_gens, m, r):
    """Orthonormal float basis of dir(aff hull) intersected with dir(aff face)^perp."""
    pts = _float_pts(cfg, hull_labels)
    dmat = pts[1:] - pts[0]
    _, _, vt = np.linalg.svd(dmat, full_matrices=False)
    qh = vt[:m]  # orthonormal rows spanning dir(aff hull)
    if r == 0:
        return qh
    fpts = _float_pts(cfg, face_gens)
    fmat = fpts[1:] - fpts[0]
    a = fmat @ qh.T
    _, _, vt2 = np.linalg.svd(a, full_matrices=True)
    kern = vt2[r:]  # coordinates (in qh) orthogonal to the face directions
    return kern @ qh


@lru_cache(maxsize=32)
def _face_sign_bits(cfg: Configuration, hull_key: tuple, face_gens: tuple,
                    m: int, r: int, mc: MCParams):
    """Packed sign bits per test label: sample direction supports the face.

    The raw normal stream is keyed by (seed, face) only, so every sub-hull
    sharing the face reuses the same samples and the estimator errors cancel
    across subsets the same way the identities do.
    """
    basis = _normal_space_basis(cfg, hull_key, face_gens, m, r)
    anchor = np.array([float(c) for c in cfg.point(face_gens[0])])
    test = [k for k in hull_key if k not in set(face_gens)]
    dmat = _float_pts(cfg, test) - anchor  # (kk, d)
    # Raw normals are drawn in the ambient space and projected onto the
    # normal space: sub-hulls sharing a face (and its normal space) then see
    # identical sample directions, so their estimator errors cancel in the
    # alternating sums exactly like the identity terms do.
    proj = basis.T @ (basis @ dmat.T)  # (d, kk)
    rng = np.random.Generator(np.random.Philox(key=_stream_key(
        "angle", mc.seed, face_gens, repr(cfg.points))))
    d = cfg.dim
    total = mc.samples
    packed = {k: [] for k in test}
    done = 0
    while done < total:
        take = min(mc.chunk, total - done)
        z = rng.standard_normal((take, d))
        dots = z @ proj  # (take, kk)
        neg = dots < 0
        for j, k in enumerate(test):
            packed[k].append(np.packbits(neg[:, j]))
        done += take
    bits = {k: np.concatenate(chunks) for k, chunks in packed.items()}
    for arr in bits.values():
        arr.setflags(write=False)
    return total, bits


def external_angle(cfg: Configuration, J, face_gens, mc: MCParams = None,
                   limit: int = FACE_LIMIT):
    """External angle of a face inside a sub-hull.

    Exact for normal-space dimension 0 (the hull itself: angle 1) and 1
    (facets: angle 1/2); Monte Carlo fraction of the normal sphere otherwise.
    """
    labels = normalize_labels(cfg, J if J is not None else cfg.all_labels())
    gens = tuple(sorted(face_gens))
    m = affine_rank([cfg.point(i) for i in labels])
    r = affine_rank([cfg.point(i) for i in gens])
    nd = m - r
    if nd == 0:
        return ONE
    if nd == 1:
        return Rat(1, 2)
    mc = mc or MCParams()
    hull_key = _hull_closure_key(cfg, labels)
    total, bits = _face_sign_bits(cfg, hull_key, gens, m, r, mc)
    test = [k for k in labels if k not in set(gens)]
    acc = None
    for k in test:
        acc = bits[k].copy() if acc is None else acc & bits[k]
    if acc is None:
        return ONE
    # Packed tail bits beyond the sample count are zero, never counted.
    count = int(np.bitwise_count(acc).sum())
    return count / total


def _hull_closure_key(cfg, labels) -> tuple:
    """Canonical label set spanning the same hull (membership closure)."""
    from .tables import config_point_tables

    mask = sum(1 << (i - 1) for i in labels)
    tabs = config_point_tables(cfg)
    out = set(labels)
    for k in range(cfg.n):
        if k + 1 not in out and tabs[k].member[mask]:
            out.add(k + 1)
    return tuple(sorted(out))


def intrinsic_volume(cfg: Configuration, J, r: int, mc: MCParams = None,
                     limit: int = FACE_LIMIT):
    """V_r of a sub-hull, measured inside its own affine hull.

    V_0 = 1 exactly; V_dim is the triangulation volume; above the dimension
    the value is 0; in between it is the sum of r-face volumes weighted by
    external angles.
    """
    labels = normalize_labels(cfg, J if J is not None else cfg.all_labels())
    if r < 0:
        raise ValueError("negative intrinsic volume index")
    if r == 0:
        return ONE
    pts = [cfg.point(i) for i in labels]
    m = affine_rank(pts)
    if r > m:
        return ZERO
    if r == m:
        return polytope_volume(pts)
    exact_part = ZERO
    float_part = []
    for face in enumerate_faces(cfg, labels, limit):
        if face.dim != r:
            continue
        vol = polytope_volume([cfg.point(i) for i in face.generators])
        ang = external_angle(cfg, labels, face.generators, mc, limit)
        if isinstance(vol, float) or isinstance(ang, float):
            float_part.append(float(vol) * float(ang))
        else:
            exact_part += vol * ang
    if float_part:
        return float(exact_part) + math.fsum(float_part)
    return exact_part


def clear_caches():
    _face_sign_bits.cache_clear()
