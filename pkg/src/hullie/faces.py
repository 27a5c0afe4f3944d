"""Brute-force face lattice of a sub-hull and face/flat incidence counts.

Faces are identified by their canonical generator set: all labels of the
ambient index set whose point lies on the face.  Enumeration follows the
predicate route: every subset of vertex representatives is closed under
membership and kept when the closed set passes the clean-face test, which is
correct in every degenerate case (duplicate points, points on faces,
lower-dimensional hulls).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .exact import affine_rank
from .geometry import (AffineFlat, Configuration, EnumerationLimitError,
                       flat_meets_hull, hulls_intersect, is_clean_face,
                       normalize_labels)
from .tables import membership_tables

FACE_LIMIT = 16


@dataclass(frozen=True, order=True)
class FaceRecord:
    dim: int
    generators: tuple


@lru_cache(maxsize=64)
def _face_masks(cfg: Configuration, labels: tuple, limit: int) -> tuple:
    """Masks (over positions in labels) of the canonical faces of the hull."""
    pts = [cfg.point(i) for i in labels]
    m = len(pts)
    tabs = [membership_tables(pts, p) for p in pts]
    full = (1 << m) - 1

    # One representative position per distinct vertex point.
    groups = {}
    for pos, p in enumerate(pts):
        groups.setdefault(p, []).append(pos)
    reps = []
    for p, poss in groups.items():
        dup_mask = sum(1 << q for q in poss)
        others = full ^ dup_mask
        if others == 0 or not tabs[poss[0]].member[others]:
            reps.append(poss[0])
    reps.sort()
    if len(reps) > limit:
        raise EnumerationLimitError("face enumeration limit")

    def close(mask):
        clo = mask
        for k in range(m):
            if not clo >> k & 1 and tabs[k].member[mask]:
                clo |= 1 << k
        return clo

    closures = set()
    for sub in range(1, 1 << len(reps)):
        mask = 0
        for b, pos in enumerate(reps):
            if sub >> b & 1:
                mask |= 1 << pos
        closures.add(close(mask))

    faces = []
    for clo in sorted(closures):
        gens = [labels[k] for k in range(m) if clo >> k & 1]
        if clo == full or is_clean_face(cfg, gens, labels):
            faces.append(clo)
    return tuple(sorted(faces))


def enumerate_faces(cfg: Configuration, J=None, limit: int = FACE_LIMIT) -> list:
    """Every closed face of the sub-hull, canonical generators, each once.

    Includes the hull itself (the improper face); refuses configurations with
    more than `limit` distinct vertices.
    """
    labels = normalize_labels(cfg, J if J is not None else cfg.all_labels())
    out = []
    for mask in _face_masks(cfg, labels, limit):
        gens = tuple(labels[k] for k in range(len(labels)) if mask >> k & 1)
        out.append(FaceRecord(affine_rank([cfg.point(i) for i in gens]), gens))
    out.sort()
    return out


def f_vector(cfg: Configuration, J=None, limit: int = FACE_LIMIT) -> tuple:
    """(f_0, ..., f_dim); the Euler alternating sum is asserted internally."""
    faces = enumerate_faces(cfg, J, limit)
    top = max(f.dim for f in faces)
    counts = [0] * (top + 1)
    for f in faces:
        counts[f.dim] += 1
    if sum((-1) ** k * c for k, c in enumerate(counts)) != 1:
        raise RuntimeError("Euler relation failed on an enumerated face lattice")
    return tuple(counts)


def faces_meeting_flat(cfg: Configuration, J, flat: AffineFlat,
                       limit: int = FACE_LIMIT) -> list:
    """a_k = number of k-faces of the (full-dimensional) sub-hull meeting the flat."""
    labels = normalize_labels(cfg, J if J is not None else cfg.all_labels())
    if affine_rank([cfg.point(i) for i in labels]) != cfg.dim:
        raise ValueError("theorem requires full dimension")
    counts = [0] * (cfg.dim + 1)
    for face in enumerate_faces(cfg, labels, limit):
        if flat_meets_hull(cfg, face.generators, flat):
            counts[face.dim] += 1
    return counts


def faces_meeting_polytope(cfg1: Configuration, J1, cfg2: Configuration, J2,
                           limit: int = FACE_LIMIT) -> list:
    """Counts, by dimension, of faces of the first hull that meet the second."""
    if cfg1.dim != cfg2.dim:
        raise ValueError("hulls live in different ambient spaces")
    labels1 = normalize_labels(cfg1, J1 if J1 is not None else cfg1.all_labels())
    labels2 = normalize_labels(cfg2, J2 if J2 is not None else cfg2.all_labels())
    faces = enumerate_faces(cfg1, labels1, limit)
    counts = [0] * (max(f.dim for f in faces) + 1)
    for face in faces:
        if hulls_intersect(cfg1, face.generators, cfg2, labels2):
            counts[face.dim] += 1
    return counts


def clear_caches():
    _face_masks.cache_clear()
