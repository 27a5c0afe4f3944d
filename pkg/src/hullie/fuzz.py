"""Adversarial rational configurations for the exact identities.

Each profile builds configurations that sit exactly on the degeneracies the
identities must survive: collinear point sets, query points on facets or on
low-dimensional flats spanned by configuration points, flats through
vertices, duplicated labels.  Every applicable exact identity is run on each
instance; any failure is a finding and is dumped as a repro file.
"""

from __future__ import annotations

import random

from .exact import ONE, Rat, ZERO, vec
from .geometry import Configuration, HypothesisError, AffineFlat
from .identities import (b_star_sum_check, b_sum_check, buchta_pointwise_check,
                         cowan_affine_check, cowan_check, dual_cowan_check,
                         euler_intersection_check, face_count_identity_check,
                         simplex_lift_crosscheck)

PROFILES = ("collinear", "point-on-facet", "flat-through-vertex",
            "duplicated-points", "simplex-degenerate")


def _rand_rat(rng, span=6, den=(1, 2, 3, 4)):
    return Rat(rng.randint(-span, span), rng.choice(den))


def _rand_point(rng, d, span=6):
    return tuple(_rand_rat(rng, span) for _ in range(d))


def _rand_full_dim_config(rng, d, n):
    from .exact import affine_rank
    while True:
        pts = tuple(_rand_point(rng, d) for _ in range(n))
        if affine_rank(pts) == d:
            return Configuration(d, pts)


def _combination(rng, cfg, labels):
    weights = [Rat(rng.randint(1, 4)) for _ in labels]
    total = sum(weights, ZERO)
    out = [ZERO] * cfg.dim
    for w, i in zip(weights, labels):
        p = cfg.point(i)
        out = [a + w * c / total for a, c in zip(out, p)]
    return tuple(out)


def _queries_for(rng, cfg):
    """Vertices, segment midpoints, interior-ish points, exterior points."""
    n = cfg.n
    qs = [cfg.point(rng.randint(1, n))]
    i, j = rng.randint(1, n), rng.randint(1, n)
    qs.append(tuple((a + b) / 2 for a, b in zip(cfg.point(i), cfg.point(j))))
    qs.append(_combination(rng, cfg, list(range(1, n + 1))))
    far = max(abs(c) for p in cfg.points for c in p) + 1
    qs.append(tuple(far + k for k in range(cfg.dim)))
    return qs


def _gen_collinear(rng):
    d = 2
    anchor = _rand_point(rng, d, 3)
    direction = _rand_point(rng, d, 3)
    if all(c == 0 for c in direction):
        direction = (ONE, ZERO)
    n = rng.randint(2, 6)
    ts = [_rand_rat(rng, 4) for _ in range(n)]
    pts = tuple(tuple(a + t * u for a, u in zip(anchor, direction)) for t in ts)
    cfg = Configuration(d, pts)
    queries = [_combination(rng, cfg, list(range(1, n + 1))),
               cfg.point(rng.randint(1, n)),
               tuple(a + Rat(7, 2) * u for a, u in zip(anchor, direction))]
    return cfg, queries, []


def _gen_point_on_facet(rng):
    d = rng.choice([2, 3])
    cfg0 = _rand_full_dim_config(rng, d, rng.randint(d + 1, d + 3))
    extra = []
    for _ in range(rng.randint(1, 2)):
        labels = sorted(rng.sample(range(1, cfg0.n + 1), d))
        extra.append(_combination(rng, cfg0, labels))
    cfg = Configuration(d, cfg0.points + tuple(extra))
    queries = extra + [_queries_for(rng, cfg)[1]]
    return cfg, queries, []


def _gen_flat_through_vertex(rng):
    d = rng.choice([2, 3])
    cfg = _rand_full_dim_config(rng, d, rng.randint(d + 1, d + 3))
    flats = []
    for _ in range(2):
        v = cfg.point(rng.randint(1, cfg.n))
        u = _rand_point(rng, d, 3)
        if all(c == 0 for c in u):
            u = tuple([ONE] + [ZERO] * (d - 1))
        flats.append(AffineFlat(v, (u,)))
    w = cfg.point(rng.randint(1, cfg.n))
    z = cfg.point(rng.randint(1, cfg.n))
    if w != z:
        flats.append(AffineFlat(w, (vec([a - b for a, b in zip(z, w)]),)))
    return cfg, [w], flats


def _gen_duplicated(rng):
    d = rng.choice([1, 2, 3])
    base = _rand_full_dim_config(rng, d, rng.randint(d + 1, d + 2))
    dups = tuple(base.point(rng.randint(1, base.n))
                 for _ in range(rng.randint(1, 2)))
    cfg = Configuration(d, base.points + dups)
    return cfg, _queries_for(rng, cfg), []


def _gen_simplex_degenerate(rng):
    """Query points on (d-2)-flats spanned by configuration points."""
    d = rng.choice([2, 3])
    cfg = _rand_full_dim_config(rng, d, rng.randint(d + 1, d + 4))
    queries = []
    for _ in range(2):
        if d == 2:
            queries.append(cfg.point(rng.randint(1, cfg.n)))
        else:
            i, j = rng.sample(range(1, cfg.n + 1), 2)
            t = _rand_rat(rng, 3)
            queries.append(tuple(a + t * (b - a)
                                 for a, b in zip(cfg.point(i), cfg.point(j))))
    return cfg, queries, []


_GENERATORS = {
    "collinear": _gen_collinear,
    "point-on-facet": _gen_point_on_facet,
    "flat-through-vertex": _gen_flat_through_vertex,
    "duplicated-points": _gen_duplicated,
    "simplex-degenerate": _gen_simplex_degenerate,
}


def run_profile(profile: str, seed: int, count: int, limit_n: int = 20,
                repro_hook=None):
    """Run every applicable exact identity on `count` adversarial instances.

    Returns (reports, failures): reports is a list of (params, IdentityReport);
    hypothesis rejections are skipped silently (the identities do not apply),
    failures are reports whose identity genuinely failed.
    """
    if profile not in _GENERATORS:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    gen = _GENERATORS[profile]
    rng = random.Random(seed)
    reports = []
    failures = []

    def add(params, rep, cfg):
        reports.append((params, rep))
        if not rep.passed:
            failures.append((params, rep))
            if repro_hook is not None:
                repro_hook(cfg, rep, params)

    for case in range(count):
        cfg, queries, flats = gen(rng)
        base = {"profile": profile, "case": case, "n": cfg.n, "dim": cfg.dim}
        for q in queries:
            add({**base, "identity": "cowan", "point": q},
                cowan_check(cfg, q, limit_n), cfg)
            add({**base, "identity": "dual-cowan", "point": q},
                dual_cowan_check(cfg, q, limit_n), cfg)
            add({**base, "identity": "simplex-lift", "point": q},
                simplex_lift_crosscheck(cfg, q, limit_n), cfg)
        for flat in flats:
            try:
                add({**base, "identity": "euler-cut"},
                    euler_intersection_check(cfg, None, flat), cfg)
            except HypothesisError:
                pass
            try:
                add({**base, "identity": "cowan-affine"},
                    cowan_affine_check(cfg, flat, limit_n), cfg)
            except HypothesisError:
                pass
        labels = sorted(rng.sample(range(1, cfg.n + 1),
                                   rng.randint(1, min(3, cfg.n))))
        add({**base, "identity": "faces-clean", "index_set": labels},
            b_star_sum_check(cfg, labels, limit_n), cfg)
        try:
            add({**base, "identity": "faces", "index_set": labels},
                b_sum_check(cfg, labels, limit_n), cfg)
        except HypothesisError:
            pass
        try:
            r = rng.randint(1, cfg.dim)
            add({**base, "identity": "face-counts", "r": r},
                face_count_identity_check(cfg, r, limit_n), cfg)
        except HypothesisError:
            pass
        if len(set(cfg.points)) == cfg.n:
            l = rng.randint(1, cfg.n)
            add({**base, "identity": "buchta-pointwise", "l": l},
                buchta_pointwise_check(cfg, l, limit_n), cfg)
    return reports, failures
