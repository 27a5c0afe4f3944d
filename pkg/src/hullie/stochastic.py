"""Seeded samplers and Monte Carlo verification of the expectation identities.

Sampled coordinates are rounded to rationals with a bounded denominator
before anything else sees them, so every per-sample check runs through the
exact deterministic engine; the stochastic layer only aggregates.  All
randomness is counter-based (Philox keyed by the seed), so runs are
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exact import Rat, affine_rank, vec
from .geometry import (Configuration, EnumerationLimitError, HypothesisError,
                       is_r_general_position)
from .identities import (IdentityReport, buchta_pointwise_check,
                         face_count_identity_check, intrinsic_identity_check)
from .faces import f_vector
from .tables import config_point_tables
from .volumes import MCParams, intrinsic_volume, polytope_volume

KINDS = ("uniform-ball", "uniform-cube", "gaussian")


@dataclass(frozen=True)
class Distribution:
    """Sampling law for one point; precision bounds the rounding denominator."""

    kind: str
    dim: int
    precision: int = 1 << 32

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.precision < 1 << 16:
            raise ValueError("precision must be at least 2^16")


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    estimate: float
    stderr: float
    exact_violations: int
    rejections: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exact_violations == 0 and bool(self.details.get("passed", True))


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2 ** 128 - 1)))


def _round_coord(x: float, precision: int) -> Rat:
    return Rat(round(x * precision), precision)


def _draw_raw(rng, dist: Distribution, n: int) -> np.ndarray:
    d = dist.dim
    if dist.kind == "uniform-cube":
        return rng.random((n, d))
    if dist.kind == "gaussian":
        return rng.standard_normal((n, d))
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    radii = rng.random((n, 1)) ** (1.0 / d)
    return g / norms * radii


def _draw_config(rng, dist: Distribution, n: int, distinct: bool = True,
                 max_tries: int = 1000):
    """One configuration, resampling while rounded points collide."""
    rejections = 0
    for _ in range(max_tries):
        raw = _draw_raw(rng, dist, n)
        pts = tuple(tuple(_round_coord(x, dist.precision) for x in row)
                    for row in raw)
        if distinct and len(set(pts)) != n:
            rejections += 1
            continue
        return Configuration(dist.dim, pts), rejections
    raise RuntimeError("rounded samples keep colliding; raise the precision")


def sample_config(dist: Distribution, n: int, seed: int) -> Configuration:
    """Deterministic (dist, n, seed) -> configuration of n i.i.d. rounded points."""
    if n < 1:
        raise ValueError("need at least one point")
    cfg, _ = _draw_config(_rng(seed), dist, n)
    return cfg


def _mean_stderr(values) -> tuple:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean()) if arr.size else 0.0
    if arr.size > 1:
        stderr = float(arr.std(ddof=1) / math.sqrt(arr.size))
    else:
        stderr = 0.0
    return mean, stderr


def expectation_identity_trial(dist: Distribution, n: int, r: int, trials: int,
                               seed: int, identity: str = "intrinsic",
                               tol: float = 1e-9, mc: MCParams = None,
                               repro_hook=None) -> TrialSummary:
    """Monte Carlo run of an expectation identity with exact per-sample checks.

    identity "intrinsic": signed binomial sums of expected intrinsic volumes;
    "face-counts": signed binomial sums of expected face numbers.  Every
    sampled configuration must pass the corresponding deterministic identity
    (exactly for the exact cases); violations are counted and dumped through
    repro_hook.  Samples violating the theorem hypotheses (degenerate after
    rounding) are rejected, resampled and counted.
    """
    if identity not in ("intrinsic", "face-counts"):
        raise ValueError("identity must be 'intrinsic' or 'face-counts'")
    rng = _rng(seed)
    d = dist.dim
    violations = 0
    rejections = 0
    diffs = []
    lhs_vals = []
    rhs_vals = []
    done = 0
    while done < trials:
        cfg, rej = _draw_config(rng, dist, n)
        rejections += rej
        if cfg.hull_dim() != d:
            rejections += 1
            continue
        if identity == "face-counts" and not is_r_general_position(cfg, r):
            rejections += 1
            continue
        try:
            if identity == "intrinsic":
                report = intrinsic_identity_check(cfg, r, tol=tol, mc=mc)
            else:
                report = face_count_identity_check(cfg, r)
        except HypothesisError:
            rejections += 1
            continue
        if not report.passed:
            violations += 1
            if repro_hook is not None:
                repro_hook(cfg, report)
        if identity == "intrinsic":
            vals = [float(intrinsic_volume(cfg, tuple(range(1, k + 1)), r, mc))
                    for k in range(1, n + 1)]
            rhs = (-1) ** r * vals[-1]
        else:
            vals = []
            for k in range(1, n + 1):
                fv = f_vector(cfg, tuple(range(1, k + 1)))
                vals.append(float(fv[r]) if r < len(fv) else 0.0)
            rhs = (-1) ** d * (math.comb(n, r + 1) - vals[-1])
        lhs = math.fsum((-1) ** (k - 1) * math.comb(n, k) * vals[k - 1]
                        for k in range(1, n + 1))
        diffs.append(lhs - rhs)
        lhs_vals.append(lhs)
        rhs_vals.append(rhs)
        done += 1
    est, se = _mean_stderr(diffs)
    lmean, lse = _mean_stderr(lhs_vals)
    rmean, rse = _mean_stderr(rhs_vals)
    agree = abs(est) <= 3 * se or abs(est) < 1e-9
    details = {"identity": identity, "n": n, "r": r, "dist": dist.kind,
               "lhs_mean": lmean, "lhs_stderr": lse,
               "rhs_mean": rmean, "rhs_stderr": rse,
               "agree_3sigma": agree,
               "passed": violations == 0 and agree}
    return TrialSummary(trials, est, se, violations, rejections, details)


def _ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def buchta_distribution_check(dist: Distribution, n: int, l: int, trials: int,
                              seed: int, repro_hook=None) -> TrialSummary:
    """Vertex-count frequency vs the signed moment formula, at 3 sigma.

    Only uniform distributions are supported: the probability content of a
    sub-hull is then an exact volume ratio per sample.  Every sample also
    runs the pointwise identity exactly.
    """
    if dist.kind == "gaussian":
        raise ValueError("unsupported distribution for exact probability content")
    if not 1 <= l <= n:
        raise ValueError("l must be between 1 and n")
    rng = _rng(seed)
    d = dist.dim
    vol_k = 1.0 if dist.kind == "uniform-cube" else _ball_volume(d)
    violations = 0
    rejections = 0
    lhs_vals = []
    rhs_vals = []
    done = 0
    while done < trials:
        cfg, rej = _draw_config(rng, dist, n)
        rejections += rej
        report = buchta_pointwise_check(cfg, l)
        if not report.passed:
            violations += 1
            if repro_hook is not None:
                repro_hook(cfg, report)
        tabs = config_point_tables(cfg)
        full = (1 << n) - 1
        nv = sum(1 for i in range(n) if not tabs[i].member[full ^ (1 << i)])
        lhs_vals.append(1.0 if nv == l else 0.0)
        rhs = 0.0
        for j in range(1, l + 1):
            pts = [cfg.point(i) for i in range(1, j + 1)]
            if affine_rank(pts) < d:
                mj = 0.0
            else:
                mj = float(polytope_volume(pts)) / vol_k
            rhs += (-1) ** j * math.comb(l, j) * mj ** (n - j)
        rhs_vals.append((-1) ** l * math.comb(n, l) * rhs)
        done += 1
    lmean, lse = _mean_stderr(lhs_vals)
    rmean, rse = _mean_stderr(rhs_vals)
    gap = abs(lmean - rmean)
    sigma = math.sqrt(lse ** 2 + rse ** 2)
    agree = gap <= 3 * sigma
    details = {"n": n, "l": l, "dist": dist.kind,
               "lhs_mean": lmean, "lhs_stderr": lse,
               "rhs_mean": rmean, "rhs_stderr": rse,
               "gap": gap, "three_sigma": 3 * sigma,
               "passed": agree and violations == 0}
    return TrialSummary(trials, lmean - rmean, sigma, violations, rejections,
                        details)
