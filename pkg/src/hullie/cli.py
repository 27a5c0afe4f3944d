"""Batch command-line interface.

Exit codes: 0 all checks passed, 1 at least one identity violation (a repro
file is dumped next to the report), 2 usage or hypothesis errors.  Reports
are machine-readable JSON and bit-identical for identical inputs and seeds.
The subset-enumeration guard can be set through HULLIE_LIMIT_N.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .exact import vec
from .faces import enumerate_faces, f_vector
from .fuzz import PROFILES, run_profile
from .geometry import (AffineFlat, Configuration, EnumerationLimitError,
                       HypothesisError)
from .identities import (b_star_sum_check, b_sum_check, buchta_pointwise_check,
                         cowan_affine_check, cowan_check, dual_cowan_check,
                         euler_intersection_check, euler_touch_check,
                         face_count_identity_check, intrinsic_identity_check,
                         simplex_lift_crosscheck)
from .jsonio import (ConfigError, build_report_file, digest_bytes,
                     parse_config, parse_rational, report_to_dict,
                     serialize_config, write_json, write_repro)
from .stochastic import (Distribution, buchta_distribution_check,
                         expectation_identity_trial)
from .volumes import MCParams

IDENTITIES = ("cowan", "dual-cowan", "euler-cut", "euler-touch",
              "cowan-affine", "intrinsic", "faces", "faces-clean",
              "face-counts", "buchta-pointwise", "simplex-lift")


def _default_limit() -> int:
    try:
        return int(os.environ.get("HULLIE_LIMIT_N", "20"))
    except ValueError:
        return 20


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hullie",
        description="Exact verification of convex-hull inclusion-exclusion identities")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="exact JSON configuration file")
        sp.add_argument("--point", action="append", default=[],
                        help="query point, e.g. 1/2,1/2 (repeatable)")
        sp.add_argument("--flat", action="append", default=[],
                        help="flat as anchor;dir;dir..., e.g. 0,0;2,1")
        sp.add_argument("--index-set", action="append", default=[],
                        help="label subset, e.g. 2,4 (repeatable)")
        sp.add_argument("--r", type=int, default=None)
        sp.add_argument("--l", type=int, default=None)
        sp.add_argument("--tol", type=float, default=5e-3)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--samples", type=int, default=1_000_000,
                        help="Monte Carlo samples per external angle")
        sp.add_argument("--limit-n", type=int, default=_default_limit())
        sp.add_argument("--project-to-affine-hull", action="store_true")
        sp.add_argument("--out", help="write the JSON report here")

    sv = sub.add_parser("verify", help="verify one identity on a configuration")
    sv.add_argument("identity", choices=IDENTITIES)
    common(sv)

    se = sub.add_parser("enumerate", help="enumerate the face lattice")
    se.add_argument("what", choices=("faces",))
    common(se)

    ss = sub.add_parser("sample", help="seeded Monte Carlo expectation checks")
    ss.add_argument("what", choices=("expectation", "buchta"))
    ss.add_argument("--dist", choices=("uniform-ball", "uniform-cube", "gaussian"),
                    default="uniform-cube")
    ss.add_argument("--d", type=int, default=2)
    ss.add_argument("--n", type=int, default=5)
    ss.add_argument("--precision", type=int, default=1 << 32)
    ss.add_argument("--identity", choices=("intrinsic", "face-counts"),
                    default="intrinsic")
    common(ss)

    sf = sub.add_parser("fuzz", help="adversarial degenerate configurations")
    sf.add_argument("what", choices=("degenerate",))
    sf.add_argument("--profile", choices=PROFILES, required=True)
    sf.add_argument("--count", type=int, default=20)
    common(sf)
    return p


def _parse_point(text: str, dim: int):
    coords = [parse_rational(c.strip(), f"--point[{i}]")
              for i, c in enumerate(text.split(","))]
    if len(coords) != dim:
        raise ConfigError(f"--point has {len(coords)} coordinates, expected {dim}")
    return tuple(coords)


def _parse_flat(text: str, dim: int) -> AffineFlat:
    parts = [s for s in text.split(";") if s.strip()]
    if not parts:
        raise ConfigError("--flat must be anchor;dir;dir...")
    anchor = _parse_point(parts[0], dim)
    dirs = tuple(_parse_point(s, dim) for s in parts[1:])
    try:
        return AffineFlat(anchor, dirs)
    except ValueError as e:
        raise ConfigError(f"--flat: {e}")


def _parse_labels(text: str, n: int):
    try:
        labels = sorted({int(s) for s in text.split(",") if s.strip()})
    except ValueError:
        raise ConfigError(f"--index-set {text!r} is not a comma list of labels")
    if not labels:
        raise ConfigError("--index-set is empty")
    for i in labels:
        if not 1 <= i <= n:
            raise ConfigError(f"--index-set label {i} outside 1..{n}")
    return tuple(labels)


def _load(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    with open(args.config, "rb") as fh:
        raw = fh.read()
    cfg, flats, index_sets, query_points = parse_config(args.config)
    for t in args.point:
        query_points.append(_parse_point(t, cfg.dim))
    for t in args.flat:
        flats.append(_parse_flat(t, cfg.dim))
    for t in args.index_set:
        index_sets.append(_parse_labels(t, cfg.n))
    return raw, cfg, flats, index_sets, query_points


def _run_verify(args):
    raw, cfg, flats, index_sets, query_points = _load(args)
    limit = args.limit_n
    mc = MCParams(samples=args.samples, seed=args.seed)
    ident = args.identity
    runs = []

    if ident in ("cowan", "dual-cowan", "simplex-lift"):
        if not query_points:
            raise ConfigError(f"verify {ident} needs --point or query_points")
        fn = {"cowan": cowan_check, "dual-cowan": dual_cowan_check,
              "simplex-lift": simplex_lift_crosscheck}[ident]
        for q in query_points:
            runs.append(({"point": q}, fn(cfg, q, limit)))
    elif ident in ("euler-cut", "cowan-affine"):
        if not flats:
            raise ConfigError(f"verify {ident} needs --flat or flats")
        for flat in flats:
            if ident == "euler-cut":
                J = index_sets[0] if index_sets else None
                runs.append(({"flat_dim": flat.dim},
                             euler_intersection_check(cfg, J, flat)))
            else:
                runs.append(({"flat_dim": flat.dim},
                             cowan_affine_check(cfg, flat, limit)))
    elif ident == "euler-touch":
        if len(index_sets) < 2:
            raise ConfigError("verify euler-touch needs two --index-set values")
        runs.append(({"index_sets": [list(index_sets[0]), list(index_sets[1])]},
                     euler_touch_check(cfg, index_sets[0], cfg, index_sets[1])))
    elif ident in ("faces", "faces-clean"):
        if not index_sets:
            raise ConfigError(f"verify {ident} needs --index-set")
        fn = b_sum_check if ident == "faces" else b_star_sum_check
        for I in index_sets:
            runs.append(({"index_set": list(I)}, fn(cfg, I, limit)))
    elif ident == "face-counts":
        if args.r is None:
            raise ConfigError("verify face-counts needs --r")
        runs.append(({"r": args.r},
                     face_count_identity_check(cfg, args.r, limit,
                                               args.project_to_affine_hull)))
    elif ident == "intrinsic":
        if args.r is None:
            raise ConfigError("verify intrinsic needs --r")
        runs.append(({"r": args.r, "tol": args.tol, "seed": args.seed},
                     intrinsic_identity_check(cfg, args.r, args.tol, mc, limit,
                                              args.project_to_affine_hull)))
    elif ident == "buchta-pointwise":
        ls = [args.l] if args.l is not None else list(range(1, cfg.n + 1))
        for l in ls:
            runs.append(({"l": l}, buchta_pointwise_check(cfg, l, limit)))

    dicts = [report_to_dict(rep, params) for params, rep in runs]
    data = build_report_file(dicts, digest_bytes(raw))
    return data, cfg, [(p, r) for p, r in runs if not r.passed]


def _run_enumerate(args):
    raw, cfg, flats, index_sets, _ = _load(args)
    J = index_sets[0] if index_sets else None
    faces = enumerate_faces(cfg, J, args.limit_n)
    fv = f_vector(cfg, J, args.limit_n)
    euler = sum((-1) ** k * c for k, c in enumerate(fv))
    report = {"identity": "euler-relation",
              "params": {"index_set": list(J) if J else None},
              "lhs": euler, "rhs": 1,
              "side_data": {"f_vector": list(fv),
                            "faces": [{"dim": f.dim,
                                       "generators": list(f.generators)}
                                      for f in faces]},
              "pass": euler == 1, "tolerance": 0.0}
    data = build_report_file([report], digest_bytes(raw))
    return data, cfg, [] if euler == 1 else [({}, None)]


def _params_digest(args, keys) -> str:
    blob = json.dumps({k: getattr(args, k.replace("-", "_"), None) for k in keys},
                      sort_keys=True).encode()
    return digest_bytes(blob)


def _run_sample(args):
    trials = args.trials or 1000
    dist = Distribution(args.dist, args.d, args.precision)
    repro_paths = []

    def hook(cfg, report, params=None):
        repro_paths.append(write_repro(cfg, report.identity,
                                       params or {}, _out_dir(args)))

    if args.what == "expectation":
        if args.r is None:
            raise ConfigError("sample expectation needs --r")
        summary = expectation_identity_trial(
            dist, args.n, args.r, trials, args.seed, args.identity,
            tol=args.tol, mc=MCParams(samples=args.samples, seed=args.seed),
            repro_hook=lambda cfg, rep: hook(cfg, rep))
        name = f"expectation-{args.identity}"
        keys = ("what", "dist", "d", "n", "r", "trials", "seed", "identity",
                "precision", "tol")
    else:
        if args.l is None:
            raise ConfigError("sample buchta needs --l")
        summary = buchta_distribution_check(
            dist, args.n, args.l, trials, args.seed,
            repro_hook=lambda cfg, rep: hook(cfg, rep))
        name = "buchta-distribution"
        keys = ("what", "dist", "d", "n", "l", "trials", "seed", "precision")
    report = {"identity": name,
              "params": {"dist": dist.kind, "dim": dist.dim, "n": args.n,
                         "r": args.r, "l": args.l, "trials": trials,
                         "seed": args.seed},
              "lhs": summary.details.get("lhs_mean", summary.estimate),
              "rhs": summary.details.get("rhs_mean", 0.0),
              "side_data": {"estimate": summary.estimate,
                            "stderr": summary.stderr,
                            "exact_violations": summary.exact_violations,
                            "rejections": summary.rejections,
                            **summary.details},
              "pass": summary.passed,
              "tolerance": 3 * summary.stderr}
    data = build_report_file([report], _params_digest(args, keys))
    data["repro_files"] = repro_paths
    return data, None, [] if summary.passed else [({}, None)]


def _run_fuzz(args):
    repro_paths = []

    def hook(cfg, rep, params):
        repro_paths.append(write_repro(cfg, rep.identity, params, _out_dir(args)))

    reports, failures = run_profile(args.profile, args.seed, args.count,
                                    args.limit_n, repro_hook=hook)
    dicts = [report_to_dict(rep, params) for params, rep in reports]
    data = build_report_file(
        dicts, _params_digest(args, ("what", "profile", "seed", "count")),
        extra={"profile": args.profile, "cases": args.count,
               "repro_files": repro_paths})
    return data, None, failures


def _out_dir(args) -> str:
    if getattr(args, "out", None):
        return os.path.dirname(os.path.abspath(args.out)) or "."
    return "."


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        if args.command == "verify":
            data, cfg, failures = _run_verify(args)
        elif args.command == "enumerate":
            data, cfg, failures = _run_enumerate(args)
        elif args.command == "sample":
            data, cfg, failures = _run_sample(args)
        else:
            data, cfg, failures = _run_fuzz(args)
    except (ConfigError, HypothesisError, EnumerationLimitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if failures and cfg is not None:
        for params, rep in failures:
            path = write_repro(cfg, rep.identity if rep else "unknown",
                               params, _out_dir(args))
            data.setdefault("repro_files", []).append(path)

    if args.out:
        write_json(args.out, data)
    for rep in data["reports"]:
        status = "pass" if rep.get("pass") else "FAIL"
        print(f"[{status}] {rep['identity']}: lhs={rep['lhs']} rhs={rep['rhs']}")
    print(f"overall: {'pass' if data['overall_pass'] else 'FAIL'}")
    return 0 if data["overall_pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
