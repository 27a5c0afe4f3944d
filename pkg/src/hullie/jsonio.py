"""Exact JSON input/output: configurations, flats, reports, repro dumps.

Coordinates travel as strings "p/q" (or plain integers); float literals are
rejected in exact mode with a pointer to the offending entry.  Reports are
written atomically and deterministically: identical inputs and seeds yield
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from fractions import Fraction

import numpy as np

from . import __version__
from .exact import Rat, Vec
from .geometry import AffineFlat, Configuration
from .identities import IdentityReport

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class ConfigError(ValueError):
    """Malformed input file or value; reported as a usage error."""


def format_rational(q) -> str:
    num, den = q.numerator, q.denominator
    return str(num) if den == 1 else f"{num}/{den}"


def parse_rational(value, where: str = "value") -> Rat:
    """Exact parse of an integer or "p/q" string; floats are rejected."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Rat(value)
    if isinstance(value, float):
        suggestion = Fraction(value).limit_denominator(10 ** 9)
        raise ConfigError(
            f"{where}: float literal {value!r} is not exact; write \"{suggestion}\"")
    if isinstance(value, str):
        s = value.strip()
        if _RATIONAL_RE.match(s):
            if "/" in s:
                p, q = s.split("/")
                if int(q) == 0:
                    raise ConfigError(f"{where}: zero denominator in {s!r}")
                return Rat(int(p), int(q))
            return Rat(int(s))
        try:
            f = Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where}: cannot parse {s!r} as an exact rational")
        raise ConfigError(
            f"{where}: {s!r} is not exact notation; write \"{format_rational(f)}\"")
    raise ConfigError(f"{where}: expected a rational, got {type(value).__name__}")


def parse_vector(values, dim: int, where: str) -> Vec:
    if not isinstance(values, (list, tuple)):
        raise ConfigError(f"{where}: expected a coordinate list")
    if len(values) != dim:
        raise ConfigError(f"{where}: expected {dim} coordinates, got {len(values)}")
    return tuple(parse_rational(v, f"{where}[{i}]") for i, v in enumerate(values))


def parse_config_dict(data: dict):
    """Parse the exact input schema into engine objects.

    Returns (Configuration, flats, index_sets, query_points); the optional
    sections may be absent.
    """
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object")
    if "dim" not in data or "points" not in data:
        raise ConfigError("required fields: dim, points")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError("dim must be a positive integer")
    raw_points = data["points"]
    if not isinstance(raw_points, list) or not raw_points:
        raise ConfigError("points must be a nonempty list")
    points = tuple(parse_vector(p, dim, f"points[{i}]")
                   for i, p in enumerate(raw_points))
    cfg = Configuration(dim, points)

    flats = []
    for i, f in enumerate(data.get("flats", [])):
        if not isinstance(f, dict) or "anchor" not in f:
            raise ConfigError(f"flats[{i}]: expected an object with an anchor")
        anchor = parse_vector(f["anchor"], dim, f"flats[{i}].anchor")
        dirs = tuple(parse_vector(u, dim, f"flats[{i}].directions[{j}]")
                     for j, u in enumerate(f.get("directions", [])))
        try:
            flats.append(AffineFlat(anchor, dirs))
        except ValueError as e:
            raise ConfigError(f"flats[{i}]: {e}")

    index_sets = []
    for i, s in enumerate(data.get("index_sets", [])):
        if not isinstance(s, list) or not s:
            raise ConfigError(f"index_sets[{i}]: expected a nonempty label list")
        labels = []
        for j, v in enumerate(s):
            if not isinstance(v, int) or not 1 <= v <= cfg.n:
                raise ConfigError(
                    f"index_sets[{i}][{j}]: labels are integers in 1..{cfg.n}")
            labels.append(v)
        index_sets.append(tuple(sorted(set(labels))))

    query_points = [parse_vector(p, dim, f"query_points[{i}]")
                    for i, p in enumerate(data.get("query_points", []))]
    return cfg, flats, index_sets, query_points


def parse_config(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}")
    return parse_config_dict(data)


def serialize_config(cfg: Configuration, flats=(), index_sets=(),
                     query_points=()) -> dict:
    out = {"dim": cfg.dim,
           "points": [[format_rational(c) for c in p] for p in cfg.points]}
    if flats:
        out["flats"] = [{"anchor": [format_rational(c) for c in f.anchor],
                         "directions": [[format_rational(c) for c in u]
                                        for u in f.directions]}
                        for f in flats]
    if index_sets:
        out["index_sets"] = [list(s) for s in index_sets]
    if query_points:
        out["query_points"] = [[format_rational(c) for c in p]
                               for p in query_points]
    return out


def _json_value(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, float, str)):
        return v
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return format_rational(v)
    return str(v)


def report_to_dict(report: IdentityReport, params: dict = None) -> dict:
    return {"identity": report.identity,
            "params": _json_value(params or {}),
            "lhs": _json_value(report.lhs),
            "rhs": _json_value(report.rhs),
            "side_data": _json_value(report.side_data),
            "pass": report.passed,
            "tolerance": report.tolerance}


def digest_bytes(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def build_report_file(report_dicts, input_digest: str, extra: dict = None) -> dict:
    out = {"tool_version": __version__,
           "input_digest": input_digest,
           "reports": report_dicts,
           "overall_pass": all(r.get("pass", False) for r in report_dicts)}
    if extra:
        out.update(_json_value(extra))
    return out


def write_json(path: str, data: dict):
    """Atomic write: full temp file, then rename."""
    blob = json.dumps(data, indent=2, sort_keys=False) + "\n"
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_repro(cfg: Configuration, identity: str, params: dict,
                directory: str = ".") -> str:
    """Dump a violating configuration for replay; returns the file path."""
    data = serialize_config(cfg)
    data["repro_for"] = identity
    data["params"] = _json_value(params or {})
    blob = json.dumps(data, sort_keys=True).encode()
    name = f"repro_{identity}_{digest_bytes(blob)[:12]}.json"
    path = os.path.join(directory, name)
    write_json(path, data)
    return path
