"""JSON formats for matrices, counts and results.

Every payload carries ``"schema": "toricmle/1"``. Column indices are 1-based
here and 0-based everywhere else; this module is the boundary. Floats are
rounded to 12 significant digits and exact rationals become ``"num/den"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError
from .model import CountVector, DesignMatrix

SCHEMA = "toricmle/1"
VERSION = "0.1.0"


@dataclass
class RunManifest:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    version: str = VERSION
    duration_seconds: float | None = None

    def to_json(self) -> dict:
        out = asdict(self)
        if self.duration_seconds is not None:
            out["duration_seconds"] = round_float(self.duration_seconds)
        return out


def round_float(x: float):
    """12 significant digits; non-finite values become strings."""
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return float(f"{x:.12g}")


def float_list(v) -> list:
    return [round_float(x) for x in np.asarray(v, dtype=float).ravel()]


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _load(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def parse_matrix(obj) -> DesignMatrix:
    if not isinstance(obj, dict) or "entries" not in obj:
        raise InputError('matrix JSON must be an object with an "entries" field')
    rows = obj["entries"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError('"entries" must be a nonempty list of rows')
    for r in rows:
        for x in r:
            if not _is_int(x):
                raise InputError(f"matrix entries must be integers, got {x!r}")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or 0 in widths:
        raise InputError("matrix rows must be nonempty and of equal length")
    d, m = len(rows), widths.pop()
    if obj.get("rows", d) != d or obj.get("cols", m) != m:
        raise InputError(
            f'declared shape {obj.get("rows")}x{obj.get("cols")} does not match entries ({d}x{m})'
        )
    return DesignMatrix(rows)


def parse_counts(obj) -> CountVector:
    if not isinstance(obj, dict) or "counts" not in obj:
        raise InputError('counts JSON must be an object with a "counts" field')
    c = obj["counts"]
    if not isinstance(c, list) or not c:
        raise InputError('"counts" must be a nonempty list')
    for x in c:
        if not _is_int(x):
            raise InputError(f"counts must be integers, got {x!r}")
        if x < 0:
            raise InputError(f"counts must be nonnegative, got {x}")
    if sum(c) == 0:
        raise InputError("counts must not all be zero")
    return CountVector(c)


def load_matrix(path) -> DesignMatrix:
    return parse_matrix(_load(path))


def load_counts(path) -> CountVector:
    return parse_counts(_load(path))


def matrix_to_json(A: DesignMatrix) -> dict:
    return {"schema": SCHEMA, "rows": A.d, "cols": A.m, "entries": [list(r) for r in A.entries]}


def counts_to_json(u: CountVector) -> dict:
    return {"schema": SCHEMA, "counts": list(u.counts)}


def parse_fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None
    return value


def mle_result_to_json(res) -> dict:
    out = {
        "method": res.method,
        "estimate": float_list(res.estimate),
        "is_extended": bool(res.is_extended),
        "support": [j + 1 for j in res.support],
        "iterations": int(res.iterations),
        "converged": bool(res.converged),
        "birch_residual": round_float(res.birch_residual),
        "final_residual": round_float(res.trace[-1].residual) if res.trace else None,
    }
    if res.y is not None:
        out["y"] = float_list(res.y)
        out["capacity"] = round_float(res.capacity)
        out["guard_tripped"] = bool(res.guard_tripped)
    checks = res.checks or {}
    if checks:
        out["checks"] = {
            "mle_semantics": checks["mle_semantics"],
            "face": [j + 1 for j in checks["face"]],
            "restricted_to_face": bool(checks["restricted_to_face"]),
            "extended_agrees": bool(checks["extended_agrees"]),
            "support_agrees": bool(checks["support_agrees"]),
        }
    return out
