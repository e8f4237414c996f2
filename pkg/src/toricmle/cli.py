"""Command-line front end.

    toricmle classify    --matrix A.json --counts u.json
    toricmle nullcone    --matrix A.json --counts u.json [--max-m 24]
    toricmle mle         --matrix A.json --counts u.json [--method both] [--tol 1e-10]
                         [--alpha 3/2] [--trace trace.jsonl]
    toricmle certificate --matrix A.json (--counts u.json | --b 2,0 [--scale 1]) --support 2,3
    toricmle models independence --m 3
    toricmle models path3

Exit codes: 0 success (for ``classify``: MLE exists), 2 only an extended MLE
exists (``classify``), 1 bad input or contract violation, 3 numerical
failure (non-convergence or a failed cross-check).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .errors import CrossCheckError, NotConvergedError, ToricMLEError
from .model import Linearization, data_linearization, independence_matrix, path_graph_3chain_matrix
from .nullcone import mle_exists_via_components, null_cone
from .polytope import DEFAULT_ENUMERATION_LIMIT
from .serialize import (
    SCHEMA,
    RunManifest,
    dumps,
    load_counts,
    load_matrix,
    matrix_to_json,
    mle_result_to_json,
    parse_fraction,
    round_float,
)
from .solvers import CapacityConfig, IpsConfig, mle, write_trace
from .stability import StabilityClass, classify_ones_for_data, destabilizing_certificate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_EXTENDED = 2
EXIT_NUMERICAL = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _inputs(args) -> dict[str, str]:
    return {k: str(getattr(args, k)) for k in ("matrix", "counts") if getattr(args, k, None)}


def _load_data(args):
    A = load_matrix(args.matrix)
    u = load_counts(args.counts)
    if u.m != A.m:
        raise ToricMLEError(f"counts have length {u.m} but the matrix has m = {A.m} columns")
    return A, u


def cmd_classify(args):
    A, u = _load_data(args)
    report = classify_ones_for_data(A, u)
    payload = report.to_json()
    payload["mle_exists"] = report.stability.polystable
    code = EXIT_OK if report.stability.polystable else EXIT_EXTENDED
    return payload, {}, code


def cmd_nullcone(args):
    A, u = _load_data(args)
    desc = null_cone(A, data_linearization(A, u), args.max_m)
    exists, _ = mle_exists_via_components(A, u, args.max_m)
    payload = desc.to_json()
    payload["mle_exists"] = exists
    return payload, {"max_m": args.max_m}, EXIT_OK


def _trace_paths(path: Path, method: str) -> dict[str, Path]:
    if method != "both":
        return {method: path}
    return {"ips": path, "capacity": path.with_name(path.stem + ".capacity" + path.suffix)}


def cmd_mle(args):
    A, u = _load_data(args)
    overrides = {"method": args.method}
    ips_cfg, cap_cfg = IpsConfig(), CapacityConfig()
    if args.tol is not None:
        ips_cfg = replace(ips_cfg, tolerance=args.tol)
        cap_cfg = replace(cap_cfg, tolerance=args.tol)
        overrides["tol"] = args.tol
    if args.alpha is not None:
        ips_cfg = replace(ips_cfg, alpha_override=parse_fraction(args.alpha))
        overrides["alpha"] = args.alpha
    out = mle(A, u, args.method, ips_cfg, cap_cfg)
    results = out if isinstance(out, tuple) else (out,)
    if args.trace is not None:
        overrides["trace"] = args.trace
        paths = _trace_paths(Path(args.trace), args.method)
        for res in results:
            trace = res.trace
            if res.method == "ips":
                # second pass records KL(estimate || p_k) along the way
                trace = mle(A, u, "ips", ips_cfg, cap_cfg, reference=res.estimate).trace
            write_trace(trace, paths[res.method])
    main = results[0]
    payload = mle_result_to_json(main)
    payload["method"] = args.method
    payload["mle_semantics"] = main.checks["mle_semantics"]
    if len(results) == 2:
        payload["solvers"] = {r.method: mle_result_to_json(r) for r in results}
        payload["gap"] = round_float(main.checks["gap"])
        payload["birch_residual"] = round_float(max(r.birch_residual for r in results))
    code = EXIT_OK if all(r.converged or r.guard_tripped for r in results) else EXIT_NUMERICAL
    return payload, overrides, code


def cmd_certificate(args):
    A = load_matrix(args.matrix)
    if args.counts is not None:
        u = load_counts(args.counts)
        if u.m != A.m:
            raise ToricMLEError(f"counts have length {u.m} but the matrix has m = {A.m} columns")
        lin = data_linearization(A, u)
    elif args.b is not None:
        lin = Linearization(args.b, args.scale)
        lin.check(A)
    else:
        raise ToricMLEError("give either --counts or --b")
    support = [j - 1 for j in args.support]
    if any(j < 0 or j >= A.m for j in support):
        raise ToricMLEError(f"support indices must lie in 1..{A.m}")
    sub = destabilizing_certificate(A, lin, support)
    support = sorted(set(support))
    payload = sub.to_json()
    payload["support"] = [j + 1 for j in support]
    payload["pairings"] = sub.pairings(A, lin, support)
    payload["linearization"] = {"b": list(lin.b), "scale": lin.scale}
    return payload, {"support": args.support}, EXIT_OK


def cmd_models(args):
    if args.family == "independence":
        if args.m is None:
            raise ToricMLEError("independence needs --m")
        A = independence_matrix(args.m)
        overrides = {"family": "independence", "m": args.m}
    else:
        A = path_graph_3chain_matrix()
        overrides = {"family": "path3"}
    return matrix_to_json(A), overrides, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricmle",
        description="MLE existence via torus stability, and the (extended) MLE by two routes.",
    )
    parser.add_argument("--timing", action="store_true",
                        help="record wall-clock duration in the manifest (output is then not reproducible)")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--matrix", required=True, help="design matrix JSON file")
        p.add_argument("--counts", required=True, help="count vector JSON file")
        return p

    data_command("classify", "classify the all-ones vector and report MLE existence")
    p = data_command("nullcone", "null-cone components and invariant monomials")
    p.add_argument("--max-m", type=int, default=DEFAULT_ENUMERATION_LIMIT,
                   help="refuse subset enumeration above this many columns")
    p = data_command("mle", "compute the (extended) MLE")
    p.add_argument("--method", choices=("ips", "capacity", "both"), default="both")
    p.add_argument("--tol", type=float, help="solver tolerance")
    p.add_argument("--alpha", help="IPS exponent denominator, a positive rational such as 3/2")
    p.add_argument("--trace", help="write the per-iteration trace as JSON lines")

    p = sub.add_parser("certificate", help="destabilizing one-parameter subgroup for an unstable support")
    p.add_argument("--matrix", required=True)
    p.add_argument("--counts", help="use the data linearization (nA, Au)")
    p.add_argument("--b", type=_int_list, help="linearization b as comma-separated integers")
    p.add_argument("--scale", type=int, default=1, help="multiplier applied to A (with --b)")
    p.add_argument("--support", type=_int_list, required=True, help="1-based column indices")

    p = sub.add_parser("models", help="write a standard design matrix")
    p.add_argument("family", choices=("independence", "path3"))
    p.add_argument("--m", type=int, help="number of states per variable (independence)")
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "nullcone": cmd_nullcone,
    "mle": cmd_mle,
    "certificate": cmd_certificate,
    "models": cmd_models,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        payload, overrides, code = COMMANDS[args.command](args)
    except (CrossCheckError, NotConvergedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ToricMLEError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    manifest = RunManifest(
        command=args.command,
        inputs=_inputs(args),
        overrides=overrides,
        duration_seconds=time.perf_counter() - start if args.timing else None,
    )
    payload["schema"] = SCHEMA
    payload["manifest"] = manifest.to_json()
    print(dumps(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
