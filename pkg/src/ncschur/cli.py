"""Command-line front end.

Every subcommand prints one JSON report on stdout and a short summary on
stderr.  Exit status is 0 on success, 1 when a checked property fails and
2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import Any, Dict, Optional, Sequence

import numpy as np

from . import _jsonio
from .beurling_lax import subspace_check, synthesize_inner
from .checks import run_checks
from .colligation import Colligation, InputPair, classify, simulate, transfer_function
from .dbr_model import build_dbr_colligation, verify_realization
from .errors import DimensionError, NcSchurError
from .formal_series import FormalSeries
from .kernels import kernel_KCA, kernel_KS, positivity_check

log = logging.getLogger("ncschur")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Malformed or unreadable input file."""


def _load(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _parse(loader, path: str):
    data = _load(path)
    # accept the report of another subcommand in place of the bare object
    if isinstance(data, dict) and "command" in data and "result" in data:
        data = data["result"]
    try:
        return loader(data)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, NcSchurError) and not isinstance(exc, DimensionError):
            raise
        raise InputError(f"malformed input in {path}: {exc}") from exc


def _residual(value: float, tol: float, sense: str = "le") -> Dict[str, Any]:
    ok = value <= tol if sense == "le" else value >= -tol
    return {"value": float(value), "tol": tol, "sense": sense, "passed": bool(ok)}


def _cmd_expand(args) -> Dict[str, Any]:
    U = _parse(Colligation.from_json, args.colligation)
    S = transfer_function(U, args.degree)
    return {"result": S.to_json(), "residuals": {}, "flags": {}}


def _cmd_classify(args) -> Dict[str, Any]:
    U = _parse(Colligation.from_json, args.colligation)
    return {"result": {"dim_state": U.n}, "residuals": {}, "flags": classify(U, args.tol)}


def _cmd_kernel(args) -> Dict[str, Any]:
    if bool(args.series) == bool(args.colligation):
        raise InputError("give exactly one of --series or --colligation")
    if args.series:
        S = _parse(FormalSeries.from_json, args.series)
        K = kernel_KS(S, min(args.degree, S.degree), side=args.side)
    else:
        U = _parse(Colligation.from_json, args.colligation)
        K = kernel_KCA(U.output_pair, args.degree)
    ok, lam = positivity_check(K, args.tol)
    return {"result": K.to_json(),
            "residuals": {"min_eigenvalue": _residual(lam, args.tol, "ge")},
            "flags": {"positive": ok}}


def _cmd_dbr(args) -> Dict[str, Any]:
    S = _parse(FormalSeries.from_json, args.series)
    N = min(args.degree, S.degree)
    model = build_dbr_colligation(S, N, args.tol)
    rep = verify_realization(model.colligation, S, N - 1, args.check_tol)
    return {
        "result": model.to_json(),
        "residuals": {
            "coefficient": _residual(rep["coefficient_residual"], args.check_tol),
            "coisometry": _residual(rep["coisometry_residual"], args.check_tol),
        },
        "flags": {"observable": rep["observability_rank"] == model.r, "passed": rep["passed"]},
        "report": rep,
    }


def _cmd_blax(args) -> Dict[str, Any]:
    pair = _parse(InputPair.from_json, args.pair)
    syn = synthesize_inner(pair, args.degree, args.tol)
    sub = subspace_check(syn.theta, syn.pair, args.degree, args.tol)
    cert = syn.certificate
    residuals = {"max_angle_sine": _residual(float(np.sin(sub.max_angle)), max(sub.angle_bound, 1e-9))}
    if cert.gram_deviation is not None:
        residuals["gram_deviation"] = _residual(cert.gram_deviation, args.tol + cert.tail_bound)
    return {
        "result": {"theta": syn.theta.to_json(), "colligation": syn.colligation.to_json(),
                   "certificate": cert.to_json(), "subspace": sub.to_json()},
        "residuals": residuals,
        "flags": {"inner": syn.inner, "subspace": sub.passed, "passed": bool(syn.inner and sub.passed)},
    }


def _cmd_simulate(args) -> Dict[str, Any]:
    U = _parse(Colligation.from_json, args.colligation)

    def load_inputs(data):
        return {w: _jsonio.decode_matrix([v], (1, U.m))[0] for w, v in data.items()}

    u = _parse(load_inputs, args.input)
    y = simulate(U, u, args.side, args.degree)
    return {"result": {w: _jsonio.encode_matrix([v])[0] for w, v in y.items()},
            "residuals": {}, "flags": {}}


def _cmd_check(args) -> Dict[str, Any]:
    groups = run_checks(args.seed, args.d, args.degree, args.trials)
    residuals = {f"{g}.{r.name}": r.to_json() for g, rs in groups.items() for r in rs}
    return {"result": {}, "residuals": residuals,
            "flags": {"passed": all(r["passed"] for r in residuals.values())}}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", "-N", type=int, default=4, help="truncation degree (default 4)")
    common.add_argument("--tol", type=float, default=1e-10, help="numerical tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="random seed recorded in the report")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="ncschur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="colligation -> transfer series")
    p.add_argument("--colligation", required=True)
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("classify", parents=[common], help="contractive/isometric/coisometric flags")
    p.add_argument("--colligation", required=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("kernel", parents=[common], help="kernel table and positivity")
    p.add_argument("--series")
    p.add_argument("--colligation", help="use the output pair of a colligation")
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("dbr", parents=[common], help="series -> model colligation and report")
    p.add_argument("--series", required=True)
    p.add_argument("--check-tol", type=float, default=1e-8, help="validation tolerance (default 1e-8)")
    p.set_defaults(func=_cmd_dbr)

    p = sub.add_parser("blax", parents=[common], help="input pair -> inner multiplier")
    p.add_argument("--pair", required=True)
    p.set_defaults(func=_cmd_blax)

    p = sub.add_parser("simulate", parents=[common], help="run the system on an input")
    p.add_argument("--colligation", required=True)
    p.add_argument("--input", required=True, help="JSON map word -> [[re, im], ...]")
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", parents=[common], help="seeded property suite")
    p.add_argument("--d", type=int, default=2, help="alphabet size (default 2)")
    p.add_argument("--trials", type=int, default=5, help="random draws per group (default 5)")
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "verbose")}
    start = time.perf_counter()
    try:
        body = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionError as exc:
        print(f"error: inconsistent dimensions: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NcSchurError as exc:
        body = {"result": {}, "residuals": {}, "flags": {"passed": False},
                "error": {"type": type(exc).__name__, "message": str(exc)}}
    report = {"command": args.command, "args": echo, "seed": args.seed, **body,
              "timings": {"seconds": round(time.perf_counter() - start, 6)}}
    failed = ("error" in body or body["flags"].get("passed") is False
              or body["flags"].get("positive") is False
              or any(not r["passed"] for r in body["residuals"].values()))
    json.dump(report, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    status = "FAIL" if failed else "ok"
    n_res = len(body["residuals"])
    print(f"{args.command}: {status} ({n_res} residuals checked)", file=sys.stderr)
    if "error" in body:
        print(f"  {body['error']['type']}: {body['error']['message']}", file=sys.stderr)
    for name, r in body["residuals"].items():
        if not r["passed"]:
            print(f"  {name} = {r['value']:.3e} (tol {r['tol']:.1e})", file=sys.stderr)
    return EXIT_VIOLATION if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
