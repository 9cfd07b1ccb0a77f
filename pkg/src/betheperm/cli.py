"""``betheperm`` command line.

One JSON record per run on stdout, a short human summary on stderr.  Exact
values are written as ``"p/q"`` strings, floats at 17 significant digits,
each tagged ``exact`` or ``float(tol)``.

Exit codes: 0 ok, 1 check failures, 2 parse error or bad usage, 3 shape or
index-set error, 4 optimizer non-convergence, 5 enumeration budget
exceeded, 10 conjecture findings (and no failures).
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bethe import DEFAULT_TOL, NonConvergence, minimize_bethe
from .harness import DEFAULT_SEED, SUITES, run_suite
from .lifting import BUDGET_PRESETS, BudgetExceeded, degree_M_bethe_perm, parse_budget, resolve_budget
from .matrix import ParseError, parse_matrix
from .parallel import default_workers
from .permanent import permanent_naive, permanent_ryser
from .pseudo import (
    awgnc_pseudo_weight,
    bethe_perm_vector,
    bethe_perm_vector_M,
    in_fundamental_cone,
    min_pseudo_weight_bound,
    perm_vector,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SHAPE, EXIT_NONCONV, EXIT_BUDGET, EXIT_FINDINGS = 0, 1, 2, 3, 4, 5, 10


def encode(x, tol: float | None = None):
    """JSON-ready value with provenance for numbers."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer, Fraction)):
        return {"value": str(Fraction(x)), "provenance": "exact"}
    if isinstance(x, (float, np.floating)):
        prov = f"float({tol:g})" if tol is not None else "float"
        return {"value": format(float(x), ".17g"), "provenance": prov}
    if isinstance(x, np.ndarray):
        return encode(x.tolist(), tol)
    if isinstance(x, dict):
        return {str(k): encode(v, tol) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v, tol) for v in x]
    if dataclasses.is_dataclass(x):
        return encode(dataclasses.asdict(x), tol)
    return str(x)


def _read_matrix(path: str) -> tuple[np.ndarray, str]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_matrix(text), text


def _square(a: np.ndarray) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape[0]}x{a.shape[1]}")
    return a


def cmd_perm(args) -> tuple[dict, str, int]:
    a, text = _read_matrix(args.matrix)
    _square(a)
    algo = args.algo
    if algo == "auto":
        algo = "naive" if a.shape[0] <= 4 else "ryser"
    value = permanent_naive(a) if algo == "naive" else permanent_ryser(a, workers=args.workers)
    out = {"permanent": encode(value), "algorithm": algo, "n": a.shape[0]}
    return {"inputs": {"matrix": args.matrix, "text": text}, "outputs": out}, f"perm = {value}", EXIT_OK


def _mode(tokens: list[str]) -> tuple[str, int | None]:
    if tokens == ["limit"]:
        return "limit", None
    if len(tokens) == 2 and tokens[0] == "degree":
        M = int(tokens[1])
        if M < 1:
            raise argparse.ArgumentTypeError("degree must be >= 1")
        return "degree", M
    raise argparse.ArgumentTypeError("--mode takes 'limit' or 'degree M'")


def cmd_bethe(args) -> tuple[dict, str, int]:
    a, text = _read_matrix(args.matrix)
    _square(a)
    mode, M = args.mode
    inputs = {"matrix": args.matrix, "text": text}
    if mode == "limit":
        r = minimize_bethe(a, args.tol)
        out = {"mode": "limit", "value": encode(r.value, args.tol), "gap": encode(r.gap), "iterations": r.iterations,
               "converged": r.converged, "minimizer": encode(r.minimizer, args.tol)}
        if not r.converged:
            return {"inputs": inputs, "outputs": out}, f"no convergence: best perm_B = {r.value:.10g}, gap {r.gap:.3g}", EXIT_NONCONV
        return {"inputs": inputs, "outputs": out}, f"perm_B = {r.value:.10g} (gap {r.gap:.2g})", EXIT_OK
    res = degree_M_bethe_perm(a, M, args.budget, args.workers)
    out = {"mode": "degree", "M": M, "sum": encode(res.sum), "count": encode(res.count), "mean": encode(res.mean),
           "root": encode(res.root_M, 0.0)}
    return {"inputs": inputs, "outputs": out}, f"mean = {res.mean}, root_{M} = {res.root_M:.17g}", EXIT_OK


def _parse_beta(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part or ".." in part:
            lo, hi = part.replace("..", "-").split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


_FAMILY = {"perm": "perm", "betheM": "bethe_M", "bethe": "bethe_limit"}


def cmd_vectors(args) -> tuple[dict, str, int]:
    H, text = _read_matrix(args.matrix)
    m, n = H.shape
    family = _FAMILY[args.family]
    if family == "bethe_M" and args.M is None:
        raise ValueError("--family betheM needs --M")
    M = args.M or 1
    tol = args.tol if family == "bethe_limit" else None
    if args.all_beta:
        betas = list(itertools.combinations(range(1, n + 1), m + 1))
    else:
        betas = [tuple(_parse_beta(args.beta))]
    rows, lines = [], []
    for beta in betas:
        if family == "perm":
            w = perm_vector(H, beta)
        elif family == "bethe_M":
            w = bethe_perm_vector_M(H, beta, M, args.budget, args.workers)
        else:
            w = bethe_perm_vector(H, beta, args.tol)
        cone = in_fundamental_cone(H, w)
        wt = None if w.is_zero() else awgnc_pseudo_weight(w)
        rows.append({"beta": list(beta), "vector": encode(list(w.values), tol), "in_cone": cone.member,
                     "violations": encode(cone.violations, tol), "pseudo_weight": encode(wt, tol),
                     **({"powers": encode(list(w.powers))} if w.powers is not None and M > 1 else {})})
        shown = ", ".join(str(v) if w.exact else f"{v:.4f}" for v in w.values)
        lines.append(f"beta={list(beta)}: ({shown})  cone={'yes' if cone.member else 'no'}  weight={wt}")
    out = {"family": args.family, "vectors": rows}
    best, arg = min_pseudo_weight_bound(H, family, M, args.tol, args.budget, args.workers) if args.all_beta else (None, None)
    if args.all_beta:
        out["min_pseudo_weight"] = encode(best, tol)
        out["argmin_beta"] = list(arg) if arg else None
        lines.append(f"min pseudo-weight {best} at beta={list(arg) if arg else None}")
    return {"inputs": {"matrix": args.matrix, "text": text}, "outputs": out}, "\n".join(lines), EXIT_OK


def cmd_verify(args) -> tuple[dict, str, int]:
    reports = run_suite(args.suite, args.seed, args.budget, args.workers, args.tol)
    out, lines = [], []
    for r in reports:
        out.append({
            "name": r.name, "seed": r.seed, "instances": r.instances, "passes": r.passes,
            "failures": encode(r.failures), "findings": encode(r.findings), "notes": encode(r.notes),
            "records": encode(r.records), "wall_time": r.wall_time,
        })
        lines.append(f"{r.name}: {r.passes}/{r.instances} passed, {len(r.findings)} findings ({r.wall_time:.2f}s)")
        lines.extend(f"  FAIL {f['instance']}" for f in r.failures)
    code = EXIT_OK
    if any(r.failures for r in reports):
        code = EXIT_FAIL
    elif any(r.findings for r in reports):
        code = EXIT_FINDINGS
    return {"inputs": {"suite": args.suite}, "outputs": {"reports": out}}, "\n".join(lines), code


def _budget(text: str) -> int:
    try:
        return parse_budget(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must be a positive integer or one of {sorted(BUDGET_PRESETS)}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=default_workers(), help="worker processes")
    common.add_argument("--budget", type=_budget, default=None,
                        help=f"max liftings per enumeration (integer or {'/'.join(BUDGET_PRESETS)}); overrides $BETHEPERM_BUDGET")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="free-energy gap tolerance")
    p = argparse.ArgumentParser(prog="betheperm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("perm", parents=[common], help="exact permanent")
    sp.add_argument("matrix", help="dense or exponent matrix file, '-' for stdin")
    sp.add_argument("--algo", choices=("naive", "ryser", "auto"), default="auto")
    sp.set_defaults(func=cmd_perm)

    sb = sub.add_parser("bethe", parents=[common], help="Bethe permanent (limit or degree M)")
    sb.add_argument("matrix")
    sb.add_argument("--mode", nargs="+", default=["limit"], metavar="MODE", help="'limit' or 'degree M'")
    sb.set_defaults(func=cmd_bethe)

    sv = sub.add_parser("vectors", parents=[common], help="perm / Bethe vectors, cone checks, pseudo-weights")
    sv.add_argument("matrix")
    g = sv.add_mutually_exclusive_group(required=True)
    g.add_argument("--beta", help="1-based columns, e.g. 1,2,3 or 1-10")
    g.add_argument("--all-beta", action="store_true")
    sv.add_argument("--family", choices=tuple(_FAMILY), default="perm")
    sv.add_argument("--M", type=int, default=None, help="lift degree for --family betheM")
    sv.set_defaults(func=cmd_vectors)

    sc = sub.add_parser("verify", parents=[common], help="run verification suites")
    sc.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sc.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    if args.command == "bethe":
        try:
            args.mode = _mode(args.mode)
        except (argparse.ArgumentTypeError, ValueError) as e:
            parser.error(str(e))
    budget = resolve_budget(args.budget)
    args.budget = budget
    record = {"command": args.command, "argv": argv, "version": __version__, "seed": getattr(args, "seed", None),
              "workers": args.workers, "budget": budget}
    t0 = time.perf_counter()
    try:
        body, summary, code = args.func(args)
        record.update(body)
    except ParseError as e:
        summary, code = f"parse error: {e}", EXIT_PARSE
        record["error"] = {"kind": "parse", "message": str(e), "line": e.line, "row": e.row, "column": e.column}
    except OSError as e:
        summary, code = f"cannot read input: {e}", EXIT_PARSE
        record["error"] = {"kind": "io", "message": str(e)}
    except BudgetExceeded as e:
        summary, code = f"budget exceeded: {e.required} liftings required, budget {e.budget}", EXIT_BUDGET
        record["error"] = {"kind": "budget", "required": str(e.required), "budget": str(e.budget)}
    except NonConvergence as e:
        summary, code = f"no convergence: {e}", EXIT_NONCONV
        record["error"] = {"kind": "nonconvergence", "message": str(e), "best": encode(e.result.value, args.tol),
                           "gap": encode(e.result.gap)}
    except (ValueError, IndexError) as e:
        summary, code = f"shape error: {e}", EXIT_SHAPE
        record["error"] = {"kind": "shape", "message": str(e)}
    record["timing"] = {"wall_seconds": time.perf_counter() - t0}
    record["exit_code"] = code
    json.dump(record, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
