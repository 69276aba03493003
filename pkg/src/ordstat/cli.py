"""Command-line front end: ``ordstat <command> [options]``.

Every run prints one JSON object (sorted keys, 12 significant digits) and
exits 0 when all checks pass, 1 when any check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, maxcorr, optimize
from .errors import OrdstatError
from .fixtures import Check, check, check_true, run_fixtures
from .populations import (
    Population,
    conditional_expectation,
    correlation,
    lattice_population,
    make_population,
    order_stat_joint,
)

SIG_DIGITS = 12


class UsageError(Exception):
    pass


def _num(x):
    if isinstance(x, Fraction):
        return float(f"{float(x):.{SIG_DIGITS}g}")
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not math.isfinite(x) else float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, np.ndarray):
        return [_num(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    return x


def _report(command: str, inputs: dict, outputs: dict, checks: list[Check]) -> dict:
    return {
        "command": command,
        "inputs": _num(inputs),
        "outputs": _num(outputs),
        "checks": [_num(c.as_dict()) for c in checks],
    }


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse probabilities {text!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse list {text!r}") from exc


def load_population(path: str | Path) -> Population:
    """JSON ``{"values": [...], "probs": [...]}`` or plain text, one value per line."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if "values" not in data:
            raise UsageError("population JSON needs a 'values' list")
        probs = data.get("probs")
        if probs is not None:
            probs = [float(Fraction(str(p))) for p in probs]
        return make_population(data["values"], probs)
    values = [float(line) for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    return make_population(values)


def _population(args) -> Population:
    if getattr(args, "pop", None):
        return load_population(args.pop)
    if getattr(args, "p", None):
        probs = _floats(args.p)
        return lattice_population(len(probs), probs)
    if getattr(args, "N", None):
        return lattice_population(args.N)
    raise UsageError("give one of --pop, --p or --N")


def _pop_inputs(args, pop: Population) -> dict:
    return {"support": pop.support, "probs": pop.probs, "i": args.i, "j": args.j, "n": args.n}


def cmd_bound(args):
    outputs, inputs, checks = {}, {}, []
    if args.N is not None:
        inputs["N"] = args.N
        b = bounds.terrell_discrete_bound(args.N)
        outputs["rho_bound"] = b
        checks.append(check_true("bound in [1/3, 1/2)", 1 / 3 <= b < 0.5, b))
    if args.i is not None or args.j is not None or args.n is not None:
        if None in (args.i, args.j, args.n):
            raise UsageError("TSM bound needs --i, --j and --n")
        inputs.update(i=args.i, j=args.j, n=args.n)
        outputs["tsm_bound"] = bounds.tsm_bound(args.i, args.j, args.n)
    if args.p is not None:
        ps = _rationals(args.p)
        inputs["p"] = [str(q) for q in ps]
        r = bounds.rational_p_reduction_bound(ps)
        outputs["rational_p_bound"] = r
        outputs["rational_p_bound_exact"] = str(r)
    if not outputs:
        raise UsageError("bound needs --N, --i/--j/--n or --p")
    return inputs, outputs, checks


def cmd_rho(args):
    pop = _population(args)
    joint = order_stat_joint(pop, args.i, args.j, args.n, method=args.method)
    var_x, var_y, cov = joint.moments()
    outputs = {"rho": correlation(joint), "var_x": var_x, "var_y": var_y, "cov": cov}
    checks = [check_true("rho below TSM bound", outputs["rho"] <= bounds.tsm_bound(args.i, args.j, args.n) + 1e-12, outputs["rho"])]
    return _pop_inputs(args, pop), outputs, checks


def cmd_maxcorr(args):
    pop = _population(args)
    joint = order_stat_joint(pop, args.i, args.j, args.n)
    res = maxcorr.maximal_correlation(joint)
    rho = correlation(joint)
    _, cond = _conditional(joint, res)
    outputs = {
        "R": res.R,
        "rho": rho,
        "f_opt": res.f_opt,
        "g_opt": res.g_opt,
        "singular_values": res.singular_values,
        "unique": res.unique,
    }
    checks = [
        check("leading singular value", res.singular_values[0], 1.0, 1e-10),
        check("certificate g = E[f|Y]/R", np.max(np.abs(res.g_opt - cond / res.R)), 0.0, 1e-9),
        check_true("rho <= R", rho <= res.R + 1e-12, rho),
    ]
    return _pop_inputs(args, pop), outputs, checks


def _conditional(joint, res):
    f_full = np.zeros(joint.x_support.size)
    f_full[joint.px > 0] = res.f_opt
    return conditional_expectation(joint, f_full)


def cmd_search(args):
    pop = _population(args)
    res = optimize.search_same_g(pop, args.i, args.j, args.n, monotone=args.monotone, restarts=args.restarts, seed=args.seed)
    outputs = {
        "value": res.value,
        "g_star": res.g_star,
        "rho_identity": res.baseline,
        "restarts": res.restarts,
        "converged": res.converged,
        "monotone": res.monotone_constraint,
    }
    checks = [check_true("search value >= identity correlation", res.value >= res.baseline - 1e-12, res.value)]
    if args.monotone:
        checks.append(check_true("g_star nondecreasing", bool(np.all(np.diff(res.g_star) >= 0))))
    inputs = _pop_inputs(args, pop) | {"monotone": args.monotone, "restarts": args.restarts, "seed": args.seed}
    return inputs, outputs, checks


def cmd_quartic(args):
    if args.from_N is not None:
        prob = optimize.default_quartic_params(args.from_N)
    elif args.lam is not None and args.gamma is not None:
        gam = tuple(_floats(args.gamma))
        prob = optimize.QuarticProblem(n=len(gam) + 1, lam=args.lam, gamma=gam)
    else:
        raise UsageError("quartic needs --from-N or both --lambda and --gamma")
    out = optimize.minimize_quartic(prob, restarts=args.restarts, seed=args.seed)
    outputs = {"kind": out.kind, "min_value": out.min_value, "minimizers": [m for m in out.minimizers], "converged": out.converged}
    if out.ray is not None:
        outputs["descent_ray"] = out.ray
    checks = [
        check(f"stationary minimizer {k}", np.linalg.norm(optimize.quartic_gradient(prob, x)), 0.0, 1e-8)
        for k, x in enumerate(out.minimizers)
    ]
    inputs = {"n": prob.n, "lambda": prob.lam, "gamma": list(prob.gamma), "restarts": args.restarts, "seed": args.seed}
    return inputs, outputs, checks


def cmd_verify(args):
    checks = run_fixtures()
    outputs = {"total": len(checks), "failed": sum(not c.passed for c in checks)}
    return {}, outputs, checks


def sweep_point(N: int) -> dict:
    joint = order_stat_joint(lattice_population(N), 1, 2, 2)
    rho = correlation(joint)
    R = maxcorr.maximal_correlation(joint).R
    bound = bounds.terrell_discrete_bound(N)
    return {"N": N, "rho_lattice": rho, "bound": bound, "maxcorr": R, "margin": R - bound}


def cmd_sweep(args):
    if args.N_min < 2 or args.N_max < args.N_min:
        raise UsageError("need 2 <= --N-min <= --N-max")
    Ns = list(range(args.N_min, args.N_max + 1))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(sweep_point, Ns))
    else:
        rows = [sweep_point(N) for N in Ns]
    checks = []
    for r in rows:
        N = r["N"]
        checks.append(check(f"rho_lattice = bound, N={N}", r["rho_lattice"], r["bound"], 1e-10))
        if N >= 3:
            checks.append(check_true(f"rho_N < R_N < 1/2, N={N}", r["rho_lattice"] < r["maxcorr"] < 0.5, r["maxcorr"]))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["N", "rho_lattice", "bound", "maxcorr", "margin"])
            for r in rows:
                writer.writerow([r["N"]] + [f"{r[k]:.{SIG_DIGITS}g}" for k in ("rho_lattice", "bound", "maxcorr", "margin")])
    return {"N_min": args.N_min, "N_max": args.N_max}, {"rows": rows}, checks


def _add_pop_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--pop", help="population file (JSON or one value per line)")
    src.add_argument("--N", type=int, help="uniform population {1..N}")
    src.add_argument("--p", help="weights on {1..N}, comma separated (e.g. 1/4,1/2,1/4)")
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--n", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordstat", description=__doc__.splitlines()[0])
    parser.add_argument("--timing", action="store_true", help="add elapsed_ms to the report (breaks byte-identical output)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="discrete Terrell, TSM and rational-p bounds")
    p.add_argument("--N", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--p", help="exact rational weights, e.g. 1/16,3/8,9/16")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("rho", help="exact correlation of two order statistics")
    _add_pop_args(p)
    p.add_argument("--method", choices=["auto", "enumerate", "formula"], default="auto")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("maxcorr", help="maximal correlation via the kernel SVD")
    _add_pop_args(p)
    p.set_defaults(func=cmd_maxcorr)

    p = sub.add_parser("search", help="best corr(g(X_i:n), g(X_j:n)) over one transform g")
    _add_pop_args(p)
    p.add_argument("--monotone", action="store_true")
    p.add_argument("--restarts", type=int, default=optimize.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("quartic", help="classify the quartic minimization problem")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", help="comma separated gamma_1..gamma_{n-1}")
    p.add_argument("--from-N", dest="from_N", type=int, help="use the weights derived from grid size N")
    p.add_argument("--restarts", type=int, default=optimize.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_quartic)

    p = sub.add_parser("verify", help="run the reference-value suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="rho_N, R_N and the bound over a range of N")
    p.add_argument("--N-min", dest="N_min", type=int, default=2)
    p.add_argument("--N-max", dest="N_max", type=int, default=20)
    p.add_argument("--csv", help="also write rows to this CSV file")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    start = time.perf_counter()
    try:
        inputs, outputs, checks = args.func(args)
    except (UsageError, OrdstatError, ValueError, OSError) as exc:
        print(f"ordstat {args.command}: error: {exc}", file=sys.stderr)
        return 2
    report = _report(args.command, inputs, outputs, checks)
    if args.timing:
        report["elapsed_ms"] = int(round((time.perf_counter() - start) * 1000))
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0 if all(c.passed for c in checks) else 1


def main() -> None:
    sys.exit(run())
