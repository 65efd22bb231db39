"""Batch command line front end.

Exit codes: 0 success, 1 invalid input, 2 budget exceeded, 3 residual above
tolerance (not a generalized mean). On failure stderr carries one line
``error: {"code": ..., "exit": ..., "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds, counterexamples, densities, jsonio, operators
from .errors import BudgetExceeded, GenMeanError, InvalidInput, NotAGeneralizedMean
from .measure_space import entry_budget, get_budget

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_RESIDUAL = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    budget: int
    tol: float | None
    seed: int
    out: Path | None

    def __post_init__(self):
        if self.budget < 1:
            raise InvalidInput("budget must be >= 1")


def _parse_anchors(text: str | None) -> operators.AnchorSelection | None:
    if not text:
        return None
    try:
        atoms = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise InvalidInput(f"--anchors expects comma-separated atom indices, got {text!r}") from exc
    return operators.AnchorSelection(atoms, atoms)


def _parse_r(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise InvalidInput(f"bad exponent {text!r}") from exc


def _space(args):
    return jsonio.load_space(args.space) if getattr(args, "space", None) else None


def _space_ref(args):
    return str(args.space) if getattr(args, "space", None) else None


# -- subcommands: each returns (document, summary line) ----------------------


def cmd_gmean(args, cfg):
    u = jsonio.load_function(args.kernel, _space(args))
    U = operators.g_mn(u, args.N)
    return jsonio.function_to_dict(U, _space_ref(args)), f"G_{{{u.arity},{args.N}}}: {U.values.size} entries"


def cmd_kernel(args, cfg):
    U = jsonio.load_function(args.mean, _space(args))
    rec = operators.recover_kernel(U, args.m, _parse_anchors(args.anchors), cfg.tol)
    if not rec.ok:
        raise NotAGeneralizedMean(rec.residual, rec.tol)
    doc = jsonio.function_to_dict(rec.kernel, _space_ref(args))
    return doc, f"K_{{{args.m},{U.arity}}}: residual {rec.residual:.3e}"


def cmd_symmetrize(args, cfg):
    g = jsonio.load_function(args.function, _space(args))
    return jsonio.function_to_dict(operators.symmetrize(g), _space_ref(args)), f"symmetrized arity {g.arity}"


def cmd_marginal(args, cfg):
    P = jsonio.load_density(args.density, _space(args))
    Pk = densities.reduce(P, args.k)
    return jsonio.density_to_dict(Pk, _space_ref(args)), f"P_({args.k}) mass {Pk.mass!r}"


def cmd_section_bound(args, cfg):
    P = jsonio.load_density(args.density, _space(args))
    rep = densities.check_section_bound(P, args.zero_tol)
    return rep.to_dict(), f"holds={rep.holds} |B|={len(rep.B_atoms)} min gamma={rep.gamma.min():.6g}"


def _rho(args, P):
    if args.rho:
        return jsonio.load_density(args.rho, P.space)
    return densities.uniform_rho(P.space)


def cmd_perturb(args, cfg):
    P = jsonio.load_density(args.density, _space(args))
    Pn = densities.perturb_toward_product(P, _rho(args, P), args.n)
    return jsonio.density_to_dict(Pn, _space_ref(args)), f"L1 distance {densities.l1_distance(Pn, P):.6g}"


def cmd_bounds(args, cfg):
    r = _parse_r(args.r)
    P = jsonio.load_density(args.density, _space(args)) if args.density else None
    N = P.arity if P is not None else args.N
    if N is None:
        raise InvalidInput("bounds needs -N or --density")
    table = bounds.bound_table(N, P, r if P is not None else None)
    suite = bounds.random_bounds_suite(args.instances, cfg.seed) if args.instances else None
    doc = {
        "constants": table.to_dict(),
        "norms": suite["norms"] if suite else [],
        "margins": suite["margins"] if suite else [],
        "seed": cfg.seed,
    }
    if suite:
        doc["suite"] = {k: suite[k] for k in ("instances", "all_ok", "max_ratio_over_constant")}
    summary = f"C({min(2, N)},{N})={table.c_inf[(min(2, N), N)]:.6g}"
    if suite:
        summary += f"; {suite['instances']} random instances all_ok={suite['all_ok']}"
    return doc, summary


def cmd_verify(args, cfg):
    u = jsonio.load_function(args.kernel, _space(args))
    r = _parse_r(args.r)
    P = jsonio.load_density(args.density, u.space) if args.density else None
    rep = bounds.verify_bounds(u, args.N, P, r, _parse_anchors(args.anchors))
    return rep.to_dict(), f"ok={rep.ok} ratio={rep.ratio:.6g} constant={rep.constant:.6g}"


def cmd_example(args, cfg):
    name = args.name
    if name == "ex1":
        trace = counterexamples.build_ex1(args.grid or 64, args.steps or 63)
        last = trace.per_step[-1]
        osc = trace.meta["oscillation"]["fraction_of_atoms"]
        return trace.to_dict(), (
            f"ex1: oscillating atoms {osc:.0%}; exceptional mass {last['exceptional_fraction']:.3g}"
            f" <= fattened diagonal {last['fattened_diagonal_mass']:.3g}"
        )
    if name == "ex2":
        M = args.M or 5
        space, u = counterexamples.build_ex2(M)
        U = operators.g_mn(u, 3)
        doc = {
            "example": "ex2",
            "M": M,
            "kernel": jsonio.function_to_dict(u),
            "summary": {
                "min_u": float(u.values.min()),
                "max_u": float(u.values.max()),
                "min_G23": float(U.values.min()),
            },
        }
        s = doc["summary"]
        return doc, f"ex2: min u = {s['min_u']:g}, min G_{{2,3}}(u) = {s['min_G23']:g}"
    if name == "ex3":
        M = args.M or 1000
        Ms = sorted({10**p for p in range(1, 8) if 10**p <= M} | {M})
        trace = counterexamples.build_ex3_trace(Ms)
        last = trace.per_step[-1]
        return trace.to_dict(), f"ex3: S_u({M}) = {last['S_u']:.10g}, S_U({M}) = {last['S_U']:.10g}"
    if name == "ex4":
        grid = args.grid or 16
        P = counterexamples.build_ex4(grid)
        rep = densities.check_section_bound(P)
        P1 = densities.reduce(P, 1).values
        x = (2 * np.arange(grid) + 1) / (2 * grid)
        gap = float(np.max(np.abs(P1 - counterexamples.ex4_marginal_closed_form(x))))
        doc = {
            "example": "ex4",
            "grid_n": grid,
            "density": jsonio.density_to_dict(P),
            "check27": rep.to_dict(),
            "marginal_max_gap": gap,
        }
        return doc, f"ex4: condition holds={rep.holds}, max gamma={rep.gamma.max():g}"
    raise InvalidInput(f"unknown example {name!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="max grid entries (default $GENMEAN_BUDGET or 1e7)")
    common.add_argument("--tol", type=float, default=None, help="round-trip tolerance override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--anchors", default=None, help="comma list of anchor atom indices")
    common.add_argument("-o", "--out", type=Path, default=None)
    common.add_argument("--space", type=Path, default=None, help="space document overriding embedded refs")

    parser = argparse.ArgumentParser(prog="genmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gmean", parents=[common], help="forward generalized mean")
    p.add_argument("--kernel", type=Path, required=True)
    p.add_argument("-N", type=int, required=True)
    p.set_defaults(func=cmd_gmean)

    p = sub.add_parser("kernel", parents=[common], help="recover the kernel of a mean")
    p.add_argument("--mean", type=Path, required=True)
    p.add_argument("-m", type=int, required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("symmetrize", parents=[common])
    p.add_argument("--function", type=Path, required=True)
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("marginal", parents=[common])
    p.add_argument("--density", type=Path, required=True)
    p.add_argument("-k", type=int, required=True)
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("check27", parents=[common], help="section lower-bound check")
    p.add_argument("--density", type=Path, required=True)
    p.add_argument("--zero-tol", type=float, default=densities.ZERO_TOL)
    p.set_defaults(func=cmd_section_bound)

    p = sub.add_parser("perturb", parents=[common])
    p.add_argument("--density", type=Path, required=True)
    p.add_argument("--rho", type=Path, default=None, help="one-variable density (default uniform)")
    p.add_argument("-n", type=int, required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("bounds", parents=[common], help="bound constants and randomized check")
    p.add_argument("-N", type=int, default=None)
    p.add_argument("--density", type=Path, default=None)
    p.add_argument("--r", default="1")
    p.add_argument("--instances", type=int, default=0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="verify bounds for one kernel")
    p.add_argument("--kernel", type=Path, required=True)
    p.add_argument("-N", type=int, required=True)
    p.add_argument("--density", type=Path, default=None)
    p.add_argument("--r", default="inf")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example", parents=[common], help="counterexample builders")
    p.add_argument("name", choices=["ex1", "ex2", "ex3", "ex4"])
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(func=cmd_example)
    return parser


def _fail(exc: GenMeanError, code: int) -> int:
    info = {"code": exc.code, "exit": code, "message": str(exc)}
    if isinstance(exc, NotAGeneralizedMean):
        info["residual"] = exc.residual
    print("error: " + json.dumps(info), file=sys.stderr)
    return code


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.budget or get_budget(), args.tol, args.seed, args.out)
        with entry_budget(cfg.budget):
            doc, summary = args.func(args, cfg)
        text = jsonio.write_json(doc, cfg.out)
        if cfg.out is None:
            sys.stdout.write(text)
            print(summary, file=sys.stderr)
        else:
            print(summary)
        return EXIT_OK
    except BudgetExceeded as exc:
        return _fail(exc, EXIT_BUDGET)
    except NotAGeneralizedMean as exc:
        return _fail(exc, EXIT_RESIDUAL)
    except GenMeanError as exc:
        return _fail(exc, EXIT_INPUT)
    except OSError as exc:
        return _fail(InvalidInput(str(exc)), EXIT_INPUT)


def main():
    sys.exit(dispatch())
