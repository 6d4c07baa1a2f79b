"""Command-line front end.

Subcommands cover generation, inspection, the reduction drivers, the
sieve solvers, kernel benchmarks, and config-driven experiment matrices.
Exit codes: 0 on success, 2 when a solver ran and honestly failed, 3 for
malformed input (bad arguments, unreadable files, parameters out of
domain). Basis files use the text format (header "n m e", then one
column per line); pass "-" to read a basis from stdin.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .basis import (Basis, basis_from_json_dict, basis_from_text,
                    basis_to_json_dict, basis_to_text)
from .errors import InputError, ParamError, ScaleError, SolverFailure
from .gso import gso_compute
from .harness import (LatticeSpec, bench_kernels, generate, run_experiment)
from .harness.report import _plain
from .reduction import (OracleSpec, dbkz, hkz_reduce, is_slide_reduced,
                        lll_reduce, slide_reduce, svp_exact)
from .sieve import SieveConfig, gsvp_solve, hsvp_approx, svp_approx


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad arguments; the contract reserves 2 for
    # solver failures and wants 3 for input problems
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _load_basis(path: str) -> Basis:
    if path == "-":
        return basis_from_text(sys.stdin.read())
    try:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParamError(f"cannot read basis file: {exc}") from exc
    if text.lstrip().startswith("{"):
        return _basis_from_jsonable(json.loads(text))
    return basis_from_text(text)


def _basis_jsonable(basis: Basis) -> dict:
    """JSON mirror; non-dyadic scales get an explicit scale field."""
    try:
        return basis_to_json_dict(basis)
    except ScaleError:
        return {"rank": basis.rank, "ambient": basis.ambient,
                "scale": [basis.scale.numerator, basis.scale.denominator],
                "columns": [list(c) for c in basis.cols]}


def _basis_from_jsonable(data: dict) -> Basis:
    if "scale" in data:
        num, den = data["scale"]
        return Basis([list(c) for c in data["columns"]],
                     Fraction(int(num), int(den)))
    return basis_from_json_dict(data)


def _emit_basis(basis: Basis, args) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(basis_to_text(basis))
    elif not args.json:
        sys.stdout.write(basis_to_text(basis))


def _print_json(payload: dict) -> None:
    json.dump(_plain(payload), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _hermite(basis: Basis, norm_sq) -> float:
    root = float(basis.det_sq()) ** (1.0 / (2 * basis.rank))
    return math.sqrt(float(norm_sq)) / root


# ------------------------------------------------------------- subcommands


def _cmd_gen(args) -> int:
    params = {}
    for key, flag in (("q", args.q), ("k_sis", args.k_sis), ("t", args.t),
                      ("depth", args.depth), ("bound", args.bound)):
        if flag is not None:
            params[key] = flag
    spec = LatticeSpec(kind=args.kind, n=args.n, seed=args.seed,
                       params=params)
    inst = generate(spec)
    if args.json:
        _print_json({"spec": spec.jsonable(),
                     "basis": _basis_jsonable(inst.basis),
                     "truth": inst.truth})
        if args.output:
            with open(args.output, "w", encoding="ascii") as fh:
                fh.write(basis_to_text(inst.basis))
        return 0
    _emit_basis(inst.basis, args)
    known = {k: v for k, v in inst.truth.items() if k != "short_vector"}
    print(f"generated {args.kind} rank {args.n} seed {args.seed}: "
          + ", ".join(f"{k}={_plain(v)}" for k, v in known.items()),
          file=sys.stderr)
    return 0


def _cmd_gso(args) -> int:
    basis = _load_basis(args.basis)
    mode = "exact" if args.exact_gso else 2 * basis.rank + 53
    gso = gso_compute(basis, mode)
    log2 = [math.log2(float(x)) / 2 for x in gso.bstar_sq]
    if args.json:
        norms = ([str(x) for x in gso.bstar_sq] if args.exact_gso
                 else gso.bstar_sq_float())
        _print_json({"rank": basis.rank, "bstar_sq": norms,
                     "log2_profile": log2,
                     "det_sq": basis.det_sq()})
        return 0
    for i, x in enumerate(gso.bstar_sq):
        shown = str(x) if args.exact_gso else f"{float(x):.10g}"
        print(f"{i:3d}  {shown}  (log2 norm {log2[i]:+.4f})")
    return 0


def _cmd_lll(args) -> int:
    basis = _load_basis(args.basis)
    red, res = lll_reduce(basis, eps=args.eps)
    norm_sq = red.gram()[0][0]
    if args.json:
        _print_json({"basis": _basis_jsonable(red), "swaps": res.swaps,
                     "norm_sq": norm_sq, "hermite_factor": _hermite(red, norm_sq)})
        return 0
    _emit_basis(red, args)
    print(f"lll: first norm {math.sqrt(float(norm_sq)):.6g}, "
          f"hermite factor {_hermite(red, norm_sq):.6g}, "
          f"{res.swaps} swaps", file=sys.stderr)
    return 0


def _cmd_svp_exact(args) -> int:
    basis = _load_basis(args.basis)
    vec, coeffs, norm_sq = svp_exact(basis)
    if args.json:
        _print_json({"vector": vec, "coeffs": coeffs, "norm_sq": norm_sq,
                     "hermite_factor": _hermite(basis, norm_sq)})
        return 0
    print(f"norm_sq {norm_sq}")
    print("coeffs " + " ".join(str(c) for c in coeffs))
    print("vector " + " ".join(str(x) for x in vec))
    return 0


def _cmd_hkz(args) -> int:
    basis = _load_basis(args.basis)
    red = hkz_reduce(basis)
    norm_sq = red.gram()[0][0]
    if args.json:
        _print_json({"basis": _basis_jsonable(red), "norm_sq": norm_sq,
                     "hermite_factor": _hermite(red, norm_sq)})
        return 0
    _emit_basis(red, args)
    print(f"hkz: first norm {math.sqrt(float(norm_sq)):.6g}",
          file=sys.stderr)
    return 0


def _oracle_arg(args, k: int) -> OracleSpec:
    if args.oracle == "sieve":
        return OracleSpec(kind="hsvp", backend="sieve", seed=args.seed)
    return OracleSpec(kind="hsvp", backend="enum")


def _cmd_dbkz(args) -> int:
    basis = _load_basis(args.basis)
    red, rep = dbkz(basis, args.k, eps=float(args.eps),
                    oracle=_oracle_arg(args, args.k),
                    max_tours=args.budget)
    if args.json:
        _print_json({"basis": _basis_jsonable(red),
                     "first_norm": rep.first_norm,
                     "hermite_bound": rep.hermite_bound,
                     "bound_ok": rep.bound_ok,
                     "oracle_calls": rep.oracle_calls,
                     "oracle_delta": rep.delta,
                     "tours_planned": rep.tours_planned,
                     "tours_run": rep.tours_run, "capped": rep.capped})
        return 0
    _emit_basis(red, args)
    print(f"dbkz k={args.k}: first norm {rep.first_norm:.6g} vs bound "
          f"{rep.hermite_bound:.6g} ({'ok' if rep.bound_ok else 'MISSED'}), "
          f"{rep.oracle_calls} oracle calls in {rep.tours_run} tours"
          + (" (capped)" if rep.capped else ""), file=sys.stderr)
    return 0


def _cmd_slide(args) -> int:
    basis = _load_basis(args.basis)
    oracle = _oracle_arg(args, args.k)
    red, rep = slide_reduce(basis, args.k, args.ell, eps=args.eps,
                            hsvp_oracle=oracle, max_calls=args.budget)
    verdict = is_slide_reduced(red, args.k, args.ell,
                               delta_h_sq=oracle.delta_sq_pow(args.k, 1),
                               eps=args.eps)
    if args.json:
        _print_json({
            "basis": _basis_jsonable(red),
            "norm_sq": red.gram()[0][0],
            "passes": rep.passes,
            "oracle_calls": rep.oracle_calls,
            "oracle_budget": rep.budget,
            "head_rebuilds": rep.head_rebuilds,
            "dual_accepts": rep.dual_accepts,
            "potential_trace": {
                "labels": [label for label, _ in rep.trace.entries],
                "log2_values": rep.trace.log2_values(),
                "non_increasing": rep.trace.non_increasing()},
            "constraints": {c.label: {"ok": c.ok, "slack": c.measured}
                            for c in verdict.checks},
            "reduced_ok": verdict.ok})
        return 0
    _emit_basis(red, args)
    state = "ok" if verdict.ok else \
        "FAILING " + ",".join(c.label for c in verdict.failing())
    print(f"slide k={args.k} ell={args.ell}: {rep.passes} passes, "
          f"{rep.oracle_calls} oracle calls, {rep.head_rebuilds} rebuilds, "
          f"constraints {state}", file=sys.stderr)
    return 0


def _cmd_sieve_gsvp(args) -> int:
    basis = _load_basis(args.basis)
    cfg = SieveConfig.desk(
        basis.rank, eps=args.eps, alpha=args.alpha, ell=args.ell, m=args.m,
        seed=args.seed,
        retries=args.budget if args.budget is not None else 20)
    res = gsvp_solve(basis, cfg)
    if args.json:
        _print_json({
            "vector": res.vector, "coeffs": res.coeffs,
            "norm_sq": res.norm_sq, "s_used": res.s,
            "eta_upper": res.eta_upper, "length_bound": res.bound,
            "meets_bound": res.meets_bound, "attempt": res.attempt,
            "grid": res.grid,
            "levels": [{"s": st.s, "pool_sizes": st.pool_sizes,
                        "zero_counts": st.zero_counts,
                        "sum_norms": st.sum_norms,
                        "shortest_sq": st.shortest_sq, "note": st.note}
                       for st in res.stats],
            "overrides": res.config.overrides})
        return 0
    print(f"norm_sq {res.norm_sq} at width {res.s:.6g} "
          f"(bound {res.bound:.6g}, "
          f"{'met' if res.meets_bound else 'MISSED'})")
    print("vector " + " ".join(str(x) for x in res.vector))
    return 0


def _cmd_sieve_svp(args) -> int:
    basis = _load_basis(args.basis)
    n = basis.rank
    gamma = args.gamma if args.gamma is not None else \
        2.0 * math.sqrt(n * max(math.log2(n), 1.0))
    res = svp_approx(basis, gamma, seed=args.seed)
    payload = {"vector": res.vector, "coeffs": res.coeffs,
               "norm_sq": res.norm_sq, "gamma": res.gamma,
               "eps_used": res.eps, "reference": res.reference,
               "ratio": res.ratio}
    if args.json:
        _print_json(payload)
        return 0
    line = f"norm_sq {res.norm_sq} within gamma {gamma:.6g}"
    if res.ratio is not None:
        line += f", measured ratio {res.ratio:.6g}"
    print(line)
    print("vector " + " ".join(str(x) for x in res.vector))
    return 0


def _cmd_sieve_hsvp(args) -> int:
    basis = _load_basis(args.basis)
    n = basis.rank
    lg = max(math.log2(n), 1.0)
    gamma = args.gamma if args.gamma is not None else \
        2.0 * math.sqrt(n * lg ** 3)
    res = hsvp_approx(basis, gamma, seed=args.seed)
    if args.json:
        _print_json({"vector": res.vector, "coeffs": res.coeffs,
                     "norm_sq": res.norm_sq, "gamma": res.gamma,
                     "eps_used": res.eps, "det_root": res.reference,
                     "ratio": res.ratio})
        return 0
    print(f"norm_sq {res.norm_sq}, {res.ratio:.6g} x det root "
          f"(gamma {gamma:.6g})")
    print("vector " + " ".join(str(x) for x in res.vector))
    return 0


def _cmd_bench(args) -> int:
    rep = bench_kernels(rank=args.rank, count=args.count,
                        repeat=args.repeat, seed=args.seed)
    if args.json:
        _print_json(rep.jsonable())
        return 0
    print(f"active backend: {rep.active_backend}")
    for op, per in sorted(rep.times.items()):
        parts = [f"{name} {t * 1e3:.3f} ms" for name, t in sorted(per.items())]
        line = f"{op:14s} " + "  ".join(parts)
        if op in rep.speedups:
            line += f"  (native {rep.speedups[op]:.1f}x, "
            line += "outputs agree)" if rep.agree[op] else "OUTPUTS DIFFER)"
        print(line)
    return 0


def _cmd_experiment(args) -> int:
    from .harness.experiment import load_config

    cfg = load_config(args.config)
    if args.output:
        cfg["output"] = args.output
    if args.csv:
        cfg["csv"] = args.csv
    reports = run_experiment(cfg, jobs=args.jobs)
    if args.json or not cfg.get("output"):
        for rep in reports:
            sys.stdout.write(rep.json_line())
            sys.stdout.write("\n")
    else:
        for rep in reports:
            inst = rep.config["instance"]
            print(f"{rep.status:15s} {rep.solver:12s} {inst['kind']} "
                  f"n={inst['n']} seed={rep.seed}"
                  + (f"  [{rep.error}]" if rep.error else ""))
        print(f"{len(reports)} runs -> {cfg['output']}")
    return 0


# ------------------------------------------------------------------ wiring


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for every randomized component")
    common.add_argument("--json", action="store_true",
                        help="machine-readable output on stdout")
    common.add_argument("--exact-gso", action="store_true",
                        help="exact rational orthogonalization where offered")
    common.add_argument("--budget", type=int, default=None,
                        help="per-command cap: tours (dbkz), oracle calls "
                             "(slide), retries (sieve-gsvp)")

    top = _Parser(prog="dgsieve", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True,
                             parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common],
                       help="generate a lattice instance")
    p.add_argument("--kind", required=True,
                   choices=("qary", "knapsack", "diagonal-planted",
                            "scrambled-identity"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, help="qary modulus")
    p.add_argument("--k-sis", type=int, dest="k_sis",
                   help="qary free-coordinate count")
    p.add_argument("--t", type=int, help="plant length for diagonal-planted")
    p.add_argument("--depth", type=int, help="scramble depth")
    p.add_argument("--bound", type=int, help="knapsack weight bound")
    p.add_argument("-o", "--output", help="write the basis file here")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("gso", parents=[common],
                       help="orthogonalized profile of a basis")
    p.add_argument("--basis", required=True)
    p.set_defaults(fn=_cmd_gso)

    p = sub.add_parser("lll", parents=[common], help="LLL-reduce a basis")
    p.add_argument("--basis", required=True)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 100))
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_lll)

    p = sub.add_parser("svp-exact", parents=[common],
                       help="certified shortest vector")
    p.add_argument("--basis", required=True)
    p.set_defaults(fn=_cmd_svp_exact)

    p = sub.add_parser("hkz", parents=[common],
                       help="projected-minima reduction")
    p.add_argument("--basis", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_hkz)

    p = sub.add_parser("dbkz", parents=[common],
                       help="self-dual block sweeps")
    p.add_argument("--basis", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--oracle", choices=("exact", "sieve"), default="exact")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_dbkz)

    p = sub.add_parser("slide", parents=[common],
                       help="twin-block reduction with an audited potential")
    p.add_argument("--basis", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--oracle", choices=("exact", "sieve"), default="exact")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_slide)

    p = sub.add_parser("sieve-gsvp", parents=[common],
                       help="width-sweep sieve below a length bound")
    p.add_argument("--basis", required=True)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--alpha", type=int, default=None)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(fn=_cmd_sieve_gsvp)

    p = sub.add_parser("sieve-svp", parents=[common],
                       help="sieve within a factor of the first minimum")
    p.add_argument("--basis", required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(fn=_cmd_sieve_svp)

    p = sub.add_parser("sieve-hsvp", parents=[common],
                       help="sieve within a factor of the determinant root")
    p.add_argument("--basis", required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(fn=_cmd_sieve_hsvp)

    p = sub.add_parser("bench", parents=[common],
                       help="time the compiled kernels against the fallback")
    p.add_argument("--rank", type=int, default=13)
    p.add_argument("--count", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("experiment", parents=[common],
                       help="run a config-driven matrix of solvers")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", help="override the config's JSON-lines path")
    p.add_argument("--csv", help="override the config's CSV path")
    p.set_defaults(fn=_cmd_experiment)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"dgsieve: input error: {exc}", file=sys.stderr)
        return 3
    except SolverFailure as exc:
        print(f"dgsieve: solver failed: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"dgsieve: input error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
