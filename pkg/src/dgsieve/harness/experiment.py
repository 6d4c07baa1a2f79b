"""Config-driven experiment matrices with per-run isolation.

A config names instances, solvers, and seeds; the runner executes the
cross product, grades every output, and never lets one failing run take
the matrix down. Each run's report carries an exact membership verdict
and, where the rank is small enough for certified enumeration, the
approximation factor against the true first minimum.

Config schema (JSON):
    {
      "instances": [{"kind": "qary", "n": 10, "params": {"q": 97},
                     "seeds": [0, 1, 2]}],
      "solvers":   [{"name": "sieve-svp", "params": {"gamma": 40.0}}],
      "cross_check_max_rank": 12,      # optional, default 12
      "output": "runs.jsonl",          # optional
      "csv": "runs.csv"                # optional
    }
Instance entries may give "seed" instead of "seeds". Runs execute in
listed order (instances, then solvers, then seeds); that order is the
reproducibility contract.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool

from ..basis import Basis
from ..errors import InputError, ParamError, SolverFailure
from ..reduction import (OracleSpec, dbkz, first_minimum_sq, hkz_reduce,
                         is_slide_reduced, lll_reduce, slide_reduce,
                         slide_svp_solve, svp_exact)
from ..sieve import SieveConfig, gsvp_solve, hsvp_approx, svp_approx
from .generators import Instance, LatticeSpec, generate
from .report import (RunReport, bound, ground_truth, measured, write_csv,
                     write_jsonl)

_ENUM_CAP_DEFAULT = 12


@dataclass(frozen=True)
class SolveOutcome:
    metrics: dict
    flags: dict
    vector: tuple | None
    out_basis: Basis | None = None


def _oracle_from(params: dict, kind: str, seed: int) -> OracleSpec:
    name = params.get("oracle", "exact")
    if name == "exact":
        return OracleSpec(kind=kind, backend="enum")
    if name == "sieve":
        return OracleSpec(kind=kind, backend="sieve", seed=seed)
    raise ParamError(f"unknown oracle choice {name!r}")


def _solve_svp_exact(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    vec, coeffs, norm_sq = svp_exact(inst.basis)
    return SolveOutcome({"norm_sq": measured(norm_sq)},
                        {"coeffs": list(coeffs)}, tuple(vec))


def _solve_lll(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    eps = Fraction(params.get("eps", Fraction(1, 100)))
    red, res = lll_reduce(inst.basis, eps=eps)
    n = inst.basis.rank
    metrics = {
        "norm_sq": measured(red.gram()[0][0]),
        "worst_case_factor": bound(2.0 ** (n / 2)),
    }
    return SolveOutcome(metrics, {"swaps": res.swaps}, red.column(0), red)


def _solve_hkz(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    red = hkz_reduce(inst.basis)
    return SolveOutcome({"norm_sq": measured(red.gram()[0][0])},
                        {}, red.column(0), red)


def _solve_dbkz(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    k = int(params.get("k", 4))
    eps = float(params.get("eps", 0.1))
    oracle = _oracle_from(params, "hsvp", seed)
    max_tours = params.get("max_tours")
    red, rep = dbkz(inst.basis, k, eps=eps, oracle=oracle,
                    max_tours=None if max_tours is None else int(max_tours))
    metrics = {
        "norm_sq": measured(red.gram()[0][0]),
        "first_norm": measured(rep.first_norm),
        "hermite_bound": bound(rep.hermite_bound),
        "oracle_calls": measured(rep.oracle_calls),
        "tours_run": measured(rep.tours_run),
        "tours_planned": bound(rep.tours_planned),
    }
    flags = {"bound_ok": rep.bound_ok, "capped": rep.capped,
             "oracle_delta": rep.delta}
    return SolveOutcome(metrics, flags, red.column(0), red)


def _solve_slide(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    k = int(params.get("k", 4))
    ell = int(params.get("ell", 2))
    eps = Fraction(params.get("eps", Fraction(1, 10)))
    oracle = _oracle_from(params, "hsvp", seed)
    max_calls = params.get("max_calls")
    red, rep = slide_reduce(inst.basis, k, ell, eps=eps, hsvp_oracle=oracle,
                            max_calls=None if max_calls is None
                            else int(max_calls))
    verdict = is_slide_reduced(red, k, ell,
                               delta_h_sq=oracle.delta_sq_pow(k, 1), eps=eps)
    metrics = {
        "norm_sq": measured(red.gram()[0][0]),
        "oracle_calls": measured(rep.oracle_calls),
        "oracle_budget": bound(rep.budget),
        "passes": measured(rep.passes),
        "potential_log2": measured(rep.trace.log2_values()),
    }
    for check in verdict.checks:
        metrics["slack:" + check.label] = measured(check.measured)
    flags = {
        "reduced_ok": verdict.ok,
        "failing_checks": [c.label for c in verdict.failing()],
        "head_rebuilds": rep.head_rebuilds,
        "dual_accepts": rep.dual_accepts,
        "trace_labels": [label for label, _ in rep.trace.entries],
        "trace_non_increasing": rep.trace.non_increasing(),
    }
    return SolveOutcome(metrics, flags, red.column(0), red)


def _solve_slide_svp(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    k = int(params.get("k", 4))
    ell = params.get("ell")
    eps = Fraction(params.get("eps", Fraction(1, 10)))
    res = slide_svp_solve(inst.basis, k,
                          ell=None if ell is None else int(ell),
                          eps=eps, seed=seed)
    metrics = {"norm_sq": measured(res.norm_sq),
               "depth": measured(res.depth)}
    flags = {"level_ranks": [lv.rank for lv in res.levels],
             "level_condition_held": [lv.condition_held for lv in res.levels],
             "level_bound_ok": [lv.bound_ok for lv in res.levels]}
    return SolveOutcome(metrics, flags, tuple(res.vector))


def _sieve_config(inst: Instance, params: dict, seed: int) -> SieveConfig:
    n = inst.basis.rank
    return SieveConfig.desk(
        n,
        eps=float(params.get("eps", 0.25)),
        alpha=None if params.get("alpha") is None else int(params["alpha"]),
        ell=int(params.get("ell", 2)),
        m=None if params.get("m") is None else int(params["m"]),
        seed=seed,
        retries=int(params.get("retries", 20)))


def _solve_sieve_gsvp(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    res = gsvp_solve(inst.basis, _sieve_config(inst, params, seed))
    metrics = {
        "norm_sq": measured(res.norm_sq),
        "s_used": measured(res.s),
        "eta_upper": bound(res.eta_upper),
        "length_bound": bound(res.bound),
        "pool_sizes": measured([list(st.pool_sizes) for st in res.stats]),
        "zero_counts": measured([list(st.zero_counts) for st in res.stats]),
        "sum_norms": measured([list(st.sum_norms) for st in res.stats]),
    }
    flags = {"meets_bound": res.meets_bound, "attempt": res.attempt,
             "overrides": dict(res.config.overrides)}
    return SolveOutcome(metrics, flags, tuple(res.vector))


def _approx_outcome(res) -> SolveOutcome:
    metrics = {"norm_sq": measured(res.norm_sq),
               "gamma": bound(res.gamma),
               "eps_used": measured(res.eps)}
    if res.ratio is not None:
        metrics["promise_ratio"] = measured(res.ratio)
    return SolveOutcome(metrics, {}, tuple(res.vector))


def _solve_sieve_svp(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    n = inst.basis.rank
    gamma = float(params.get(
        "gamma", 2.0 * math.sqrt(n * max(math.log2(n), 1.0))))
    return _approx_outcome(svp_approx(inst.basis, gamma, seed=seed))


def _solve_sieve_hsvp(inst: Instance, params: dict, seed: int) -> SolveOutcome:
    n = inst.basis.rank
    lg = max(math.log2(n), 1.0)
    gamma = float(params.get("gamma", 2.0 * math.sqrt(n * lg ** 3)))
    return _approx_outcome(hsvp_approx(inst.basis, gamma, seed=seed))


SOLVERS = {
    "svp-exact": _solve_svp_exact,
    "lll": _solve_lll,
    "hkz": _solve_hkz,
    "dbkz": _solve_dbkz,
    "slide": _solve_slide,
    "slide-svp": _solve_slide_svp,
    "sieve-gsvp": _solve_sieve_gsvp,
    "sieve-svp": _solve_sieve_svp,
    "sieve-hsvp": _solve_sieve_hsvp,
}


def _grade(report: RunReport, inst: Instance, outcome: SolveOutcome,
           enum_cap: int) -> None:
    """Attach membership, Hermite factor, and the factor against the
    first minimum whenever it is known or certifiable."""
    basis = inst.basis
    n = basis.rank
    det_sq = basis.det_sq()
    report.metrics["det_sq"] = ground_truth(det_sq)

    if outcome.vector is not None:
        report.flags["membership_ok"] = basis.contains(outcome.vector)
    if outcome.out_basis is not None:
        report.flags["lattice_preserved"] = \
            outcome.out_basis.same_lattice_as(basis)

    tag = report.metrics.get("norm_sq")
    if tag is None:
        return
    norm = math.sqrt(float(tag.value))
    root = float(det_sq) ** (1.0 / (2 * n))
    report.metrics["hermite_factor"] = measured(norm / root)

    lam_sq = None
    if "lambda1_sq" in inst.truth:
        lam_sq = inst.truth["lambda1_sq"]
        report.metrics["lambda1_sq"] = ground_truth(lam_sq)
    elif n <= enum_cap:
        lam_sq = first_minimum_sq(basis)
        report.metrics["lambda1_sq"] = measured(lam_sq)
    if lam_sq is not None:
        report.metrics["approx_factor"] = measured(
            math.sqrt(float(Fraction(tag.value) / lam_sq)))


def execute_run(run: dict) -> RunReport:
    """One (instance, solver, seed) cell; failures become report rows."""
    seed = int(run.get("seed", 0))
    solver = run["solver"]
    config = {"instance": dict(run["instance"]),
              "solver": solver,
              "params": dict(run.get("params", {}))}
    report = RunReport(solver=solver, config=config, seed=seed, status="ok")
    started = time.perf_counter()
    try:
        if solver not in SOLVERS:
            raise ParamError(f"unknown solver {solver!r}")
        ispec = dict(run["instance"])
        spec = LatticeSpec(kind=ispec["kind"], n=int(ispec["n"]), seed=seed,
                           params=dict(ispec.get("params", {})))
        inst = generate(spec)
        outcome = SOLVERS[solver](inst, dict(run.get("params", {})), seed)
        report.metrics.update(outcome.metrics)
        report.flags.update(outcome.flags)
        report.vector = outcome.vector
        _grade(report, inst, outcome,
               int(run.get("cross_check_max_rank", _ENUM_CAP_DEFAULT)))
    except InputError as exc:
        report.status = "input-error"
        report.error = str(exc)
    except SolverFailure as exc:
        report.status = "solver-failure"
        report.error = str(exc)
    except Exception as exc:  # never let one run break the matrix
        report.status = "solver-failure"
        report.error = f"unexpected {type(exc).__name__}: {exc}"
    report.wall_time_s = time.perf_counter() - started
    return report


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ParamError("config must be a JSON object")
    return cfg


def expand_matrix(cfg: dict) -> list:
    """The run list, in the order that defines reproducibility."""
    for key in ("instances", "solvers"):
        if key not in cfg:
            raise ParamError(f"config needs an {key!r} list")
        if not isinstance(cfg[key], list):
            raise ParamError(f"config {key!r} must be a list")
    instances = cfg["instances"]
    solvers = cfg["solvers"]
    for solver in solvers:
        if "name" not in solver:
            raise ParamError("solver entries need a name")
    cap = int(cfg.get("cross_check_max_rank", _ENUM_CAP_DEFAULT))
    runs = []
    for entry in instances:
        if "kind" not in entry or "n" not in entry:
            raise ParamError("instance entries need kind and n")
        seeds = entry.get("seeds")
        if seeds is None:
            seeds = [entry.get("seed", 0)]
        inst = {"kind": entry["kind"], "n": int(entry["n"]),
                "params": dict(entry.get("params", {}))}
        for solver in solvers:
            for seed in seeds:
                runs.append({"instance": inst,
                             "solver": solver["name"],
                             "params": dict(solver.get("params", {})),
                             "seed": int(seed),
                             "cross_check_max_rank": cap})
    return runs


def run_experiment(cfg, jobs: int = 1) -> list:
    """Execute a config (dict or path); returns the reports in order.

    Writes JSON-lines and CSV outputs when the config names them. With
    jobs > 1 the cells run in a process pool; the report order (and so
    the output files) still follows the matrix order.
    """
    if not isinstance(cfg, dict):
        cfg = load_config(cfg)
    runs = expand_matrix(cfg)
    if jobs > 1 and len(runs) > 1:
        with Pool(processes=jobs) as pool:
            reports = list(pool.imap(execute_run, runs))
    else:
        reports = [execute_run(run) for run in runs]
    if cfg.get("output"):
        write_jsonl(reports, cfg["output"])
    if cfg.get("csv"):
        write_csv(reports, cfg["csv"])
    return reports
