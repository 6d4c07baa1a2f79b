"""Generators, provenance reports, and the experiment runner."""

import csv
import json
from fractions import Fraction

import pytest

from dgsieve.errors import ParamError
from dgsieve.harness import (LatticeSpec, RunReport, Tagged, bench_kernels,
                             available_backends, bound, expand_matrix,
                             gen_lattice, generate, ground_truth, measured,
                             run_experiment, write_csv, write_jsonl)
from dgsieve.harness.experiment import execute_run
from dgsieve.reduction import first_minimum_sq


# ----------------------------------------------------------- generators


def test_generators_deterministic():
    for kind, params in [("qary", {"q": 97}), ("knapsack", {}),
                         ("diagonal-planted", {"t": 9}),
                         ("scrambled-identity", {})]:
        spec = LatticeSpec(kind=kind, n=7, seed=11, params=params)
        a, b = gen_lattice(spec), gen_lattice(spec)
        assert a.cols == b.cols and a.scale == b.scale
        other = gen_lattice(LatticeSpec(kind=kind, n=7, seed=12,
                                        params=params))
        if kind != "diagonal-planted":  # the plant ignores the seed
            assert other.cols != a.cols


def test_qary_shape_and_determinant():
    inst = generate(LatticeSpec(kind="qary", n=9, seed=3,
                                params={"q": 101, "k_sis": 4}))
    b = inst.basis
    assert b.scale == 1
    # free block: identity rows on top of modular mixing rows
    for j in range(4):
        col = b.column(j)
        assert col[j] == 1
        assert all(col[i] == 0 for i in range(4) if i != j)
        assert all(0 <= col[i] < 101 for i in range(4, 9))
    for j in range(4, 9):
        assert list(b.column(j)) == [101 if i == j else 0 for i in range(9)]
    want = Fraction(101) ** (2 * 5)
    assert b.det_sq() == want
    assert inst.truth["det_sq"] == want


def test_knapsack_structure():
    inst = generate(LatticeSpec(kind="knapsack", n=5, seed=2,
                                params={"bound": 10 ** 12}))
    b = inst.basis
    assert b.det_sq() == Fraction(10 ** 24) == inst.truth["det_sq"]
    for j in range(4):
        col = b.column(j)
        assert col[j] == 1
        assert 0 <= col[4] < 10 ** 12
    assert list(b.column(4)) == [0, 0, 0, 0, 10 ** 12]


def test_knapsack_default_bound_is_huge():
    inst = generate(LatticeSpec(kind="knapsack", n=40, seed=0, params={}))
    assert inst.truth["det_sq"] == Fraction(2) ** 160  # (2^(2n))^2


def test_planted_short_vector_is_the_minimum():
    inst = generate(LatticeSpec(kind="diagonal-planted", n=4, seed=0,
                                params={"t": 100}))
    assert inst.truth["lambda1_sq"] == Fraction(1, 10000)
    assert first_minimum_sq(inst.basis) == Fraction(1, 10000)
    assert inst.basis.contains(inst.truth["short_vector"])
    assert inst.basis.scale == Fraction(1, 100)


def test_scrambled_identity_is_unimodular():
    inst = generate(LatticeSpec(kind="scrambled-identity", n=6, seed=8,
                                params={}))
    assert inst.basis.det_sq() == 1
    assert inst.truth["lambda1_sq"] == 1
    ident = generate(LatticeSpec(kind="scrambled-identity", n=4, seed=8,
                                 params={"depth": 0}))
    assert ident.basis.cols == tuple(
        tuple(1 if i == j else 0 for i in range(4)) for j in range(4))
    # rank 1 has no admissible shear but must still terminate
    one = generate(LatticeSpec(kind="scrambled-identity", n=1, seed=0,
                               params={"depth": 25}))
    assert one.basis.cols == ((1,),)


def test_generator_guards():
    with pytest.raises(ParamError):
        LatticeSpec(kind="mystery", n=4, params={})
    with pytest.raises(ParamError):
        LatticeSpec(kind="qary", n=0, params={"q": 7})
    with pytest.raises(ParamError):
        LatticeSpec(kind="qary", n=4, params={"t": 2})  # stray key
    for kind, params in [("qary", {"q": 1}), ("qary", {"q": 7, "k_sis": 0}),
                         ("qary", {"q": 7, "k_sis": 4}),
                         ("knapsack", {"bound": 1}),
                         ("diagonal-planted", {"t": 0}),
                         ("scrambled-identity", {"depth": -1})]:
        with pytest.raises(ParamError):
            generate(LatticeSpec(kind=kind, n=4, params=params))
    with pytest.raises(ParamError):
        generate(LatticeSpec(kind="diagonal-planted", n=1, params={"t": 5}))


def test_spec_jsonable_round_trip():
    spec = LatticeSpec(kind="qary", n=6, seed=4, params={"q": 13})
    data = spec.jsonable()
    assert data == {"kind": "qary", "n": 6, "seed": 4, "params": {"q": 13}}
    again = LatticeSpec(kind=data["kind"], n=data["n"], seed=data["seed"],
                        params=data["params"])
    assert gen_lattice(again).cols == gen_lattice(spec).cols


# -------------------------------------------------------------- reports


def test_tagged_provenances():
    assert measured(3).provenance == "measured"
    assert ground_truth(Fraction(1, 3)).jsonable() == {
        "value": "1/3", "provenance": "ground-truth"}
    assert bound(2.5).value == 2.5
    with pytest.raises(ParamError):
        Tagged(1, "vibes")


def test_report_canonical_form_drops_timing():
    rep = RunReport(solver="lll", config={"n": 4}, seed=1, status="ok",
                    metrics={"norm_sq": measured(Fraction(9, 4))},
                    flags={"ok": True}, vector=(1, 0), wall_time_s=0.25)
    full = json.loads(rep.json_line())
    assert full["wall_time_s"] == 0.25
    assert full["metrics"]["norm_sq"] == {"value": "9/4",
                                          "provenance": "measured"}
    canon = json.loads(rep.canonical_json())
    assert "wall_time_s" not in canon
    rep.wall_time_s = 99.0
    assert rep.canonical_json() == json.dumps(
        canon, sort_keys=True, separators=(",", ":"))


def test_jsonl_and_csv_writers(tmp_path):
    reps = [
        RunReport(solver="a", config={}, seed=0, status="ok",
                  metrics={"m": measured(2), "b": bound(3.0)},
                  flags={"good": True}, wall_time_s=1.0),
        RunReport(solver="b", config={}, seed=1, status="input-error",
                  error="boom", wall_time_s=2.0),
    ]
    jpath = tmp_path / "r.jsonl"
    assert write_jsonl(reps, jpath) == 2
    lines = jpath.read_text().splitlines()
    assert [json.loads(x)["solver"] for x in lines] == ["a", "b"]

    cpath = tmp_path / "r.csv"
    assert write_csv(reps, cpath) == 2
    with open(cpath, newline="") as fh:
        rows = list(csv.reader(fh))
    head = rows[0]
    assert head[:5] == ["solver", "seed", "status", "error", "config"]
    assert "b" in head and "b:provenance" in head
    assert not any("wall" in c for c in head)
    got = dict(zip(head, rows[1]))
    assert got["m"] == "2" and got["m:provenance"] == "measured"
    assert dict(zip(head, rows[2]))["error"] == "boom"


# ----------------------------------------------------------- experiment


def _tiny_cfg():
    return {
        "instances": [{"kind": "scrambled-identity", "n": 6,
                       "seeds": [0, 1]},
                      {"kind": "diagonal-planted", "n": 4,
                       "params": {"t": 8}, "seed": 0}],
        "solvers": [{"name": "lll"}, {"name": "svp-exact"}],
    }


def test_expand_matrix_order_and_cap():
    runs = expand_matrix({**_tiny_cfg(), "cross_check_max_rank": 9})
    assert len(runs) == 6
    # instances outermost, then solvers, then seeds
    key = [(r["instance"]["kind"], r["solver"], r["seed"]) for r in runs]
    assert key == [
        ("scrambled-identity", "lll", 0), ("scrambled-identity", "lll", 1),
        ("scrambled-identity", "svp-exact", 0),
        ("scrambled-identity", "svp-exact", 1),
        ("diagonal-planted", "lll", 0), ("diagonal-planted", "svp-exact", 0),
    ]
    assert all(r["cross_check_max_rank"] == 9 for r in runs)
    assert expand_matrix({"instances": [], "solvers": []}) == []


def test_expand_matrix_guards():
    with pytest.raises(ParamError):
        expand_matrix({"solvers": []})
    with pytest.raises(ParamError):
        expand_matrix({"instances": {}, "solvers": []})
    with pytest.raises(ParamError):
        expand_matrix({"instances": [{"kind": "qary"}], "solvers": []})
    with pytest.raises(ParamError):
        expand_matrix({"instances": [], "solvers": [{"params": {}}]})


def test_execute_run_grades_output():
    run = expand_matrix(_tiny_cfg())[4]  # lll on the planted instance
    rep = execute_run(run)
    assert rep.status == "ok"
    assert rep.flags["membership_ok"] is True
    assert rep.flags["lattice_preserved"] is True
    assert rep.metrics["det_sq"].provenance == "ground-truth"
    assert rep.metrics["norm_sq"].value == Fraction(1, 64)
    assert rep.metrics["approx_factor"].value == pytest.approx(1.0)
    assert rep.wall_time_s is not None


def test_execute_run_skips_cross_check_above_cap():
    # qary carries no first-minimum ground truth, so the grade depends on
    # the enumeration cross-check, which the cap disables here
    run = {"instance": {"kind": "qary", "n": 6, "params": {"q": 31}},
           "solver": "lll", "params": {}, "seed": 0,
           "cross_check_max_rank": 2}
    rep = execute_run(run)
    assert rep.status == "ok"
    assert "approx_factor" not in rep.metrics
    assert "lambda1_sq" not in rep.metrics
    capped = dict(run, cross_check_max_rank=12)
    assert "approx_factor" in execute_run(capped).metrics


def test_execute_run_isolates_failures():
    bad_name = {"instance": {"kind": "scrambled-identity", "n": 4,
                             "params": {}},
                "solver": "does-not-exist", "params": {}, "seed": 0,
                "cross_check_max_rank": 12}
    rep = execute_run(bad_name)
    assert rep.status == "input-error" and rep.error

    starved = {"instance": {"kind": "scrambled-identity", "n": 8,
                            "params": {}},
               "solver": "slide",
               "params": {"k": 3, "ell": 2, "max_calls": 1}, "seed": 0,
               "cross_check_max_rank": 12}
    rep = execute_run(starved)
    assert rep.status == "solver-failure"
    assert "budget" in rep.error


def test_run_experiment_reproducible(tmp_path):
    cfg = _tiny_cfg()
    cfg["output"] = str(tmp_path / "runs.jsonl")
    cfg["csv"] = str(tmp_path / "runs.csv")
    first = run_experiment(dict(cfg))
    second = run_experiment(dict(cfg))
    assert [r.canonical_json() for r in first] == \
        [r.canonical_json() for r in second]
    assert len((tmp_path / "runs.jsonl").read_text().splitlines()) == 6
    assert (tmp_path / "runs.csv").exists()
    assert all(r.status == "ok" for r in first)
    for rep in first:
        af = rep.metrics["approx_factor"].value
        assert af >= 1.0 - 1e-9


def test_run_experiment_continues_past_failures():
    cfg = {
        "instances": [{"kind": "scrambled-identity", "n": 6, "seed": 0}],
        "solvers": [{"name": "slide", "params": {"k": 9, "ell": 2}},
                    {"name": "svp-exact"}],
    }
    reps = run_experiment(cfg)
    assert [r.status for r in reps] == ["input-error", "ok"]


# ---------------------------------------------------------------- bench


def test_bench_kernels_agree():
    rep = bench_kernels(rank=8, count=500, repeat=1, seed=3)
    backs = available_backends()
    assert "pure" in backs
    for op in ("enumerate", "sample_batch", "pair_scan"):
        assert rep.agree[op] is True
        assert set(rep.times[op]) == set(backs)
        for t in rep.times[op].values():
            assert t > 0.0
    if "native" in backs:
        assert rep.active_backend == "native"
        assert set(rep.speedups) == {"enumerate", "sample_batch",
                                     "pair_scan"}
    data = rep.jsonable()
    assert data["agree"] == rep.agree


def test_bench_guards():
    with pytest.raises(ParamError):
        bench_kernels(rank=0)
    with pytest.raises(ParamError):
        bench_kernels(repeat=0)
