"""End-to-end checks of the command-line surface and its exit codes."""

import io
import json

import pytest

from dgsieve.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def qary_file(tmp_path, capsys):
    path = tmp_path / "b.txt"
    code, _, _ = run(capsys, "gen", "--kind", "qary", "--n", "8",
                     "--q", "97", "--seed", "5", "-o", str(path))
    assert code == 0
    return str(path)


def test_gen_writes_loadable_file(qary_file, capsys):
    code, out, _ = run(capsys, "gso", "--basis", qary_file)
    assert code == 0
    assert len(out.splitlines()) == 8


def test_gen_json_payload(capsys):
    code, out, _ = run(capsys, "gen", "--kind", "qary", "--n", "6",
                       "--q", "31", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["spec"]["kind"] == "qary"
    assert data["basis"]["rank"] == 6
    assert data["truth"]["det_sq"] == 31 ** 6


def test_gen_stdout_pipes_into_other_commands(capsys, monkeypatch):
    code, out, _ = run(capsys, "gen", "--kind", "scrambled-identity",
                       "--n", "5", "--seed", "2")
    assert code == 0 and out.startswith("5 5 0\n")
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    code, out, _ = run(capsys, "svp-exact", "--basis", "-", "--json")
    assert code == 0
    assert json.loads(out)["norm_sq"] == 1


def test_gen_nondyadic_plant(tmp_path, capsys):
    # the text format is dyadic-only; t=100 cannot be written to disk
    code, _, err = run(capsys, "gen", "--kind", "diagonal-planted",
                       "--n", "3", "--t", "100",
                       "-o", str(tmp_path / "x.txt"))
    assert code == 3 and "dyadic" in err
    # the JSON mirror carries the exact scale instead
    code, out, _ = run(capsys, "gen", "--kind", "diagonal-planted",
                       "--n", "3", "--t", "100", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["basis"]["scale"] == [1, 100]
    assert data["truth"]["lambda1_sq"] == "1/10000"


def test_json_basis_file_round_trips(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--kind", "diagonal-planted",
                       "--n", "3", "--t", "10", "--json")
    payload = json.loads(out)["basis"]
    path = tmp_path / "b.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run(capsys, "svp-exact", "--basis", str(path), "--json")
    assert code == 0
    assert json.loads(out)["norm_sq"] == "1/100"


def test_lll_reports_hermite_factor(qary_file, capsys):
    code, out, _ = run(capsys, "lll", "--basis", qary_file, "--json")
    assert code == 0
    data = json.loads(out)
    assert data["swaps"] > 0
    assert data["hermite_factor"] < 2 ** (8 / 2.0)
    assert data["basis"]["rank"] == 8


def test_dbkz_json_fields(qary_file, capsys):
    code, out, _ = run(capsys, "dbkz", "--basis", qary_file, "--k", "3",
                       "--budget", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["capped"] and data["tours_run"] == 2
    assert data["oracle_calls"] > 0
    assert data["first_norm"] <= data["hermite_bound"]


def test_slide_json_carries_trace_and_constraints(qary_file, capsys):
    code, out, _ = run(capsys, "slide", "--basis", qary_file, "--k", "3",
                       "--ell", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["reduced_ok"] is True
    assert data["potential_trace"]["non_increasing"] is True
    assert len(data["potential_trace"]["log2_values"]) >= 1
    assert data["oracle_calls"] <= data["oracle_budget"]
    labels = set(data["constraints"])
    assert any(k.startswith("head") for k in labels)
    assert all(v["ok"] for v in data["constraints"].values())


def test_slide_budget_exhaustion_exits_2(qary_file, capsys):
    code, _, err = run(capsys, "slide", "--basis", qary_file, "--k", "3",
                       "--ell", "2", "--budget", "1")
    assert code == 2 and "budget" in err


def test_sieve_gsvp_json_levels(qary_file, capsys):
    code, out, _ = run(capsys, "sieve-gsvp", "--basis", qary_file,
                       "--seed", "3", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["meets_bound"] is True
    assert data["levels"]
    level = data["levels"][-1]
    assert level["pool_sizes"] and level["zero_counts"] and \
        level["sum_norms"]


def test_sieve_svp_honors_gamma(qary_file, capsys):
    code, out, _ = run(capsys, "sieve-svp", "--basis", qary_file,
                       "--gamma", "40", "--seed", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["gamma"] == 40.0
    assert data["ratio"] is None or data["ratio"] <= 40.0


def test_bench_json(capsys):
    code, out, _ = run(capsys, "bench", "--rank", "7", "--count", "300",
                       "--repeat", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert set(data["agree"]) == {"enumerate", "sample_batch", "pair_scan"}
    assert all(data["agree"].values())


def test_experiment_stream_and_files(tmp_path, capsys):
    cfg = {
        "instances": [{"kind": "scrambled-identity", "n": 5,
                       "seeds": [0, 1]}],
        "solvers": [{"name": "svp-exact"},
                    {"name": "slide", "params": {"k": 3, "ell": 2,
                                                 "max_calls": 1}}],
    }
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg))
    out_path = tmp_path / "runs.jsonl"

    code, out, _ = run(capsys, "experiment", "--config", str(cfg_path),
                       "--output", str(out_path), "--csv",
                       str(tmp_path / "runs.csv"))
    # failing cells must not fail the experiment
    assert code == 0
    assert "solver-failure" in out and "4 runs" in out
    rows = [json.loads(x) for x in out_path.read_text().splitlines()]
    assert [r["status"] for r in rows] == ["ok", "ok", "solver-failure",
                                           "solver-failure"]
    assert (tmp_path / "runs.csv").exists()

    code, out, _ = run(capsys, "experiment", "--config", str(cfg_path),
                       "--json")
    assert code == 0
    assert len(out.splitlines()) == 4


def test_experiment_bad_config_exits_3(tmp_path, capsys):
    code, _, err = run(capsys, "experiment", "--config",
                       str(tmp_path / "missing.json"))
    assert code == 3
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    code, _, err = run(capsys, "experiment", "--config", str(bad))
    assert code == 3 and "error" in err
    noinst = tmp_path / "noinst.json"
    noinst.write_text('{"solvers": []}')
    code, _, _ = run(capsys, "experiment", "--config", str(noinst))
    assert code == 3


def test_argument_errors_exit_3(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "qary"])  # --n missing
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 3


def test_missing_basis_file_exits_3(capsys):
    code, _, err = run(capsys, "gso", "--basis", "/no/such/file")
    assert code == 3 and "input error" in err


def test_gen_param_errors_exit_3(capsys):
    code, _, err = run(capsys, "gen", "--kind", "qary", "--n", "6",
                       "--q", "1")
    assert code == 3 and "modulus" in err
    code, _, err = run(capsys, "gen", "--kind", "knapsack", "--n", "6",
                       "--t", "4")
    assert code == 3


def test_exact_gso_prints_rationals(tmp_path, capsys):
    path = tmp_path / "d.txt"
    path.write_text("2 2 1\n1 1\n0 2\n")
    code, out, _ = run(capsys, "gso", "--basis", str(path), "--exact-gso",
                       "--json")
    assert code == 0
    data = json.loads(out)
    # cols (1,1)/2 and (0,2)/2: both projected squared norms are 1/2
    assert data["bstar_sq"] == ["1/2", "1/2"]
