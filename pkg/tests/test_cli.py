import json
import math
from math import comb

import pytest

from aqabound import __version__
from aqabound.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from aqabound.graph_tools import PRNG_ID, count_kcliques, dump_edge_list, random_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out)


def test_bound_grover_worked_example(capsys):
    code, doc = run_json(capsys, "bound", "grover", "--n", "2", "--marked", "3", "--epsilon", "0.2", "--lambda-bar", "0.5")
    assert code == EXIT_OK
    r = doc["result"]["report"]
    assert r["tLower"] == pytest.approx(math.asin(0.55) / (0.5 * math.sqrt(3) / 4), rel=1e-14)
    assert doc["version"] == __version__ and doc["prng"] == PRNG_ID
    assert doc["config"]["epsilon"] == 0.2 and doc["config"]["problem"] == "grover"
    assert "timestamp" not in doc


def test_bound_dj_wei(capsys):
    code, doc = run_json(capsys, "bound", "dj-wei", "--n", "5")
    assert code == EXIT_OK
    assert doc["result"]["report"]["deltaV"] == pytest.approx(0.5, abs=1e-14)
    assert doc["result"]["report"]["epsilon"] == 0.1


def test_bound_schedule_sets_lambda_bar(capsys):
    _, doc = run_json(capsys, "bound", "grover", "--n", "3", "--schedule", "power:2")
    assert doc["result"]["report"]["lambdaBar"] == pytest.approx(1 / 3)


def test_bound_ising_scan_is_invalid(capsys):
    code, doc = run_json(capsys, "bound", "ising", "--n", "9", "--scan")
    assert code == EXIT_INVALID
    assert doc["result"]["report"]["asymptoticClass"] == "AsymptoticallyInvalid"
    assert doc["result"]["scan"]["classification"] == "AsymptoticallyInvalid"
    assert doc["result"]["report"]["overlapC1"] == pytest.approx(2 / 2**9)


def test_bound_scan_valid_family_exits_zero(capsys):
    code, doc = run_json(capsys, "bound", "dj-wei", "--n", "4", "--scan", "--n-values", "2-6")
    assert code == EXIT_OK
    assert [r["n"] for r in doc["result"]["scan"]["rows"]] == [2, 3, 4, 5, 6]


def test_bound_scan_csv(capsys):
    code, out = run(capsys, "bound", "ising", "--n", "6", "--scan", "--format", "csv")
    assert code == EXIT_INVALID
    assert out.splitlines()[0] == "n,deltaV,invDeltaV,class"


def test_bound_kclique_without_cliques_uses_ground_overlap(capsys, tmp_path):
    f = tmp_path / "path.edges"
    f.write_text("n 4\n0 1\n1 2\n")
    code, doc = run_json(capsys, "bound", "kclique", "--file", str(f), "--k", "3")
    assert code == EXIT_OK
    assert doc["result"]["report"]["params"]["M"] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["bound", "nope"],
        ["bound", "grover"],
        ["bound", "dj-das", "--n", "3", "--function", "weird"],
        ["bound", "grover", "--n", "2", "--marked", "9"],
        ["bound", "kclique", "--k", "3"],
        ["bound", "ising", "--n", "4", "--scan"],
        ["simulate", "ising", "--n", "4"],
        ["bound", "grover", "--n", "3", "--schedule", "cubic"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == EXIT_USAGE


def test_bad_graph_file_is_usage_error(capsys, tmp_path):
    f = tmp_path / "bad.edges"
    f.write_text("n 3\n1 1\n")
    assert main(["kclique", "--file", str(f), "--k", "2"]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_simulate_large_T(capsys, tmp_path):
    csv = tmp_path / "traj.csv"
    code, doc = run_json(capsys, "simulate", "grover", "--n", "2", "--T", "40", "--csv", str(csv))
    assert code == EXIT_OK
    assert doc["result"]["finalFidelity"] >= 0.99
    assert doc["result"]["chain"]["status"] == "pass"
    rows = [line.split(",") for line in csv.read_text().splitlines()[1:]]
    R = [float(r[5]) for r in rows]
    assert R == sorted(R)


def test_simulate_fault_injection_exits_3(capsys):
    code, doc = run_json(capsys, "simulate", "dj-wei", "--n", "3", "--T", "2", "--inject-fault")
    assert code == EXIT_VIOLATION
    assert doc["result"]["chain"]["status"] == "violation"


def test_simulate_csv_format(capsys):
    code, out = run(capsys, "simulate", "bv", "--n", "2", "--T", "1", "--samples", "5", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("t,lambda,fidelity")
    assert len(out.splitlines()) == 6


def test_gap_grover_sixteen(capsys):
    code, doc = run_json(capsys, "gap", "grover", "--n", "4", "--marked", "5")
    assert code == EXIT_OK
    assert doc["result"]["gMin"] == pytest.approx(0.25, abs=1e-9)
    assert doc["result"]["projectorCheck"]["status"] == "pass"


def test_gap_projector_check_dj_das_and_kclique(capsys):
    _, doc = run_json(capsys, "gap", "dj-das", "--n", "3", "--function", "balanced:2")
    assert doc["result"]["projectorCheck"]["status"] == "pass"
    _, doc = run_json(capsys, "gap", "kclique", "--random", "--n", "5", "--k", "3", "--seed", "2")
    assert doc["result"]["projectorCheck"]["status"] == "not-applicable"


def test_kclique_random_three_sigma(capsys):
    code, doc = run_json(capsys, "kclique", "--random", "--n", "6", "--k", "3", "--p", "0.5", "--trials", "10000", "--seed", "1")
    assert code == EXIT_OK
    mc = doc["result"]["monteCarlo"]
    assert mc["withinThreeSigma"] and mc["zH"] <= 3 and mc["zH2"] <= 3
    assert doc["result"]["meanField"]["eH"] == pytest.approx(1.5)


def test_kclique_deformed_file(capsys, tmp_path):
    g = random_graph(7, 0.6, 8)
    f = tmp_path / "g.edges"
    f.write_text(dump_edge_list(g))
    code, doc = run_json(capsys, "kclique", "--deformed", "--file", str(f), "--k", "3", "--trials", "0")
    assert code == EXIT_OK
    inst = doc["result"]["instance"]
    want = 1 - count_kcliques(g, 3) / comb(7, 3)
    assert inst["mean1"] == pytest.approx(want, abs=1e-12)
    assert inst["mean2"] == pytest.approx(want, abs=1e-12)
    assert "monteCarlo" not in doc["result"]


def test_kclique_tinf_ratio(capsys):
    _, d5 = run_json(capsys, "kclique", "--random", "--n", "12", "--k", "5", "--trials", "0")
    _, d6 = run_json(capsys, "kclique", "--random", "--n", "12", "--k", "6", "--trials", "0")
    ratio = d5["result"]["meanField"]["tRandInf"] / d6["result"]["meanField"]["tRandInf"]
    assert ratio == pytest.approx(math.sqrt(1.5), abs=1e-12)


def test_output_is_byte_identical(capsys, tmp_path):
    argv = ["kclique", "--random", "--n", "6", "--k", "3", "--trials", "300", "--seed", "4", "--no-timestamp"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--output", str(a)]) == EXIT_OK
    assert main(argv + ["--output", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_jobs_do_not_change_results(capsys):
    base = ["kclique", "--random", "--n", "6", "--k", "3", "--trials", "300", "--seed", "4"]
    _, one = run_json(capsys, *base, "--jobs", "1")
    _, many = run_json(capsys, *base, "--jobs", "3")
    assert one["result"] == many["result"]


def test_timestamp_present_by_default(capsys):
    _, out = run(capsys, "bound", "dj-wei", "--n", "3")
    assert "timestamp" in json.loads(out)


def test_seed_environment_override(capsys, monkeypatch):
    monkeypatch.setenv("AQABOUND_SEED", "17")
    _, env = run_json(capsys, "kclique", "--random", "--n", "6", "--k", "3", "--trials", "50", "--seed", "3")
    monkeypatch.delenv("AQABOUND_SEED")
    _, flag = run_json(capsys, "kclique", "--random", "--n", "6", "--k", "3", "--trials", "50", "--seed", "17")
    assert env["config"]["seed"] == 17
    assert env["result"] == flag["result"]


@pytest.mark.parametrize("suite", ["closed-forms", "moments", "sm5", "deformed"])
def test_verify_suites_pass(capsys, suite):
    code, doc = run_json(capsys, "verify", suite)
    assert code == EXIT_OK
    assert doc["result"]["failed"] == 0 and doc["result"]["total"] > 0


def test_verify_moments_reports_expected_failure_of_raw_cost(capsys):
    _, doc = run_json(capsys, "verify", "moments")
    names = [c["name"] for c in doc["result"]["checks"] if c["passed"]]
    assert any("raw kclique" in n for n in names)


@pytest.mark.slow
def test_verify_chain(capsys):
    code, doc = run_json(capsys, "verify", "chain")
    assert code == EXIT_OK and doc["result"]["failed"] == 0
