import csv
import json
import pathlib
import subprocess
import sys

import pytest

from faultsim import load_config
from faultsim.cli import EXIT_OK, EXIT_UNCONVERGED, EXIT_USAGE, format_faults, main
from faultsim.runner import run_config

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"


def cfg_path(name):
    return str(CONFIGS / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# list-faults

def test_list_faults_rows(capsys):
    code, out, _ = run(capsys, "list-faults")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 15
    eq = [l for l in lines if l.startswith("equivocation")]
    assert eq and "level 2" in eq[0]
    assert "send different message copies to different receivers" in eq[0]
    levels = [int(l.split("level ")[1].split()[0]) for l in lines]
    assert (levels.count(1), levels.count(2), levels.count(3)) == (4, 5, 6)


def test_list_faults_stable(capsys):
    outs = {run(capsys, "list-faults")[1] for _ in range(3)}
    assert len(outs) == 1
    assert outs == {format_faults()}


# simulate

def test_simulate_byte_identical(tmp_path, capsys):
    out = str(tmp_path / "r.json")
    blobs = []
    for _ in range(2):
        code, stdout, _ = run(capsys, "simulate", "--config", cfg_path("2pc_golden.json"), "--seed", "11", "--out", out)
        assert code == EXIT_OK
        blobs.append((stdout, (tmp_path / "r.json").read_bytes(), (tmp_path / "r.events.jsonl").read_bytes()))
    assert blobs[0] == blobs[1]
    assert blobs[0][2]


def test_simulate_byte_identical_subprocess(tmp_path):
    # fresh interpreters, so nothing leaks through module state
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        subprocess.run(
            [sys.executable, "-m", "faultsim.cli", "simulate", "--config", cfg_path("2pc_golden.json"),
             "--seed", "5", "--out", str(out), "--log", str(tmp_path / "ev.jsonl")],
            check=True, capture_output=True,
        )
        outs.append((out.read_bytes(), (tmp_path / "ev.jsonl").read_bytes()))
    assert outs[0] == outs[1]


def test_raft_horizon_zero(tmp_path, capsys):
    log = tmp_path / "ev.jsonl"
    code, out, err = run(capsys, "simulate", "--config", cfg_path("raft_crash.json"), "--horizon", "0", "--log", str(log))
    assert code == EXIT_OK
    rec = json.loads(out)
    assert rec["events"] == 0 and log.read_text() == ""
    c = rec["counters"]
    assert c["delivered"] == c["dropped"] == c["crashes"] == 0
    assert rec["steps"] == 0 and rec["clock"] == 0.0
    assert rec["metric"]["value"] is None


def test_quorum_partition_drops_in_window(capsys):
    path = cfg_path("quorum_partition.json")
    code, out, _ = run(capsys, "simulate", "--config", path, "--seed", "2")
    assert code == EXIT_OK
    assert json.loads(out)["counters"]["dropped_by"].get("part-drop", 0) > 0

    # trace filter over the configured window 5.0 + 20.0
    res = run_config(load_config(path), 2, trace=True)
    inside = [e for e in res.trace if e.kind == "drop" and e.behavior == "part-drop"]
    assert inside
    assert all(5.0 <= e.time < 25.0 for e in inside)


def test_simulate_needs_config(capsys):
    code, _, err = run(capsys, "simulate")
    assert code == EXIT_USAGE and "--config" in err


def test_simulate_bad_override(capsys):
    code, _, err = run(capsys, "simulate", "--config", cfg_path("2pc_golden.json"), "--set", "faults.msg-loss.rate=1.7")
    assert code == EXIT_USAGE
    assert "faults.msg-loss.rate" in err and "rate out of [0,1]" in err
    code, _, err = run(capsys, "simulate", "--config", cfg_path("2pc_golden.json"), "--set", "nokey")
    assert code == EXIT_USAGE and "--set" in err


# smc

def test_smc_echoes_alpha_delta(tmp_path, capsys):
    out = tmp_path / "est.json"
    code, stdout, _ = run(
        capsys, "smc", "--config", cfg_path("2pc_golden.json"),
        "--alpha", "0.05", "--delta", "0.01", "--max-runs", "400", "--out", str(out),
    )
    assert code == EXIT_OK
    summary = json.loads(stdout)
    full = json.loads(out.read_text())
    for rec in (summary, full):
        assert rec["alpha"] == 0.05 and rec["delta"] == 0.01
    assert full["params"]["alpha"] == 0.05 and full["params"]["delta"] == 0.01


def test_smc_max_runs_unconverged(capsys):
    argv = ["smc", "--config", cfg_path("2pc_loss.json"), "--max-runs", "5", "--delta", "0.001"]
    code, out, _ = run(capsys, *argv)
    rec = json.loads(out)
    assert code == EXIT_OK
    assert rec["converged"] is False and rec["runs"] == 5
    code, _, err = run(capsys, *argv, "--strict")
    assert code == EXIT_UNCONVERGED and "converge" in err


def test_smc_bad_flag_value(capsys):
    code, _, err = run(capsys, "smc", "--config", cfg_path("2pc_loss.json"), "--alpha", "2")
    assert code == EXIT_USAGE and "--alpha" in err


def test_smc_zero_successes_is_error(capsys):
    # horizon 0: nothing ever completes
    code, _, err = run(capsys, "smc", "--config", cfg_path("2pc_loss.json"), "--horizon", "0", "--max-runs", "10")
    assert code != EXIT_OK and "run failure" in err


def test_loss_sweep_csv(tmp_path, capsys):
    sheet = tmp_path / "sweep.csv"
    rates = ["0", "0.1", "0.2", "0.3", "0.4"]
    for r in rates:
        code, _, _ = run(
            capsys, "smc", "--config", cfg_path("2pc_loss.json"),
            "--set", f"faults.msg-loss.rate={r}", "--param", r, "--emit-csv", str(sheet),
        )
        assert code == EXIT_OK
    with open(sheet) as fh:
        rows = list(csv.DictReader(fh))
    assert [row["param"] for row in rows] == rates
    means = [float(row["mean"]) for row in rows]
    assert means == sorted(means)


def test_smc_runs_csv(tmp_path, capsys):
    runs = tmp_path / "runs.csv"
    code, out, _ = run(capsys, "smc", "--config", cfg_path("2pc_loss.json"), "--max-runs", "40", "--runs-csv", str(runs))
    assert code == EXIT_OK
    with open(runs) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == json.loads(out)["runs"]


@pytest.mark.parametrize("jobs", ["2"])
def test_smc_jobs_matches_sequential(capsys, jobs):
    base = ["smc", "--config", cfg_path("2pc_loss.json"), "--max-runs", "60"]
    _, seq, _ = run(capsys, *base)
    _, par, _ = run(capsys, *base, "--jobs", jobs)
    assert json.loads(seq) == json.loads(par)
