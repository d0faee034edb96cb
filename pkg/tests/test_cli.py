from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from helpers import random_spec
from stabedp.cli import main
from stabedp.encoder import ProtocolSpec, default_class

EXAMPLE = ('{"p":2,"n":4,"k":2,"xi":[[1,1,1,1,0,0,0,0],[0,0,0,0,1,1,1,1]],'
             '"eta_high":[[0,0,0,0,0,1,0,1],[0,1,0,1,0,0,1,1]],'
             '"xi_high":[[0,0,1,1,0,0,0,0],[0,1,0,1,0,0,0,0]],"lambda":[0,0],"T":[[0,0]]}')


@pytest.fixture
def example(tmp_path, spec42):
    assert spec42.to_json() == EXAMPLE
    path = tmp_path / "example.json"
    path.write_text(EXAMPLE)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def table(text: str) -> dict[str, int]:
    rows = {}
    for line in text.splitlines():
        name, val = line.rsplit("  ", 1)
        rows[name.strip()] = int(val)
    return rows


# -- count / enumerate -----------------------------------------------------------------

def test_count_42(capsys):
    code, out, _ = run(capsys, "count", "-n", 4, "-k", 2, "-p", 2)
    assert code == 0
    assert table(out) == {"self-orthogonal stabilizers": 5355, "classes per stabilizer": 720,
                          "candidate protocols": 3_855_600, "reduction factor": 12288}


def test_count_21_exhaustive(capsys):
    code, out, _ = run(capsys, "count", "-n", 2, "-k", 1, "--exhaustive")
    rows = table(out)
    assert code == 0
    assert rows["self-orthogonal stabilizers"] == rows["stabilizers (enumerated)"] == 15
    assert rows["classes per stabilizer"] == rows["classes (enumerated)"] == 6
    assert rows["candidate protocols"] == 90 and rows["reduction factor"] == 8


def test_count_trivial_stabilizer(capsys):
    code, out, _ = run(capsys, "count", "-n", 1, "-k", 1)
    assert code == 0
    assert table(out)["self-orthogonal stabilizers"] == 1
    assert table(out)["classes per stabilizer"] == 6


def test_enumerate_round_trip(capsys):
    code, out, _ = run(capsys, "enumerate", "-n", 2, "-k", 1)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 90 == len(set(lines))
    for line in lines:
        assert ProtocolSpec.from_json(line).to_json() == line


def test_enumerate_budget(capsys):
    code, _, err = run(capsys, "enumerate", "-n", 4, "-k", 2)
    assert code == 3 and "budget" in err


# -- verify ----------------------------------------------------------------------------

def test_verify_example(capsys, example):
    code, out, _ = run(capsys, "verify", "--spec", example)
    assert code == 0
    assert out.count("PASS") == 5 and "FAIL" not in out


def test_verify_corrupted_eta(capsys, tmp_path):
    d = json.loads(EXAMPLE)
    d["eta_high"][1] = d["eta_high"][0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", "--spec", bad)
    assert code == 1 and out.startswith("FAIL")


def test_verify_random_p3(capsys, tmp_path):
    spec = random_spec(np.random.default_rng(5), 3, 1, 3)
    path = tmp_path / "p3.json"
    path.write_text(spec.to_json())
    code, out, _ = run(capsys, "verify", "--spec", path, "--seed", 3)
    assert code == 0 and "FAIL" not in out


def test_verify_reads_search_records(capsys, tmp_path):
    path = tmp_path / "results.jsonl"
    path.write_text(json.dumps({"rank": 1, "objective": "0.5", "spec": EXAMPLE, "csv": ""}) + "\n")
    code, _, _ = run(capsys, "verify", "--spec", path)
    assert code == 0


# -- simulate / curve / compare --------------------------------------------------------

def test_simulate(capsys, example):
    code, out, _ = run(capsys, "simulate", "--spec", example, "--fidelity", 0.85)
    assert code == 0
    assert out.startswith("F=0.85\ns=[0, 0] accept=")
    assert "best yield" in out


def test_curve_csv(capsys, example, tmp_path):
    dest = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "curve", "--spec", example, "--f-min", 0.6, "--f-max", 1.0,
                     "--best-only", "--out", dest)
    rows = dest.read_text().splitlines()
    assert code == 0 and rows[0] == "F,rounds,accept_prob_product,entropy_bits,yield"
    assert len(rows) == 10
    assert rows[-1].startswith("1.0,0,") and float(rows[-1].split(",")[-1]) == 1.0


def test_compare_single_spec_at_one(capsys, example):
    code, out, _ = run(capsys, "compare", "--spec", example, "--fidelity", 1.0)
    assert code == 0 and out == "F,yield_example\n1.0,1.0\n"


def test_compare_example_vs_default(capsys, example, tmp_path, stab42):
    default = tmp_path / "default.json"
    default.write_text(ProtocolSpec.from_class(stab42, default_class(stab42)).to_json())
    code, out, _ = run(capsys, "compare", "--spec", example, "--spec", default,
                       "--f-min", 0.6, "--f-max", 0.95)
    assert code == 0
    rows = [list(map(float, r.split(","))) for r in out.splitlines()[1:]]
    assert out.splitlines()[0] == "F,yield_example,yield_default"
    for F, pub, dflt in rows:
        assert pub >= dflt - 1e-15
    strict = [F for F, pub, dflt in rows if pub > dflt + 1e-12]
    assert strict == [0.6, 0.65, 0.7]


def test_compare_deterministic(capsys, example):
    a = run(capsys, "compare", "--spec", example, "--f-min", 0.7, "--f-max", 0.8)
    b = run(capsys, "compare", "--spec", example, "--f-min", 0.7, "--f-max", 0.8)
    assert a == b


def test_compare_requires_specs(capsys):
    code, _, err = run(capsys, "compare")
    assert code == 2 and "usage error" in err


# -- search and exit codes ---------------------------------------------------------------

def test_search_small(capsys, tmp_path):
    dest = tmp_path / "res.jsonl"
    code, out, _ = run(capsys, "search", "-n", 2, "-k", 1, "--fidelity", 0.8, "--top", 3, "--out", dest)
    assert code == 0 and "evaluated 90 candidates" in out
    recs = [json.loads(line) for line in dest.read_text().splitlines()]
    assert [r["rank"] for r in recs] == [1, 2, 3]


def test_search_budget(capsys):
    code, _, err = run(capsys, "search", "--budget", 10)
    assert code == 3 and "budget" in err


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "count", "-n", "x")[0] == 2
    assert run(capsys, "simulate", "--spec", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "curve", "--spec", tmp_path / "missing.json", "--f-min", 0.9, "--f-max", 0.8)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stabedp", "count", "-n", "2", "-k", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "90" in proc.stdout

