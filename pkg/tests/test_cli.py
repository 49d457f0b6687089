import json
import re
import subprocess
import sys

import pytest

from aspilp.cli import main
from aspilp.rules import CostConfig, HardLimits

from conftest import DATA, GRID_RELEVANT, GRID_TARGET

FIXTURE = str(DATA / "grid2x2.las")
BIAS_FLAGS = ["--target", GRID_TARGET, "--relevant", *GRID_RELEVANT]


def test_solve_fixture(capsys, tmp_path):
    report = tmp_path / "r.jsonl"
    assert main(["solve", FIXTURE, "--report", str(report)]) == 0
    out = capsys.readouterr()
    assert out.out == "#attempt\nVALID(0)\nINVALID(1)\nINVALID(2)\n"
    assert "learned" in out.err
    events = [json.loads(l) for l in report.read_text().splitlines()]
    assert events[-1]["event"] == "done" and events[-1]["quality"] == 2


def test_solve_malformed(capsys, tmp_path):
    bad = tmp_path / "bad.las"
    bad.write_text("#background\na.\n#relevant_predicates\nq(a).\n")
    assert main(["solve", str(bad)]) == 1
    out = capsys.readouterr()
    assert out.out == "" and "target" in out.err


def test_solve_without_attempt(capsys):
    assert main(["solve", FIXTURE, "--climit-max", "2"]) == 2
    assert capsys.readouterr().out == ""


def test_solve_batch_and_native(capsys):
    assert main(["solve", FIXTURE, "--backend", "native", "--profile", "general", "--climit-max", "8"]) == 0
    assert capsys.readouterr().out.startswith("#attempt\n")
    # shared time points make batch mode unreliable in general; only the protocol is checked
    code = main(["solve", FIXTURE, "--batch"])
    out = capsys.readouterr().out
    assert code in (0, 2)
    assert all(re.fullmatch(r"#attempt|(VALID|INVALID)\(\d+\)", l) for l in out.splitlines())


def test_every_parameter_has_a_flag(capsys):
    with pytest.raises(SystemExit):
        main(["solve", "--help"])
    text = capsys.readouterr().out
    for cls in (HardLimits, CostConfig):
        for name in cls().as_constants():
            assert "--" + name.replace("_", "-") in text
    assert "--cost-negbodyliteral" in text


def test_parameter_flag_changes_space(capsys):
    main(["hypspace", *BIAS_FLAGS, "--climit", "3", "--cost-negbodyliteral", "1"])
    lines = capsys.readouterr().out.splitlines()
    assert "1\tvalid_move(V5,V10) :- cell(V5), time(V10), not agent_at(V5,V10)." in lines


def test_hypspace_output(capsys):
    assert main(["hypspace", *BIAS_FLAGS, "--climit", "6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "2\tvalid_move(V5,V10) :- cell(V5), time(V10), not agent_at(V5,V10)." in lines
    keys = [(int(l.split("\t")[0]), l.split("\t")[1]) for l in lines]
    assert keys == sorted(keys) and len(lines) == 29


def test_hypspace_empty(capsys):
    assert main(["hypspace", *BIAS_FLAGS, "--climit", "1"]) == 0
    assert capsys.readouterr().out == ""


def test_hypspace_backends_identical(capsys):
    main(["hypspace", "--instance", FIXTURE, "--climit", "7", "--backend", "asp"])
    asp = capsys.readouterr().out
    main(["hypspace", "--instance", FIXTURE, "--climit", "7", "--backend", "native"])
    assert asp == capsys.readouterr().out


def test_hypspace_invalid_bias(capsys):
    assert main(["hypspace", "--target", "p((0,1))", "--relevant", "q(a)"]) == 1
    assert main(["hypspace", "--target", "p(a)"]) == 1
    assert capsys.readouterr().out == ""


def test_encode(capsys):
    assert main(["encode", *BIAS_FLAGS, "--climit", "6"]) == 0
    first = capsys.readouterr().out
    consts = re.findall(r"^#const (\w+)=", first, re.M)
    params = set(HardLimits().as_constants()) | set(CostConfig().as_constants())
    assert len(params) == 22 and params <= set(consts)
    main(["encode", *BIAS_FLAGS, "--climit", "6"])
    assert capsys.readouterr().out == first


def test_encode_runs_in_solver(capsys):
    main(["encode", *BIAS_FLAGS, "--climit", "4"])
    program = capsys.readouterr().out
    proc = subprocess.run([sys.executable, "-m", "clingo", "--outf=2", "1"], input=program,
                          capture_output=True, text=True)
    assert json.loads(proc.stdout)["Result"] == "SATISFIABLE"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aspilp.cli", "solve", FIXTURE], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "#attempt"


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["train"])
