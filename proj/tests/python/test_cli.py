"""End-to-end tests for the command-line tool."""

import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("FODOT_CLI", "fodot")
DATA = Path(__file__).resolve().parent.parent / "data"

VOTING = """
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
"""


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, timeout=120)


@pytest.fixture
def voting(tmp_path):
    path = tmp_path / "voting.idp"
    path.write_text(VOTING)
    return path


def test_check(voting):
    result = run("--json", "check", voting)
    assert result.returncode == 0
    assert json.loads(result.stdout) == {"command": "check", "satisfiable": True}


def test_check_unsat(tmp_path):
    path = tmp_path / "unsat.idp"
    path.write_text("vocabulary V { p: () -> Bool }\ntheory T:V { p() & ~p(). }\n")
    assert run("check", path).returncode == 1


def test_propagate(voting):
    result = run("propagate", voting, "--assert", "vote()=true")
    assert result.returncode == 0
    assert "18 =< age(): true" in result.stdout


def test_expand_json(voting):
    result = run("--json", "expand", voting, "--max-models", 2)
    assert result.returncode == 0
    assert len(json.loads(result.stdout)["models"]) == 2


def test_optimize(voting):
    result = run("optimize", voting, "age()", "--assert", "vote()")
    assert result.returncode == 0
    assert result.stdout.startswith("age() = 18")


def test_explain(voting):
    result = run("--json", "explain", voting, "18 =< age()", "--assert", "vote()")
    assert result.returncode == 0
    assert "axiom:1" in result.stdout
    assert run("explain", voting, "vote()").returncode == 1


def test_errors(voting, tmp_path):
    assert run("check", tmp_path / "missing.idp").returncode == 2
    bad = tmp_path / "bad.idp"
    bad.write_text("vocabulary V { p: () -> }")
    result = run("check", bad)
    assert result.returncode == 2
    assert result.stderr


def test_dmn():
    result = run("dmn", "check", DATA / "bmi.dmn", "--vocab", DATA / "bmi.idp", "--bound", "BMI=0..100")
    assert result.returncode == 0
    assert "complete" in result.stdout and "unique" in result.stdout
    result = run("dmn", "translate", DATA / "bmi.dmn", "--vocab", DATA / "bmi.idp")
    assert result.returncode == 0
    assert "BMILevel() = Obese <-" in result.stdout
