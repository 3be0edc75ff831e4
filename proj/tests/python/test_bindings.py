"""Smoke tests for the Python module."""

from fractions import Fraction
from pathlib import Path

import pytest

import fodot

DATA = Path(__file__).resolve().parent.parent / "data"

VOTING = """
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
"""

REAL = """
vocabulary V { x: () -> Real }
theory T:V { 3 * x() >= 1. }
"""


@pytest.fixture
def voting():
    return fodot.KnowledgeBase(VOTING)


def test_symbols(voting):
    assert voting.symbols == ["age", "vote"]


def test_model_check(voting):
    assert voting.model_check()
    assert not voting.model_check(["vote()", "age()=17"])


def test_expand(voting):
    models = voting.expand(["age()=30"], max_models=5)
    assert models == [{"age()": 30, "vote()": True}]


def test_propagate(voting):
    decided = voting.propagate(["vote()"])
    assert decided["18 =< age()"] is True
    assert decided["age() = 3"] is False


def test_optimize(voting):
    value, model = voting.optimize("age()", ["vote()"])
    assert value == 18
    assert model["age()"] == 18
    value, _ = voting.optimize("age()", ["vote()"], maximize=True)
    assert value == 120


def test_optimize_real():
    kb = fodot.KnowledgeBase(REAL)
    value, _ = kb.optimize("x()")
    assert isinstance(value, Fraction)
    assert abs(value - Fraction(1, 3)) <= Fraction(1, 10**6)


def test_explain(voting):
    items = voting.explain("18 =< age()", ["vote()"])
    labels = {label for label, _ in items}
    assert labels == {"axiom:1", "fact:vote()", "negated:18 =< age()"}


def test_explain_not_a_consequence(voting):
    with pytest.raises(fodot.FodotError) as info:
        voting.explain("vote()")
    assert info.value.kind == "NotAConsequence"


def test_parse_error():
    with pytest.raises(fodot.FodotError) as info:
        fodot.KnowledgeBase("vocabulary V { p: () -> }")
    assert info.value.kind == "ParseErrors"


def test_session_edits(voting):
    session = fodot.Session(voting)
    assert session.state()["vote()"] == "unknown"
    changed = session.assert_fact("vote()")
    assert "18 =< age()" in changed
    state = session.state()
    assert state["vote()"] == "user"
    assert state["18 =< age()"] == "propagated_true"
    assert session.facts() == {"vote()": True}
    session.retract("vote()")
    assert session.state()["18 =< age()"] == "unknown"
    assert session.facts() == {}


def test_session_conflict(voting):
    session = fodot.Session(voting)
    session.assert_fact("vote()")
    with pytest.raises(fodot.ConflictError) as info:
        session.assert_fact("age()=17")
    assert isinstance(info.value, fodot.FodotError)
    labels = {label for label, _ in info.value.explanation}
    assert "axiom:1" in labels
    assert session.facts() == {"vote()": True}


def test_tables():
    kb = fodot.KnowledgeBase((DATA / "bmi.idp").read_text() + "theory T:V {}\n")
    table = (DATA / "bmi.dmn").read_text()
    text = fodot.translate_table(table, kb)
    assert "BMILevel() = Normal <-" in text
    result = fodot.check_table(table, kb, {"BMI()": ("0", "100")})
    assert result["complete"] and result["unique"]
    assert result["gap"] is None and result["overlap"] is None


def test_table_gap():
    kb = fodot.KnowledgeBase((DATA / "bmi.idp").read_text() + "theory T:V {}\n")
    table = "table BMILevel U\nin: BMI ; out: BMILevel\n< 18.5 | Underweight\n> 18.5 | Normal\n"
    result = fodot.check_table(table, kb, {"BMI()": ("0", "100")})
    assert not result["complete"]
    assert result["gap"]["inputs"]["BMI"] == "18.5"
