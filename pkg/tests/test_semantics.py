import json
import random

import pytest
from hypothesis import given, settings

from ddrs import (
    App,
    builtin,
    check_rule_soundness,
    check_system_soundness,
    evaluate,
    grammar_for,
    parse_term,
    symbolically_sound,
)
from ddrs.errors import OpenTermError
from ddrs.schema import RewriteRule
from ddrs.semantics import as_polynomial, evaluate_open, random_term
from ddrs.terms import SIGMA_FULL, SIGMA_R

from .strategies import closed_terms

P = parse_term


def rule(tag, lhs, rhs):
    return RewriteRule(tag, P(lhs, allow_vars=True), P(rhs, allow_vars=True))


@pytest.mark.parametrize(
    "text,value",
    [
        ("(9:d7):d5", 975),
        ("((1:b0):b0):b1", 9),
        ("-((0:u0):u0)", -2),
        ("S(P(P(0)))", -1),
        ("3*-4+5", -7),
        ("2^u3", 6),
        ("1^b1", 3),
        ("3^d(-4)", 26),
        ("(0:u0):b1", 3),
    ],
)
def test_evaluate_examples(text, value):
    assert evaluate(P(text)) == value


def test_evaluate_is_exact_for_large_values():
    t = P("9")
    for _ in range(60):
        t = App(":d9", (t,))
    assert evaluate(t) == 10**61 - 1


def test_evaluate_deep_terms_without_recursion_limit():
    t = P("0")
    for _ in range(50_000):
        t = App("S", (t,))
    assert evaluate(t) == 50_000


def test_evaluate_rejects_open_terms():
    with pytest.raises(OpenTermError):
        evaluate(P("x+1", allow_vars=True))


@settings(max_examples=300, deadline=None)
@given(closed_terms(SIGMA_FULL, 8), closed_terms(SIGMA_FULL, 8))
def test_ring_homomorphism(a, b):
    assert evaluate(App("+", (a, b))) == evaluate(a) + evaluate(b)
    assert evaluate(App("*", (a, b))) == evaluate(a) * evaluate(b)
    assert evaluate(App("-", (a,))) == -evaluate(a)


def test_rule_soundness_examples():
    assert check_rule_soundness(rule("r11", "(-x)+(-y)", "-(x+y)"), seed=1, sig=SIGMA_R).sound
    verdict = check_rule_soundness(rule("u8", "0+x", "0"))
    assert not verdict.sound
    assert verdict.counterexample == {"x": P("S(0)")}
    assert check_rule_soundness(rule("dt24", "3^d(-4)", "P(3)^d6")).sound


def test_unsound_rule_found_deterministically():
    bad = rule("u8", "0+x", "0")
    for seed in range(5):
        v = check_rule_soundness(bad, trials=1, seed=seed)
        assert v.counterexample == {"x": P("S(0)")}


def test_random_terms_respect_signature():
    rng = random.Random(0)
    for _ in range(200):
        t = random_term(SIGMA_R, rng.randint(1, 7), rng)
        SIGMA_R.check(t)
        assert t.size <= 7


def test_system_reports():
    assert len(check_system_soundness(builtin("Zbud")).rules) == 60
    assert check_system_soundness(builtin("Zbud")).sound
    assert check_system_soundness(builtin("RingZ")).sound
    report = check_system_soundness(builtin("Zubd-verbatim"))
    assert [v.tag for v in report.unsound] == ["u8"]
    doc = json.loads(report.dumps())
    assert doc["system"] == "Zubd-verbatim"
    (u8,) = [r for r in doc["rules"] if r["verdict"] == "unsound"]
    assert u8 == {"tag": "u8", "verdict": "unsound", "counterexample": {"x": "S(0)"}}


def test_polynomial_view():
    assert as_polynomial(P("(x:b1)", allow_vars=True)) == {(("x", 1),): 2, (): 1}
    assert as_polynomial(P("x*x+-x", allow_vars=True)) == {(("x", 2),): 1, (("x", 1),): -1}
    assert symbolically_sound(rule("b10", "(x:b0)+(y:b1)", "S((x+y):b0)"))
    assert not symbolically_sound(rule("u8", "0+x", "0"))


@pytest.mark.parametrize("name", ["Zbud", "RingZ", "Zdub", "Zut", "Zdt"])
def test_symbolic_and_random_audits_agree(name):
    system = builtin(name)
    random_verdicts = {v.tag: v.sound for v in check_system_soundness(system).rules}
    assert random_verdicts == {r.tag: symbolically_sound(r) for r in system.rules}


def test_evaluate_open():
    assert evaluate_open(P("x:d3 + y", allow_vars=True), {"x": 4, "y": -1}) == 42


@pytest.mark.parametrize("name", ["Zbud", "RingZ", "Ndub", "Zdub", "Nbt", "Zubd", "Nu1", "Ndt"])
def test_grammar_members_have_distinct_values(name):
    grammar = grammar_for(name)
    seen = {}
    for t in grammar.members(9 if name not in ("Zdub", "Ndub") else 5):
        v = evaluate(t)
        assert v not in seen, (t, seen.get(v))
        seen[v] = t
