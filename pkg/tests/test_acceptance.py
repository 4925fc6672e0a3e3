"""Acceptance suite: one group of tests per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends
with one PASS/FAIL line per criterion (see conftest.py).
"""

import functools
import random
import subprocess
import sys
import time

import pytest

from ddrs import (
    App,
    Normalizer,
    RING_WEIGHTS,
    all_normal_forms,
    builtin,
    check_ground_confluence,
    check_system_soundness,
    check_weight_certificate,
    evaluate,
    find_redexes,
    grammar_for,
    normalize,
    one_step_reducts,
    parse_term,
    print_term,
    status_report,
    step,
    with_divergent_addition,
)
from ddrs.catalog import BUILTIN_NAMES
from ddrs.engine import INNERMOST, is_normal
from ddrs.errors import MetaDigitError


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "ddrs.cli", *args], capture_output=True, text=True)


# ---------------------------------------------------------------------------
# 1. oracle equivalence

UNARY = {"Zubd", "RingZ", "Zut"}  # values are S-towers, so only small operands
ORACLE_SYSTEMS = ["Zbud", "Zdub", "Zubd", "RingZ", "Zut"]


def oracle_pairs(name):
    pairs = [(a, b) for a in range(-50, 51) for b in range(-50, 51)]
    if name not in UNARY:
        rng = random.Random(f"oracle:{name}")
        pairs += [(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6)) for _ in range(1000)]
    return pairs


@functools.lru_cache(maxsize=None)
def oracle_mismatches(name):
    system, grammar = builtin(name), grammar_for(name)
    norm = Normalizer(system)
    enc = {}

    def e(k):
        if k not in enc:
            enc[k] = grammar.encode(k)
            assert evaluate(enc[k]) == k
        return enc[k]

    bad = []
    for a, b in oracle_pairs(name):
        for op, want in (("+", a + b), ("*", a * b)):
            t = App(op, (e(a), e(b)))
            nf = norm.normalize(t)
            if nf is not e(want):
                bad.append(print_term(t))
    for a in range(-50, 51):
        t = App("-", (e(a),))
        if norm.normalize(t) is not e(-a):
            bad.append(print_term(t))
    return tuple(bad)


_C1_SECONDS: list = []


@pytest.mark.criterion(1)
@pytest.mark.parametrize("name", ORACLE_SYSTEMS)
def test_oracle_equivalence(name):
    start = time.perf_counter()
    assert oracle_mismatches(name) == ()
    _C1_SECONDS.append(time.perf_counter() - start)


@pytest.mark.criterion(1)
@pytest.mark.xfail(strict=True, reason="Zbi has no rule for (-x)+(-y), so (-1)+(-1) is stuck")
def test_oracle_equivalence_zbi():
    start = time.perf_counter()
    bad = oracle_mismatches("Zbi")
    _C1_SECONDS.append(time.perf_counter() - start)
    assert bad == ()


def test_zbi_oracle_gap_is_exactly_minus_one_plus_minus_one():
    assert oracle_mismatches("Zbi") == ("-1+-1",)
    stuck = parse_term("(-1)+(-1)")
    assert is_normal(builtin("Zbi"), stuck)
    assert stuck not in grammar_for("Zbi")


@pytest.mark.criterion(1)
def test_oracle_runtime_budget():
    # measured by the parametrised tests above, which run first in file order
    if len(_C1_SECONDS) < len(ORACLE_SYSTEMS) + 1:
        pytest.skip("oracle tests were not all run in this session")
    assert sum(_C1_SECONDS) < 60


# ---------------------------------------------------------------------------
# 2. ground-confluence desk check


@pytest.mark.criterion(2)
@pytest.mark.parametrize("name,size", [("Zbud", 5), ("RingZ", 6)])
def test_ground_confluence_desk_check(name, size):
    start = time.perf_counter()
    report = check_ground_confluence(builtin(name), grammar_for(name), size)
    assert report.failures == []
    assert report.limit_hits == []
    assert report.passed
    assert time.perf_counter() - start < 600


# ---------------------------------------------------------------------------
# 3. non-confluence peaks


@pytest.mark.criterion(3)
def test_zbud_peak_b17_b22():
    zbud = builtin("Zbud")
    x = parse_term("1:b0")
    t = App("P", (App("-", (App("-", (x,)),)),))
    assert {(pos, tag) for pos, tag in find_redexes(zbud, t)} >= {((), "b22"), ((0,), "b17")}
    reducts = {(tag, print_term(r)) for r, tag, _ in one_step_reducts(zbud, t)}
    assert ("b17", "P(1:b0)") in reducts
    assert ("b22", "-S(-1:b0)") in reducts
    nfs = all_normal_forms(zbud, t)
    assert nfs.complete and {print_term(n) for n in nfs.forms} == {"1"}


@pytest.mark.criterion(3)
def test_zbi_peak_bi2():
    zbi = builtin("Zbi")
    digits = [parse_term("0"), parse_term("1")]
    for x in digits:
        for y in digits:
            for z in digits:
                for w in digits:
                    t = App("^b", (x, App("^b", (y, App("^b", (z, w))))))
                    bi2 = {(pos, r) for r, tag, pos in one_step_reducts(zbi, t) if tag == "bi2"}
                    assert {pos for pos, _ in bi2} == {(), (1,)}
                    assert len({r for _, r in bi2}) == 2
                    nfs = all_normal_forms(zbi, t)
                    assert nfs.complete and len(nfs.forms) == 1
                    (nf,) = nfs.forms
                    assert evaluate(nf) == evaluate(t)


# ---------------------------------------------------------------------------
# 4. soundness audit

AUDITED = [n for n in BUILTIN_NAMES if not n.endswith("-verbatim")]


@pytest.mark.criterion(4)
@pytest.mark.parametrize("name", AUDITED)
def test_builtins_sound(name):
    report = check_system_soundness(builtin(name), trials=100, seed=0)
    assert report.unsound == []


@pytest.mark.criterion(4)
def test_zubd_verbatim_u8_only():
    report = check_system_soundness(builtin("Zubd-verbatim"), trials=100, seed=0)
    assert [v.tag for v in report.unsound] == ["u8"]
    proc = run_cli("check", "--system", "Zubd-verbatim", "--what", "soundness")
    assert proc.returncode == 1
    assert "u8" in proc.stdout


@pytest.mark.criterion(4)
def test_zdub_verbatim_expansion_error():
    with pytest.raises(MetaDigitError, match=r"0\*"):
        builtin("Zdub-verbatim")
    proc = run_cli("check", "--system", "Zdub-verbatim", "--what", "soundness")
    assert proc.returncode == 1
    assert "expansion error" in proc.stdout


@pytest.mark.criterion(4)
def test_soundness_cli_exit_zero_when_sound():
    assert run_cli("check", "--system", "Zbud", "--what", "soundness").returncode == 0


# ---------------------------------------------------------------------------
# 5. weight certificate


@pytest.mark.criterion(5)
def test_ring_weight_certificate():
    start = time.perf_counter()
    report = check_weight_certificate(builtin("RingZ"), RING_WEIGHTS, 4)
    elapsed = time.perf_counter() - start
    assert report.violations == []
    assert report.checked > 0
    assert elapsed < 30


# ---------------------------------------------------------------------------
# 6. rule counts


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name,count", [("Zbud", 60), ("Ndub", 172), ("Zdub", 445), ("RingZ", 15)])
def test_rule_counts(name, count):
    assert len(builtin(name).rules) == count


# ---------------------------------------------------------------------------
# 7. divergence regression


@pytest.mark.criterion(7)
def test_divergent_addition_loops():
    scratch = with_divergent_addition(builtin("Ndt"))
    trace = normalize(scratch, parse_term("2+1"), INNERMOST, 1000)
    assert trace.outcome == "step-limit-hit"
    shown = [print_term(t) for t in trace.terms()]
    # the printed cycle leaves out the digit step S(1) -> 2, so compare it
    # as an ordered subsequence of the trace
    cycle = ["2+1", "1+S(1)", "S(1)+1", "2+1"]
    it = iter(shown)
    assert all(any(s == c for s in it) for c in cycle)
    assert shown[:5] == ["2+1", "1+S(1)", "1+2", "S(1)+1", "2+1"]
    assert trace.steps[0].rule == "div.1"
    # the unmodified system terminates on the same input
    assert print_term(Normalizer(builtin("Ndt")).normalize(parse_term("2+1"))) == "3"


# ---------------------------------------------------------------------------
# 8. known examples


@pytest.mark.criterion(8)
def test_known_examples():
    t = parse_term("(9:d7):d5")
    assert evaluate(t) == 975 and is_normal(builtin("Ndub"), t)
    t = parse_term("((1:b0):b0):b1")
    assert evaluate(t) == 9 and is_normal(builtin("Nbud"), t)
    s9 = parse_term("S(9)")
    after, tag, pos = step(builtin("Ndub"), s9)
    assert (print_term(after), tag, pos) == ("1:d0", "d3", ())
    assert evaluate(Normalizer(builtin("Nbud")).normalize(s9)) == 10


# ---------------------------------------------------------------------------
# 9. status honesty


@pytest.mark.criterion(9)
def test_open_statuses_survive_desk_checks():
    zdt, zdub = builtin("Zdt"), builtin("Zdub")
    desk = check_ground_confluence(zdt, grammar_for("Zdt"), 3, step_limit=10**4)
    text = status_report(zdt, desk)
    line = next(ln for ln in text.splitlines() if ln.strip().startswith("termination:"))
    assert line.strip().startswith("termination: open (") and len(line) > 25
    assert "proves nothing" in text
    assert zdt.status.termination.verdict == "open"

    desk = check_ground_confluence(zdub, grammar_for("Zdub"), 3)
    assert desk.passed
    text = status_report(zdub, desk)
    line = next(ln for ln in text.splitlines() if ln.strip().startswith("ground-confluence:"))
    assert line.strip().startswith("ground-confluence: open (")
    assert "proves nothing" in text
    assert builtin("Zdub").status.ground_confluence.verdict == "open"
