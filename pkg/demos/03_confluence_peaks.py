"""Where confluence breaks down, and why closed terms still behave.

``P(-(-x))`` has two redexes. Contracting either one gives two open terms that
never meet again, so the system is not confluent. Every closed instance does
join, which is what ground confluence asks for.
"""
from ddrs import (
    all_normal_forms,
    builtin,
    check_ground_confluence,
    check_term,
    find_redexes,
    grammar_for,
    one_step_reducts,
    parse_term,
    print_term,
)

zbud = builtin("Zbud")
peak = parse_term("P(-(-x))", allow_vars=True)
print("redexes of", print_term(peak), find_redexes(zbud, peak))
for reduct, tag, pos in one_step_reducts(zbud, peak):
    print(f"  [{tag}] at {list(pos)} -> {print_term(reduct)}")

# closed instances reach a single normal form however they are reduced
for text in ["P(-(-1))", "P(-(-(1:b0)))", "P(-(-(-1)))"]:
    res = all_normal_forms(zbud, parse_term(text))
    print(f"{text:<16} normal forms: {sorted(print_term(t) for t in res.forms)}")

# %% The desk check covers every closed term up to a size bound
report = check_ground_confluence(zbud, grammar_for("Zbud"), 3)
print(f"Zbud, {report.checked} terms up to size 3: {'pass' if report.passed else 'FAIL'} ({report.method})")

# %% The unsound printed u8 rule creates two normal forms for 0+S(0)
verbatim = builtin("Zubd-verbatim")
for bucket, finding in check_term(verbatim, parse_term("0+S(0)")):
    print(f"  {bucket}: {finding.kind}: {finding.detail}")

# %% A missing rule: (-1)+(-1) is stuck in Zbi
zbi = builtin("Zbi")
for bucket, finding in check_term(zbi, parse_term("(-1)+(-1)")):
    print(f"  Zbi {bucket}: {finding.kind}: {print_term(finding.term)}")
