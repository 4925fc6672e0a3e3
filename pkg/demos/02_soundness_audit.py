"""Audit every built-in rule table for soundness against integer evaluation.

A rule is sound when both sides evaluate equally under every assignment. The random
audit searches for a counterexample; the symbolic check compares both sides as
polynomials and so settles the question outright.
"""
from ddrs import BUILTIN_NAMES, builtin, check_system_soundness, print_term, symbolically_sound
from ddrs.errors import MetaDigitError

for name in BUILTIN_NAMES:
    try:
        system = builtin(name)
    except MetaDigitError as exc:
        print(f"{name:<14} does not expand: {exc}")
        continue
    report = check_system_soundness(system)
    symbolic = all(symbolically_sound(r) for r in system.rules)
    bad = ", ".join(
        f"[{v.tag}] fails at " + ", ".join(f"{k}={print_term(val)}" for k, val in v.counterexample.items())
        for v in report.unsound
    )
    print(f"{name:<14} {len(system.rules):>4} rules  random audit: {'sound' if report.sound else bad}"
          f"  symbolic: {'sound' if symbolic else 'unsound'}")
