"""Rewrite arithmetic on numerals to normal form and move numbers between views.

Run with ``python demos/01_normalize_and_convert.py``.
"""
from ddrs import builtin, evaluate, normal_form, normalize, parse_term, print_term

# %% A binary-append system for integers
zbud = builtin("Zbud")
for text in ["2+1", "S(9)", "(2+1)*(-3)", "7*7"]:
    t = parse_term(text)
    nf = normal_form(zbud, t)
    print(f"{text:>12}  ->  {print_term(nf):<28} value {evaluate(nf)}")

# %% Every step of a derivation is recorded and can be inspected
trace = normalize(zbud, parse_term("2+1"))
for s in trace.steps:
    print(f"  step {s.n}: [{s.rule}] at {list(s.position)} gives {print_term(s.result)}")
print("outcome:", trace.outcome)

# %% The same number in three notations: the target system rewrites the foreign appends away
seven = parse_term("7")
for name in ["Zdub", "Zbud", "Zubd"]:
    print(f"{name}: 7 is {print_term(normal_form(builtin(name), seven))}")

nine = parse_term("((1:b0):b0):b1")
print("binary", print_term(nine), "in decimal is", print_term(normal_form(builtin("Zdub"), nine)))
