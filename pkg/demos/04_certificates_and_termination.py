"""Proof-style evidence: uniqueness certificates, ring weights, and a divergent rule.

The uniqueness certificate argues about all closed terms at once. The weight
certificate checks that every rule instance strictly decreases a weight, which
is the usual route to termination. Adding a commutativity-like rule breaks
termination and the normalizer reports the cycle.
"""
from ddrs import (
    RING_WEIGHTS,
    builtin,
    check_weight_certificate,
    normalize,
    parse_term,
    print_term,
    status_report,
    uniqueness_certificate,
    with_divergent_addition,
)

for name in ["Zbud", "Zdub", "RingZ", "Zu1", "Zbi"]:
    cert = uniqueness_certificate(builtin(name))
    print(f"{name:<6} certificate holds: {cert.holds}")
    print("      ", cert.describe())

ring = builtin("RingZ")
for text in ["1+0", "-(1*0)", "(1+1)*(1+1)"]:
    print(f"weight of {text}: {RING_WEIGHTS.weight(parse_term(text))}")
report = check_weight_certificate(ring, RING_WEIGHTS, 3)
print(f"RingZ weights decrease on {report.checked} rule instances: {report.passed}")

# %% A scratch system that loops
loop = with_divergent_addition(builtin("Ndt"))
trace = normalize(loop, parse_term("2+1"), step_limit=8)
print("2+1", *(f"-[{s.rule}]-> {print_term(s.result)}" for s in trace.steps))
print("outcome:", trace.outcome)

# %% Recorded status from the literature next to what the desk check found
print(status_report(builtin("Zdub")))
