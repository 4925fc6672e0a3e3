"""Integer meaning of closed terms, and rule soundness checking against it."""

from __future__ import annotations

import functools
import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .catalog import RewriteSystem
from .errors import OpenTermError
from .schema import RewriteRule
from .syntax import parse_term, print_term
from .terms import SIGMA_FULL, App, Signature, Term, Var, fold, variables


def _leaf(t):
    if isinstance(t, Var):
        raise OpenTermError(f"cannot evaluate variable {t.name}")
    return int(t.sym)


def _node(t, v):
    sym = t.sym
    if sym == "S":
        return v[0] + 1
    if sym == "P":
        return v[0] - 1
    if sym == "-":
        return -v[0]
    if sym == "+":
        return v[0] + v[1]
    if sym == "*":
        return v[0] * v[1]
    if sym[0] == ":":
        d = int(sym[2])
        if sym[1] == "b":
            return 2 * v[0] + d
        if sym[1] == "d":
            return 10 * v[0] + d
        return v[0] + 1
    if sym == "^u":
        return v[0] + v[1] + 1
    if sym == "^b":
        return 2 * v[0] + v[1]
    if sym == "^d":
        return 10 * v[0] + v[1]
    raise ValueError(f"no meaning for symbol {sym!r}")


def _eval_small(t, env):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except (KeyError, TypeError):
            raise OpenTermError(f"cannot evaluate variable {t.name}") from None
    if not t.args:
        return int(t.sym)
    return _node(t, [_eval_small(a, env) for a in t.args])


# below this size recursion is safe and much faster than the explicit fold
_RECURSION_SIZE = 400


def evaluate(t: Term) -> int:
    """The integer denoted by the closed term ``t``."""
    if t.size < _RECURSION_SIZE:
        return _eval_small(t, None)
    return fold(t, _leaf, _node)


def _depth_bound(t):
    # patterns are small; for open terms size counts only the symbols
    return t.size if isinstance(t, App) else 0


def evaluate_open(t: Term, env: dict) -> int:
    """Evaluate ``t`` with its variables read as the integers in ``env``."""
    if _depth_bound(t) < _RECURSION_SIZE:
        return _eval_small(t, env)

    def leaf(s):
        if isinstance(s, Var):
            try:
                return env[s.name]
            except KeyError:
                raise OpenTermError(f"no value for variable {s.name}") from None
        return int(s.sym)

    return fold(t, leaf, _node)


# ---------------------------------------------------------------------------
# random closed terms


def random_term(sig: Signature, size: int, rng: random.Random) -> Term:
    """A closed term over ``sig`` with ``size`` symbols, or fewer when no term
    of that exact size exists (signatures without unary symbols)."""
    constants = sig.by_arity(0)
    unary = sig.by_arity(1)
    binary = sig.by_arity(2)
    if size == 1 or not (unary or (binary and size >= 3)):
        return App(rng.choice(constants)) if size == 1 else random_term(sig, 1, rng)
    choices = [(s, 1) for s in unary]
    if size >= 3:
        choices += [(s, 2) for s in binary]
    sym, arity = rng.choice(choices)
    if arity == 1:
        return App(sym, (random_term(sig, size - 1, rng),))
    k = rng.randint(1, size - 2)
    return App(sym, (random_term(sig, k, rng), random_term(sig, size - 1 - k, rng)))


# boundary terms tried before any random trial, in this order
_BOUNDARY = (
    "0", "S(0)", "1", "-1", "9", "P(0)",
    "(1:b0):b1", "(9:d7):d5", "(0:u0):u0", "-((1:b1):b0)",
    "(1^b0)^b1", "(9^d7)^d5", "(0^u0)^u0", "-(1^d2)",
)


@functools.lru_cache(maxsize=None)
def boundary_terms(sig: Signature) -> tuple:
    out = []
    for text in _BOUNDARY:
        t = parse_term(text)
        try:
            sig.check(t)
        except Exception:
            continue
        out.append(t)
    return tuple(out)


# ---------------------------------------------------------------------------
# soundness


@dataclass(frozen=True)
class RuleVerdict:
    tag: str
    sound: bool
    counterexample: Optional[dict] = None
    trials: int = 0

    def to_json(self) -> dict:
        d = {"tag": self.tag, "verdict": "sound" if self.sound else "unsound"}
        if self.counterexample is not None:
            d["counterexample"] = {k: print_term(v) for k, v in self.counterexample.items()}
        return d


@dataclass
class SoundnessReport:
    system: str
    rules: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def sound(self) -> bool:
        return self.error is None and all(v.sound for v in self.rules)

    @property
    def unsound(self) -> list[RuleVerdict]:
        return [v for v in self.rules if not v.sound]

    def to_json(self) -> dict:
        d = {"system": self.system, "rules": [v.to_json() for v in self.rules]}
        if self.error is not None:
            d["error"] = self.error
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _holds(rule, sigma) -> bool:
    env = {k: evaluate(v) for k, v in sigma.items()}
    return evaluate_open(rule.lhs, env) == evaluate_open(rule.rhs, env)


def check_rule_soundness(
    rule: RewriteRule,
    trials: int = 100,
    seed: int = 0,
    sig: Signature = SIGMA_FULL,
) -> RuleVerdict:
    """Compare both sides under boundary and random closed substitutions.

    Returns the first substitution on which the two sides evaluate
    differently, searching the boundary set before the random trials.
    """
    names = variables(rule.lhs)
    count = 0
    boundary = boundary_terms(sig)
    values = [evaluate(b) for b in boundary]
    for combo in itertools.product(range(len(boundary)), repeat=len(names)):
        env = {n: values[k] for n, k in zip(names, combo)}
        count += 1
        if evaluate_open(rule.lhs, env) != evaluate_open(rule.rhs, env):
            return RuleVerdict(rule.tag, False, {n: boundary[k] for n, k in zip(names, combo)}, count)
    if not names:
        return RuleVerdict(rule.tag, True, None, count)
    rng = random.Random(f"{seed}:{rule.tag}")
    for _ in range(trials):
        sigma = {n: random_term(sig, rng.randint(1, 7), rng) for n in names}
        count += 1
        if not _holds(rule, sigma):
            return RuleVerdict(rule.tag, False, sigma, count)
    return RuleVerdict(rule.tag, True, None, count)


# ---------------------------------------------------------------------------
# exact soundness: both sides as integer polynomials in the rule variables

Poly = dict  # monomial (sorted tuple of (name, power)) -> coefficient


def _padd(p, q, sign=1):
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(p, q):
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            powers = dict(m1)
            for name, k in m2:
                powers[name] = powers.get(name, 0) + k
            m = tuple(sorted(powers.items()))
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _pconst(n):
    return {(): n} if n else {}


def as_polynomial(t: Term) -> Poly:
    """The meaning of an open term as a polynomial over its variables."""

    def leaf(s):
        if isinstance(s, Var):
            return {((s.name, 1),): 1}
        return _pconst(int(s.sym))

    def node(s, v):
        sym = s.sym
        if sym in ("S", "P"):
            return _padd(v[0], _pconst(1 if sym == "S" else -1))
        if sym == "-":
            return _padd({}, v[0], -1)
        if sym == "+":
            return _padd(v[0], v[1])
        if sym == "*":
            return _pmul(v[0], v[1])
        if sym[0] == ":":
            base = {"b": 2, "d": 10, "u": 1}[sym[1]]
            digit = 1 if sym[1] == "u" else int(sym[2])
            return _padd(_pmul(_pconst(base), v[0]), _pconst(digit))
        if sym == "^u":
            return _padd(_padd(v[0], v[1]), _pconst(1))
        if sym in ("^b", "^d"):
            return _padd(_pmul(_pconst(2 if sym == "^b" else 10), v[0]), v[1])
        raise ValueError(f"no meaning for symbol {sym!r}")

    return fold(t, leaf, node)


def symbolically_sound(rule: RewriteRule) -> bool:
    """True when both sides denote the same polynomial, hence agree on every
    closed instance whatever the sizes of the substituted terms."""
    return as_polynomial(rule.lhs) == as_polynomial(rule.rhs)


def check_system_soundness(system: RewriteSystem, trials: int = 100, seed: int = 0) -> SoundnessReport:
    """Per-rule verdicts; substitutions range over the system's own signature."""
    report = SoundnessReport(system.name)
    for rule in system.rules:
        report.rules.append(check_rule_soundness(rule, trials, seed, system.signature))
    return report
