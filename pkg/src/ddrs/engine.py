"""Rewriting: redex search, single steps, traced normalisation, a fast
memoising normaliser and exhaustive normal-form search."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .catalog import RewriteSystem
from .errors import RewriteCycle, StepLimitExceeded
from .syntax import print_term
from .terms import App, Term, compile_builder, compile_matcher, iter_positions, match, replace_at, subterm_at, substitute

DEFAULT_STEP_LIMIT = 10**6
DEFAULT_NODE_BUDGET = 10**7
TRACE_VERSION = "trace-v1"


@dataclass(frozen=True)
class Strategy:
    """``innermost`` and ``outermost`` are leftmost; ``random`` picks uniformly
    among all (position, rule) redexes using ``seed``."""

    kind: str = "innermost"
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("innermost", "outermost", "random"):
            raise ValueError(f"unknown strategy {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            object.__setattr__(self, "seed", 0)

    @classmethod
    def random(cls, seed: int = 0) -> "Strategy":
        return cls("random", seed)

    def __str__(self):
        return f"random(seed={self.seed})" if self.kind == "random" else self.kind


INNERMOST = Strategy("innermost")
OUTERMOST = Strategy("outermost")


def root_matches(system: RewriteSystem, t: Term):
    """(rule, substitution) pairs for every rule matching ``t`` at the root."""
    if not isinstance(t, App):
        return []
    out = []
    for rule in system.rules_by_root.get(t.sym, ()):
        sigma = compile_matcher(rule.lhs)(t)
        if sigma is not None:
            out.append((rule, sigma))
    return out


def _first_root_match(system, t):
    if not isinstance(t, App):
        return None
    for rule in system.rules_by_root.get(t.sym, ()):
        sigma = compile_matcher(rule.lhs)(t)
        if sigma is not None:
            return rule, sigma
    return None


def find_redexes(system: RewriteSystem, t: Term) -> list[tuple[tuple, str]]:
    """All (position, rule tag) pairs, positions leftmost-outermost, rules in table order."""
    out = []
    for pos, s in iter_positions(t):
        for rule, _ in root_matches(system, s):
            out.append((pos, rule.tag))
    return out


def is_normal(system: RewriteSystem, t: Term) -> bool:
    return all(_first_root_match(system, s) is None for _, s in iter_positions(t))


def contract(system: RewriteSystem, t: Term, position, tag: str) -> Term:
    """Apply the rule ``tag`` at ``position``; ValueError if it does not match there."""
    rule = system.rule(tag)
    sigma = match(rule.lhs, subterm_at(t, position))
    if sigma is None:
        raise ValueError(f"rule {tag} does not match at {list(position)}")
    return replace_at(t, position, compile_builder(rule.rhs)(sigma))


# ---------------------------------------------------------------------------
# traced rewriting


def _select(system, t, strategy, known_normal, rng):
    """The redex chosen by ``strategy`` as (position, rule, sigma), or None.

    Subterms found to be normal are added to ``known_normal`` so later scans
    of the same (shared) subterms are skipped.
    """
    kind = strategy.kind
    found = []
    counts = []  # redexes found before entering each open random-mode node
    stack = [((), t, False)]
    while stack:
        pos, s, leaving = stack.pop()
        if leaving:
            # the whole subtree has been scanned
            if kind == "innermost":
                hit = _first_root_match(system, s)
                if hit is not None:
                    return pos, hit[0], hit[1]
                known_normal.add(s)
            elif kind == "outermost":
                known_normal.add(s)
            else:
                if len(found) == counts.pop():
                    known_normal.add(s)
            continue
        if s in known_normal or not isinstance(s, App):
            continue
        if kind == "outermost":
            hit = _first_root_match(system, s)
            if hit is not None:
                return pos, hit[0], hit[1]
        elif kind == "random":
            counts.append(len(found))
            for rule, sigma in root_matches(system, s):
                found.append((pos, rule, sigma))
        stack.append((pos, s, True))
        for i in range(len(s.args) - 1, -1, -1):
            stack.append((pos + (i,), s.args[i], False))
    if kind == "random" and found:
        return found[rng.randrange(len(found))]
    return None


@dataclass(frozen=True)
class TraceStep:
    n: int
    rule: str
    position: tuple
    result: Term


@dataclass
class DerivationTrace:
    system: str
    input: Term
    strategy: Strategy
    steps: list = field(default_factory=list)
    outcome: str = "normal-form"  # or "step-limit-hit"

    @property
    def final(self) -> Term:
        return self.steps[-1].result if self.steps else self.input

    @property
    def reached_normal_form(self) -> bool:
        return self.outcome == "normal-form"

    def terms(self) -> list[Term]:
        return [self.input] + [s.result for s in self.steps]

    def to_json(self) -> dict:
        return {
            "version": TRACE_VERSION,
            "system": self.system,
            "input": print_term(self.input),
            "strategy": str(self.strategy),
            "steps": [
                {"n": s.n, "rule": s.rule, "position": list(s.position), "result": print_term(s.result)}
                for s in self.steps
            ],
            "outcome": self.outcome,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def step(system: RewriteSystem, t: Term, strategy: Strategy = INNERMOST, rng=None):
    """One contraction as ``(term, rule tag, position)``; None if ``t`` is normal."""
    if rng is None:
        rng = random.Random(strategy.seed)
    chosen = _select(system, t, strategy, set(), rng)
    if chosen is None:
        return None
    pos, rule, sigma = chosen
    return replace_at(t, pos, compile_builder(rule.rhs)(sigma)), rule.tag, pos


def normalize(
    system: RewriteSystem,
    t: Term,
    strategy: Strategy = INNERMOST,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> DerivationTrace:
    """Rewrite ``t`` until normal or ``step_limit`` steps, recording every step."""
    rng = random.Random(strategy.seed)
    trace = DerivationTrace(system.name, t, strategy)
    known_normal: set = set()
    current = t
    for n in range(1, step_limit + 1):
        chosen = _select(system, current, strategy, known_normal, rng)
        if chosen is None:
            return trace
        pos, rule, sigma = chosen
        current = replace_at(current, pos, compile_builder(rule.rhs)(sigma))
        trace.steps.append(TraceStep(n, rule.tag, pos, current))
    if _select(system, current, strategy, known_normal, rng) is not None:
        trace.outcome = "step-limit-hit"
    return trace


def replay(system: RewriteSystem, trace: DerivationTrace) -> bool:
    """True iff every recorded step is the stated rule applied at the stated position."""
    current = trace.input
    for s in trace.steps:
        try:
            current = contract(system, current, s.position, s.rule)
        except (ValueError, KeyError):
            return False
        if current != s.result:
            return False
    if trace.outcome == "normal-form":
        return is_normal(system, current)
    return True


# ---------------------------------------------------------------------------
# fast innermost normalisation


class Normalizer:
    """Leftmost-innermost normalisation with a memo table.

    Produces the same normal form as ``normalize(.., INNERMOST)`` but shares
    work between subterms and across calls. ``step_limit`` bounds the rewrites
    performed by one call; revisiting a term that is still being reduced
    raises RewriteCycle.
    """

    def __init__(self, system: RewriteSystem, step_limit: int = DEFAULT_STEP_LIMIT, max_memo: int = 2_000_000):
        self.system = system
        self.step_limit = step_limit
        self.max_memo = max_memo
        self.memo: dict = {}
        self.steps = 0
        self.largest = 0
        self._table = {
            sym: [(compile_matcher(r.lhs), compile_builder(r.rhs)) for r in rules]
            for sym, rules in system.rules_by_root.items()
        }

    def __call__(self, t: Term) -> Term:
        return self.normalize(t)

    def normalize(self, t: Term) -> Term:
        memo = self.memo
        hit = memo.get(t)
        if hit is not None:
            return hit
        if len(memo) > self.max_memo:
            memo.clear()
        table = self._table
        budget = self.step_limit
        pending: set = set()
        values: list = []
        work: list = [(0, t, None)]
        while work:
            op, s, u = work.pop()
            if op == 0:  # evaluate s
                hit = memo.get(s)
                if hit is not None:
                    values.append(hit)
                    continue
                if s in pending:
                    raise RewriteCycle(f"rewrite cycle through {_short(s)}")
                pending.add(s)
                work.append((1, s, None))
                for a in reversed(s.args):
                    work.append((0, a, None))
            elif op == 1:  # arguments are normal; try the root
                sargs = s.args
                n = len(sargs)
                if n == 2:
                    b = values.pop()
                    a = values.pop()
                    v = s if a is sargs[0] and b is sargs[1] else App(s.sym, (a, b))
                elif n == 1:
                    a = values.pop()
                    v = s if a is sargs[0] else App(s.sym, (a,))
                elif n:
                    args = tuple(values[-n:])
                    del values[-n:]
                    v = App(s.sym, args)
                else:
                    v = s
                if v.size > self.largest:
                    self.largest = v.size
                if v is not s:
                    hit = memo.get(v)
                    if hit is not None:
                        memo[s] = hit
                        pending.discard(s)
                        values.append(hit)
                        continue
                reduct = None
                for matcher, builder in table.get(v.sym, ()):
                    sigma = matcher(v)
                    if sigma is not None:
                        reduct = builder(sigma)
                        break
                if reduct is None:
                    memo[v] = v
                    memo[s] = v
                    pending.discard(s)
                    values.append(v)
                    continue
                budget -= 1
                self.steps += 1
                if budget < 0:
                    raise StepLimitExceeded(f"no normal form within {self.step_limit} steps")
                if v is not s:
                    if v in pending and v != s:
                        raise RewriteCycle(f"rewrite cycle through {_short(v)}")
                    pending.add(v)
                work.append((2, s, v))
                work.append((0, reduct, None))
            else:  # reduct evaluated
                r = values[-1]
                memo[s] = r
                memo[u] = r
                pending.discard(s)
                pending.discard(u)
        return values[-1]


def _short(t: Term, limit: int = 80) -> str:
    if t.size > 200:
        return f"<term of size {t.size}>"
    text = print_term(t)
    return text if len(text) <= limit else text[: limit - 3] + "..."


_NORMALIZERS: dict = {}


def normal_form(system: RewriteSystem, t: Term, step_limit: int = DEFAULT_STEP_LIMIT) -> Term:
    """Leftmost-innermost normal form via a per-system cached Normalizer."""
    key = (id(system), step_limit)
    nz = _NORMALIZERS.get(key)
    if nz is None or nz.system is not system:
        nz = _NORMALIZERS[key] = Normalizer(system, step_limit)
    return nz.normalize(t)


# ---------------------------------------------------------------------------
# exhaustive search


@dataclass(frozen=True)
class NormalForms:
    forms: frozenset
    outcome: str  # complete | budget-exceeded | step-limit-hit | stopped
    visited: int

    @property
    def complete(self) -> bool:
        return self.outcome == "complete"

    @property
    def unique(self) -> Optional[Term]:
        if self.complete and len(self.forms) == 1:
            return next(iter(self.forms))
        return None


class SafeCollapser:
    """Contracts redexes that cannot change the set of reachable normal forms.

    A redex is safe when its arguments are normal, its root symbol never
    occurs below the root of a left-hand side, every matching rule yields the
    same reduct, and the system is left-linear. Such a redex overlaps with no
    other redex, so contracting it commutes with every other step. ``collapse``
    performs innermost safe steps wherever possible and leaves the rest.
    """

    def __init__(self, system: RewriteSystem, step_limit: int = DEFAULT_STEP_LIMIT, max_memo: int = 2_000_000):
        self.system = system
        self.step_limit = step_limit
        self.max_memo = max_memo
        self.memo: dict = {}
        self.enabled = system.left_linear
        self.inner = system.inner_symbols

    def collapse(self, t: Term) -> tuple[Term, bool]:
        """(collapsed term, whether it is normal)."""
        memo = self.memo
        hit = memo.get(t)
        if hit is not None:
            return hit
        if len(memo) > self.max_memo:
            memo.clear()
        system = self.system
        budget = self.step_limit
        pending: set = set()
        values: list = []
        work: list = [(0, t, None)]
        while work:
            op, s, u = work.pop()
            if op == 0:
                hit = memo.get(s)
                if hit is not None:
                    values.append(hit)
                    continue
                if s in pending:
                    raise RewriteCycle(f"rewrite cycle through {_short(s)}")
                pending.add(s)
                work.append((1, s, None))
                for a in reversed(s.args):
                    work.append((0, a, None))
            elif op == 1:
                n = len(s.args)
                all_normal = True
                if n:
                    results = values[-n:]
                    del values[-n:]
                    args = tuple(r[0] for r in results)
                    all_normal = all(r[1] for r in results)
                    v = s if all(a is b for a, b in zip(args, s.args)) else App(s.sym, args)
                else:
                    v = s
                if not all_normal:
                    res = (v, False)
                    memo[s] = memo[v] = res
                    pending.discard(s)
                    values.append(res)
                    continue
                matches = root_matches(system, v)
                if not matches:
                    res = (v, True)
                    memo[s] = memo[v] = res
                    pending.discard(s)
                    values.append(res)
                    continue
                reducts = {compile_builder(r.rhs)(sg) for r, sg in matches}
                if not self.enabled or v.sym in self.inner or len(reducts) != 1:
                    res = (v, False)
                    memo[s] = memo[v] = res
                    pending.discard(s)
                    values.append(res)
                    continue
                budget -= 1
                if budget < 0:
                    raise StepLimitExceeded(f"no normal form within {self.step_limit} steps")
                if v is not s:
                    if v in pending and v != s:
                        raise RewriteCycle(f"rewrite cycle through {_short(v)}")
                    pending.add(v)
                work.append((2, s, v))
                work.append((0, next(iter(reducts)), None))
            else:
                r = values[-1]
                memo[s] = r
                memo[u] = r
                pending.discard(s)
                pending.discard(u)
        return values[-1]


def one_step_reducts(system: RewriteSystem, t: Term) -> list[tuple[Term, str, tuple]]:
    """Every (reduct, rule tag, position), positions leftmost-outermost."""
    out = []
    for pos, s in iter_positions(t):
        for rule, sigma in root_matches(system, s):
            out.append((replace_at(t, pos, compile_builder(rule.rhs)(sigma)), rule.tag, pos))
    return out


def all_normal_forms(
    system: RewriteSystem,
    t: Term,
    node_budget: int = DEFAULT_NODE_BUDGET,
    *,
    reduce: bool = True,
    collapser: Optional[SafeCollapser] = None,
    stop_after: Optional[int] = None,
) -> NormalForms:
    """Every normal form reachable from ``t``.

    With ``reduce`` (the default) safe redexes are contracted eagerly before
    branching; this never changes the result but shrinks the graph. The
    search visits at most ``node_budget`` distinct terms. With
    ``stop_after`` the search ends (outcome ``stopped``) as soon as that
    many distinct normal forms have been found.
    """
    if reduce and collapser is None:
        collapser = SafeCollapser(system)
    forms = set()
    seen = set()
    stack = [t]
    try:
        while stack:
            s = stack.pop()
            if reduce:
                s, normal = collapser.collapse(s)
                if normal:
                    forms.add(s)
                    if stop_after is not None and len(forms) >= stop_after:
                        return NormalForms(frozenset(forms), "stopped", len(seen))
                    continue
            if s in seen:
                continue
            seen.add(s)
            if len(seen) > node_budget:
                return NormalForms(frozenset(forms), "budget-exceeded", len(seen))
            reducts = one_step_reducts(system, s)
            if not reducts:
                forms.add(s)
                if stop_after is not None and len(forms) >= stop_after:
                    return NormalForms(frozenset(forms), "stopped", len(seen))
                continue
            for r, _, _ in reducts:
                if r not in seen:
                    stack.append(r)
    except StepLimitExceeded:
        return NormalForms(frozenset(forms), "step-limit-hit", len(seen))
    return NormalForms(frozenset(forms), "complete", len(seen))
