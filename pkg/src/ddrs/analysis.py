"""Normal-form grammars, closed-term enumeration, desk-scale ground-confluence
checks, weight-function termination certificates and status reports."""

from __future__ import annotations

import itertools
import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .catalog import RewriteSystem, with_rules
from .engine import DEFAULT_NODE_BUDGET, DEFAULT_STEP_LIMIT, Normalizer, SafeCollapser, all_normal_forms, is_normal
from .errors import RewriteCycle, StepLimitExceeded, UnknownGrammarError
from .semantics import evaluate, random_term
from .syntax import parse_ddrs_file, print_term
from .schema import expand
from .terms import SYMBOL_ORDER, App, Signature, Term, Var, const, fold, match

# ---------------------------------------------------------------------------
# enumeration

_RANK = {s: k for k, s in enumerate(SYMBOL_ORDER)}


def term_key(t: Term) -> tuple:
    """Sort key giving size-then-lexicographic order, the order of enumerate_closed."""

    def leaf(s):
        return (1, _RANK[s.sym], (), ())

    def node(s, keys):
        return (s.size, _RANK[s.sym], tuple(a.size for a in s.args), tuple(keys))

    return fold(t, leaf, node)


def count_closed(sig: Signature, max_size: int) -> list[int]:
    """Number of closed terms of each size 1..max_size (index 0 is size 1)."""
    c = [0] * (max_size + 1)
    n0, n1, n2 = (len(sig.by_arity(k)) for k in (0, 1, 2))
    for n in range(1, max_size + 1):
        total = n0 if n == 1 else n1 * c[n - 1]
        if n >= 3:
            total += n2 * sum(c[k] * c[n - 1 - k] for k in range(1, n - 1))
        c[n] = total
    return c[1:]


def enumerate_closed(sig: Signature, max_size: int) -> Iterator[Term]:
    """Every closed term over ``sig`` of size <= max_size, once each, smallest first.

    Within a size, terms are ordered by root symbol, then by the sizes of
    the arguments, then recursively by the arguments themselves.
    """
    levels: list[list[Term]] = [[]]
    for n in range(1, max_size + 1):
        keep = n < max_size
        level: list[Term] = []
        for sym in sig.symbols:
            arity = sig.arity(sym)
            if arity == 0:
                if n == 1:
                    t = const(sym) if sym.isdigit() else App(sym)
                    if keep:
                        level.append(t)
                    yield t
            elif arity == 1:
                if n >= 2:
                    for c in levels[n - 1]:
                        t = App(sym, (c,))
                        if keep:
                            level.append(t)
                        yield t
            else:
                for k in range(1, n - 1):
                    for left in levels[k]:
                        for right in levels[n - 1 - k]:
                            t = App(sym, (left, right))
                            if keep:
                                level.append(t)
                            yield t
        levels.append(level)


# ---------------------------------------------------------------------------
# normal-form grammars


@dataclass(frozen=True)
class NormalFormGrammar:
    """Positive normal forms are built from ``bases`` by repeatedly wrapping a
    member ``w`` with an extender ``(sym, tail)``, giving ``sym(w, *tail)``.
    The full grammar adds ``0`` and ``-w`` when enabled.

    ``exact`` is False when the grammar is read off prose rather than stated
    in full; checks then report irreducible non-members as notes.
    """

    name: str
    bases: tuple
    extenders: tuple
    zero: bool = True
    negatives: bool = False
    exact: bool = True

    def positive(self, t: Term) -> bool:
        bases = self.bases
        while True:
            if not isinstance(t, App):
                return False
            if t in bases:
                return True
            for sym, tail in self.extenders:
                if t.sym == sym and len(t.args) == 1 + len(tail) and t.args[1:] == tail:
                    t = t.args[0]
                    break
            else:
                return False

    def __contains__(self, t: Term) -> bool:
        if not isinstance(t, App):
            return False
        if self.zero and t.sym == "0":
            return True
        if self.negatives and t.sym == "-":
            return self.positive(t.args[0])
        return self.positive(t)

    def _affine(self):
        from .semantics import as_polynomial

        x = Var("x")
        out = []
        for sym, tail in self.extenders:
            poly = as_polynomial(App(sym, (x,) + tail))
            out.append((poly.get((("x", 1),), 0), poly.get((), 0), sym, tail))
        return out

    def encode(self, n: int) -> Term:
        """The member denoting ``n``; ValueError when there is none."""
        if n == 0:
            if self.zero:
                return const(0)
            raise ValueError("zero is not a member")
        if n < 0:
            if not self.negatives:
                raise ValueError(f"{n} is negative and the grammar has no negatives")
            return App("-", (self.encode(-n),))
        bases = {evaluate(b): b for b in self.bases}
        forms = self._affine()
        chain = []
        v = n
        while v not in bases:
            for a, b, sym, tail in forms:
                # the wrapped member is positive, so its value is at least 1
                if a >= 1 and (v - b) % a == 0 and (v - b) // a >= 1:
                    chain.append((sym, tail))
                    v = (v - b) // a
                    break
            else:
                raise ValueError(f"{n} has no representation")
        t = bases[v]
        for sym, tail in reversed(chain):
            t = App(sym, (t,) + tail)
        return t

    def members(self, max_size: int) -> list[Term]:
        """All members of size <= max_size in enumeration order."""
        found = []
        frontier = [b for b in self.bases if b.size <= max_size]
        while frontier:
            found.extend(frontier)
            nxt = []
            for w in frontier:
                for sym, tail in self.extenders:
                    t = App(sym, (w,) + tail)
                    if t.size <= max_size:
                        nxt.append(t)
            frontier = nxt
        out = list(found)
        if self.negatives:
            out += [App("-", (w,)) for w in found if w.size < max_size]
        if self.zero:
            out.append(const(0))
        return sorted(set(out), key=term_key)


def _digits(lo, hi):
    return tuple(const(i) for i in range(lo, hi + 1))


def _appends(*syms):
    return tuple((s, ()) for s in syms)


def _trees(sym, digits):
    return tuple((sym, (d,)) for d in digits)


_ONE = (const(1),)
_SUCC = App("S", (const(0),))

_GRAMMARS = {
    "Nubd": NormalFormGrammar("unary numerals", (_SUCC,), _appends("S")),
    "Zubd": NormalFormGrammar("signed unary numerals", (_SUCC,), _appends("S"), negatives=True),
    "Nu1": NormalFormGrammar("unary appends", (App(":u0", (const(0),)),), _appends(":u0")),
    "Zu1": NormalFormGrammar("signed unary appends", (App(":u0", (const(0),)),), _appends(":u0"), negatives=True),
    "Nbud": NormalFormGrammar("binary numerals", _ONE, _appends(":b0", ":b1")),
    "Zbud": NormalFormGrammar("signed binary numerals", _ONE, _appends(":b0", ":b1"), negatives=True),
    "Ndub": NormalFormGrammar("decimal numerals", _digits(1, 9), _appends(*(f":d{i}" for i in range(10)))),
    "Zdub": NormalFormGrammar(
        "signed decimal numerals", _digits(1, 9), _appends(*(f":d{i}" for i in range(10))), negatives=True
    ),
    "Nut": NormalFormGrammar("unary trees", (App("^u", (const(0), const(0))),), _trees("^u", (const(0),))),
    "Zut": NormalFormGrammar(
        "signed unary trees", (App("^u", (const(0), const(0))),), _trees("^u", (const(0),)),
        negatives=True, exact=False,
    ),
    "Nbt": NormalFormGrammar("binary trees", _ONE, _trees("^b", _digits(0, 1))),
    "Zbi": NormalFormGrammar("signed binary trees", _ONE, _trees("^b", _digits(0, 1)), negatives=True, exact=False),
    "Ndt": NormalFormGrammar("decimal trees", _digits(1, 9), _trees("^d", _digits(0, 9))),
    "Zdt": NormalFormGrammar(
        "signed decimal trees", _digits(1, 9), _trees("^d", _digits(0, 9)), negatives=True, exact=False
    ),
    "RingZ": NormalFormGrammar("left-nested sums of ones", _ONE, (("+", _ONE),), negatives=True),
}
_ALIASES = {"Zubd-verbatim": "Zubd", "Zdub-verbatim": "Zdub"}


def grammar_for(system_name: str) -> NormalFormGrammar:
    """The normal-form grammar recorded for the named system."""
    key = _ALIASES.get(system_name, system_name)
    try:
        return _GRAMMARS[key]
    except KeyError:
        raise UnknownGrammarError(f"no normal-form grammar recorded for {system_name!r}") from None


# ---------------------------------------------------------------------------
# uniqueness certificate
#
# If every rule preserves the integer meaning exactly, every irreducible
# closed term lies in the grammar, and the grammar denotes each integer at
# most once, then any two normal forms of a term are equal: both are grammar
# members with the term's value.  The three facts are proved below for all
# term sizes, so the per-term desk check does not need to search the
# reduction graph when they hold.

_HOLE = Var("_")


def _height(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((_height(a) for a in t.args), default=0)


def _truncate(t: Term, h: int) -> Term:
    if h == 0:
        return _HOLE
    if not isinstance(t, App) or not t.args:
        return t
    return App(t.sym, tuple(_truncate(a, h - 1) for a in t.args))


def _grammar_state(grammar: NormalFormGrammar, shape: App, kids) -> Optional[str]:
    # kids: grammar states of the arguments; shape: the term cut below the
    # arguments' tops, exact for constant arguments
    sym = shape.sym
    if not kids:
        if sym == "0" and grammar.zero:
            return "zero"
        return "pos" if shape in grammar.bases else None
    if sym == "-" and grammar.negatives:
        return "neg" if kids[0] == "pos" else None
    if shape in grammar.bases:
        return "pos"
    for esym, tail in grammar.extenders:
        if sym == esym and kids[0] == "pos" and shape.args[1:] == tail:
            return "pos"
    return None


@dataclass
class Completeness:
    """Outcome of the automaton proof that irreducible terms are grammar members."""

    proved: bool
    classes: int
    counterexample: Optional[Term] = None


def prove_irreducibles_in_grammar(
    system: RewriteSystem, grammar: NormalFormGrammar, max_classes: int = 1000
) -> Completeness:
    """Decide whether every irreducible closed term over the system's
    signature is a grammar member.

    Whether ``f(t1, ..., tn)`` is a root redex depends only on the tops of
    the ``ti`` down to the depth of the deepest left-hand side, and whether it
    is a member depends only on the member kind of each ``ti`` plus that top.
    A fixpoint over these finitely many (kind, top) classes of irreducible
    terms therefore covers every size.  A class that is irreducible but not a
    member yields a concrete counterexample term.
    """
    if not system.left_linear:
        return Completeness(False, 0)
    depth = max((_height(r.lhs) for r in system.rules), default=1)
    keep = max(depth - 1, 1)
    sig = system.signature
    by_root = system.rules_by_root
    classes: dict = {}
    fresh: dict = {}

    def visit(sym, kid_keys):
        witness = App(sym, tuple(classes.get(k) or fresh[k] for k in kid_keys))
        shape = App(sym, tuple(k[1] for k in kid_keys))
        for rule in by_root.get(sym, ()):
            if match(rule.lhs, shape) is not None:
                return None
        state = _grammar_state(grammar, shape, [k[0] for k in kid_keys])
        if state is None:
            return witness
        key = (state, _truncate(shape, keep))
        if key not in classes and key not in fresh and key not in found:
            found[key] = witness
        return None

    found: dict = {}
    for sym in sig.by_arity(0):
        bad = visit(sym, ())
        if bad is not None:
            return Completeness(False, 0, bad)
    fresh = found
    while fresh:
        found = {}
        old = list(classes)
        new = list(fresh)
        everything = old + new
        for sym in sig.by_arity(1):
            for k in new:
                bad = visit(sym, (k,))
                if bad is not None:
                    return Completeness(False, len(classes) + len(fresh), bad)
        for sym in sig.by_arity(2):
            for a in everything:
                if len(classes) + len(fresh) + len(found) > max_classes:
                    return Completeness(False, len(classes) + len(fresh) + len(found))
                for b in (everything if a in fresh else new):
                    bad = visit(sym, (a, b))
                    if bad is not None:
                        return Completeness(False, len(classes) + len(fresh), bad)
        classes.update(fresh)
        fresh = found
        if len(classes) + len(fresh) > max_classes:
            return Completeness(False, len(classes) + len(fresh))
    return Completeness(True, len(classes))


def grammar_injective(grammar: NormalFormGrammar) -> bool:
    """Sufficient test that distinct members denote distinct integers.

    Each extender must act as ``w -> a*w + b`` with one shared factor ``a``
    and pairwise distinct offsets modulo ``a``; bases must be distinct
    positive values below every extender's smallest image.  Positive members
    then read as a unique numeral, negatives mirror them and zero is alone.
    """
    from .semantics import as_polynomial

    x = Var("x")
    forms = []
    for sym, tail in grammar.extenders:
        poly = as_polynomial(App(sym, (x,) + tail))
        if set(poly) - {(), (("x", 1),)}:
            return False
        forms.append((poly.get((("x", 1),), 0), poly.get((), 0)))
    values = [evaluate(b) for b in grammar.bases]
    if not values or min(values) < 1 or len(set(values)) != len(values):
        return False
    if not forms:
        return True
    factors = {a for a, _ in forms}
    if len(factors) != 1:
        return False
    (a,) = factors
    if a < 1 or any(b < 0 for _, b in forms):
        return False
    offsets = [b % a for _, b in forms] if a > 1 else [b for _, b in forms]
    if len(set(offsets)) != len(offsets):
        return False
    smallest_image = min(a * min(values) + b for _, b in forms)
    return max(values) < smallest_image


@dataclass
class UniquenessCertificate:
    system: str
    sound: bool
    complete: Completeness
    injective: bool

    @property
    def holds(self) -> bool:
        return self.sound and self.complete.proved and self.injective

    def describe(self) -> str:
        if self.holds:
            return (
                "unique normal forms proved for all closed terms: rules preserve meaning exactly, "
                f"every irreducible term is a grammar member ({self.complete.classes} classes), "
                "and the grammar is injective"
            )
        parts = []
        if not self.sound:
            parts.append("some rule changes the meaning")
        if not self.complete.proved:
            cex = self.complete.counterexample
            parts.append(
                "irreducible non-member " + print_term(cex) if cex is not None else "completeness not established"
            )
        if not self.injective:
            parts.append("grammar injectivity not established")
        return "no certificate: " + "; ".join(parts)


def uniqueness_certificate(system: RewriteSystem, grammar: Optional[NormalFormGrammar] = None) -> UniquenessCertificate:
    from .semantics import symbolically_sound

    grammar = grammar or grammar_for(system.name)
    sound = all(symbolically_sound(r) for r in system.rules)
    injective = grammar_injective(grammar)
    if sound and injective:
        complete = prove_irreducibles_in_grammar(system, grammar)
    else:
        complete = Completeness(False, 0)
    return UniquenessCertificate(system.name, sound, complete, injective)


# ---------------------------------------------------------------------------
# ground-confluence desk check


@dataclass(frozen=True)
class Failure:
    term: Term
    kind: str
    detail: str = ""

    def to_json(self) -> dict:
        return {"term": print_term(self.term), "kind": self.kind, "detail": self.detail}


@dataclass
class GroundCheckReport:
    system: str
    max_size: int
    checked: int = 0
    failures: list = field(default_factory=list)
    limit_hits: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    sampled: int = 0
    method: str = "search"
    certificate: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "max_size": self.max_size,
            "checked": self.checked,
            "failures": [f.to_json() for f in self.failures],
            "limit_hits": [f.to_json() for f in self.limit_hits],
            "notes": [f.to_json() for f in self.notes],
            "sampled": self.sampled,
            "method": self.method,
            "certificate": self.certificate,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def summary(self) -> str:
        verdict = "pass" if self.passed else f"FAIL ({len(self.failures)} failures)"
        line = f"ground-confluence desk check, {self.checked} terms up to size {self.max_size}"
        if self.sampled:
            line += f" plus {self.sampled} random terms"
        line += f": {verdict}"
        line += "; uniqueness by certificate" if self.method == "certificate" else "; uniqueness by search"
        if self.limit_hits:
            line += f"; {len(self.limit_hits)} step-limit hits (divergence evidence, not failures)"
        if self.notes:
            line += f"; {len(self.notes)} irreducible terms outside the prose grammar"
        return line


def _check_term(system, grammar, t, collapser, node_budget):
    """Failures for one closed term as (bucket, Failure) pairs."""
    out = []
    try:
        v, normal = collapser.collapse(t)
    except (StepLimitExceeded, RewriteCycle) as exc:
        return [("limit", Failure(t, "step-limit-hit", str(exc)))]
    irreducible = normal and v == t
    member = t in grammar
    if irreducible and not member:
        out.append(("fail" if grammar.exact else "note", Failure(t, "irreducible-not-in-grammar")))
    if member and not irreducible:
        out.append(("fail", Failure(t, "grammar-member-reducible")))
    if normal:
        forms = {v}
    else:
        result = all_normal_forms(system, v, node_budget, collapser=collapser, stop_after=2)
        if result.outcome == "step-limit-hit":
            return out + [("limit", Failure(t, "step-limit-hit"))]
        if result.outcome == "budget-exceeded":
            return out + [("fail", Failure(t, "budget-exceeded", f"visited {result.visited} terms"))]
        forms = result.forms
    if len(forms) != 1:
        shown = ", ".join(sorted(print_term(f) for f in forms))
        out.append(("fail", Failure(t, "multiple-normal-forms", shown)))
    value = evaluate(t)
    for nf in forms:
        if nf != t and nf not in grammar:
            out.append(("fail" if grammar.exact else "note", Failure(t, "normal-form-not-in-grammar", print_term(nf))))
        if evaluate(nf) != value:
            out.append(("fail", Failure(t, "value-changed", f"{print_term(nf)} = {evaluate(nf)}, expected {value}")))
    return out


def _check_term_certified(system, grammar, t, normalizer):
    """Per-term checks when a uniqueness certificate holds: one normal form
    is computed and compared; its uniqueness is already proved."""
    out = []
    irreducible = is_normal(system, t)
    member = t in grammar
    if irreducible and not member:
        out.append(("fail", Failure(t, "irreducible-not-in-grammar")))
    if member and not irreducible:
        out.append(("fail", Failure(t, "grammar-member-reducible")))
    try:
        nf = normalizer.normalize(t)
    except (StepLimitExceeded, RewriteCycle) as exc:
        return out + [("limit", Failure(t, "step-limit-hit", str(exc)))]
    if nf not in grammar:
        out.append(("fail", Failure(t, "normal-form-not-in-grammar", print_term(nf))))
    value = evaluate(t)
    if evaluate(nf) != value:
        out.append(("fail", Failure(t, "value-changed", f"{print_term(nf)} = {evaluate(nf)}, expected {value}")))
    return out


class _Checker:
    def __init__(self, system, grammar, certified, step_limit, node_budget):
        self.system, self.grammar, self.node_budget = system, grammar, node_budget
        self.certified = certified
        if certified:
            self.normalizer = Normalizer(system, step_limit)
        else:
            self.collapser = SafeCollapser(system, step_limit)

    def __call__(self, t):
        if self.certified:
            return _check_term_certified(self.system, self.grammar, t, self.normalizer)
        return _check_term(self.system, self.grammar, t, self.collapser, self.node_budget)


def check_term(
    system: RewriteSystem,
    t: Term,
    grammar: Optional[NormalFormGrammar] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> list[tuple[str, Failure]]:
    """The desk-check verdicts for a single closed term, found by searching
    its reduction graph. Each entry is ``(bucket, failure)`` with bucket
    ``fail``, ``limit`` or ``note``; an empty list means the term passes."""
    grammar = grammar or grammar_for(system.name)
    return _check_term(system, grammar, t, SafeCollapser(system, step_limit), node_budget)


def _terms_to_check(system, max_size, samples, sample_max_size, seed):
    yield from enumerate_closed(system.signature, max_size)
    rng = random.Random(seed)
    for _ in range(samples):
        yield random_term(system.signature, rng.randint(1, sample_max_size), rng)


_POOL_STATE: dict = {}


def _pool_worker(k):
    st = _POOL_STATE
    system = st["system"]
    check = _Checker(system, st["grammar"], st["certified"], st["step_limit"], st["node_budget"])
    out = []
    terms = _terms_to_check(system, st["max_size"], st["samples"], st["sample_max_size"], st["seed"])
    for idx, t in enumerate(terms):
        if idx % st["workers"] == k:
            for bucket, f in check(t):
                out.append((idx, bucket, f))
    return out


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("DDRS_WORKERS", "1")))
    except ValueError:
        return 1


def check_ground_confluence(
    system: RewriteSystem,
    grammar: Optional[NormalFormGrammar] = None,
    max_size: int = 5,
    node_budget: int = DEFAULT_NODE_BUDGET,
    *,
    samples: int = 0,
    sample_max_size: int = 9,
    seed: int = 0,
    step_limit: int = DEFAULT_STEP_LIMIT,
    workers: Optional[int] = None,
    method: str = "auto",
) -> GroundCheckReport:
    """Check every closed term up to ``max_size`` (plus ``samples`` random ones):
    irreducible iff grammar member, exactly one reachable normal form, and
    that normal form has the input's value.

    ``method`` picks how uniqueness of the normal form is established:
    ``"search"`` explores the reduction graph of every term within
    ``node_budget``; ``"auto"`` uses the uniqueness certificate when it
    holds for the system and falls back to search otherwise.
    """
    if method not in ("auto", "search"):
        raise ValueError(f"unknown method {method!r}")
    grammar = grammar or grammar_for(system.name)
    workers = workers or default_workers()
    report = GroundCheckReport(system.name, max_size)
    certified = False
    if method == "auto":
        cert = uniqueness_certificate(system, grammar)
        certified = cert.holds
        report.certificate = cert.describe()
    report.method = "certificate" if certified else "search"
    total = sum(count_closed(system.signature, max_size)) + samples
    report.checked = total
    report.sampled = samples
    if workers > 1:
        import multiprocessing as mp

        _POOL_STATE.update(
            system=system, grammar=grammar, max_size=max_size, samples=samples,
            sample_max_size=sample_max_size, seed=seed, step_limit=step_limit,
            node_budget=node_budget, workers=workers, certified=certified,
        )
        with mp.get_context("fork").Pool(workers) as pool:
            parts = pool.map(_pool_worker, range(workers))
        found = sorted((item for part in parts for item in part), key=lambda x: x[0])
        results = [(b, f) for _, b, f in found]
    else:
        check = _Checker(system, grammar, certified, step_limit, node_budget)
        results = []
        for t in _terms_to_check(system, max_size, samples, sample_max_size, seed):
            results.extend(check(t))
    buckets = {"fail": report.failures, "limit": report.limit_hits, "note": report.notes}
    for bucket, f in results:
        buckets[bucket].append(f)
    return report


# ---------------------------------------------------------------------------
# weight certificates


class WeightFunction:
    """Rational weights: constants get fixed values, operators combine argument weights."""

    def __init__(self, name: str, constants: dict, operators: dict):
        self.name = name
        self.constants = {k: Fraction(v) for k, v in constants.items()}
        self.operators: dict[str, Callable] = dict(operators)

    def covers(self, sig: Signature) -> bool:
        return all(s in self.constants or s in self.operators for s in sig.symbols)

    def weight(self, t: Term, env: Optional[dict] = None) -> Fraction:
        """Weight of ``t``; variables take their weights from ``env``."""

        def leaf(s):
            if isinstance(s, Var):
                return env[s.name]
            return self.constants[s.sym]

        def node(s, ws):
            return self.operators[s.sym](*ws)

        return fold(t, leaf, node)


RING_WEIGHTS = WeightFunction(
    "ring",
    {"0": 2, "1": 2},
    {
        "+": lambda x, y: x + 2 * y,
        "-": lambda x: 1 + Fraction(3, 2) * x,
        "*": lambda x, y: x * y * y,
    },
)


_WEIGHTS = {"RingZ": RING_WEIGHTS}
_MISSING = object()


def weights_for(system_name: str, default=_MISSING) -> WeightFunction:
    """The termination weight function recorded for a system."""
    try:
        return _WEIGHTS[system_name]
    except KeyError:
        if default is _MISSING:
            raise UnknownGrammarError(f"no weight function recorded for {system_name!r}") from None
        return default


@dataclass(frozen=True)
class WeightViolation:
    tag: str
    substitution: dict
    lhs_weight: Fraction
    rhs_weight: Fraction

    def to_json(self) -> dict:
        return {
            "rule": self.tag,
            "substitution": {k: print_term(v) for k, v in self.substitution.items()},
            "lhs_weight": str(self.lhs_weight),
            "rhs_weight": str(self.rhs_weight),
        }


@dataclass
class WeightReport:
    system: str
    weights: str
    max_size: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "weights": self.weights,
            "max_size": self.max_size,
            "checked": self.checked,
            "violations": [v.to_json() for v in self.violations],
        }

    def summary(self) -> str:
        verdict = "pass" if self.passed else f"FAIL ({len(self.violations)} violations)"
        return f"weight certificate '{self.weights}', {self.checked} rule instances up to size {self.max_size}: {verdict}"


def check_weight_certificate(
    system: RewriteSystem,
    weights: WeightFunction = RING_WEIGHTS,
    max_size: int = 4,
    trials: Optional[int] = None,
) -> WeightReport:
    """Strict weight decrease on ground instances of every rule.

    Each variable ranges independently over all closed terms up to
    ``max_size``; ``trials`` caps the instances tried per rule.
    """
    report = WeightReport(system.name, weights.name, max_size)
    pool = list(enumerate_closed(system.signature, max_size))
    pool_weights = [weights.weight(t) for t in pool]
    for rule in system.rules:
        names = sorted({s.name for s in _vars(rule.lhs)})
        combos = itertools.product(range(len(pool)), repeat=len(names))
        if trials is not None:
            combos = itertools.islice(combos, trials)
        for combo in combos:
            env = {n: pool_weights[k] for n, k in zip(names, combo)}
            lw = weights.weight(rule.lhs, env)
            rw = weights.weight(rule.rhs, env)
            report.checked += 1
            if not lw > rw:
                sigma = {n: pool[k] for n, k in zip(names, combo)}
                report.violations.append(WeightViolation(rule.tag, sigma, lw, rw))
                break
    return report


def _vars(t):
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            yield s
        else:
            stack.extend(s.args)


# ---------------------------------------------------------------------------
# divergence and status


DIVERGENT_ADDITION = "rule [div.i] for i in 1..8: {i'} + x -> {i} + S(x)\n"


def with_divergent_addition(system: RewriteSystem) -> RewriteSystem:
    """``system`` with i'+x -> i+S(x) placed ahead of its own rules."""
    extra = []
    for schema in parse_ddrs_file(DIVERGENT_ADDITION):
        extra.extend(expand(schema, "scratch"))
    return with_rules(system, extra + list(system.rules), system.name + "+div")


def status_report(system: RewriteSystem, desk: Optional[GroundCheckReport] = None, extra: tuple = ()) -> str:
    """Recorded claims and this run's desk-check results, kept apart."""
    st = system.status
    lines = [
        f"system {system.name} ({len(system.rules)} rules over {system.signature.name})",
        "recorded status (literature claims; never changed by desk checks):",
        f"  termination: {st.termination}",
        f"  confluence: {st.confluence}",
        f"  ground-confluence: {st.ground_confluence}",
        "desk-scale evidence from this run (finite instances only):",
    ]
    if desk is None and not extra:
        lines.append("  (no desk checks run)")
    if desk is not None:
        lines.append(f"  {desk.summary()}")
        if st.ground_confluence.verdict != "proven":
            lines.append("  caveat: ground-confluence is recorded as open; a passing desk check proves nothing about it")
        if desk.limit_hits and st.termination.verdict != "proven":
            lines.append("  caveat: step-limit hits are divergence evidence only; termination stays open")
    if desk is not None and st.termination.verdict != "proven":
        lines.append("  caveat: termination is recorded as open; terminating desk runs prove nothing about it")
    for line in extra:
        lines.append(f"  {line}")
    return "\n".join(lines)


__all__ = [
    "term_key",
    "count_closed",
    "enumerate_closed",
    "NormalFormGrammar",
    "grammar_for",
    "Completeness",
    "prove_irreducibles_in_grammar",
    "grammar_injective",
    "UniquenessCertificate",
    "uniqueness_certificate",
    "Failure",
    "GroundCheckReport",
    "check_term",
    "check_ground_confluence",
    "WeightFunction",
    "RING_WEIGHTS",
    "weights_for",
    "WeightViolation",
    "WeightReport",
    "check_weight_certificate",
    "DIVERGENT_ADDITION",
    "with_divergent_addition",
    "status_report",
]
