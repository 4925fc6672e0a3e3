"""Signatures, terms, positions, substitutions and matching.

Terms are immutable trees. ``App`` nodes cache their hash and size at
construction so that very deep terms (unary numerals with thousands of
successors) can be hashed, compared and measured without recursion. Equal ``App``
nodes are shared, so comparison is by identity.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from .errors import InvalidPositionError, UnknownSymbolError

DIGITS = tuple(str(i) for i in range(10))
VARIABLE_NAMES = ("x", "y", "z", "w")

Position = tuple  # tuple[int, ...]; the root is ()


# live App nodes keyed by (symbol, argument tuple)
# (sym, args) -> weak reference to the live App with that shape
_INTERN: dict = {}


class _Ref(weakref.ref):
    __slots__ = ("key",)


def _forget(ref) -> None:
    if _INTERN.get(ref.key) is ref:
        del _INTERN[ref.key]


class Term:
    __slots__ = ()


class Var(Term):
    __slots__ = ("name", "_hash")

    # lets compiled matchers read .sym/.args without a type test
    sym = None
    args = ()

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("$var", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __repr__(self):
        return f"Var({self.name!r})"

    def __reduce__(self):
        return (Var, (self.name,))

    @property
    def size(self) -> int:
        return 0

    @property
    def ground(self) -> bool:
        return False


class App(Term):
    """A function symbol applied to arguments (constants have none).

    Instances are hash-consed: building a term equal to a live one returns
    that same object, so equality is an identity test.
    """

    # equality and hashing are the object defaults, i.e. identity
    __slots__ = ("sym", "args", "size", "ground", "__weakref__")

    def __new__(cls, sym: str, args: Sequence[Term] = ()):
        args = tuple(args)
        key = (sym, args)
        ref = _INTERN.get(key)
        if ref is not None:
            found = ref()
            if found is not None:
                return found
        self = object.__new__(cls)
        _set_sym(self, sym)
        _set_args(self, args)
        n = len(args)
        if n == 0:
            _set_size(self, 1)
            _set_ground(self, True)
        elif n == 1:
            a = args[0]
            _set_size(self, 1 + a.size)
            _set_ground(self, a.ground)
        elif n == 2:
            a, b = args
            _set_size(self, 1 + a.size + b.size)
            _set_ground(self, a.ground and b.ground)
        else:
            _set_size(self, 1 + sum(a.size for a in args))
            _set_ground(self, all(a.ground for a in args))
        ref = _Ref(self, _forget)
        ref.key = key
        _INTERN[key] = ref
        return self

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __repr__(self):
        if not self.args:
            return f"App({self.sym!r})"
        return f"App({self.sym!r}, {list(self.args)!r})"

    def __reduce__(self):
        return (App, (self.sym, self.args))


_set_sym = App.__dict__["sym"].__set__
_set_args = App.__dict__["args"].__set__
_set_size = App.__dict__["size"].__set__
_set_ground = App.__dict__["ground"].__set__


_CONSTANTS = {d: App(d) for d in DIGITS}


def const(d) -> App:
    """The digit constant ``d`` (an int 0-9 or its string)."""
    return _CONSTANTS[str(d)]


def app(sym: str, *args: Term) -> App:
    if not args and sym in _CONSTANTS:
        return _CONSTANTS[sym]
    return App(sym, args)


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class SymbolKind:
    kind: str  # constant | prefix | postfix | infix | tree
    name: str
    family: Optional[str] = None  # u, b or d for appends and tree constructors
    digit: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ARITY:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "postfix":
            allowed = {"u": {0}, "b": {0, 1}, "d": set(range(10))}.get(self.family)
            if allowed is None or self.digit not in allowed:
                raise ValueError(f"bad append symbol {self.family}{self.digit}")

    @property
    def arity(self) -> int:
        return ARITY[self.kind]


ARITY = {"constant": 0, "prefix": 1, "postfix": 1, "infix": 2, "tree": 2}


def _symbol_table() -> dict[str, SymbolKind]:
    table = {d: SymbolKind("constant", d) for d in DIGITS}
    table["S"] = SymbolKind("prefix", "S")
    table["P"] = SymbolKind("prefix", "P")
    table["-"] = SymbolKind("prefix", "-")
    table["+"] = SymbolKind("infix", "+")
    table["*"] = SymbolKind("infix", "*")
    for i in (0, 1):
        table[f":b{i}"] = SymbolKind("postfix", f":b{i}", "b", i)
    for i in range(10):
        table[f":d{i}"] = SymbolKind("postfix", f":d{i}", "d", i)
    table[":u0"] = SymbolKind("postfix", ":u0", "u", 0)
    for fam in "ubd":
        table[f"^{fam}"] = SymbolKind("tree", f"^{fam}", fam)
    return table


SYMBOLS: dict[str, SymbolKind] = _symbol_table()
# canonical symbol order, used for enumeration and tie-breaking
SYMBOL_ORDER: tuple[str, ...] = tuple(SYMBOLS)


@dataclass(frozen=True)
class Signature:
    name: str
    symbols: tuple[str, ...]
    kinds: Mapping[str, SymbolKind] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in signature {self.name}")
        unknown = [s for s in self.symbols if s not in SYMBOLS]
        if unknown:
            raise ValueError(f"unknown symbols {unknown}")
        ordered = tuple(s for s in SYMBOL_ORDER if s in self.symbols)
        object.__setattr__(self, "symbols", ordered)
        object.__setattr__(self, "kinds", {s: SYMBOLS[s] for s in ordered})
        groups = {n: tuple(s for s in ordered if SYMBOLS[s].arity == n) for n in (0, 1, 2)}
        object.__setattr__(self, "_groups", groups)

    def __contains__(self, sym: str) -> bool:
        return sym in self.kinds

    def arity(self, sym: str) -> int:
        try:
            return self.kinds[sym].arity
        except KeyError:
            raise UnknownSymbolError(f"symbol {sym!r} not in signature {self.name}") from None

    def by_arity(self, n: int) -> tuple[str, ...]:
        return self._groups.get(n, ())

    def check(self, t: Term) -> None:
        """Raise UnknownSymbolError unless every symbol of ``t`` is in this signature."""
        for s in iter_subterms(t):
            if isinstance(s, App):
                if s.sym not in self.kinds:
                    raise UnknownSymbolError(f"symbol {s.sym!r} not in signature {self.name}")
                if len(s.args) != self.kinds[s.sym].arity:
                    raise UnknownSymbolError(f"symbol {s.sym!r} used with wrong arity")


def _sig(name, *groups) -> Signature:
    syms = []
    for g in groups:
        syms.extend(g)
    return Signature(name, tuple(syms))


_APP_B = (":b0", ":b1")
_APP_D = tuple(f":d{i}" for i in range(10))

SIGMA_N = _sig("SigmaN", DIGITS, ("S", "+", "*"), _APP_B, _APP_D)
SIGMA_Z = _sig("SigmaZ", DIGITS, ("S", "P", "-", "+", "*"), _APP_B, _APP_D)
SIGMA_NU1 = _sig("SigmaNu1", ("0", "+", "*", ":u0"))
SIGMA_ZU1 = _sig("SigmaZu1", ("0", "-", "+", "*", ":u0"))
SIGMA_NUT = _sig("SigmaNut", ("0", "+", "*", "^u"))
SIGMA_ZUT = _sig("SigmaZut", ("0", "-", "+", "*", "^u"))
SIGMA_NBT = _sig("SigmaNbt", ("0", "1", "+", "*", "^b"))
SIGMA_ZBI = _sig("SigmaZbi", ("0", "1", "-", "+", "*", "^b"))
SIGMA_NDT = _sig("SigmaNdt", DIGITS, ("S", "+", "*", "^d"))
SIGMA_ZDT = _sig("SigmaZdt", DIGITS, ("S", "P", "-", "+", "*", "^d"))
SIGMA_R = _sig("SigmaR", ("0", "1", "-", "+", "*"))
SIGMA_FULL = _sig("SigmaFull", SYMBOL_ORDER)

SIGNATURES: dict[str, Signature] = {
    s.name: s
    for s in (
        SIGMA_N, SIGMA_Z, SIGMA_NU1, SIGMA_ZU1, SIGMA_NUT, SIGMA_ZUT,
        SIGMA_NBT, SIGMA_ZBI, SIGMA_NDT, SIGMA_ZDT, SIGMA_R, SIGMA_FULL,
    )
}


# ---------------------------------------------------------------------------
# structural operations


def iter_subterms(t: Term) -> Iterator[Term]:
    """Pre-order, left to right."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App) and s.args:
            stack.extend(reversed(s.args))


def iter_positions(t: Term) -> Iterator[tuple[Position, Term]]:
    """(position, subterm) pairs in pre-order (leftmost-outermost first)."""
    stack = [((), t)]
    while stack:
        p, s = stack.pop()
        yield p, s
        if isinstance(s, App) and s.args:
            for i in range(len(s.args) - 1, -1, -1):
                stack.append((p + (i,), s.args[i]))


def size(t: Term) -> int:
    return t.size


def is_closed(t: Term) -> bool:
    return t.ground


def variables(t: Term) -> list[str]:
    """Variable names in order of first occurrence."""
    seen = []
    for s in iter_subterms(t):
        if isinstance(s, Var) and s.name not in seen:
            seen.append(s.name)
    return seen


def is_linear(t: Term) -> bool:
    names = [s.name for s in iter_subterms(t) if isinstance(s, Var)]
    return len(names) == len(set(names))


def subterm_at(t: Term, p: Sequence[int]) -> Term:
    s = t
    for depth, i in enumerate(p):
        if not isinstance(s, App) or not 0 <= i < len(s.args):
            raise InvalidPositionError(f"position {list(p)} invalid at depth {depth}")
        s = s.args[i]
    return s


def replace_at(t: Term, p: Sequence[int], new: Term) -> Term:
    path = []
    s = t
    for depth, i in enumerate(p):
        if not isinstance(s, App) or not 0 <= i < len(s.args):
            raise InvalidPositionError(f"position {list(p)} invalid at depth {depth}")
        path.append(s)
        s = s.args[i]
    result = new
    for parent, i in zip(reversed(path), reversed(tuple(p))):
        args = parent.args
        result = App(parent.sym, args[:i] + (result,) + args[i + 1:])
    return result


def is_valid_position(t: Term, p: Sequence[int]) -> bool:
    try:
        subterm_at(t, p)
    except InvalidPositionError:
        return False
    return True


# ---------------------------------------------------------------------------
# substitution and matching

Substitution = dict  # dict[str, Term]


def substitute(pattern: Term, sigma: Mapping[str, Term]) -> Term:
    """Apply ``sigma`` to ``pattern``. Unbound variables are left in place."""
    if isinstance(pattern, Var):
        return sigma.get(pattern.name, pattern)
    if pattern.ground:
        return pattern
    return App(pattern.sym, tuple(substitute(a, sigma) for a in pattern.args))


def match(pattern: Term, subject: Term, sigma: Optional[dict] = None) -> Optional[dict]:
    """First-order matching. Returns the extended substitution or None.

    Repeated pattern variables must bind structurally equal subterms.
    """
    sigma = {} if sigma is None else sigma
    if _match(pattern, subject, sigma):
        return sigma
    return None


def _match(pat: Term, subj: Term, sigma: dict) -> bool:
    if isinstance(pat, Var):
        bound = sigma.get(pat.name)
        if bound is None:
            sigma[pat.name] = subj
            return True
        return bound == subj
    if not isinstance(subj, App) or pat.sym != subj.sym:
        return False
    for pa, sa in zip(pat.args, subj.args):
        if not _match(pa, sa, sigma):
            return False
    return True


# ---------------------------------------------------------------------------
# compiled patterns
#
# Rule sides are fixed, so each is turned once into straight-line Python:
# the matcher tests the symbols along the pattern and collects bindings,
# the builder rebuilds the right-hand side from a binding dict.

_MATCHERS: dict = {}
_BUILDERS: dict = {}


def compile_matcher(pattern: App):
    """A function ``subject -> dict | None`` equivalent to ``match(pattern, subject)``."""
    fn = _MATCHERS.get(pattern)
    if fn is not None:
        return fn
    lines = ["def m(t):", f"    if t.sym != {pattern.sym!r}: return None"]
    binds: dict = {}
    counter = [0]

    def walk(p, name):
        for i, a in enumerate(p.args):
            sub = f"a{counter[0]}"
            counter[0] += 1
            lines.append(f"    {sub} = {name}.args[{i}]")
            if isinstance(a, Var):
                if a.name in binds:
                    lines.append(f"    if not ({binds[a.name]} == {sub}): return None")
                else:
                    binds[a.name] = sub
            else:
                lines.append(f"    if {sub}.sym != {a.sym!r}: return None")
                walk(a, sub)

    walk(pattern, "t")
    lines.append("    return {" + ", ".join(f"{k!r}: {v}" for k, v in binds.items()) + "}")
    scope: dict = {}
    exec("\n".join(lines), scope)
    fn = _MATCHERS[pattern] = scope["m"]
    return fn


def compile_builder(pattern: Term):
    """A function ``sigma -> term`` equivalent to ``substitute(pattern, sigma)``
    for substitutions binding every variable of ``pattern``."""
    fn = _BUILDERS.get(pattern)
    if fn is not None:
        return fn
    consts: list = []

    def expr(p):
        if isinstance(p, Var):
            return f"s[{p.name!r}]"
        if p.ground:
            consts.append(p)
            return f"K[{len(consts) - 1}]"
        return f"App({p.sym!r}, (" + "".join(expr(a) + ", " for a in p.args) + "))"

    body = expr(pattern)
    scope = {"App": App, "K": consts}
    exec(f"def b(s):\n    return {body}", scope)
    fn = _BUILDERS[pattern] = scope["b"]
    return fn


def fold(t: Term, leaf, node):
    """Bottom-up fold without recursion.

    ``leaf(term)`` handles variables and constants; ``node(term, child_results)``
    handles applications with arguments.
    """
    results: dict[int, object] = {}
    stack = [(t, False)]
    while stack:
        s, expanded = stack.pop()
        if isinstance(s, Var) or not s.args:
            results[id(s)] = leaf(s)
            continue
        if expanded:
            results[id(s)] = node(s, [results[id(a)] for a in s.args])
            continue
        stack.append((s, True))
        for a in reversed(s.args):
            if id(a) not in results:
                stack.append((a, False))
    return results[id(t)]
