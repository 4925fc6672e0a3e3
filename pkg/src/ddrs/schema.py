"""Rule schemata with digit indices, and their expansion to concrete rules.

Schema bodies are ordinary terms that may contain meta-symbols:

* ``{i}``, ``{i'}``, ``{i*}`` -- a digit constant, its successor, its "10 minus" digit
* ``:b{i}``, ``:d{i'}``, ... -- an append whose digit is computed the same way
* ``S^{j}``, ``P^{j}`` -- ``j`` nested applications of S or P (zero means none)
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional

from .errors import MetaDigitError, RangeError, RuleError
from .terms import App, Term, Var, app, iter_subterms, variables


def succ_digit(i: int) -> int:
    if not 0 <= i <= 8:
        raise MetaDigitError(f"{i}' is undefined (successor digits exist for 0..8)")
    return i + 1


def star_digit(i: int) -> int:
    if not 1 <= i <= 9:
        raise MetaDigitError(f"{i}* is undefined (\"10 minus\" digits exist for 1..9)")
    return 10 - i


_META_DIGIT = re.compile(r"\{([a-z])(['*]?)\}")


def resolve_meta_digit(text: str, env: dict) -> int:
    m = _META_DIGIT.fullmatch(text)
    if m is None:
        raise ValueError(f"not a meta digit: {text!r}")
    name, op = m.groups()
    value = env[name]
    if op == "'":
        return succ_digit(value)
    if op == "*":
        return star_digit(value)
    return value


def is_meta_symbol(sym: str) -> bool:
    return "{" in sym


@dataclass(frozen=True)
class RewriteRule:
    tag: str
    lhs: Term
    rhs: Term
    source: str = ""

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise RuleError(f"[{self.tag}]: left-hand side is a variable (lhs-is-variable)")
        extra = set(variables(self.rhs)) - set(variables(self.lhs))
        if extra:
            raise RuleError(f"[{self.tag}]: right-hand side variables {sorted(extra)} not on the left")

    def __repr__(self):
        from .syntax import print_term

        return f"[{self.tag}] {print_term(self.lhs)} -> {print_term(self.rhs)}"


@dataclass(frozen=True)
class RuleSchema:
    """A parametric equation; ``indices`` holds up to two ``(name, lo, hi)`` ranges."""

    tag: str
    lhs: Term
    rhs: Term
    indices: tuple = ()

    def __post_init__(self):
        if len(self.indices) > 2:
            raise RangeError(f"[{self.tag}]: at most two digit indices are supported")
        names = [n for n, _, _ in self.indices]
        if len(set(names)) != len(names):
            raise RangeError(f"[{self.tag}]: repeated index name")
        for name, lo, hi in self.indices:
            if not (0 <= lo <= 9 and 0 <= hi <= 9):
                raise RangeError(f"[{self.tag}]: range {lo}..{hi} for {name} outside 0..9")
            if lo > hi:
                raise RangeError(f"[{self.tag}]: empty range {lo}..{hi} for {name}")

    @property
    def is_concrete(self) -> bool:
        return not self.indices

    def instances(self):
        """Index environments in expansion order (first index outermost)."""
        ranges = [[(n, v) for v in range(lo, hi + 1)] for n, lo, hi in self.indices]
        for combo in itertools.product(*ranges):
            yield dict(combo)


def instantiate(t: Term, env: dict) -> Term:
    """Resolve every meta-symbol in ``t`` under the digit environment ``env``."""
    if isinstance(t, Var) or not any(
        isinstance(s, App) and is_meta_symbol(s.sym) for s in iter_subterms(t)
    ):
        return t
    args = tuple(instantiate(a, env) for a in t.args)
    sym = t.sym
    if not is_meta_symbol(sym):
        return App(sym, args)
    if sym.startswith("{"):
        return app(str(resolve_meta_digit(sym, env)))
    if sym[0] == ":":
        return App(f"{sym[:2]}{resolve_meta_digit(sym[2:], env)}", args)
    if sym[0] in "SP" and sym[1:3] == "^{":
        name = sym[3:-1]
        result = args[0]
        for _ in range(env[name]):
            result = App(sym[0], (result,))
        return result
    raise ValueError(f"unknown meta symbol {sym!r}")


def expand(schema: RuleSchema, source: str = "") -> list[RewriteRule]:
    """One concrete rule per index tuple, tagged ``<tag>.<i>[.<j>]``."""
    if schema.is_concrete:
        return [RewriteRule(schema.tag, schema.lhs, schema.rhs, source)]
    rules = []
    for env in schema.instances():
        suffix = ".".join(str(env[n]) for n, _, _ in schema.indices)
        tag = f"{schema.tag}.{suffix}"
        try:
            lhs = instantiate(schema.lhs, env)
            rhs = instantiate(schema.rhs, env)
        except MetaDigitError as exc:
            raise MetaDigitError(f"[{tag}]: {exc}") from None
        rules.append(RewriteRule(tag, lhs, rhs, source))
    return rules


def schema_tag(schema: RuleSchema) -> str:
    """The tag as written in files, e.g. ``b10.i.j``."""
    if schema.is_concrete:
        return schema.tag
    return ".".join([schema.tag] + [n for n, _, _ in schema.indices])


def meta_index_names(t: Term) -> set:
    names = set()
    for s in iter_subterms(t):
        if isinstance(s, App) and is_meta_symbol(s.sym):
            m = re.search(r"\{([a-z])", s.sym)
            names.add(m.group(1))
    return names


def find_meta(t: Term) -> Optional[str]:
    for s in iter_subterms(t):
        if isinstance(s, App) and is_meta_symbol(s.sym):
            return s.sym
    return None
