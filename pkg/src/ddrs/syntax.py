"""Concrete syntax for terms and for rule files.

Term grammar, tightest binding first::

    postfix appends   t:b0  t:b1  t:u0  t:d0 .. t:d9    (chains associate left)
    prefix            -t   (S(t), P(t) always take parentheses)
    tree constructors t^u t  t^b t  t^d t                 (left associative)
    product           t*t                                (left associative)
    sum               t+t                                (left associative)

Rule files are line oriented::

    # ddrs-format 1
    system Zbud over SigmaZ
    rule [b2]: S(0) -> 1
    rule [b10.i.j] for i in 0..1, j in 0..1: (x:b{i}) + (y:b{j}) -> S^{j}((x+y):b{i})
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DdrsSyntaxError, DuplicateTagError, RangeError, UnknownSymbolError
from .schema import RewriteRule, RuleSchema, find_meta, is_meta_symbol, meta_index_names
from .terms import (
    SIGMA_FULL,
    SIGNATURES,
    SYMBOLS,
    VARIABLE_NAMES,
    App,
    Signature,
    Term,
    Var,
    app,
    fold,
    iter_subterms,
)

FORMAT_VERSION = 1

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<append>:[bdu](?:\d|\{[a-z]['*]?\}))
  | (?P<tree>\^[ubd])
  | (?P<iter>[SP]\^\{[a-z]\})
  | (?P<meta>\{[a-z]['*]?\})
  | (?P<digit>\d)
  | (?P<name>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<punct>[-+*()])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str, line: int = 1, col0: int = 1) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise DdrsSyntaxError(f"unexpected character {src[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), line, col0 + pos))
        pos = m.end()
    tokens.append(_Token("eof", "", line, col0 + pos))
    return tokens


class _Parser:
    def __init__(self, tokens, allow_vars, meta_names):
        self.tokens = tokens
        self.i = 0
        self.allow_vars = allow_vars
        self.meta_names = meta_names

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return DdrsSyntaxError(msg, tok.line, tok.col)

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self) -> Term:
        t = self.sum()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return t

    def sum(self):
        t = self.product()
        while self.tok.text == "+":
            self.advance()
            t = App("+", (t, self.product()))
        return t

    def product(self):
        t = self.tree()
        while self.tok.text == "*":
            self.advance()
            t = App("*", (t, self.tree()))
        return t

    def tree(self):
        t = self.prefix()
        while self.tok.kind == "tree":
            sym = self.advance().text
            t = App(sym, (t, self.prefix()))
        return t

    def prefix(self):
        if self.tok.text == "-":
            self.advance()
            return App("-", (self.prefix(),))
        return self.postfix()

    def postfix(self):
        t = self.atom()
        while self.tok.kind == "append":
            tok = self.advance()
            self.check_meta(tok)
            t = App(tok.text, (t,))
        return t

    def check_meta(self, tok):
        m = re.search(r"\{([a-z])", tok.text)
        if m is None:
            return
        if m.group(1) not in self.meta_names:
            raise self.error(f"meta-digit index {m.group(1)!r} is not bound", tok)

    def atom(self):
        tok = self.tok
        if tok.kind == "digit":
            self.advance()
            return app(tok.text)
        if tok.kind == "meta":
            self.advance()
            self.check_meta(tok)
            return App(tok.text)
        if tok.kind == "iter":
            self.advance()
            self.check_meta(tok)
            return App(tok.text, (self.parenthesised(),))
        if tok.kind == "name":
            if tok.text in ("S", "P"):
                self.advance()
                return App(tok.text, (self.parenthesised(),))
            if tok.text in VARIABLE_NAMES:
                if not self.allow_vars:
                    raise self.error(f"variable {tok.text!r} not allowed here")
                self.advance()
                return Var(tok.text)
            raise UnknownSymbolError(f"{tok.line}:{tok.col}: unknown symbol {tok.text!r}")
        if tok.text == "(":
            return self.parenthesised()
        found = tok.text or "end of input"
        raise self.error(f"expected a term, found {found!r}")

    def parenthesised(self):
        self.expect("(")
        t = self.sum()
        self.expect(")")
        return t


def _check_signature(t: Term, sig: Signature) -> None:
    for s in iter_subterms(t):
        if not isinstance(s, App):
            continue
        sym = s.sym
        if is_meta_symbol(sym):
            if sym.startswith(":"):
                fam = sym[:2]
                if not any(x.startswith(fam) for x in sig.symbols):
                    raise UnknownSymbolError(f"no {fam} appends in signature {sig.name}")
            elif sym[0] in "SP" and sym[0] not in sig:
                raise UnknownSymbolError(f"symbol {sym[0]!r} not in signature {sig.name}")
            continue
        if sym not in sig:
            raise UnknownSymbolError(f"symbol {sym!r} not in signature {sig.name}")


def parse_term(
    src: str,
    sig: Signature = SIGMA_FULL,
    *,
    allow_vars: bool = False,
    meta: Iterable[str] = (),
    line: int = 1,
    column: int = 1,
) -> Term:
    """Parse ``src`` into a term whose symbols all belong to ``sig``."""
    tokens = _tokenize(src, line, column)
    t = _Parser(tokens, allow_vars, set(meta)).parse()
    _check_signature(t, sig)
    return t


# ---------------------------------------------------------------------------
# printing

_SUM, _PROD, _TREE, _PREFIX, _POSTFIX, _ATOM = range(1, 7)


def _leaf(t):
    if isinstance(t, Var):
        return t.name, _ATOM
    return t.sym, _ATOM


def _wrap(child, min_level):
    text, level = child
    return text if level >= min_level else f"({text})"


def _node(t, kids):
    sym = t.sym
    if sym in ("S", "P") or sym[1:3] == "^{":
        return f"{sym}({kids[0][0]})", _ATOM
    if sym == "-":
        return "-" + _wrap(kids[0], _PREFIX), _PREFIX
    if sym[0] == ":":
        # nested appends keep their parentheses: (9:d7):d5
        return _wrap(kids[0], _ATOM) + sym, _POSTFIX
    if sym[0] == "^":
        return _wrap(kids[0], _TREE) + sym + _wrap(kids[1], _PREFIX), _TREE
    if sym == "*":
        return _wrap(kids[0], _PROD) + "*" + _wrap(kids[1], _TREE), _PROD
    if sym == "+":
        return _wrap(kids[0], _SUM) + "+" + _wrap(kids[1], _PROD), _SUM
    raise ValueError(f"cannot print symbol {sym!r}")


def print_term(t: Term) -> str:
    """Canonical text of ``t``; ``parse_term(print_term(t)) == t``."""
    return fold(t, _leaf, _node)[0]


# ---------------------------------------------------------------------------
# rule files


@dataclass
class DdrsDocument:
    name: Optional[str]
    signature: Optional[Signature]
    schemas: list = field(default_factory=list)
    version: Optional[int] = None


_HEADER = re.compile(r"system\s+(?P<name>\S+)\s+over\s+(?P<sig>\S+)\s*$")
_RULE = re.compile(
    r"rule\s*\[(?P<tag>[^\]\s]+)\]\s*(?:for\s+(?P<ranges>[^:]*?))?\s*:(?P<body>.*)$"
)
_RANGE = re.compile(r"\s*(?P<name>[a-z])\s+in\s+(?P<lo>-?\d+)\s*\.\.\s*(?P<hi>-?\d+)\s*$")
_VERSION = re.compile(r"#\s*ddrs-format\s+(?P<v>\d+)\s*$")


def _parse_ranges(text, lineno, col):
    ranges = []
    for part in text.split(","):
        m = _RANGE.match(part)
        if m is None:
            raise DdrsSyntaxError(f"bad index range {part.strip()!r}", lineno, col)
        lo, hi = int(m.group("lo")), int(m.group("hi"))
        if not (0 <= lo <= 9 and 0 <= hi <= 9) or lo > hi:
            raise RangeError(f"line {lineno}: range {lo}..{hi} invalid for index {m.group('name')}")
        ranges.append((m.group("name"), lo, hi))
    return tuple(ranges)


def _split_tag(tag, ranges):
    """Strip a trailing ``.i.j`` naming the indices, if present."""
    names = [n for n, _, _ in ranges]
    parts = tag.split(".")
    if names and len(parts) > len(names) and parts[-len(names):] == names:
        return ".".join(parts[: -len(names)])
    return tag


def read_ddrs(src: str) -> DdrsDocument:
    """Parse a rule file, header included (the header is optional here)."""
    doc = DdrsDocument(None, None)
    sig = SIGMA_FULL
    seen_tags = set()
    first = True
    for lineno, raw in enumerate(src.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _VERSION.match(line)
            if m and first:
                doc.version = int(m.group("v"))
                if doc.version != FORMAT_VERSION:
                    raise DdrsSyntaxError(f"unsupported ddrs-format {doc.version}", lineno, 1)
            first = False
            continue
        first = False
        indent = len(raw) - len(raw.lstrip())
        if line.startswith("system"):
            m = _HEADER.match(line)
            if m is None:
                raise DdrsSyntaxError("malformed header, expected 'system NAME over SIGNATURE'", lineno, 1)
            if doc.name is not None or doc.schemas:
                raise DdrsSyntaxError("header must precede all rules and appear once", lineno, 1)
            try:
                sig = SIGNATURES[m.group("sig")]
            except KeyError:
                raise UnknownSymbolError(f"line {lineno}: unknown signature {m.group('sig')!r}") from None
            doc.name = m.group("name")
            doc.signature = sig
            continue
        m = _RULE.match(line)
        if m is None:
            raise DdrsSyntaxError("expected a comment, header or rule", lineno, indent + 1)
        ranges = _parse_ranges(m.group("ranges"), lineno, indent + 1) if m.group("ranges") else ()
        tag_text = m.group("tag")
        if tag_text in seen_tags:
            raise DuplicateTagError(f"line {lineno}: duplicate tag [{tag_text}]")
        seen_tags.add(tag_text)
        base = _split_tag(tag_text, ranges)
        body = m.group("body")
        body_col = indent + m.start("body") + 1
        if "->" not in body:
            raise DdrsSyntaxError("rule body needs '->'", lineno, body_col)
        arrow = body.index("->")
        names = [n for n, _, _ in ranges]
        lhs = parse_term(body[:arrow], sig, allow_vars=True, meta=names, line=lineno, column=body_col)
        rhs = parse_term(
            body[arrow + 2:], sig, allow_vars=True, meta=names, line=lineno, column=body_col + arrow + 2
        )
        unused = set(names) - meta_index_names(lhs) - meta_index_names(rhs)
        if unused:
            raise DdrsSyntaxError(f"index {sorted(unused)} is never used", lineno, body_col)
        doc.schemas.append(RuleSchema(base, lhs, rhs, ranges))
    return doc


def parse_ddrs_file(src: str) -> list[RuleSchema]:
    """Rule schemata of a rule file, in file order."""
    return read_ddrs(src).schemas


def format_rule(rule: RewriteRule) -> str:
    return f"rule [{rule.tag}]: {print_term(rule.lhs)} -> {print_term(rule.rhs)}"


def format_schema(schema: RuleSchema) -> str:
    from .schema import schema_tag

    if schema.is_concrete:
        head = f"rule [{schema.tag}]"
    else:
        ranges = ", ".join(f"{n} in {lo}..{hi}" for n, lo, hi in schema.indices)
        head = f"rule [{schema_tag(schema)}] for {ranges}"
    return f"{head}: {print_term(schema.lhs)} -> {print_term(schema.rhs)}"


def format_ddrs(name: str, sig: Signature, rules: Iterable[RewriteRule]) -> str:
    lines = [f"# ddrs-format {FORMAT_VERSION}", f"system {name} over {sig.name}"]
    lines.extend(format_rule(r) for r in rules)
    return "\n".join(lines) + "\n"


__all__ = [
    "parse_term",
    "print_term",
    "parse_ddrs_file",
    "read_ddrs",
    "format_rule",
    "format_schema",
    "format_ddrs",
    "DdrsDocument",
    "FORMAT_VERSION",
    "find_meta",
    "SYMBOLS",
]
