"""Built-in rewrite systems and loading/dumping of rule files.

Each built-in is assembled from rule-table fragments shipped in
``ddrs/tables``. Integer systems reuse their natural-number fragment and
add an extension fragment; the ``-verbatim`` variants swap in the rules
exactly as printed in the source tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Optional

from .errors import DuplicateTagError, DdrsSyntaxError, SignatureMismatchError, UnknownSymbolError, UnknownSystemError
from .schema import RewriteRule, RuleSchema, expand
from .syntax import format_ddrs, read_ddrs
from .terms import SIGNATURES, App, Signature, is_linear

PROVEN, REFUTED, OPEN = "proven", "refuted", "open"


@dataclass(frozen=True)
class Claim:
    verdict: str
    citation: str = ""

    def __str__(self):
        return f"{self.verdict} ({self.citation})" if self.citation else self.verdict


@dataclass(frozen=True)
class Status:
    """Recorded meta-theory of a system; desk checks never change it."""

    termination: Claim
    confluence: Claim
    ground_confluence: Claim

    def as_dict(self) -> dict:
        return {
            "termination": {"verdict": self.termination.verdict, "citation": self.termination.citation},
            "confluence": {"verdict": self.confluence.verdict, "citation": self.confluence.citation},
            "ground-confluence": {
                "verdict": self.ground_confluence.verdict,
                "citation": self.ground_confluence.citation,
            },
        }


_KW16 = "automated proof with AProVE by Kluiving & van Woerkom (2016)"
_NO_PROOF = "no proof or counterexample is recorded for this system"

UNKNOWN_STATUS = Status(
    Claim(OPEN, "loaded from a file; nothing is recorded"),
    Claim(OPEN, "loaded from a file; nothing is recorded"),
    Claim(OPEN, "loaded from a file; nothing is recorded"),
)


@dataclass(frozen=True)
class RewriteSystem:
    name: str
    signature: Signature
    rules: tuple
    status: Status = UNKNOWN_STATUS
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        for r in self.rules:
            self.signature.check(r.lhs)
            self.signature.check(r.rhs)

    def __len__(self):
        return len(self.rules)

    def rule(self, tag: str) -> RewriteRule:
        for r in self.rules:
            if r.tag == tag:
                return r
        raise KeyError(tag)

    @property
    def tags(self) -> list[str]:
        return [r.tag for r in self.rules]

    @cached_property
    def rules_by_root(self) -> dict:
        """Rules grouped by the root symbol of their left-hand side, table order kept."""
        index: dict = {}
        for r in self.rules:
            index.setdefault(r.lhs.sym, []).append(r)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def left_linear(self) -> bool:
        return all(is_linear(r.lhs) for r in self.rules)

    @cached_property
    def inner_symbols(self) -> frozenset:
        """Symbols occurring strictly below the root of some left-hand side."""
        syms = set()
        for r in self.rules:
            stack = list(r.lhs.args)
            while stack:
                s = stack.pop()
                if isinstance(s, App):
                    syms.add(s.sym)
                    stack.extend(s.args)
        return frozenset(syms)


# ---------------------------------------------------------------------------
# built-ins


@dataclass(frozen=True)
class _Recipe:
    signature: str
    fragments: tuple
    overrides: tuple = ()
    status: Optional[Status] = None
    description: str = ""


def _st(term, conf, ground) -> Status:
    return Status(Claim(*term), Claim(*conf), Claim(*ground))


_OPEN_ALL = _st((OPEN, _NO_PROOF), (OPEN, _NO_PROOF), (OPEN, _NO_PROOF))

_RECIPES: dict[str, _Recipe] = {
    "Nubd": _Recipe(
        "SigmaN", ("nubd.ddrs",),
        status=_st(
            (OPEN, _NO_PROOF),
            (OPEN, _NO_PROOF),
            (PROVEN, "every closed term reduces to a successor numeral; the usual unary argument"),
        ),
        description="naturals, unary view; binary and decimal appends are translated away",
    ),
    "Zubd": _Recipe(
        "SigmaZ", ("zubd.ddrs",), status=_OPEN_ALL,
        description="integers, unary view (u8 corrected to 0+x -> x)",
    ),
    "Zubd-verbatim": _Recipe(
        "SigmaZ", ("zubd.ddrs",), ("zubd_u8_printed.ddrs",), status=_OPEN_ALL,
        description="integers, unary view with u8 as printed (0+x -> 0, unsound)",
    ),
    "Nu1": _Recipe(
        "SigmaNu1", ("nu1.ddrs",),
        status=_st(
            (PROVEN, "a weight function decreases on every rule"),
            (OPEN, _NO_PROOF),
            (PROVEN, "normal forms are exactly 0 followed by :u0 appends"),
        ),
        description="naturals with zero and the unary append",
    ),
    "Zu1": _Recipe(
        "SigmaZu1", ("nu1.ddrs", "zu1_ext.ddrs"), status=_OPEN_ALL,
        description="integers with zero, minus and the unary append",
    ),
    "Nbud": _Recipe(
        "SigmaN", ("nbud.ddrs",),
        status=_st(
            (PROVEN, _KW16),
            (OPEN, _NO_PROOF),
            (PROVEN, "normal-form case analysis, as for the binary integers"),
        ),
        description="naturals, binary view",
    ),
    "Zbud": _Recipe(
        "SigmaZ", ("nbud.ddrs", "zbud_ext.ddrs"),
        status=_st(
            (PROVEN, _KW16),
            (REFUTED, "the open peak P(-(-x)) via b17 and b22 is not joinable"),
            (PROVEN, "every closed term is a normal-form grammar member or has a rewrite step"),
        ),
        description="integers, binary view",
    ),
    "Ndub": _Recipe(
        "SigmaN", ("ndub.ddrs",),
        status=_st(
            (PROVEN, _KW16),
            (OPEN, _NO_PROOF),
            (PROVEN, "normal-form case analysis, as for the binary view"),
        ),
        description="naturals, decimal view",
    ),
    "Zdub": _Recipe(
        "SigmaZ", ("ndub.ddrs", "zdub_ext.ddrs"),
        status=_st(
            (PROVEN, _KW16),
            (REFUTED, "the open peak P(-(-x)) via d16 and d21 is not joinable"),
            (OPEN, "left as an open question; no ground-confluence proof is known"),
        ),
        description="integers, decimal view (d26 at digit 0 pushes the minus out)",
    ),
    "Zdub-verbatim": _Recipe(
        "SigmaZ", ("ndub.ddrs", "zdub_ext.ddrs"), ("zdub_d26_printed.ddrs",), status=_OPEN_ALL,
        description="integers, decimal view with d26 over the printed range 0..9",
    ),
    "Nut": _Recipe(
        "SigmaNut", ("nut.ddrs",), status=_OPEN_ALL,
        description="naturals with the unary tree constructor",
    ),
    "Zut": _Recipe(
        "SigmaZut", ("nut.ddrs", "zut_ext.ddrs"), status=_OPEN_ALL,
        description="integers with the unary tree constructor",
    ),
    "Nbt": _Recipe(
        "SigmaNbt", ("nbt.ddrs",),
        status=_st(
            (PROVEN, _KW16),
            (REFUTED, "an open peak of the tree-reassociation rule is not joinable"),
            (PROVEN, "normal forms are digits and left-nonzero trees with a digit on the right"),
        ),
        description="naturals with the binary tree constructor",
    ),
    "Zbi": _Recipe(
        "SigmaZbi", ("zbi.ddrs",),
        status=_st(
            (PROVEN, _KW16),
            (REFUTED, "the open peak x^b(y^b(z^b w)) via two bi2 steps is not joinable (found with CSI)"),
            (OPEN, _NO_PROOF),
        ),
        description="integers with the binary tree constructor",
    ),
    "Ndt": _Recipe(
        "SigmaNdt", ("ndt.ddrs",),
        status=_st(
            (PROVEN, _KW16),
            (REFUTED, "an open peak of the tree-reassociation rule is not joinable"),
            (OPEN, _NO_PROOF),
        ),
        description="naturals with the decimal tree constructor",
    ),
    "Zdt": _Recipe(
        "SigmaZdt", ("ndt.ddrs", "zdt_ext.ddrs"),
        status=_st(
            (OPEN, "strong termination is an open question for this system"),
            (REFUTED, "inherits the non-joinable tree-reassociation peak"),
            (OPEN, _NO_PROOF),
        ),
        description="integers with the decimal tree constructor",
    ),
    "RingZ": _Recipe(
        "SigmaR", ("ringz.ddrs",),
        status=_st(
            (PROVEN, "automated proof (AProVE); a rational weight function also decreases on every rule"),
            (OPEN, _NO_PROOF),
            (PROVEN, "every closed term is in the left-nested numeral grammar or has a rewrite step"),
        ),
        description="the ring of integers over 0, 1, -, + and *",
    ),
}

BUILTIN_NAMES: tuple[str, ...] = tuple(_RECIPES)

# concrete-rule totals stated alongside the source tables
EXPECTED_RULE_COUNTS = {"Zbud": 60, "Ndub": 172, "Zdub": 445, "RingZ": 15}

# one built-in per source rule table; the integer tables extend their natural-number table
TABLE_MANIFEST = {
    "unary naturals with binary and decimal appends": "Nubd",
    "unary integers with binary and decimal appends": "Zubd",
    "naturals with the unary append": "Nu1",
    "integers with the unary append": "Zu1",
    "binary naturals with unary and decimal translation": "Nbud",
    "binary integers with unary and decimal translation": "Zbud",
    "decimal naturals with unary and binary translation": "Ndub",
    "decimal integers with unary and binary translation": "Zdub",
    "naturals with the unary tree constructor": "Nut",
    "integers with the unary tree constructor": "Zut",
    "naturals with the binary tree constructor": "Nbt",
    "integers with the binary tree constructor": "Zbi",
    "naturals with the decimal tree constructor": "Ndt",
    "integers with the decimal tree constructor": "Zdt",
    "the ring of integers": "RingZ",
}


def _fragment_text(filename: str) -> str:
    return resources.files("ddrs").joinpath("tables", filename).read_text(encoding="utf-8")


def _family(tag: str) -> str:
    return tag.split(".")[0]


def _compose(recipe: _Recipe) -> list[RuleSchema]:
    schemas: list[RuleSchema] = []
    for frag in recipe.fragments:
        schemas.extend(read_ddrs(_fragment_text(frag)).schemas)
    for frag in recipe.overrides:
        for new in read_ddrs(_fragment_text(frag)).schemas:
            fam = _family(new.tag)
            hits = [k for k, s in enumerate(schemas) if _family(s.tag) == fam]
            if not hits:
                raise KeyError(f"override {new.tag} replaces nothing")
            schemas[hits[0]] = new
            for k in reversed(hits[1:]):
                del schemas[k]
    return schemas


def _expand_all(schemas, source) -> list[RewriteRule]:
    rules = []
    seen = set()
    for s in schemas:
        for r in expand(s, source):
            if r.tag in seen:
                raise DuplicateTagError(f"rule tag {r.tag} occurs twice after expansion")
            seen.add(r.tag)
            rules.append(r)
    return rules


_CACHE: dict[str, RewriteSystem] = {}


def builtin(name: str) -> RewriteSystem:
    """The fully expanded built-in system called ``name``."""
    if name in _CACHE:
        return _CACHE[name]
    try:
        recipe = _RECIPES[name]
    except KeyError:
        raise UnknownSystemError(
            f"unknown system {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}"
        ) from None
    rules = _expand_all(_compose(recipe), name)
    system = RewriteSystem(name, SIGNATURES[recipe.signature], rules, recipe.status, "builtin")
    _CACHE[name] = system
    return system


def describe(name: str) -> str:
    try:
        return _RECIPES[name].description
    except KeyError:
        raise UnknownSystemError(f"unknown system {name!r}") from None


def load_system(src: str, source: str = "file") -> RewriteSystem:
    """Parse, expand and signature-check a rule file. The status is all open."""
    try:
        doc = read_ddrs(src)
    except UnknownSymbolError as exc:
        raise SignatureMismatchError(str(exc)) from None
    if doc.name is None:
        raise DdrsSyntaxError("missing header 'system NAME over SIGNATURE'", 1, 1)
    rules = _expand_all(doc.schemas, doc.name)
    return RewriteSystem(doc.name, doc.signature, rules, UNKNOWN_STATUS, source)


def dump_system(system: RewriteSystem) -> str:
    """Rule-file text of ``system`` with every schema expanded; byte-stable."""
    return format_ddrs(system.name, system.signature, system.rules)


def with_rules(system: RewriteSystem, rules, name: Optional[str] = None) -> RewriteSystem:
    """A scratch copy of ``system`` with a different rule list and open status."""
    return RewriteSystem(name or system.name + "*", system.signature, tuple(rules), UNKNOWN_STATUS, "scratch")
