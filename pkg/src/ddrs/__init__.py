"""Term rewriting for numeral datatypes: built-in rule tables for naturals and
integers in unary, binary and decimal notation, a normalizer, and checks of
soundness, ground confluence and termination weights."""

from .analysis import (
    RING_WEIGHTS,
    GroundCheckReport,
    NormalFormGrammar,
    WeightFunction,
    check_ground_confluence,
    check_term,
    check_weight_certificate,
    count_closed,
    enumerate_closed,
    grammar_for,
    status_report,
    uniqueness_certificate,
    weights_for,
    with_divergent_addition,
)
from .catalog import BUILTIN_NAMES, RewriteSystem, builtin, dump_system, load_system, with_rules
from .engine import (
    INNERMOST,
    OUTERMOST,
    DerivationTrace,
    Normalizer,
    Strategy,
    all_normal_forms,
    find_redexes,
    normal_form,
    normalize,
    one_step_reducts,
    replay,
    step,
)
from .errors import DdrsError
from .schema import RewriteRule, RuleSchema, expand
from .semantics import check_rule_soundness, check_system_soundness, evaluate, symbolically_sound
from .syntax import parse_term, print_term, read_ddrs
from .terms import App, Signature, Term, Var

__version__ = "0.1.0"

__all__ = [
    "App", "Var", "Term", "Signature",
    "parse_term", "print_term", "read_ddrs",
    "RewriteRule", "RuleSchema", "expand",
    "RewriteSystem", "BUILTIN_NAMES", "builtin", "load_system", "dump_system", "with_rules",
    "Strategy", "INNERMOST", "OUTERMOST", "DerivationTrace", "normalize", "step", "replay",
    "Normalizer", "normal_form", "find_redexes", "one_step_reducts", "all_normal_forms",
    "evaluate", "check_rule_soundness", "check_system_soundness", "symbolically_sound",
    "NormalFormGrammar", "grammar_for", "count_closed", "enumerate_closed",
    "GroundCheckReport", "check_term", "check_ground_confluence", "uniqueness_certificate",
    "WeightFunction", "RING_WEIGHTS", "weights_for", "check_weight_certificate",
    "with_divergent_addition", "status_report",
    "DdrsError",
]
