import pytest
from hypothesis import given, settings

from ddrs import App, Var, parse_term, print_term, read_ddrs
from ddrs.errors import DdrsSyntaxError, DuplicateTagError, RangeError, UnknownSymbolError
from ddrs.syntax import parse_ddrs_file
from ddrs.terms import SIGMA_FULL, SIGMA_R, SIGMA_Z, const

from .strategies import closed_terms


def test_parse_decimal_975():
    assert parse_term("(9:d7):d5") is App(":d5", (App(":d7", (const(9),)),))


def test_parse_minus_binary_1001():
    t = parse_term("-(((1:b0):b0):b1)")
    assert t.sym == "-" and print_term(t.args[0]) == "((1:b0):b0):b1"


def test_parse_variables_only_when_allowed():
    assert parse_term("x + 0", allow_vars=True) is not None
    assert parse_term("x + 0", allow_vars=True).args[0] == Var("x")
    with pytest.raises(DdrsSyntaxError):
        parse_term("x + 0")


def test_unparenthesised_append_chain_associates_left():
    assert parse_term("9:d7:d5") is parse_term("(9:d7):d5")


def test_minus_sugar():
    assert parse_term("-1") is parse_term("-(1)")
    assert parse_term("-S(0)") is App("-", (App("S", (const(0),)),))


@pytest.mark.parametrize(
    "text,printed",
    [
        ("(9:d7):d5", "(9:d7):d5"),
        ("S(0)", "S(0)"),
        ("-(S(0))", "-S(0)"),
        ("((1+1)+1)+1", "1+1+1+1"),
        ("1+(1+1)", "1+(1+1)"),
        ("(1+1)*(1+1)", "(1+1)*(1+1)"),
        ("1*1+1", "1*1+1"),
        ("-(1:b0)", "-1:b0"),
        ("(-1):b0", "(-1):b0"),
        ("(1^b0)^b1", "1^b0^b1"),
        ("1^b(0^b1)", "1^b(0^b1)"),
        ("-(1^d2)", "-(1^d2)"),
        ("(-1)^d2", "-1^d2"),
    ],
)
def test_print_minimal_parentheses(text, printed):
    assert print_term(parse_term(text)) == printed
    assert parse_term(printed) is parse_term(text)


def test_syntax_error_has_position():
    with pytest.raises(DdrsSyntaxError) as info:
        parse_term("S(0")
    assert info.value.line == 1 and info.value.column >= 1


@pytest.mark.parametrize("bad", ["", "S(", "0 +", "10", ":b0", "0:b2", "(0", "0)", "Q(0)"])
def test_rejects_malformed(bad):
    with pytest.raises((DdrsSyntaxError, UnknownSymbolError)):
        parse_term(bad)


def test_unknown_symbol_for_signature():
    with pytest.raises(UnknownSymbolError):
        parse_term("S(0)", SIGMA_R)
    with pytest.raises(UnknownSymbolError):
        parse_term("0:u0", SIGMA_Z)


@settings(max_examples=400, deadline=None)
@given(closed_terms(SIGMA_FULL, 12))
def test_print_parse_round_trip(t):
    assert parse_term(print_term(t)) is t


@settings(max_examples=200, deadline=None)
@given(closed_terms(SIGMA_FULL, 12))
def test_parse_print_is_stable(t):
    text = print_term(t)
    assert print_term(parse_term(text)) == text


# ---------------------------------------------------------------------------
# rule files


def test_concrete_rule():
    (schema,) = parse_ddrs_file("rule [b2]: S(0) -> 1\n")
    assert schema.tag == "b2" and schema.is_concrete


def test_one_index_schema():
    (schema,) = parse_ddrs_file("rule [d1.i] for i in 0..9: 0:d{i} -> {i}\n")
    assert not schema.is_concrete
    assert len(list(schema.instances())) == 10


def test_two_index_schema():
    src = "rule [b10.i.j] for i in 0..1, j in 0..1: (x:b{i}) + (y:b{j}) -> S^{j}((x+y):b{i})\n"
    (schema,) = parse_ddrs_file(src)
    assert len(list(schema.instances())) == 4


def test_file_order_and_comments():
    src = "# ddrs-format 1\n# a comment\nsystem T over SigmaR\nrule [r1]: -0 -> 0\n\nrule [r2]: -(-x) -> x\n"
    doc = read_ddrs(src)
    assert doc.name == "T" and doc.signature is SIGMA_R and doc.version == 1
    assert [s.tag for s in doc.schemas] == ["r1", "r2"]


def test_duplicate_tag():
    with pytest.raises(DuplicateTagError):
        parse_ddrs_file("rule [a]: -0 -> 0\nrule [a]: -(-x) -> x\n")


@pytest.mark.parametrize("ranges", ["i in 5..2", "i in 0..10", "i in -1..3"])
def test_range_errors(ranges):
    with pytest.raises(RangeError):
        parse_ddrs_file(f"rule [d1.i] for {ranges}: 0:d{{i}} -> {{i}}\n")


def test_rule_syntax_error_reports_line():
    with pytest.raises(DdrsSyntaxError) as info:
        parse_ddrs_file("rule [a]: -0 -> 0\nrule [b]: -0 => 0\n")
    assert info.value.line == 2
