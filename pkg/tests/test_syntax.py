import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stref.errors import LexError, ParseError, UnsupportedFeature
from stref.syntax import ast as A
from stref.syntax import parse_expression, parse_source, pretty_print, tokenize

from conftest import PROGRAMS, TRIGGERS


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)][:-1]


def test_smallest_assignment_tokens():
    assert kinds("a := 1;") == [("identifier", "a"), ("operator", ":="), ("int", "1"), ("punctuation", ";")]


def test_stream_ends_with_sentinel():
    assert tokenize("")[-1].kind == "eof"


@pytest.mark.parametrize(
    "text",
    ["TOD#23:45:56.30", "T#1h2m3s", "D#2024-02-29", "DT#2023-12-31-23:59:59", "INT#-5", "16#FF", "2#1010", "8#777",
     "TIME_OF_DAY#01:02:03", "LREAL#2.5", "BYTE#16#7F"],
)
def test_typed_literal_is_one_token(text):
    toks = tokenize(text)
    assert len(toks) == 2 and toks[0].text == text


def test_comments_are_dropped():
    assert kinds("(* x *) b") == [("identifier", "b")]
    assert kinds("b // trailing\n") == [("identifier", "b")]
    assert kinds("(* a (* nested-looking *) b") == [("identifier", "b")]


@pytest.mark.parametrize("src", ["'abc", "(* open", "a ? b", '"wide'])
def test_lex_errors(src):
    with pytest.raises(LexError):
        tokenize(src)


def test_crlf_lines():
    toks = tokenize("a\r\nb")
    assert [(t.text, t.line) for t in toks[:2]] == [("a", 1), ("b", 2)]


def test_minimal_program():
    unit = parse_source("PROGRAM MAIN VAR a:INT; END_VAR a:=1; END_PROGRAM")
    (prog,) = unit.pous
    assert isinstance(prog, A.ProgramDecl)
    assert len(prog.sections) == 1 and len(prog.body) == 1
    assert isinstance(prog.body[0], A.Assign)


def test_function_return_type():
    unit = parse_source("FUNCTION F : INT VAR_INPUT x:INT; END_VAR F := x; END_FUNCTION")
    (fn,) = unit.pous
    assert isinstance(fn, A.FunctionDecl)
    assert fn.return_type == A.NamedType("INT")


def test_malformed_rhs_reports_the_semicolon():
    with pytest.raises(ParseError) as err:
        parse_source("PROGRAM P a:=; END_PROGRAM")
    assert (err.value.line, err.value.column) == (1, 14)


@pytest.mark.parametrize(
    "src",
    [
        "PROGRAM P VAR x AT %IX0.0 : BOOL; END_VAR END_PROGRAM",
        "PROGRAM P VAR RETAIN x : INT; END_VAR END_PROGRAM",
        "PROGRAM P VAR PERSISTENT x : INT; END_VAR END_PROGRAM",
        "PROGRAM P fb(q => x); END_PROGRAM",
    ],
)
def test_out_of_scope_features(src):
    with pytest.raises(UnsupportedFeature):
        parse_source(src)


def test_lowercase_keywords_rejected():
    with pytest.raises(ParseError):
        parse_source("program P end_program")


def shape(e):
    """Compact nested tuple view of an expression."""
    if isinstance(e, A.BinOp):
        return (e.op, shape(e.lhs), shape(e.rhs))
    if isinstance(e, A.UnaryOp):
        return (e.op, shape(e.operand))
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Literal):
        return e.text
    if isinstance(e, A.Paren):
        return shape(e.inner)
    if isinstance(e, A.Index):
        return ("[]", shape(e.base), tuple(shape(i) for i in e.indices))
    raise AssertionError(e)


@pytest.mark.parametrize(
    "src,expected",
    [
        ("a + b * c", ("+", "a", ("*", "b", "c"))),
        ("a AND b OR c", ("OR", ("AND", "a", "b"), "c")),
        ("a - b - c", ("-", ("-", "a", "b"), "c")),
        ("2 ** 3 ** 2", ("**", ("**", "2", "3"), "2")),
        ("-a ** b", ("**", ("-", "a"), "b")),
        ("NOT a = b", ("=", ("NOT", "a"), "b")),
        ("a & b XOR c", ("XOR", ("&", "a", "b"), "c")),
        ("a OR_ELSE b AND_THEN c", ("OR_ELSE", "a", ("AND_THEN", "b", "c"))),
        ("a < b + 1", ("<", "a", ("+", "b", "1"))),
        ("x MOD 3 * 2", ("*", ("MOD", "x", "3"), "2")),
        ("A[3,5,7]", ("[]", "A", ("3", "5", "7"))),
    ],
)
def test_precedence(src, expected):
    assert shape(parse_expression(src)) == expected


def test_print_contains_assignment():
    unit = parse_source("PROGRAM P VAR a:INT; END_VAR a:=1; END_PROGRAM")
    assert "a := 1;" in pretty_print(unit)


def test_print_case_range_label():
    unit = parse_source("PROGRAM P VAR a:INT; END_VAR CASE a OF 1..10: a := 2; END_CASE; END_PROGRAM")
    assert "1 .. 10 :" in pretty_print(unit)


@pytest.mark.parametrize("path", PROGRAMS + TRIGGERS, ids=lambda p: p.stem)
def test_corpus_round_trip(path):
    unit = parse_source(path.read_text())
    printed = pretty_print(unit)
    assert parse_source(printed) == unit
    assert pretty_print(parse_source(printed)) == printed


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_token_positions_increase(path):
    toks = tokenize(path.read_text())[:-1]
    pos = [(t.line, t.column) for t in toks]
    assert all(a < b for a, b in zip(pos, pos[1:]))


def test_nodes_keep_statement_lines():
    unit = parse_source("PROGRAM P\nVAR a : INT; END_VAR\na := 1;\n\nIF a > 0 THEN\n  a := 2;\nEND_IF;\nEND_PROGRAM")
    body = unit.pous[0].body
    assert [s.line for s in body] == [3, 5]
    assert body[1].then[0].line == 6


NAMES = st.sampled_from(["a", "b", "c", "x1"])
LEAVES = NAMES | st.integers(0, 999).map(str)
OPS = st.sampled_from(["+", "-", "*", "/", "MOD", "**", "AND", "OR", "XOR", "<", "<=", "=", "<>", "AND_THEN", "OR_ELSE"])
EXPRS = st.recursive(
    LEAVES,
    lambda inner: st.one_of(
        st.tuples(inner, OPS, inner).map(lambda t: f"{t[0]} {t[1]} {t[2]}"),
        inner.map(lambda s: f"({s})"),
        inner.map(lambda s: f"NOT {s}"),
        inner.map(lambda s: f"-{s}" if not s.startswith("-") else f"-({s})"),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(EXPRS)
def test_random_expression_round_trip(src):
    unit = parse_source(f"PROGRAM P VAR a, b, c, x1 : INT; END_VAR a := {src}; END_PROGRAM")
    assert parse_source(pretty_print(unit)) == unit
