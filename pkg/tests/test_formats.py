import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from bipglue.compile import compile_layered, compile_relaxed, random_lts
from bipglue.formats import (FormatValidationError, ParseError, dump_expression, dump_glue,
                             dump_lts, dump_operator, parse_expression, parse_glue,
                             parse_glue_file, parse_lts, parse_operator)
from bipglue.generators import random_glue, random_operator
from bipglue.glue import MODES, Node, Var

from conftest import I

seeds = st.integers(min_value=0, max_value=10 ** 6)

LTS_TEXT = """\
# two states
lts B1
ports p q
states 1 2
trans 1 p,q 2   # joint move
trans 2 p 2
"""


def test_parse_lts():
    b = parse_lts(LTS_TEXT)
    assert b.name == "B1" and b.ports == {"p", "q"} and b.states == {"1", "2"}
    assert b.transitions == {("1", I("p,q"), "2"), ("2", I("p"), "2")}
    assert dump_lts(b) == "lts B1\nports p q\nstates 1 2\ntrans 1 p,q 2\ntrans 2 p 2\n"


def test_dump_renders_product_states(ex1_glue, b1, b2):
    from bipglue.glue import apply_glue
    text = dump_lts(apply_glue(ex1_glue, [b1, b2]))
    assert "trans 2.2 q 3.2" in text and "trans 2.1 q 3.1" not in text
    assert dump_lts(parse_lts(text)) == text


@pytest.mark.parametrize("text, exc, line, col", [
    ("lts B\nports p\nstates 1\ntrans 1 p 2\n", FormatValidationError, 4, 11),
    ("lts B\nports p\nstates 1\ntrans 1 z 1\n", FormatValidationError, 4, 9),
    ("lts B\nports p\nstates 1\ntrans 1 p\n", ParseError, 4, 9),
    ("lts B\nports p\nstates 1\nfoo 1\n", ParseError, 4, 1),
    ("lts B\nports p!\n", ParseError, 2, 7),
    ("lts B\nports p\nstates 1\ntrans 1 p,,q 1\n", ParseError, 4, 9),
])
def test_lts_errors(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse_lts(text, "b.lts")
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"b.lts:{line}:{col}: ")


def test_parse_glue(ex1_glue):
    text = ("glue ex1\ncomponent 1 ports p q\ncomponent 2 ports r\n"
            "interactions p; q; r; q,r\npriority q < r\n")
    assert parse_glue(text) == ex1_glue
    assert parse_glue(dump_glue(ex1_glue)) == ex1_glue


@pytest.mark.parametrize("text, exc", [
    ("glue G\ncomponent 1 ports p\nmode fuzzy\n", ParseError),
    ("glue G\ncomponent 2 ports p\n", FormatValidationError),
    ("glue G\ncomponent 1 ports p\ncomponent 1 ports q\n", FormatValidationError),
    ("glue G\ncomponent 1 ports p\npriority p r\n", ParseError),
    ("glue G\ncomponent 1 ports p\ninteractions p q\n", ParseError),
    ("glue G\ncomponent 1 ports p\nglue G\ncomponent 1 ports p\n", FormatValidationError),
])
def test_glue_errors(text, exc):
    with pytest.raises(exc):
        parse_glue_file(text)


def test_single_block_is_an_expression(ex1_glue):
    expr = parse_expression(dump_glue(ex1_glue))
    assert expr == Node(ex1_glue, (Var("Z1"), Var("Z2")))


def test_expression_round_trip(eq5, eq6):
    for res in (compile_layered(eq5), compile_relaxed(eq6)):
        text = dump_expression(res.expression)
        assert parse_expression(text) == res.expression
        assert dump_expression(parse_expression(text)) == text
    assert dump_expression(compile_layered(eq5).expression).endswith("expr (G2 (G1pi1 Z1 Z2 Z3))\n")


@pytest.mark.parametrize("expr, exc", [
    ("(G Z1", ParseError),
    ("(H Z1)", FormatValidationError),
    ("G", FormatValidationError),
    ("(G Z1) Z2", ParseError),
    (")", ParseError),
])
def test_expression_errors(expr, exc):
    text = "glue G\ncomponent 1 ports p\ninteractions p\nexpr " + expr + "\n"
    with pytest.raises(exc) as info:
        parse_expression(text)
    assert info.value.line == 4


def test_parse_operator(eq5):
    text = ("operator eq5\ncomponent 1 ports p q\ncomponent 2 ports r s\ncomponent 3 ports t\n"
            "rule p neg 2:r\nrule q\nrule s\nrule r,t\n")
    assert parse_operator(text) == eq5
    assert dump_operator(eq5) == text


@pytest.mark.parametrize("text, exc, line", [
    ("operator O\ncomponent 1 ports p\nrule p neg 2:p\n", FormatValidationError, 3),
    ("operator O\ncomponent 1 ports p\nrule p neg\n", ParseError, 3),
    ("operator O\ncomponent 1 ports p\nrule p nag 1:p\n", ParseError, 3),
    ("operator O\ncomponent 1 ports p\nrule p neg 1p\n", ParseError, 3),
    ("operator O\ncomponent 1 ports p\nrule p neg 0:p\n", ParseError, 3),
])
def test_operator_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_operator(text)
    assert info.value.line == line


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_random_round_trips(seed):
    rng = random.Random(seed)
    b = random_lts(rng, frozenset({"p", "q", "r"}), 4, 0.3, name="B")
    assert parse_lts(dump_lts(b)) == b
    op = replace(random_operator(rng), name="O")
    assert parse_operator(dump_operator(op)) == op
    g = replace(random_glue(rng, rng.choice(MODES)), name="G")
    assert parse_glue(dump_glue(g)) == g
