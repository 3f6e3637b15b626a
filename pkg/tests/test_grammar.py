from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import expressions, nesting_depth
from gfm.errors import ExpressionSyntaxError
from gfm.grammar import Color, FragmentExpression, Segment, parse_expression, print_expression


def test_pixel():
    e = parse_expression("pixel[x=3,y=4]")
    assert e == FragmentExpression((Segment("pixel", (("x", 3), ("y", 4))),))


def test_chain():
    e = parse_expression("time[s=10,f=15]/time[s=0,f=2]")
    assert [s.indexer for s in e.segments] == ["time", "time"]
    assert e.segments[1].bindings == (("s", 0), ("f", 2))


def test_nested():
    e = parse_expression("pbounding[pixels=colormask[color='red']]")
    assert len(e.segments) == 1
    (name, inner), = e.segments[0].bindings
    assert name == "pixels"
    assert inner == FragmentExpression((Segment("colormask", (("color", "red"),)),))


def test_nested_chain_value():
    e = parse_expression("a[v=b[]/c[k=1], w=2]")
    (_, inner), (_, w) = e.segments[0].bindings
    assert len(inner.segments) == 2 and w == 2


def test_whitespace_normalized():
    assert print_expression(parse_expression(" pixel[ x = 3 , y = 4 ] ")) == "pixel[x=3,y=4]"


def test_empty_token_set():
    assert print_expression(parse_expression("id[]")) == "id[]"
    assert print_expression(parse_expression("id[ ]")) == "id[]"


def test_value_kinds():
    e = parse_expression(r"x[a=0,b=1.50,c='it\'s \\ é',d=#FFaa00]")
    values = [v for _, v in e.segments[0].bindings]
    assert values == [0, Decimal("1.50"), "it's \\ é", Color("ffaa00")]
    assert print_expression(e) == r"x[a=0,b=1.50,c='it\'s \\ é',d=#ffaa00]"


def test_double_quotes_print_single():
    assert print_expression(parse_expression("m[p='a\"b']")) == "m[p='a\"b']"


@pytest.mark.parametrize("text", [
    "pixel[x=3,y=4]",
    "time[s=10,f=15]/time[s=0,f=2]",
    "pbounding[pixels=colormask[color='red']]",
])
def test_reference_examples_round_trip(text):
    e = parse_expression(text)
    assert parse_expression(print_expression(e)) == e
    assert print_expression(e) == text


@pytest.mark.parametrize("text,offset", [
    ("pixel[x=]", 8),
    ("pixel[x=3", 9),
    ("pixel", 5),
    ("", 0),
    ("Pixel[]", 0),
    ("p[x=01]", 5),
    ("p[x=1.]", 6),
    ("p[x='abc]", 4),
    ("p[x='a\\q']", 6),
    ("p[x=#12345]", 4),
    ("p[x=#1234567]", 11),
    ("p[]/", 4),
    ("p[] q[]", 4),
    ("p[x=1;y=2]", 5),
    ("p[é=1]", 2),
    ("p[x='é',", 9),
])
def test_syntax_errors(text, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(text)
    assert info.value.offset == offset
    assert info.value.expected


@settings(max_examples=300, deadline=None)
@given(expressions())
def test_round_trip(expr):
    assert nesting_depth(expr) <= 4
    text = print_expression(expr)
    again = parse_expression(text)
    assert again == expr
    assert print_expression(again) == text


@settings(max_examples=200, deadline=None)
@given(expressions(), st.data())
def test_truncation_offsets(expr, data):
    text = print_expression(expr)
    cut = data.draw(st.integers(0, len(text) - 1))
    prefix = text[:cut]
    try:
        parse_expression(prefix)
    except ExpressionSyntaxError as exc:
        assert 0 <= exc.offset <= len(prefix.encode("utf-8"))
