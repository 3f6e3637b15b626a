"""Hypothesis strategies for fragment-expression ASTs."""

from decimal import Decimal

from hypothesis import strategies as st

from gfm.grammar import Color, FragmentExpression, Segment

names = st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True)
integers = st.integers(0, 10**12)
decimals = st.builds(lambda i, f: Decimal(f"{i}.{f}"), st.integers(0, 10**6),
                     st.from_regex(r"[0-9]{1,4}", fullmatch=True))
texts = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)
colors = st.from_regex(r"[0-9a-f]{6}", fullmatch=True).map(Color)
scalars = st.one_of(integers, decimals, texts, colors)


def segments(values):
    return st.builds(
        lambda indexer, bindings: Segment(indexer, tuple(bindings)),
        names, st.lists(st.tuples(names, values), max_size=3))


def expressions(depth: int = 4):
    """Random ASTs with nesting depth at most `depth`."""
    if depth <= 1:
        values = scalars
    else:
        values = st.one_of(scalars, st.deferred(lambda: expressions(depth - 1)))
    return st.builds(lambda segs: FragmentExpression(tuple(segs)),
                     st.lists(segments(values), min_size=1, max_size=3))


def nesting_depth(expr: FragmentExpression) -> int:
    inner = [nesting_depth(v) for s in expr.segments for _, v in s.bindings
             if isinstance(v, FragmentExpression)]
    return 1 + max(inner, default=0)
