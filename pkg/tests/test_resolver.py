import random

import pytest

from builders import csv3, ppm2, ppm8, text3, wav30
from chains import contained, random_chain
from gfm.artifact import BitSpanSet, InformationArtifact, Rectangle, as_artifact
from gfm.catalog import BUILTINS, default_registry
from gfm.errors import (
    DomainViolation,
    MediaTypeMismatch,
    NestedKindMismatch,
    UnknownIndexer,
    ValidationError,
)
from gfm.grammar import FragmentExpression, parse_expression
from gfm.resolver import list_indexers, resolve

FIXTURES = [ppm2, ppm8, wav30, csv3, text3]


def test_temporal_chain_bytes():
    r = resolve(wav30(), "time[s=10,f=15]/time[s=0,f=2]")
    assert r.bits.spans == ((8 * (44 + 160000), 8 * (44 + 192000)),)
    assert len(r.trail) == 2
    assert r.trail[-1].fragment.bits == r.bits


def test_nested_bounding():
    r = resolve(ppm2(), "pbounding[pixels=colormask[color='red']]")
    assert r.fragment.extent == Rectangle(0, 0, 2, 2)


@pytest.mark.parametrize("make", FIXTURES)
def test_id_is_whole(make):
    a = make()
    assert resolve(a, "id[]").bits == a.whole().bits


def test_nested_evaluates_on_current_target():
    a = ppm8()
    r = resolve(a, "region[x=4,y=4,w=4,h=4]/pbounding[pixels=region[x=0,y=0,w=1,h=1]]")
    assert r.fragment.extent == Rectangle(4, 4, 1, 1)


def test_nested_kind_mismatch():
    with pytest.raises(NestedKindMismatch) as info:
        resolve(ppm2(), "pbounding[pixels=binary[i=100]]")
    assert info.value.segment == 1
    assert info.value.parameter == "pixels"


def test_nested_value_where_scalar_expected():
    with pytest.raises(DomainViolation):
        resolve(ppm2(), "pixel[x=colormask[color='red'],y=0]")


def test_errors_tagged_with_segment():
    with pytest.raises(DomainViolation) as info:
        resolve(wav30(), "time[s=10,f=15]/time[s=0,f=9]")
    assert info.value.segment == 2
    assert info.value.parameter == "f"
    assert "segment 2" in str(info.value)


def test_unknown_and_mismatched_indexers():
    with pytest.raises(UnknownIndexer):
        resolve(ppm2(), "frame[i=0]")
    with pytest.raises(MediaTypeMismatch):
        resolve(ppm2(), "time[s=0,f=1]")


def test_report_shape():
    doc = resolve(csv3(), "col[name='depth']").report()
    assert set(doc) == {"source", "media_type", "expression", "bits", "extent", "trail"}
    assert doc["bits"] == [[112, 136], [168, 192], [248, 264]]
    assert doc["extent"] == {"kind": "column", "rows": [0, 1, 2], "cols": [1]}


def test_deterministic():
    a = text3()
    assert resolve(a, "paragraph[i=0]/line[i=1]") == resolve(a, "paragraph[i=0]/line[i=1]")


@pytest.mark.parametrize("make", FIXTURES)
def test_chain_containment(make):
    rng = random.Random(make.__name__)
    a = make()
    for _ in range(25):
        chain = random_chain(rng, a, rng.choice([2, 3]))
        assert chain is not None
        expr = parse_expression(chain)
        prev = a.whole().bits
        for k in range(1, len(expr.segments) + 1):
            bits = resolve(a, FragmentExpression(expr.segments[:k])).bits
            assert contained(bits, prev), chain
            prev = bits


def brute_translate(derived, bits):
    """Map derived bits to source bits one bit at a time."""
    table = {}
    for d0, s0, n in derived.origin.pieces:
        for i in range(n):
            table[d0 + i] = s0 + i
    positions = sorted(table[i] for s, e in bits for i in range(s, e) if i in table)
    spans = []
    for p in positions:
        if spans and spans[-1][1] == p:
            spans[-1][1] = p + 1
        else:
            spans.append([p, p + 1])
    return BitSpanSet(spans)


@pytest.mark.parametrize("make,first,rest", [
    (ppm8, "region[x=2,y=1,w=4,h=5]", "region[x=1,y=1,w=2,h=3]/pixel[x=1,y=2]"),
    (ppm8, "region[x=2,y=1,w=4,h=5]", "pbounding[pixels=region[x=0,y=0,w=2,h=2]]"),
    (wav30, "time[s=29,f=30]", "time[s=0.25,f=0.75]/time[s=0,f=0.125]"),
    (text3, "paragraph[i=0]", "line[i=1]/char[k=2]"),
    (text3, "line[i=3]", "match[pattern='é',n=0]"),
    (csv3, "row[i=2]", "cell[row=0,col='well']"),
    (csv3, "col[name='depth']", "row[i=2]"),
    (csv3, "where[column='well',equals='B2']", "col[name='depth']/row[i=0]"),
])
def test_chain_refactoring(make, first, rest):
    a = make()
    direct = resolve(a, f"{first}/{rest}").bits
    derived = as_artifact(resolve(a, first).fragment)
    via = resolve(derived, rest).bits
    assert brute_translate(derived, via) == direct
    assert derived.origin.translate(via) == direct


@pytest.mark.parametrize("text", [
    "pixel[x=0]", "pixel[y=0,x=0]", "pixel[x=0,y=0,z=0]", "pixel[x=2,y=0]",
    "pixel[x='0',y=0]", "pixel[x=0.0,y=0]", "region[x=0,y=0,w=0,h=1]",
    "colormask[color='mauve']", "colormask[color=1]", "pbounding[pixels=1]",
    "binary[i=184]", "id[x=1]", "pixel[x=0,y=0]/pixel[x=1,y=0]",
])
def test_definition_gate(text):
    with pytest.raises(ValidationError):
        resolve(ppm2(), text)


def test_list_indexers():
    names = {e["name"] for e in list_indexers("text/csv")}
    assert names == {"binary", "id", "row", "col", "cell", "where"}
    assert {e["name"] for e in list_indexers("application/x-unknown")} == {"binary", "id"}
    for entry in list_indexers("image/x-portable-pixmap"):
        seg = parse_expression(f"{entry['name']}[]").segments[0]
        assert seg.indexer == entry["name"]
        assert entry["taxonomy"] in {"binary", "identity", "vector", "dictionary",
                                     "spatio-temporal", "query"}


def test_catalog_taxonomy_single_leaf():
    for spec in default_registry():
        assert isinstance(spec.taxonomy, str)
    assert {s.name: s.taxonomy for s in BUILTINS}["col"] == "dictionary"
