import json
import random

import pytest

from gfm.artifact import Rectangle
from gfm.errors import (
    DuplicateAnchor,
    DuplicateNode,
    ExpressionSyntaxError,
    InvalidIdentifier,
    ModelFormatError,
    UnboundNode,
    UnknownAnchorRef,
    UnknownNode,
)
from gfm.hk import LAMBDA, ArtifactStore, HKModel, load_model, save_model


@pytest.fixture
def model():
    m = HKModel()
    m.add_node("img1", "img2.ppm", {"label": "two by two"})
    m.add_node("horizonA")
    m.add_anchor("img1", "red_blob", "pbounding[ pixels = colormask[color='red'] ]")
    return m


def test_lambda_created(model):
    assert model.anchors_of("horizonA") == {LAMBDA}


def test_duplicate_node(model):
    with pytest.raises(DuplicateNode):
        model.add_node("horizonA")


def test_bad_ids(model):
    with pytest.raises(InvalidIdentifier):
        model.add_node("a#b")
    with pytest.raises(InvalidIdentifier):
        model.add_anchor("img1", "x y", "id[]")


def test_properties_shared_with_lambda(model):
    assert model.properties("img1") is model.properties("img1#λ")
    model.set_property("img1#λ", "kind", "image")
    assert model.properties("img1")["kind"] == "image"


def test_anchor_stored_canonical(model):
    assert model.anchor("img1#red_blob").expr == "pbounding[pixels=colormask[color='red']]"


def test_reserved_and_duplicate_anchor(model):
    with pytest.raises(DuplicateAnchor):
        model.add_anchor("img1", "λ", "id[]")
    with pytest.raises(DuplicateAnchor):
        model.add_anchor("img1", "red_blob", "id[]")


def test_bad_expression_leaves_model_unchanged(model):
    before = model.structure()
    with pytest.raises(ExpressionSyntaxError):
        model.add_anchor("img1", "broken", "pixel[x=]")
    assert model.structure() == before


def test_unknown_node(model):
    with pytest.raises(UnknownNode):
        model.add_anchor("ghost", "a", "id[]")


def test_links(model):
    model.add_node("x")
    link = model.add_link("between", ["x", "img1#red_blob", "horizonA"])
    assert link.args == ("x#λ", "img1#red_blob", "horizonA#λ")
    assert len(model.add_link("between", ["x", "x"]).args) == 2
    model.add_link("between", ["x", "x"])
    assert len(model.query_links("between")) == 3
    assert model.query_links(pattern=["*", "img1#red_blob"]) == [link]
    assert model.query_links(pattern=["x"]) == model.query_links()
    assert model.query_links(pattern=["*", "*", "*", "*"]) == []
    with pytest.raises(UnknownAnchorRef):
        model.add_link("about", ["ghost#a"])


def test_resolve_lambda_and_anchor(model, fixture_dir):
    store = ArtifactStore(fixture_dir)
    whole = model.resolve_anchor("img1", store)
    assert whole.bits.spans == ((0, 184),)
    blob = model.resolve_anchor("img1#red_blob", store)
    assert blob.fragment.extent == Rectangle(0, 0, 2, 2)


def test_resolve_unbound(model, fixture_dir):
    with pytest.raises(UnboundNode):
        model.resolve_anchor("horizonA", ArtifactStore(fixture_dir))
    model.add_node("lost", "missing.ppm")
    with pytest.raises(UnboundNode):
        model.resolve_anchor("lost", ArtifactStore(fixture_dir))


def test_store_rejects_escape(fixture_dir):
    assert "../etc/passwd" not in ArtifactStore(fixture_dir)


def test_persistence_round_trip(model, tmp_path):
    model.add_anchor("horizonA", "label", "id[]", {"note": "concept"})
    model.add_link("depicts", ["img1#red_blob", "horizonA"])
    path = tmp_path / "m.json"
    save_model(model, path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert set(doc) == {"nodes", "anchors", "links"}
    assert all(a["id"] != LAMBDA for a in doc["anchors"])
    assert doc["links"] == [{"predicate": "depicts", "args": ["img1#red_blob", "horizonA#λ"]}]
    again = load_model(path)
    assert again == model
    assert again.anchor("img1#red_blob").expr == model.anchor("img1#red_blob").expr


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "m.json"
    p.write_text("[1, 2]")
    with pytest.raises(ModelFormatError):
        load_model(p)
    p.write_text("{nope")
    with pytest.raises(ModelFormatError):
        load_model(p)
    p.write_text('{"nodes": [{"name": "x"}]}')
    with pytest.raises(ModelFormatError):
        load_model(p)


def test_atomic_save(model, tmp_path, monkeypatch):
    path = tmp_path / "m.json"
    save_model(model, path)
    original = path.read_bytes()
    model.add_node("extra")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr("gfm.hk.os.replace", boom)
    with pytest.raises(OSError):
        save_model(model, path)
    assert path.read_bytes() == original
    assert [p.name for p in tmp_path.iterdir()] == ["m.json"]


def random_operations(model: HKModel, rng: random.Random, count: int):
    """Apply random operations, ignoring the ones the model rightly refuses."""
    from gfm.errors import GFMError
    nodes = list(model.nodes)
    for step in range(count):
        op = rng.randrange(5)
        try:
            if op == 0 or not nodes:
                nid = f"n{rng.randrange(count)}"
                model.add_node(nid, None, {"born": step})
                nodes.append(nid)
            elif op == 1:
                model.add_anchor(rng.choice(nodes), f"a{rng.randrange(20)}", "id[]", {"s": step})
            elif op == 2:
                refs = [rng.choice(nodes) + rng.choice(["", "#λ", f"#a{rng.randrange(20)}"])
                        for _ in range(rng.randrange(1, 4))]
                model.add_link(rng.choice(["between", "near"]), refs)
            else:
                node = rng.choice(nodes)
                view = node if op == 3 else node + "#λ"
                model.set_property(view, rng.choice(["p", "q"]), step)
        except GFMError:
            pass


def test_random_interleaving_keeps_invariants():
    rng = random.Random(7)
    m = HKModel()
    random_operations(m, rng, 1000)
    for nid in m.nodes:
        assert sum(1 for (n, a) in m.anchors if n == nid and a == LAMBDA) == 1
        assert m.properties(nid) == m.properties(nid + "#λ")
    for link in m.links:
        for ref in link.args:
            m.anchor(ref)
