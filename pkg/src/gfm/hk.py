"""A small hyperknowledge graph whose anchors are fragment expressions.

Nodes stand for anything, from concepts to artifacts.  Every node owns a
lambda anchor (id ``λ``) denoting its whole content; other anchors carry an
``expr`` fragment expression that is resolved on demand against the artifact
bound to the node.  Links are n-ary predicates over anchor references written
``node`` (the lambda anchor) or ``node#anchor``.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .artifact import InformationArtifact, load_artifact
from .errors import (
    DuplicateAnchor,
    DuplicateNode,
    InvalidIdentifier,
    ModelFormatError,
    UnboundNode,
    UnknownAnchorRef,
    UnknownNode,
)
from .grammar import parse_expression, print_expression
from .resolver import ResolvedFragment, resolve

LAMBDA = "λ"
WILDCARD = "*"

_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")


@dataclass
class Node:
    id: str
    artifact: str | None = None
    properties: dict[str, Any] = field(default_factory=dict)


@dataclass
class HKAnchor:
    id: str
    node: str
    properties: dict[str, Any] = field(default_factory=dict)

    @property
    def is_lambda(self) -> bool:
        return self.id == LAMBDA

    @property
    def expr(self) -> str | None:
        return self.properties.get("expr")

    @property
    def ref(self) -> str:
        return f"{self.node}#{self.id}"


@dataclass(frozen=True)
class Link:
    predicate: str
    args: tuple[str, ...]


def split_ref(ref: str) -> tuple[str, str]:
    node, sep, anchor = ref.partition("#")
    return node, anchor if sep else LAMBDA


class HKModel:
    """Nodes, links, property pairs and anchors.

    A node's properties and its lambda anchor's properties are the same dict,
    so writes through either view are visible through both.  Mutations take
    an internal lock.
    """

    def __init__(self):
        self.nodes: dict[str, Node] = {}
        self.anchors: dict[tuple[str, str], HKAnchor] = {}
        self.links: list[Link] = []
        self._lock = threading.RLock()

    # -- mutation ---------------------------------------------------------

    def add_node(self, id: str, artifact: str | None = None,
                 properties: Mapping[str, Any] | None = None) -> Node:
        if not _ID.match(id or ""):
            raise InvalidIdentifier(f"bad node id {id!r}")
        with self._lock:
            if id in self.nodes:
                raise DuplicateNode(f"node {id!r} already exists")
            node = Node(id, artifact, dict(properties or {}))
            self.nodes[id] = node
            self.anchors[(id, LAMBDA)] = HKAnchor(LAMBDA, id, node.properties)
            return node

    def add_anchor(self, node: str, id: str, expr: str,
                   properties: Mapping[str, Any] | None = None) -> HKAnchor:
        canonical = print_expression(parse_expression(expr))
        with self._lock:
            if node not in self.nodes:
                raise UnknownNode(f"no node {node!r}")
            if id == LAMBDA or (node, id) in self.anchors:
                raise DuplicateAnchor(f"anchor {node}#{id} already exists")
            if not _ID.match(id or ""):
                raise InvalidIdentifier(f"bad anchor id {id!r}")
            props = dict(properties or {})
            props["expr"] = canonical
            anchor = HKAnchor(id, node, props)
            self.anchors[(node, id)] = anchor
            return anchor

    def add_link(self, predicate: str, args: Sequence[str]) -> Link:
        refs = tuple(self.normalize_ref(a) for a in args)
        with self._lock:
            for ref in refs:
                if split_ref(ref) not in self.anchors:
                    raise UnknownAnchorRef(f"no anchor {ref!r}")
            link = Link(predicate, refs)
            self.links.append(link)
            return link

    def set_property(self, ref: str, key: str, value: Any):
        if key == "expr":
            raise ValueError("'expr' is managed by add_anchor")
        with self._lock:
            self.properties(ref)[key] = value

    # -- queries ----------------------------------------------------------

    @staticmethod
    def normalize_ref(ref: str) -> str:
        node, anchor = split_ref(ref)
        return f"{node}#{anchor}"

    def anchor(self, ref: str) -> HKAnchor:
        key = split_ref(ref)
        try:
            return self.anchors[key]
        except KeyError:
            raise UnknownAnchorRef(f"no anchor {self.normalize_ref(ref)!r}") from None

    def anchors_of(self, node: str) -> set[str]:
        if node not in self.nodes:
            raise UnknownNode(f"no node {node!r}")
        return {a for (n, a) in self.anchors if n == node}

    def properties(self, ref: str) -> dict[str, Any]:
        """Property dict of a node or anchor; ``n`` and ``n#λ`` share one."""
        return self.anchor(ref).properties

    def query_links(self, predicate: str | None = None,
                    pattern: Sequence[str] | None = None) -> list[Link]:
        pattern = [p if p == WILDCARD else self.normalize_ref(p) for p in (pattern or ())]
        with self._lock:
            links = list(self.links)
        out = []
        for link in links:
            if predicate is not None and link.predicate != predicate:
                continue
            if len(pattern) > len(link.args):
                continue
            if all(p == WILDCARD or p == a for p, a in zip(pattern, link.args)):
                out.append(link)
        return out

    def resolve_anchor(self, ref: str, store: "ArtifactStore | Mapping[str, InformationArtifact]"
                       ) -> ResolvedFragment:
        anchor = self.anchor(ref)
        node = self.nodes[anchor.node]
        if node.artifact is None:
            raise UnboundNode(f"node {node.id!r} has no artifact")
        try:
            artifact = store[node.artifact]
        except KeyError:
            raise UnboundNode(f"artifact {node.artifact!r} of node {node.id!r} is not in the store") \
                from None
        if anchor.is_lambda:
            return resolve(artifact, "id[]")
        return resolve(artifact, anchor.expr)

    # -- persistence ------------------------------------------------------

    def to_json(self) -> dict:
        with self._lock:
            return {
                "nodes": [{"id": n.id, "artifact": n.artifact, "properties": dict(n.properties)}
                          for n in self.nodes.values()],
                "anchors": [{"node": a.node, "id": a.id, "expr": a.expr,
                             "properties": {k: v for k, v in a.properties.items() if k != "expr"}}
                            for a in self.anchors.values() if not a.is_lambda],
                "links": [{"predicate": l.predicate, "args": list(l.args)} for l in self.links],
            }

    @classmethod
    def from_json(cls, doc: Mapping) -> "HKModel":
        model = cls()
        try:
            for n in doc.get("nodes", []):
                model.add_node(n["id"], n.get("artifact"), n.get("properties") or {})
            for a in doc.get("anchors", []):
                model.add_anchor(a["node"], a["id"], a["expr"], a.get("properties") or {})
            for l in doc.get("links", []):
                model.add_link(l["predicate"], l["args"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise ModelFormatError(f"malformed model document: {exc!r}") from exc
        return model

    def structure(self) -> tuple:
        """Order-insensitive snapshot used for equality."""
        nodes = sorted((n.id, n.artifact, json.dumps(n.properties, sort_keys=True))
                       for n in self.nodes.values())
        anchors = sorted((a.node, a.id, json.dumps(a.properties, sort_keys=True))
                         for a in self.anchors.values())
        links = sorted((l.predicate, l.args) for l in self.links)
        return nodes, anchors, links

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HKModel):
            return NotImplemented
        return self.structure() == other.structure()

    def save(self, path: str | os.PathLike):
        save_model(self, path)


def save_model(model: HKModel, path: str | os.PathLike):
    """Write the model atomically: temp file in the same directory, then rename."""
    path = Path(path)
    text = json.dumps(model.to_json(), ensure_ascii=False, indent=2) + "\n"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def load_model(path: str | os.PathLike) -> HKModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    return HKModel.from_json(doc)


class ArtifactStore:
    """Artifacts under a directory, addressed by their relative path."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self._cache: dict[str, InformationArtifact] = {}

    def __getitem__(self, artifact_id: str) -> InformationArtifact:
        if artifact_id not in self._cache:
            path = (self.root / artifact_id).resolve()
            if self.root.resolve() not in path.parents or not path.is_file():
                raise KeyError(artifact_id)
            self._cache[artifact_id] = load_artifact(path, artifact_id=artifact_id)
        return self._cache[artifact_id]

    def __contains__(self, artifact_id: str) -> bool:
        try:
            self[artifact_id]
        except KeyError:
            return False
        return True


def add_node(model: HKModel, id: str, artifact_id: str | None = None,
             properties: Mapping[str, Any] | None = None) -> HKModel:
    model.add_node(id, artifact_id, properties)
    return model


def add_anchor(model: HKModel, node: str, id: str, expr: str,
               properties: Mapping[str, Any] | None = None) -> HKModel:
    model.add_anchor(node, id, expr, properties)
    return model


def add_link(model: HKModel, predicate: str, args: Iterable[str]) -> HKModel:
    model.add_link(predicate, list(args))
    return model


def query_links(model: HKModel, predicate: str | None = None,
                arg_pattern: Sequence[str] | None = None) -> list[Link]:
    return model.query_links(predicate, arg_pattern)


def resolve_anchor(model: HKModel, ref: str, artifact_store) -> ResolvedFragment:
    return model.resolve_anchor(ref, artifact_store)
