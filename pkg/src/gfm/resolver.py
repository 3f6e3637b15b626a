"""Evaluate fragment expressions against artifacts."""

from __future__ import annotations

from dataclasses import dataclass

from .artifact import Extent, Fragment, InformationArtifact
from .catalog import default_registry
from .errors import GFMError
from .grammar import FragmentExpression, Segment, parse_expression, print_expression, print_segment
from .indexers import Anchor, Registry, Target, apply, as_fragment


@dataclass(frozen=True)
class TrailEntry:
    segment: str
    fragment: Fragment

    @property
    def extent(self) -> Extent | None:
        return self.fragment.extent


@dataclass(frozen=True)
class ResolvedFragment:
    fragment: Fragment
    trail: tuple[TrailEntry, ...]
    expression: str

    @property
    def bits(self):
        return self.fragment.bits

    def report(self) -> dict:
        """JSON-ready resolution report."""
        return {
            "source": self.fragment.source,
            "media_type": self.fragment.artifact.media_type,
            "expression": self.expression,
            "bits": [[s, e] for s, e in self.fragment.bits],
            "extent": _extent_json(self.fragment),
            "trail": [{"segment": t.segment, "extent": _extent_json(t.fragment),
                       "bits": [[s, e] for s, e in t.fragment.bits]}
                      for t in self.trail],
        }


def _extent_json(fragment: Fragment) -> dict:
    if fragment.extent is None:
        return {"kind": "whole" if fragment.is_whole else "bits"}
    return fragment.extent.to_json()


_default: Registry | None = None


def _registry(registry: Registry | None) -> Registry:
    global _default
    if registry is not None:
        return registry
    if _default is None:
        _default = default_registry()
    return _default


def _apply_segment(target: Fragment, segment: Segment, registry: Registry) -> Fragment:
    spec = registry.lookup(segment.indexer, target.artifact.media_type)
    bindings = []
    for name, value in segment.bindings:
        if isinstance(value, FragmentExpression):
            try:
                value = _chain(target, value, registry)[-1].fragment
            except GFMError as exc:
                if exc.parameter is None:
                    exc.parameter = name
                raise
        bindings.append((name, value))
    return apply(spec, target, Anchor(segment.indexer, tuple(bindings)))


def _chain(target: Fragment, expr: FragmentExpression, registry: Registry) -> list[TrailEntry]:
    trail = []
    for segment in expr.segments:
        target = _apply_segment(target, segment, registry)
        trail.append(TrailEntry(print_segment(segment), target))
    return trail


def resolve(artifact: Target, expr: FragmentExpression | str,
            registry: Registry | None = None) -> ResolvedFragment:
    """Resolve `expr` segment by segment, each one on the previous result.

    Errors are tagged with the 1-based index of the failing segment.
    """
    if isinstance(expr, str):
        expr = parse_expression(expr)
    registry = _registry(registry)
    target = as_fragment(artifact)
    trail = []
    for k, segment in enumerate(expr.segments, 1):
        try:
            target = _apply_segment(target, segment, registry)
        except GFMError as exc:
            exc.segment = k
            for v in getattr(exc, "violations", ()):
                v.segment = k
            raise
        trail.append(TrailEntry(print_segment(segment), target))
    return ResolvedFragment(target, tuple(trail), print_expression(expr))


def list_indexers(media_type: str, registry: Registry | None = None) -> list[dict]:
    registry = _registry(registry)
    return [{"name": s.name, "applies_to": s.applies_to, "signature": s.signature(),
             "parameters": [{"name": n, "domain": d.describe()} for n, d in s.parameters],
             "output_kind": s.output_kind, "taxonomy": s.taxonomy, "doc": s.doc}
            for s in registry.for_media_type(media_type)]
