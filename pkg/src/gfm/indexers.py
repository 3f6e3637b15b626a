"""Indexer specifications, anchors and their validation.

An indexer maps a tuple token ``p_1(v_1), ..., p_n(v_n)`` to a part of its
target.  An anchor is valid for an indexer exactly when its binding names
match the indexer's parameters one-to-one and in order, and every value lies
in that parameter's domain.  Domains may depend on the target (an image's
width, a table's header), so validation always happens against a concrete
artifact or fragment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence, Union

from .artifact import BitRange, BitSpanSet, Fragment, InformationArtifact, media_class
from .errors import (
    DomainViolation,
    DuplicateIndexer,
    ForeignFragment,
    MediaTypeMismatch,
    MisorderedParameter,
    MissingParameter,
    NestedKindMismatch,
    UnknownIndexer,
    UnknownParameter,
    ValidationError,
)
from .grammar import Color

ANY = "any"

DOMAIN_KINDS = ("integer-range", "decimal-range", "symbol-enumeration",
                "free-text", "color-literal", "fragment-valued")
OUTPUT_KINDS = ("bit", "byte-range", "char-range", "pixel-set", "rectangle",
                "time-interval", "row-set", "column", "cell", "fragment")
TAXONOMY = ("binary", "identity", "vector", "dictionary", "spatio-temporal", "query")

NAMED_COLORS = {
    "red": (255, 0, 0),
    "green": (0, 255, 0),
    "blue": (0, 0, 255),
    "black": (0, 0, 0),
    "white": (255, 255, 255),
}
_HEX_COLOR = re.compile(r"#[0-9a-fA-F]{6}\Z")

Target = Union[InformationArtifact, Fragment]
Bound = Union[int, Fraction, Callable[[Fragment], Any], None]


def as_fragment(target: Target) -> Fragment:
    return target.whole() if isinstance(target, InformationArtifact) else target


def color_rgb(value) -> tuple[int, int, int] | None:
    """RGB triple for a color value, or None when it is not a color."""
    if isinstance(value, Color):
        return value.rgb
    if isinstance(value, str):
        if value in NAMED_COLORS:
            return NAMED_COLORS[value]
        if _HEX_COLOR.match(value):
            return Color(value).rgb
    return None


@dataclass(frozen=True)
class DomainSpec:
    """The set D_i a parameter's value must belong to.

    Range bounds may be callables of the target fragment; they are evaluated
    on every membership test.  ``hi=None`` means unbounded above.
    """

    kind: str
    lo: Bound = 0
    hi: Bound = None
    lo_closed: bool = True
    hi_closed: bool = False
    symbols: Callable[[Fragment], Sequence[str]] | Sequence[str] | None = None
    extent_kinds: tuple[str, ...] = ()
    label: str = ""
    violation: type = DomainViolation

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not callable(self.lo) and not callable(self.hi) and self.hi is not None \
                and self.lo > self.hi:
            raise ValueError("domain needs lo <= hi")

    def bounds(self, target: Fragment) -> tuple:
        lo = self.lo(target) if callable(self.lo) else self.lo
        hi = self.hi(target) if callable(self.hi) else self.hi
        return lo, hi

    def symbol_set(self, target: Fragment) -> Sequence[str]:
        syms = self.symbols(target) if callable(self.symbols) else self.symbols
        return syms or ()

    def _in_range(self, v, target: Fragment) -> bool:
        lo, hi = self.bounds(target)
        if v < lo or (v == lo and not self.lo_closed):
            return False
        if hi is not None and (v > hi or (v == hi and not self.hi_closed)):
            return False
        return True

    def contains(self, value, target: Fragment) -> bool:
        if self.kind == "integer-range":
            return type(value) is int and self._in_range(value, target)
        if self.kind == "decimal-range":
            if type(value) is int:
                return self._in_range(value, target)
            if isinstance(value, Decimal) and value.is_finite():
                return self._in_range(Fraction(value), target)
            return False
        if self.kind == "symbol-enumeration":
            return isinstance(value, str) and value in self.symbol_set(target)
        if self.kind == "free-text":
            return isinstance(value, str)
        if self.kind == "color-literal":
            return color_rgb(value) is not None
        # fragment-valued
        return (isinstance(value, Fragment)
                and value.extent is not None
                and value.extent.kind in self.extent_kinds
                and value.artifact == target.artifact
                and value.bits <= target.bits)

    def describe(self, target: Fragment | None = None) -> str:
        if self.label:
            return self.label
        if self.kind in ("integer-range", "decimal-range"):
            if target is not None:
                lo, hi = self.bounds(target)
            else:
                lo, hi = self.lo, self.hi
            lo = "?" if callable(lo) else lo
            hi = "inf" if hi is None else ("?" if callable(hi) else hi)
            ty = "int" if self.kind == "integer-range" else "decimal"
            return f"{ty}{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"
        if self.kind == "fragment-valued":
            return "fragment<" + "|".join(self.extent_kinds) + ">"
        return self.kind


def integer_range(lo: Bound = 0, hi: Bound = None, label: str = "", **kw) -> DomainSpec:
    return DomainSpec("integer-range", lo, hi, label=label, **kw)


def decimal_range(lo: Bound = 0, hi: Bound = None, label: str = "", **kw) -> DomainSpec:
    return DomainSpec("decimal-range", lo, hi, label=label, **kw)


def symbols(source, label: str = "", **kw) -> DomainSpec:
    return DomainSpec("symbol-enumeration", symbols=source, label=label, **kw)


FREE_TEXT = DomainSpec("free-text", label="text")
COLOR = DomainSpec("color-literal", label="color")


def fragment_valued(*kinds: str) -> DomainSpec:
    return DomainSpec("fragment-valued", extent_kinds=kinds)


Resolve = Callable[[Fragment, dict], Fragment]


@dataclass(frozen=True)
class IndexerSpec:
    name: str
    applies_to: str
    parameters: tuple[tuple[str, DomainSpec], ...]
    output_kind: str
    taxonomy: str
    resolve: Resolve | None = field(default=None, compare=False, repr=False)
    doc: str = field(default="", compare=False)

    def __post_init__(self):
        names = self.parameter_names
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {self.name!r}")
        if self.taxonomy not in TAXONOMY:
            raise ValueError(f"unknown taxonomy class {self.taxonomy!r}")
        if self.output_kind not in OUTPUT_KINDS:
            raise ValueError(f"unknown output kind {self.output_kind!r}")

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.parameters)

    def signature(self, target: Fragment | None = None) -> str:
        params = ", ".join(f"{n}: {d.describe(target)}" for n, d in self.parameters)
        return f"{self.name}[{params}] -> {self.output_kind}"

    def accepts(self, media_type: str) -> bool:
        return self.applies_to == ANY or self.applies_to == media_class(media_type)


@dataclass(frozen=True)
class Anchor:
    indexer: str
    bindings: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def of(cls, indexer: str, **bindings) -> "Anchor":
        return cls(indexer, tuple(bindings.items()))


@dataclass
class Verdict:
    violations: list[ValidationError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def raise_for_violations(self):
        if self.violations:
            first = self.violations[0]
            first.violations = list(self.violations)
            raise first


class Registry:
    """Indexer specs keyed by (name, media type class).

    ``binary`` and ``id`` are always present for every media type.
    """

    def __init__(self, specs: Iterable[IndexerSpec] = ()):
        self._specs: dict[tuple[str, str], IndexerSpec] = {}
        for spec in (BINARY, IDENTITY):
            self._specs[(spec.name, spec.applies_to)] = spec
        for spec in specs:
            self.register(spec)

    def register(self, spec: IndexerSpec) -> "Registry":
        key = (spec.name, spec.applies_to)
        if key in self._specs or (spec.name, ANY) in self._specs:
            raise DuplicateIndexer(f"indexer {spec.name!r} already registered for {spec.applies_to}")
        self._specs[key] = spec
        return self

    def lookup(self, name: str, media_type: str) -> IndexerSpec:
        for key in ((name, ANY), (name, media_class(media_type))):
            if key in self._specs:
                return self._specs[key]
        others = sorted(mt for (n, mt) in self._specs if n == name)
        if others:
            raise MediaTypeMismatch(
                f"indexer {name!r} applies to {', '.join(others)}, not {media_type}")
        raise UnknownIndexer(f"no indexer named {name!r}")

    def for_media_type(self, media_type: str) -> list[IndexerSpec]:
        mc = media_class(media_type)
        return [s for (n, mt), s in self._specs.items() if mt in (ANY, mc)]

    def __iter__(self):
        return iter(self._specs.values())

    def __contains__(self, key) -> bool:
        return key in self._specs


def register_indexer(registry: Registry, spec: IndexerSpec) -> Registry:
    return registry.register(spec)


def validate_anchor(anchor: Anchor, spec: IndexerSpec, target: Target) -> Verdict:
    """Check `anchor` against `spec` on `target`, collecting every violation."""
    target = as_fragment(target)
    verdict = Verdict()
    bad = verdict.violations
    if anchor.indexer != spec.name:
        bad.append(UnknownIndexer(f"anchor names {anchor.indexer!r}, indexer is {spec.name!r}"))
    if not spec.accepts(target.artifact.media_type):
        bad.append(MediaTypeMismatch(
            f"{spec.name!r} applies to {spec.applies_to}, target is {target.artifact.media_type}"))
        return verdict

    params = spec.parameter_names
    names = [name for name, _ in anchor.bindings]
    seen = set()
    for name in names:
        if name not in params:
            bad.append(UnknownParameter(f"{spec.name!r} has no parameter {name!r}", parameter=name))
        elif name in seen:
            bad.append(UnknownParameter(f"parameter {name!r} bound twice", parameter=name))
        seen.add(name)
    for name in params:
        if name not in seen:
            bad.append(MissingParameter(f"{spec.name!r} requires {name!r}", parameter=name))
    if not bad and tuple(names) != params:
        bad.append(MisorderedParameter(
            f"bindings {names} do not follow the order {list(params)}"))

    domains = dict(spec.parameters)
    checked = set()
    for name, value in anchor.bindings:
        if name not in domains or name in checked:
            continue
        checked.add(name)
        domain = domains[name]
        if domain.contains(value, target):
            continue
        if domain.kind == "fragment-valued" and isinstance(value, Fragment) \
                and value.artifact == target.artifact and value.bits <= target.bits:
            kind = value.extent.kind if value.extent is not None else "whole"
            bad.append(NestedKindMismatch(
                f"{name!r} needs a {'/'.join(domain.extent_kinds)} fragment, got {kind}",
                parameter=name))
        else:
            bad.append(domain.violation(
                f"{name}={_show(value)} is outside {domain.describe(target)}", parameter=name))
    return verdict


def _show(value) -> str:
    if isinstance(value, Fragment):
        return f"<fragment {value.extent.kind if value.extent else 'whole'}>"
    from .grammar import _print_value
    try:
        return _print_value(value)
    except TypeError:
        return repr(value)


def apply(spec: IndexerSpec, target: Target, anchor: Anchor) -> Fragment:
    """Resolve `anchor` on `target` (an artifact or a fragment of one).

    Coordinates are read relative to a fragment target, and the result never
    leaves the target's bits.
    """
    target = as_fragment(target)
    validate_anchor(anchor, spec, target).raise_for_violations()
    if not spec.parameters:
        return target
    result = spec.resolve(target, dict(anchor.bindings))
    if not result.bits <= target.bits:
        raise AssertionError(f"{spec.name} escaped its target")
    return result


# -- universal indexers ----------------------------------------------------

def binary_indexer(target: Target, i: int) -> Fragment:
    """The i-th bit of `target`, counted through its spans in order."""
    if isinstance(target, InformationArtifact):
        artifact, count, whole = target, target.bit_length, True
    else:
        artifact, count, whole = target.artifact, target.bits.bit_count, target.is_whole
    if type(i) is not int or not 0 <= i < count:
        raise DomainViolation(f"bit index {i} outside [0, {count})", parameter="i")
    pos = i if whole else target.bits.nth_bit(i)
    return Fragment(artifact, BitSpanSet.single(pos, pos + 1), BitRange(pos, pos + 1))


def identity_indexer(target: Target, s: Fragment) -> Fragment:
    target = as_fragment(target)
    if s.artifact != target.artifact:
        raise ForeignFragment(f"fragment of {s.source!r} used on {target.source!r}")
    if not s.bits <= target.bits:
        raise ForeignFragment("fragment is not part of the target")
    return Fragment(s.artifact, s.bits, s.extent)


BINARY = IndexerSpec(
    "binary", ANY,
    (("i", integer_range(0, lambda t: t.bits.bit_count)),),
    "bit", "binary",
    resolve=lambda target, args: binary_indexer(target, args["i"]),
    doc="the i-th bit of the target",
)

IDENTITY = IndexerSpec(
    "id", ANY, (), "fragment", "identity",
    resolve=lambda target, args: target,
    doc="the whole target",
)
