"""Information artifacts, bit spans and fragments.

Bits are the common ground for every fragment: whatever structure an indexer
imposes on an artifact (pixels, samples, cells), the part it denotes is
ultimately a set of half-open bit intervals over the artifact's content.
"""

from __future__ import annotations

import hashlib
import os
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Union

from . import media
from .errors import FileUnreadable, ResolverFailure, SpanOutOfRange, UnknownMediaType

OCTET_STREAM = "application/octet-stream"
TEXT = "text/plain;charset=utf-8"
PPM = "image/x-portable-pixmap"
WAV = "audio/wav"
CSV = "text/csv"

MEDIA_TYPES = (OCTET_STREAM, TEXT, PPM, WAV, CSV)

EXTENSIONS = {
    ".ppm": PPM,
    ".wav": WAV,
    ".csv": CSV,
    ".txt": TEXT,
}

_ALIASES = {
    "text/plain": TEXT,
    "text/plain; charset=utf-8": TEXT,
    "audio/x-wav": WAV,
    "audio/wave": WAV,
    "image/x-ppm": PPM,
}


def normalize_media_type(media_type: str) -> str:
    mt = media_type.strip().lower()
    mt = _ALIASES.get(mt, mt)
    if mt not in MEDIA_TYPES:
        raise UnknownMediaType(f"unsupported media type {media_type!r}")
    return mt


def media_class(media_type: str) -> str:
    """The media type without parameters, e.g. ``text/plain``."""
    return media_type.split(";", 1)[0].strip()


# -- bit spans -------------------------------------------------------------

Span = tuple[int, int]


class BitSpanSet:
    """An immutable, normalized set of half-open bit intervals.

    Spans are kept sorted, disjoint and non-adjacent; empty spans vanish.
    """

    __slots__ = ("_spans",)

    def __init__(self, spans: Iterable[Span] = ()):
        cleaned = sorted((int(s), int(e)) for s, e in spans if e > s)
        merged: list[Span] = []
        for s, e in cleaned:
            if s < 0:
                raise SpanOutOfRange(f"negative bit offset {s}")
            if merged and s <= merged[-1][1]:
                if e > merged[-1][1]:
                    merged[-1] = (merged[-1][0], e)
            else:
                merged.append((s, e))
        self._spans = tuple(merged)

    @classmethod
    def single(cls, start: int, end: int) -> "BitSpanSet":
        """One span, skipping normalization."""
        if not 0 <= start <= end:
            raise SpanOutOfRange(f"bad span [{start},{end})")
        out = cls.__new__(cls)
        out._spans = ((start, end),) if end > start else ()
        return out

    @classmethod
    def from_bytes(cls, spans: Iterable[Span]) -> "BitSpanSet":
        return cls((8 * s, 8 * e) for s, e in spans)

    @property
    def spans(self) -> tuple[Span, ...]:
        return self._spans

    def __iter__(self) -> Iterator[Span]:
        return iter(self._spans)

    def __len__(self) -> int:
        return len(self._spans)

    def __bool__(self) -> bool:
        return bool(self._spans)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BitSpanSet):
            return self._spans == other._spans
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._spans)

    def __repr__(self) -> str:
        inner = ", ".join(f"[{s},{e})" for s, e in self._spans)
        return f"BitSpanSet({inner})"

    @property
    def bit_count(self) -> int:
        return sum(e - s for s, e in self._spans)

    @property
    def byte_aligned(self) -> bool:
        return all(s % 8 == 0 and e % 8 == 0 for s, e in self._spans)

    def byte_spans(self) -> list[Span]:
        if not self.byte_aligned:
            raise ValueError("span set is not byte aligned")
        return [(s // 8, e // 8) for s, e in self._spans]

    def bounds(self) -> Span | None:
        if not self._spans:
            return None
        return self._spans[0][0], self._spans[-1][1]

    def union(self, other: "BitSpanSet") -> "BitSpanSet":
        return BitSpanSet(self._spans + other._spans)

    __or__ = union

    def intersection(self, other: "BitSpanSet") -> "BitSpanSet":
        out = []
        i = j = 0
        a, b = self._spans, other._spans
        while i < len(a) and j < len(b):
            s = max(a[i][0], b[j][0])
            e = min(a[i][1], b[j][1])
            if s < e:
                out.append((s, e))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return BitSpanSet(out)

    __and__ = intersection

    def issubset(self, other: "BitSpanSet") -> bool:
        return self.intersection(other) == self

    __le__ = issubset

    def isdisjoint(self, other: "BitSpanSet") -> bool:
        return not self.intersection(other)

    def nth_bit(self, i: int) -> int:
        """Absolute position of the i-th bit (0-based) enumerated in span order."""
        for s, e in self._spans:
            if i < e - s:
                return s + i
            i -= e - s
        raise IndexError("bit index past the end of the span set")


# -- structured extents ----------------------------------------------------

@dataclass(frozen=True)
class BitRange:
    start: int
    end: int
    kind = "bit"

    def to_json(self) -> dict:
        return {"kind": self.kind, "start": self.start, "end": self.end}


@dataclass(frozen=True)
class CharRange:
    """Unicode scalar offsets [start, end) into the whole source text."""

    start: int
    end: int
    kind = "char-range"

    def to_json(self) -> dict:
        return {"kind": self.kind, "start": self.start, "end": self.end}


@dataclass(frozen=True)
class PixelSet:
    pixels: frozenset
    kind = "pixel-set"

    def ordered(self) -> list[tuple[int, int]]:
        return sorted(self.pixels, key=lambda p: (p[1], p[0]))

    def bbox(self) -> "Rectangle | None":
        if not self.pixels:
            return None
        xs = [p[0] for p in self.pixels]
        ys = [p[1] for p in self.pixels]
        return Rectangle(min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)

    def is_rectangular(self) -> bool:
        box = self.bbox()
        return box is not None and box.w * box.h == len(self.pixels)

    def to_json(self) -> dict:
        return {"kind": self.kind, "pixels": [list(p) for p in self.ordered()]}


@dataclass(frozen=True)
class Rectangle:
    x: int
    y: int
    w: int
    h: int
    kind = "rectangle"

    def pixels(self) -> frozenset:
        return frozenset((x, y) for y in range(self.y, self.y + self.h)
                         for x in range(self.x, self.x + self.w))

    def to_json(self) -> dict:
        return {"kind": self.kind, "x": self.x, "y": self.y, "w": self.w, "h": self.h}


@dataclass(frozen=True)
class TimeInterval:
    """Frames [start_frame, end_frame) of a WAV data chunk."""

    start_frame: int
    end_frame: int
    sample_rate: int
    kind = "time-interval"

    @property
    def start(self) -> Fraction:
        return Fraction(self.start_frame, self.sample_rate)

    @property
    def end(self) -> Fraction:
        return Fraction(self.end_frame, self.sample_rate)

    @property
    def duration(self) -> Fraction:
        return self.end - self.start

    def to_json(self) -> dict:
        return {"kind": self.kind, "start": float(self.start), "end": float(self.end),
                "start_frame": self.start_frame, "end_frame": self.end_frame,
                "sample_rate": self.sample_rate}


@dataclass(frozen=True)
class TableExtent:
    """Data rows × columns of a CSV table.

    ``cols=None`` means whole records (field separators included); otherwise
    only the listed cells' content spans.
    """

    kind: str  # "row-set", "column" or "cell"
    rows: tuple[int, ...]
    cols: tuple[int, ...] | None

    def to_json(self) -> dict:
        return {"kind": self.kind, "rows": list(self.rows),
                "cols": None if self.cols is None else list(self.cols)}


Extent = Union[BitRange, CharRange, PixelSet, Rectangle, TimeInterval, TableExtent]


# -- artifacts and fragments -----------------------------------------------

@dataclass(frozen=True)
class Origin:
    """Where a derived artifact's bits come from in its source.

    ``pieces`` holds (derived_bit_start, source_bit_start, length) triples;
    bits outside every piece were synthesized (headers, separators).
    """

    source: str
    pieces: tuple[tuple[int, int, int], ...]
    context: dict = field(default_factory=dict, hash=False, compare=False)

    def translate(self, bits: BitSpanSet) -> BitSpanSet:
        out = []
        for s, e in bits:
            for d0, s0, n in self.pieces:
                a, b = max(s, d0), min(e, d0 + n)
                if a < b:
                    out.append((s0 + a - d0, s0 + b - d0))
        return BitSpanSet(out)


@dataclass(frozen=True)
class InformationArtifact:
    id: str
    media_type: str
    content: bytes = field(repr=False)
    origin: Origin | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.content, bytes):
            object.__setattr__(self, "content", bytes(self.content))

    @property
    def bit_length(self) -> int:
        return 8 * len(self.content)

    @property
    def media_class(self) -> str:
        return media_class(self.media_type)

    def whole(self) -> "Fragment":
        return Fragment(self, BitSpanSet.single(0, self.bit_length))


@dataclass(frozen=True)
class Fragment:
    artifact: InformationArtifact = field(repr=False)
    bits: BitSpanSet
    extent: Extent | None = None

    def __post_init__(self):
        if not isinstance(self.bits, BitSpanSet):
            object.__setattr__(self, "bits", BitSpanSet(self.bits))
        bounds = self.bits.bounds()
        if bounds is not None and bounds[1] > self.artifact.bit_length:
            raise SpanOutOfRange(
                f"bit {bounds[1]} beyond artifact {self.artifact.id!r} "
                f"({self.artifact.bit_length} bits)")

    @property
    def source(self) -> str:
        return self.artifact.id

    @property
    def is_whole(self) -> bool:
        n = self.artifact.bit_length
        return self.bits.spans == (((0, n),) if n else ())

    @property
    def context(self) -> dict:
        """Origin offsets used to interpret fragment-relative coordinates."""
        ext = self.extent
        if isinstance(ext, Rectangle):
            return {"x": ext.x, "y": ext.y}
        if isinstance(ext, PixelSet):
            box = ext.bbox()
            return {"x": box.x, "y": box.y} if box else {}
        if isinstance(ext, TimeInterval):
            return {"frame": ext.start_frame, "seconds": float(ext.start)}
        if isinstance(ext, CharRange):
            return {"char": ext.start}
        if isinstance(ext, TableExtent):
            return {"rows": list(ext.rows), "cols": None if ext.cols is None else list(ext.cols)}
        if isinstance(ext, BitRange):
            return {"bit": ext.start}
        return {}


def load_artifact(path: str | os.PathLike, media_type_hint: str | None = None,
                  artifact_id: str | None = None) -> InformationArtifact:
    p = Path(path)
    if media_type_hint is not None:
        media_type = normalize_media_type(media_type_hint)
    else:
        media_type = EXTENSIONS.get(p.suffix.lower(), OCTET_STREAM)
    try:
        content = p.read_bytes()
    except OSError as exc:
        raise FileUnreadable(f"cannot read {str(p)!r}: {exc.strerror or exc}") from exc
    return InformationArtifact(artifact_id or p.name, media_type, content)


def canonical_bits(fragment: Fragment) -> BitSpanSet:
    return BitSpanSet(fragment.bits.spans)


def _read_bits(content: bytes, start: int, end: int) -> int:
    first, last = start // 8, (end + 7) // 8
    chunk = int.from_bytes(content[first:last], "big")
    tail = last * 8 - end
    return (chunk >> tail) & ((1 << (end - start)) - 1)


def extract(artifact: InformationArtifact, fragment: Fragment | BitSpanSet) -> bytes:
    """Concatenate the addressed content in span order.

    Byte-aligned spans are sliced directly; otherwise bits are packed
    most-significant first and the last byte is zero padded.
    """
    bits = fragment.bits if isinstance(fragment, Fragment) else fragment
    bounds = bits.bounds()
    if bounds is not None and bounds[1] > artifact.bit_length:
        raise SpanOutOfRange(
            f"span end {bounds[1]} beyond artifact {artifact.id!r} ({artifact.bit_length} bits)")
    content = artifact.content
    if bits.byte_aligned:
        return b"".join(content[s:e] for s, e in bits.byte_spans())
    acc = 0
    total = 0
    for s, e in bits:
        acc = (acc << (e - s)) | _read_bits(content, s, e)
        total += e - s
    pad = -total % 8
    return (acc << pad).to_bytes((total + pad) // 8, "big")


# -- derived artifacts -----------------------------------------------------

class _Builder:
    def __init__(self):
        self.parts: list[bytes] = []
        self.pieces: list[tuple[int, int, int]] = []
        self.size = 0

    def synth(self, data: bytes):
        self.parts.append(data)
        self.size += len(data)

    def copy(self, content: bytes, start: int, end: int):
        """Copy source bytes [start, end), recording their origin."""
        if end > start:
            self.pieces.append((8 * self.size, 8 * start, 8 * (end - start)))
            self.synth(content[start:end])

    def content(self) -> bytes:
        return b"".join(self.parts)


def _derived_id(fragment: Fragment) -> str:
    digest = hashlib.sha1(repr(fragment.bits.spans).encode()).hexdigest()[:10]
    return f"{fragment.source}#{digest}"


def as_artifact(fragment: Fragment) -> InformationArtifact:
    """Turn a fragment into an artifact of its own.

    The result keeps a media type where the fragment still makes sense as one
    (rectangles stay PPM, time intervals stay WAV, table parts stay CSV, text
    stays text) and falls back to octet-stream otherwise.  Its ``origin``
    maps every copied bit back to the source.
    """
    src = fragment.artifact
    if fragment.is_whole:
        pieces = ((0, 0, src.bit_length),) if src.bit_length else ()
        return InformationArtifact(src.id, src.media_type, src.content,
                                   Origin(src.id, pieces, fragment.context))
    ext = fragment.extent
    b = _Builder()
    media_type = OCTET_STREAM
    content = src.content

    if src.media_type == PPM and isinstance(ext, (Rectangle, PixelSet)) and (
            isinstance(ext, Rectangle) or ext.is_rectangular()):
        box = ext if isinstance(ext, Rectangle) else ext.bbox()
        img = media.parse_ppm(content)
        b.synth(media.ppm_header(img.magic, box.w, box.h, img.maxval))
        for y in range(box.y, box.y + box.h):
            s, e = img.row_segment(y, box.x, box.x + box.w)
            b.copy(content, s, e)
            if img.magic == "P3":
                b.synth(b"\n")
        media_type = PPM
    elif src.media_type == WAV and isinstance(ext, TimeInterval):
        audio = media.parse_wav(content)
        s, e = audio.frame_span(ext.start_frame, ext.end_frame)
        built = media.wav_bytes(audio, content[s:e])
        b.synth(built[:44])
        b.copy(content, s, e)
        b.synth(built[44 + e - s:])
        media_type = WAV
    elif src.media_type == CSV and isinstance(ext, TableExtent):
        table = media.parse_csv(content)
        rows = [table.rows[r] for r in ext.rows]
        if ext.cols is None:
            b.synth(content[table.header.start:table.header.end])
            for rec in rows:
                b.synth(b"\n")
                b.copy(content, rec.start, rec.end)
        else:
            cols = ext.cols
            b.synth(b",".join(content[table.header.fields[c].start:table.header.fields[c].end]
                              for c in cols))
            for rec in rows:
                b.synth(b"\n")
                for k, c in enumerate(cols):
                    f = rec.fields[c]
                    if k:
                        b.synth(b",")
                    if f.quoted:
                        b.synth(b'"')
                    b.copy(content, f.content_start, f.content_end)
                    if f.quoted:
                        b.synth(b'"')
        b.synth(b"\n")
        media_type = CSV
    elif src.media_type == TEXT and isinstance(ext, CharRange):
        for s, e in fragment.bits.byte_spans():
            b.copy(content, s, e)
        media_type = TEXT
    else:
        if fragment.bits.byte_aligned:
            for s, e in fragment.bits.byte_spans():
                b.copy(content, s, e)
        else:
            offset = 0
            for s, e in fragment.bits:
                b.pieces.append((offset, s, e - s))
                offset += e - s
            b.synth(extract(src, fragment))

    return InformationArtifact(_derived_id(fragment), media_type, b.content(),
                               Origin(src.id, tuple(b.pieces), fragment.context))


def pixel_bits(img: media.PPMImage, pixels: Iterable[tuple[int, int]]) -> BitSpanSet:
    return BitSpanSet.from_bytes(img.span(x, y) for x, y in pixels)


def rectangle_bits(img: media.PPMImage, rect: Rectangle) -> BitSpanSet:
    return BitSpanSet.from_bytes(
        img.row_segment(y, rect.x, rect.x + rect.w) for y in range(rect.y, rect.y + rect.h))


def table_bits(table: media.CSVTable, ext: TableExtent) -> BitSpanSet:
    if ext.cols is None:
        return BitSpanSet.from_bytes((table.rows[r].start, table.rows[r].end) for r in ext.rows)
    spans = []
    for r in ext.rows:
        rec = table.rows[r]
        for c in ext.cols:
            f = rec.fields[c]
            spans.append((f.content_start, f.content_end))
    return BitSpanSet.from_bytes(spans)


def extent_bits(artifact: InformationArtifact, extent: Extent) -> BitSpanSet:
    """Re-derive the bit set an extent denotes on `artifact`."""
    content = artifact.content
    if isinstance(extent, BitRange):
        return BitSpanSet([(extent.start, extent.end)])
    if isinstance(extent, Rectangle):
        return rectangle_bits(media.parse_ppm(content), extent)
    if isinstance(extent, PixelSet):
        return pixel_bits(media.parse_ppm(content), extent.pixels)
    if isinstance(extent, TimeInterval):
        return BitSpanSet.from_bytes(
            [media.parse_wav(content).frame_span(extent.start_frame, extent.end_frame)])
    if isinstance(extent, CharRange):
        layout = media.parse_text(content)
        return BitSpanSet.from_bytes(
            [(layout.char_offsets[extent.start], layout.char_offsets[extent.end])])
    if isinstance(extent, TableExtent):
        return table_bits(media.parse_csv(content), extent)
    raise ResolverFailure(f"unknown extent {extent!r}")


def char_index(layout: media.TextLayout, byte_offset: int) -> int:
    i = bisect_right(layout.char_offsets, byte_offset) - 1
    if layout.char_offsets[i] != byte_offset:
        raise ResolverFailure(f"byte {byte_offset} is inside a UTF-8 sequence")
    return i
