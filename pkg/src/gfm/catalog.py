"""Built-in indexers for PPM images, WAV audio, UTF-8 text and CSV tables.

Each media type gets a *view* of a target fragment: the coordinate system an
indexer sees.  For a whole artifact the view is the full image, the whole data
chunk, the whole text or the whole table.  For a fragment it is the part the
fragment covers, with coordinates starting again at zero, which is what lets
``time[s=10,f=15]/time[s=0,f=2]`` pick seconds 10 to 12 of the original.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from . import media
from .artifact import (
    CSV,
    PPM,
    TEXT,
    WAV,
    BitSpanSet,
    CharRange,
    Fragment,
    PixelSet,
    Rectangle,
    TableExtent,
    TimeInterval,
    char_index,
    media_class,
    pixel_bits,
    rectangle_bits,
    table_bits,
)
from .errors import (
    DomainViolation,
    EmptyInput,
    NoMatch,
    PatternError,
    ResolverFailure,
    UnknownColumn,
)
from .indexers import (
    COLOR,
    FREE_TEXT,
    Anchor,
    IndexerSpec,
    Registry,
    Target,
    apply,
    as_fragment,
    color_rgb,
    decimal_range,
    fragment_valued,
    integer_range,
    symbols,
)


# -- views -----------------------------------------------------------------

@dataclass(frozen=True)
class ImageView:
    image: media.PPMImage
    x: int
    y: int
    width: int
    height: int
    mask: frozenset | None  # absolute pixels, None = every pixel of the box

    def absolute(self, x: int, y: int) -> tuple[int, int]:
        return self.x + x, self.y + y

    def __contains__(self, pixel) -> bool:
        px, py = pixel
        inside = self.x <= px < self.x + self.width and self.y <= py < self.y + self.height
        return inside and (self.mask is None or pixel in self.mask)

    def pixels(self):
        for py in range(self.y, self.y + self.height):
            for px in range(self.x, self.x + self.width):
                if self.mask is None or (px, py) in self.mask:
                    yield px, py


def image_view(target: Fragment) -> ImageView:
    img = media.parse_ppm(target.artifact.content)
    ext = target.extent
    if ext is None and target.is_whole:
        return ImageView(img, 0, 0, img.width, img.height, None)
    if isinstance(ext, Rectangle):
        return ImageView(img, ext.x, ext.y, ext.w, ext.h, None)
    if isinstance(ext, PixelSet):
        box = ext.bbox()
        if box is None:
            return ImageView(img, 0, 0, 0, 0, frozenset())
        mask = None if ext.is_rectangular() else ext.pixels
        return ImageView(img, box.x, box.y, box.w, box.h, mask)
    raise ResolverFailure("spatial indexers need an image, rectangle or pixel-set target")


@dataclass(frozen=True)
class AudioView:
    audio: media.WAVAudio
    start: int  # frames
    end: int

    @property
    def duration(self) -> Fraction:
        return Fraction(self.end - self.start, self.audio.sample_rate)


def audio_view(target: Fragment) -> AudioView:
    audio = media.parse_wav(target.artifact.content)
    ext = target.extent
    if ext is None and target.is_whole:
        return AudioView(audio, 0, audio.frames)
    if isinstance(ext, TimeInterval):
        return AudioView(audio, ext.start_frame, ext.end_frame)
    raise ResolverFailure("temporal indexers need an audio or time-interval target")


@dataclass(frozen=True)
class TextView:
    layout: media.TextLayout  # of the viewed bytes only
    offset: int  # absolute byte offset of the view
    char_offset: int  # absolute char offset of the view


def text_view(target: Fragment) -> TextView:
    content = target.artifact.content
    ext = target.extent
    if ext is None and target.is_whole:
        return TextView(media.parse_text(content), 0, 0)
    if isinstance(ext, CharRange):
        spans = target.bits.byte_spans()
        start, end = (spans[0][0], spans[-1][1]) if spans else (0, 0)
        whole = media.parse_text(content)
        start_char = char_index(whole, start) if spans else ext.start
        return TextView(media.parse_text(content[start:end]), start, start_char)
    raise ResolverFailure("textual indexers need a text or char-range target")


@dataclass(frozen=True)
class TableView:
    table: media.CSVTable
    rows: tuple[int, ...]
    cols: tuple[int, ...] | None

    @property
    def column_indices(self) -> tuple[int, ...]:
        if self.cols is None:
            return tuple(range(len(self.table.header.fields)))
        return self.cols

    @property
    def column_names(self) -> tuple[str, ...]:
        names = self.table.columns
        return tuple(names[c] for c in self.column_indices)

    def column(self, name: str) -> int:
        for c in self.column_indices:
            if self.table.columns[c] == name:
                return c
        raise UnknownColumn(f"no column {name!r} in {list(self.column_names)}")


def table_view(target: Fragment) -> TableView:
    table = media.parse_csv(target.artifact.content)
    ext = target.extent
    if ext is None and target.is_whole:
        return TableView(table, tuple(range(len(table.rows))), None)
    if isinstance(ext, TableExtent):
        return TableView(table, ext.rows, ext.cols)
    raise ResolverFailure("tabular indexers need a table, row, column or cell target")


# -- spatial ---------------------------------------------------------------

def _pixel_fragment(target: Fragment, view: ImageView, pixels) -> Fragment:
    pixels = frozenset(pixels)
    return Fragment(target.artifact, pixel_bits(view.image, pixels), PixelSet(pixels))


def _region(target: Fragment, view: ImageView, rect: Rectangle) -> Fragment:
    """Absolute rectangle clipped to the view's pixels."""
    if view.mask is None:
        return Fragment(target.artifact, rectangle_bits(view.image, rect), rect)
    pixels = rect.pixels() & view.mask
    if len(pixels) == rect.w * rect.h:
        return Fragment(target.artifact, rectangle_bits(view.image, rect), rect)
    return _pixel_fragment(target, view, pixels)


def _pixel(target: Fragment, args: dict) -> Fragment:
    view = image_view(target)
    p = view.absolute(args["x"], args["y"])
    if p not in view:
        raise DomainViolation(f"pixel ({args['x']},{args['y']}) is not part of the target")
    return _pixel_fragment(target, view, [p])


def _region_of(target: Fragment, args: dict) -> Fragment:
    view = image_view(target)
    x, y, w, h = args["x"], args["y"], args["w"], args["h"]
    if x + w > view.width or y + h > view.height:
        raise DomainViolation(
            f"region {w}x{h} at ({x},{y}) exceeds the {view.width}x{view.height} target")
    ax, ay = view.absolute(x, y)
    return _region(target, view, Rectangle(ax, ay, w, h))


def _colormask(target: Fragment, args: dict) -> Fragment:
    view = image_view(target)
    rgb = color_rgb(args["color"])
    img = view.image
    return _pixel_fragment(target, view, (p for p in view.pixels() if img.color(*p) == rgb))


def _pbounding(target: Fragment, args: dict) -> Fragment:
    view = image_view(target)
    ext = args["pixels"].extent
    pixels = ext.pixels() if isinstance(ext, Rectangle) else ext.pixels
    if not pixels:
        raise EmptyInput("pbounding of an empty pixel set")
    box = PixelSet(frozenset(pixels)).bbox()
    return _region(target, view, box)


def _width(t: Fragment) -> int:
    return image_view(t).width


def _height(t: Fragment) -> int:
    return image_view(t).height


# -- temporal --------------------------------------------------------------

def _duration(t: Fragment) -> Fraction:
    return audio_view(t).duration


def _seconds(value) -> Fraction:
    return Fraction(value) if isinstance(value, (int, Decimal)) else Fraction(str(value))


def _time(target: Fragment, args: dict) -> Fragment:
    view = audio_view(target)
    s, f = _seconds(args["s"]), _seconds(args["f"])
    if f <= s:
        raise DomainViolation(f"interval end {args['f']} is not after its start {args['s']}",
                              parameter="f")
    rate = view.audio.sample_rate
    start = view.start + math.floor(s * rate)
    end = min(view.start + math.floor(f * rate), view.end)
    span = view.audio.frame_span(start, end)
    return Fragment(target.artifact, BitSpanSet.from_bytes([span]),
                    TimeInterval(start, end, rate))


# -- textual ---------------------------------------------------------------

def _char_count(t: Fragment) -> int:
    return len(text_view(t).layout.text)


def _line_count(t: Fragment) -> int:
    return len(text_view(t).layout.lines)


def _paragraph_count(t: Fragment) -> int:
    return len(text_view(t).layout.paragraphs)


def _text_fragment(target: Fragment, view: TextView, start: int, end: int) -> Fragment:
    """Fragment for view-relative bytes [start, end)."""
    layout = view.layout
    c0 = view.char_offset + char_index(layout, start)
    c1 = view.char_offset + char_index(layout, end)
    span = (view.offset + start, view.offset + end)
    return Fragment(target.artifact, BitSpanSet.from_bytes([span]), CharRange(c0, c1))


def _char(target: Fragment, args: dict) -> Fragment:
    view = text_view(target)
    k = args["k"]
    offs = view.layout.char_offsets
    return _text_fragment(target, view, offs[k], offs[k + 1])


def _line(target: Fragment, args: dict) -> Fragment:
    view = text_view(target)
    return _text_fragment(target, view, *view.layout.lines[args["i"]])


def _paragraph(target: Fragment, args: dict) -> Fragment:
    view = text_view(target)
    return _text_fragment(target, view, *view.layout.paragraph_span(args["i"]))


_BACKREF = re.compile(r"\\[1-9]|\(\?P=|\\g<")


def compile_pattern(pattern: str) -> re.Pattern:
    if _BACKREF.search(pattern):
        raise PatternError(f"backreferences are not supported: {pattern!r}", parameter="pattern")
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise PatternError(f"bad pattern {pattern!r}: {exc}", parameter="pattern") from None


def _match(target: Fragment, args: dict) -> Fragment:
    view = text_view(target)
    regex = compile_pattern(args["pattern"])
    n = args["n"]
    for i, m in enumerate(regex.finditer(view.layout.text)):
        if i == n:
            offs = view.layout.char_offsets
            return _text_fragment(target, view, offs[m.start()], offs[m.end()])
    raise NoMatch(f"pattern {args['pattern']!r} has no match number {n}")


# -- tabular ---------------------------------------------------------------

def _row_count(t: Fragment) -> int:
    return len(table_view(t).rows)


def _column_names(t: Fragment) -> tuple[str, ...]:
    return table_view(t).column_names


def _table_fragment(target: Fragment, view: TableView, ext: TableExtent) -> Fragment:
    return Fragment(target.artifact, table_bits(view.table, ext), ext)


def _row(target: Fragment, args: dict) -> Fragment:
    view = table_view(target)
    return _table_fragment(target, view, TableExtent("row-set", (view.rows[args["i"]],), view.cols))


def _col(target: Fragment, args: dict) -> Fragment:
    view = table_view(target)
    return _table_fragment(target, view, TableExtent("column", view.rows, (view.column(args["name"]),)))


def _cell(target: Fragment, args: dict) -> Fragment:
    view = table_view(target)
    ext = TableExtent("cell", (view.rows[args["row"]],), (view.column(args["col"]),))
    return _table_fragment(target, view, ext)


def _where(target: Fragment, args: dict) -> Fragment:
    view = table_view(target)
    c = view.column(args["column"])
    rows = tuple(r for r in view.rows if view.table.rows[r].fields[c].value == args["equals"])
    return _table_fragment(target, view, TableExtent("row-set", rows, view.cols))


# -- catalog ---------------------------------------------------------------

PPM_CLASS = media_class(PPM)
WAV_CLASS = media_class(WAV)
TEXT_CLASS = media_class(TEXT)
CSV_CLASS = media_class(CSV)

BUILTINS: tuple[IndexerSpec, ...] = (
    IndexerSpec("pixel", PPM_CLASS,
                (("x", integer_range(0, _width)), ("y", integer_range(0, _height))),
                "pixel-set", "vector", _pixel, "one pixel's raster bytes"),
    IndexerSpec("region", PPM_CLASS,
                (("x", integer_range(0, _width)), ("y", integer_range(0, _height)),
                 ("w", integer_range(1, _width, hi_closed=True)),
                 ("h", integer_range(1, _height, hi_closed=True))),
                "rectangle", "spatio-temporal", _region_of, "a w x h pixel rectangle"),
    IndexerSpec("colormask", PPM_CLASS, (("color", COLOR),),
                "pixel-set", "query", _colormask, "every pixel of exactly one color"),
    IndexerSpec("pbounding", PPM_CLASS, (("pixels", fragment_valued("pixel-set", "rectangle")),),
                "rectangle", "spatio-temporal", _pbounding, "bounding rectangle of a pixel set"),
    IndexerSpec("time", WAV_CLASS,
                (("s", decimal_range(0, _duration)),
                 ("f", decimal_range(0, _duration, lo_closed=False, hi_closed=True))),
                "time-interval", "spatio-temporal", _time, "seconds [s, f) of the audio"),
    IndexerSpec("char", TEXT_CLASS, (("k", integer_range(0, _char_count)),),
                "char-range", "vector", _char, "the k-th Unicode scalar"),
    IndexerSpec("line", TEXT_CLASS, (("i", integer_range(0, _line_count)),),
                "char-range", "vector", _line, "the i-th line, terminator excluded"),
    IndexerSpec("paragraph", TEXT_CLASS, (("i", integer_range(0, _paragraph_count)),),
                "char-range", "vector", _paragraph, "the i-th blank-line separated block"),
    IndexerSpec("match", TEXT_CLASS, (("pattern", FREE_TEXT), ("n", integer_range(0, None))),
                "char-range", "query", _match, "the n-th non-overlapping regex match"),
    IndexerSpec("row", CSV_CLASS, (("i", integer_range(0, _row_count)),),
                "row-set", "vector", _row, "the i-th data record"),
    IndexerSpec("col", CSV_CLASS, (("name", symbols(_column_names, "column", violation=UnknownColumn)),),
                "column", "dictionary", _col, "every cell of a named column"),
    IndexerSpec("cell", CSV_CLASS,
                (("row", integer_range(0, _row_count)),
                 ("col", symbols(_column_names, "column", violation=UnknownColumn))),
                "cell", "dictionary", _cell, "one cell's content"),
    IndexerSpec("where", CSV_CLASS,
                (("column", symbols(_column_names, "column", violation=UnknownColumn)),
                 ("equals", FREE_TEXT)),
                "row-set", "query", _where, "records whose cell equals a value"),
)


def default_registry() -> Registry:
    return Registry(BUILTINS)


_SPATIAL = {"pixel", "region", "colormask", "pbounding"}
_TEXTUAL = {"char", "line", "paragraph", "match"}
_TABULAR = {"row", "col", "cell", "where"}


def _resolve_family(family: set, target: Target, anchor: Anchor) -> Fragment:
    if anchor.indexer not in family:
        raise ValueError(f"{anchor.indexer!r} is not one of {sorted(family)}")
    spec = next(s for s in BUILTINS if s.name == anchor.indexer)
    return apply(spec, target, anchor)


def resolve_spatial(target: Target, anchor: Anchor) -> Fragment:
    return _resolve_family(_SPATIAL, as_fragment(target), anchor)


def resolve_temporal(target: Target, anchor: Anchor) -> Fragment:
    return _resolve_family({"time"}, as_fragment(target), anchor)


def resolve_textual(target: Target, anchor: Anchor) -> Fragment:
    return _resolve_family(_TEXTUAL, as_fragment(target), anchor)


def resolve_tabular(target: Target, anchor: Anchor) -> Fragment:
    return _resolve_family(_TABULAR, as_fragment(target), anchor)
