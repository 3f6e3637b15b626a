"""Byte-offset aware parsers for the supported media formats.

Every parser works on the raw artifact bytes and reports *where* things live
(raster offsets, data chunk offsets, field spans) rather than decoded values
alone, because fragments are ultimately byte and bit spans.  Parsers are
cached on the content object, so repeated validation of anchors against the
same artifact does not re-parse it.
"""

from __future__ import annotations

import struct
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

from .errors import ResolverFailure

WHITESPACE = b" \t\n\r\v\f"


# -- PPM -------------------------------------------------------------------

@dataclass(frozen=True)
class PPMImage:
    magic: str  # "P6" or "P3"
    width: int
    height: int
    maxval: int
    raster_offset: int
    raster_end: int
    # byte span [start, end) of each pixel in raster order
    pixel_spans: tuple[tuple[int, int], ...]
    pixels: tuple[tuple[int, int, int], ...]

    def index(self, x: int, y: int) -> int:
        return y * self.width + x

    def span(self, x: int, y: int) -> tuple[int, int]:
        return self.pixel_spans[self.index(x, y)]

    def color(self, x: int, y: int) -> tuple[int, int, int]:
        return self.pixels[self.index(x, y)]

    def row_segment(self, y: int, x0: int, x1: int) -> tuple[int, int]:
        """Byte span covering pixels x0..x1-1 of row y."""
        return self.span(x0, y)[0], self.span(x1 - 1, y)[1]


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace separated header tokens, skipping # comments."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in WHITESPACE or data[pos] == 0x23):
            if data[pos] == 0x23:
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and data[pos] not in WHITESPACE and data[pos] != 0x23:
            pos += 1
        if start == pos:
            raise ResolverFailure("truncated PPM header")
        tokens.append(data[start:pos])
    return tokens, pos


@lru_cache(maxsize=64)
def parse_ppm(data: bytes) -> PPMImage:
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0].decode("ascii", "replace")
    if magic not in ("P6", "P3"):
        raise ResolverFailure(f"not a P3/P6 pixmap (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ResolverFailure("non-numeric PPM header field") from None
    if width <= 0 or height <= 0:
        raise ResolverFailure("PPM dimensions must be positive")
    if not 0 < maxval <= 255:
        raise ResolverFailure(f"unsupported PPM maxval {maxval}")
    if pos >= len(data) or data[pos] not in WHITESPACE:
        raise ResolverFailure("missing whitespace after PPM maxval")
    count = width * height
    if magic == "P6":
        raster = pos + 1
        end = raster + 3 * count
        if end > len(data):
            raise ResolverFailure("PPM raster is truncated")
        spans = tuple((raster + 3 * i, raster + 3 * i + 3) for i in range(count))
        pixels = tuple(tuple(data[s:e]) for s, e in spans)
        if any(v > maxval for p in pixels for v in p):
            raise ResolverFailure("PPM sample exceeds maxval")
        return PPMImage(magic, width, height, maxval, raster, end, spans, pixels)

    # P3: samples are ASCII decimal tokens
    samples: list[tuple[int, int, int]] = []  # (start, end, value)
    n = len(data)
    p = pos
    while len(samples) < 3 * count:
        while p < n and (data[p] in WHITESPACE or data[p] == 0x23):
            if data[p] == 0x23:
                while p < n and data[p] not in b"\r\n":
                    p += 1
            else:
                p += 1
        start = p
        while p < n and data[p] not in WHITESPACE and data[p] != 0x23:
            p += 1
        if start == p:
            raise ResolverFailure("PPM raster is truncated")
        token = data[start:p]
        if not token.isdigit():
            raise ResolverFailure(f"bad P3 sample {token!r}")
        value = int(token)
        if value > maxval:
            raise ResolverFailure("PPM sample exceeds maxval")
        samples.append((start, p, value))
    spans = tuple((samples[3 * i][0], samples[3 * i + 2][1]) for i in range(count))
    pixels = tuple(tuple(s[2] for s in samples[3 * i:3 * i + 3]) for i in range(count))
    return PPMImage(magic, width, height, maxval, samples[0][0], samples[-1][1], spans, pixels)


def ppm_header(magic: str, width: int, height: int, maxval: int) -> bytes:
    return f"{magic}\n{width} {height}\n{maxval}\n".encode("ascii")


# -- WAV -------------------------------------------------------------------

@dataclass(frozen=True)
class WAVAudio:
    channels: int
    sample_rate: int
    bits_per_sample: int
    block_align: int
    data_offset: int
    data_size: int

    @property
    def frames(self) -> int:
        return self.data_size // self.block_align

    def frame_span(self, start: int, end: int) -> tuple[int, int]:
        return (self.data_offset + start * self.block_align,
                self.data_offset + end * self.block_align)


@lru_cache(maxsize=64)
def parse_wav(data: bytes) -> WAVAudio:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ResolverFailure("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    found_data = None
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = pos + 8
        if body + size > len(data):
            raise ResolverFailure(f"chunk {cid!r} overruns the file")
        if cid == b"fmt ":
            if fmt is not None:
                raise ResolverFailure("more than one fmt chunk")
            if size < 16:
                raise ResolverFailure("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", data, body)
        elif cid == b"data":
            if found_data is not None:
                raise ResolverFailure("more than one data chunk")
            found_data = (body, size)
        pos = body + size + (size & 1)
    if fmt is None or found_data is None:
        raise ResolverFailure("WAV needs one fmt and one data chunk")
    code, channels, rate, _byte_rate, block_align, bits = fmt
    if code != 1:
        raise ResolverFailure(f"unsupported WAV format code {code}")
    if bits not in (8, 16):
        raise ResolverFailure(f"unsupported sample width {bits}")
    if channels < 1 or rate < 1 or block_align != channels * bits // 8:
        raise ResolverFailure("inconsistent fmt chunk")
    return WAVAudio(channels, rate, bits, block_align, found_data[0], found_data[1])


def wav_bytes(audio: WAVAudio, payload: bytes) -> bytes:
    """Build a canonical 44-byte-header WAV around `payload`."""
    fmt = struct.pack("<HHIIHH", 1, audio.channels, audio.sample_rate,
                      audio.sample_rate * audio.block_align,
                      audio.block_align, audio.bits_per_sample)
    pad = b"\x00" if len(payload) & 1 else b""
    riff_size = 4 + (8 + len(fmt)) + (8 + len(payload) + len(pad))
    return (b"RIFF" + struct.pack("<I", riff_size) + b"WAVE"
            + b"fmt " + struct.pack("<I", len(fmt)) + fmt
            + b"data" + struct.pack("<I", len(payload)) + payload + pad)


# -- CSV -------------------------------------------------------------------

@dataclass(frozen=True)
class CSVField:
    start: int  # raw span, quotes included
    end: int
    content_start: int  # span inside the quotes
    content_end: int
    value: str
    quoted: bool


@dataclass(frozen=True)
class CSVRecord:
    start: int
    end: int  # terminator excluded
    fields: tuple[CSVField, ...]


@dataclass(frozen=True)
class CSVTable:
    header: CSVRecord
    rows: tuple[CSVRecord, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(f.value for f in self.header.fields)

    def column_index(self, name: str) -> int:
        return self.columns.index(name)


def _parse_records(data: bytes) -> list[CSVRecord]:
    records = []
    n = len(data)
    pos = 0
    while pos < n:
        rec_start = pos
        fields = []
        while True:
            start = pos
            if pos < n and data[pos] == 0x22:
                pos += 1
                buf = bytearray()
                while True:
                    if pos >= n:
                        raise ResolverFailure(f"unterminated quoted field at byte {start}")
                    c = data[pos]
                    if c == 0x22:
                        if pos + 1 < n and data[pos + 1] == 0x22:
                            buf.append(0x22)
                            pos += 2
                            continue
                        break
                    buf.append(c)
                    pos += 1
                content = (start + 1, pos)
                pos += 1
                if pos < n and data[pos] not in b",\r\n":
                    raise ResolverFailure(f"junk after closing quote at byte {pos}")
                raw = bytes(buf)
                quoted = True
            else:
                while pos < n and data[pos] not in b",\r\n":
                    if data[pos] == 0x22:
                        raise ResolverFailure(f"stray quote at byte {pos}")
                    pos += 1
                content = (start, pos)
                raw = data[start:pos]
                quoted = False
            try:
                value = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise ResolverFailure(f"invalid UTF-8 in field at byte {start}") from None
            fields.append(CSVField(start, pos, content[0], content[1], value, quoted))
            if pos < n and data[pos] == 0x2C:
                pos += 1
                continue
            break
        rec_end = pos
        if pos < n and data[pos] == 0x0D:
            if pos + 1 < n and data[pos + 1] == 0x0A:
                pos += 2
            else:
                raise ResolverFailure(f"bare CR at byte {pos}")
        elif pos < n:
            pos += 1
        records.append(CSVRecord(rec_start, rec_end, tuple(fields)))
    return records


@lru_cache(maxsize=64)
def parse_csv(data: bytes) -> CSVTable:
    records = _parse_records(data)
    if not records:
        raise ResolverFailure("CSV has no header record")
    header, rows = records[0], records[1:]
    width = len(header.fields)
    for i, rec in enumerate(rows):
        if len(rec.fields) != width:
            raise ResolverFailure(
                f"ragged CSV: data row {i} has {len(rec.fields)} fields, header has {width}")
    return CSVTable(header, tuple(rows))


# -- text ------------------------------------------------------------------

@dataclass(frozen=True)
class TextLayout:
    """Char and line structure of a UTF-8 byte string (offsets relative to it)."""

    text: str
    # byte offset of every char, plus a final entry for the end
    char_offsets: tuple[int, ...]
    # (start_byte, end_byte) per line, terminator excluded
    lines: tuple[tuple[int, int], ...]
    # (first_line, last_line) per paragraph, inclusive
    paragraphs: tuple[tuple[int, int], ...]

    def char_at_byte(self, offset: int) -> int:
        return bisect_left(self.char_offsets, offset)

    def paragraph_span(self, i: int) -> tuple[int, int]:
        first, last = self.paragraphs[i]
        return self.lines[first][0], self.lines[last][1]


@lru_cache(maxsize=256)
def parse_text(data: bytes) -> TextLayout:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ResolverFailure(f"invalid UTF-8 at byte {exc.start}") from None
    offsets = [0] * (len(text) + 1)
    b = 0
    for i, ch in enumerate(text):
        offsets[i] = b
        b += len(ch.encode("utf-8"))
    offsets[len(text)] = b

    lines = []
    start = 0
    n = len(data)
    while start < n:
        nl = data.find(b"\n", start)
        if nl < 0:
            lines.append((start, n))
            break
        end = nl - 1 if nl > start and data[nl - 1] == 0x0D else nl
        lines.append((start, end))
        start = nl + 1

    paragraphs = []
    first = None
    for i, (s, e) in enumerate(lines):
        blank = data[s:e].strip() == b""
        if blank:
            if first is not None:
                paragraphs.append((first, i - 1))
                first = None
        elif first is None:
            first = i
    if first is not None:
        paragraphs.append((first, len(lines) - 1))
    return TextLayout(text, tuple(offsets), tuple(lines), tuple(paragraphs))
