"""SubRip (.srt) parsing into ordered, timed subtitle blocks."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .errors import SrtParseError

log = logging.getLogger(__name__)

# Comma-separated milliseconds per the format; period accepted as a lenient
# real-world variant.
_TIME_RE = re.compile(
    r"(\d{1,2}):(\d{1,2}):(\d{1,2})[,.](\d{1,3})\s*-->\s*(\d{1,2}):(\d{1,2}):(\d{1,2})[,.](\d{1,3})"
)
_TAG_RE = re.compile(r"</?[a-zA-Z][^>]*>|\{[^}]*\}")
_LEADING_DASH_RE = re.compile(r"^\s*-+\s*")


@dataclass(frozen=True)
class SubtitleBlock:
    index: int
    start_ms: int
    end_ms: int
    lines: tuple[str, ...]


def _decode(data: bytes) -> str:
    if data.startswith(b"\xef\xbb\xbf"):
        return data[3:].decode("utf-8")
    if data.startswith(b"\xff\xfe"):
        return data.decode("utf-16-le")
    if data.startswith(b"\xfe\xff"):
        return data.decode("utf-16-be")
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        return data.decode("latin-1")


def _to_ms(h: str, m: str, s: str, ms: str) -> int:
    return int(h) * 3_600_000 + int(m) * 60_000 + int(s) * 1_000 + int(ms.ljust(3, "0"))


def _strip_tags(line: str) -> str:
    return _TAG_RE.sub("", line).strip()


def parse_srt(data: bytes | str) -> list[SubtitleBlock]:
    """Parse SRT bytes into blocks.

    Malformed timestamps raise SrtParseError naming the block and line.
    Out-of-order indices are reindexed with a warning; blocks are returned in
    timeline order.
    """
    text = _decode(data) if isinstance(data, bytes) else data
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")

    blocks: list[SubtitleBlock] = []
    i = 0
    n = len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        index_line = lines[i].strip()
        if index_line.isdigit():
            declared = int(index_line)
            i += 1
        else:
            declared = len(blocks) + 1
        if i >= n or "-->" not in lines[i]:
            raise SrtParseError(
                f"expected timestamp line for block {declared} at line {i + 1}",
                block_index=declared,
                line_number=i + 1,
            )
        m = _TIME_RE.search(lines[i])
        if not m:
            raise SrtParseError(
                f"malformed timestamp {lines[i].strip()!r} in block {declared} at line {i + 1}",
                block_index=declared,
                line_number=i + 1,
            )
        start = _to_ms(*m.groups()[:4])
        end = _to_ms(*m.groups()[4:])
        if start >= end:
            raise SrtParseError(
                f"block {declared} has start >= end ({start} >= {end}) at line {i + 1}",
                block_index=declared,
                line_number=i + 1,
            )
        i += 1
        text_lines = []
        while i < n and lines[i].strip():
            stripped = _strip_tags(lines[i])
            if stripped:
                text_lines.append(stripped)
            i += 1
        blocks.append(SubtitleBlock(index=declared, start_ms=start, end_ms=end, lines=tuple(text_lines)))

    ordered = sorted(blocks, key=lambda b: (b.start_ms, b.end_ms))
    if any(a.index >= b.index for a, b in zip(ordered, ordered[1:])):
        log.warning("subtitle indices out of order; reindexing %d blocks", len(blocks))
        ordered = [
            SubtitleBlock(index=k + 1, start_ms=b.start_ms, end_ms=b.end_ms, lines=b.lines)
            for k, b in enumerate(ordered)
        ]
    for a, b in zip(ordered, ordered[1:]):
        if b.start_ms < a.end_ms:
            log.warning("subtitle blocks %d and %d overlap", a.index, b.index)
    return ordered


def subtitle_text(block: SubtitleBlock) -> str:
    """Join a block's lines into one string, dropping tags and dialogue dashes."""
    parts = []
    for line in block.lines:
        cleaned = _LEADING_DASH_RE.sub("", _strip_tags(line)).strip()
        if cleaned:
            parts.append(cleaned)
    return " ".join(parts)


def serialize_srt(blocks: list[SubtitleBlock]) -> str:
    """Render blocks back to SRT text (round-trips with parse_srt)."""
    chunks = []
    for b in blocks:
        start = _fmt_ms(b.start_ms)
        end = _fmt_ms(b.end_ms)
        chunks.append(f"{b.index}\n{start} --> {end}\n" + "\n".join(b.lines))
    return "\n\n".join(chunks) + "\n"


def _fmt_ms(ms: int) -> str:
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, milli = divmod(rem, 1_000)
    return f"{h:02d}:{m:02d}:{s:02d},{milli:03d}"
