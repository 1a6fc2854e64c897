"""SRT and WebVTT parsing and serialization.

Parsing is strict where corruption would poison downstream accounting
(malformed or reversed timestamps, spans beyond 99 hours) and lenient
where real captions routinely deviate (SRT cue counters are ignored,
overlapping cues are allowed). Text is NFC-normalized on ingest so exact
repeat detection is well-defined. Multi-line cues become one line per
physical text row, all sharing the cue's time span; serialization emits
one cue per line, so parse -> serialize -> parse is a fixed point.
"""

from __future__ import annotations

import re
import unicodedata
from typing import Optional

from .errors import FormatDetectionError, ParseError
from .model import TranscriptDocument, TranscriptLine

MAX_HOURS = 99

_SRT_TIME = re.compile(
    r"(\d{1,3}):(\d{2}):(\d{2})[,.](\d{1,3})\s*-->\s*(\d{1,3}):(\d{2}):(\d{2})[,.](\d{1,3})"
)
_VTT_TIME = re.compile(
    r"(?:(\d{1,3}):)?(\d{2}):(\d{2})\.(\d{3})\s*-->\s*(?:(\d{1,3}):)?(\d{2}):(\d{2})\.(\d{3})"
)
_VTT_TAG = re.compile(r"<[^>]*>")
# SRT styling tags (<i>, <font color=...>, </b>); letter-initial only so
# angle brackets in prose ("a < b") survive
_SRT_TAG = re.compile(r"</?[A-Za-z][^>]*>")


def _to_seconds(h: str, m: str, s: str, ms: str, lineno: int) -> float:
    hours, minutes, seconds = int(h), int(m), int(s)
    if hours > MAX_HOURS:
        raise ParseError(f"timestamp beyond {MAX_HOURS} hours", line=lineno)
    if minutes > 59 or seconds > 59:
        raise ParseError("malformed timestamp", line=lineno)
    millis = int(ms.ljust(3, "0"))
    # single division keeps millisecond-precision times exactly reproducible
    total_ms = (hours * 3600 + minutes * 60 + seconds) * 1000 + millis
    return total_ms / 1000.0


def _decode(data: bytes) -> str:
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise ParseError(f"not valid UTF-8: {e}") from None
    return text.replace("\r\n", "\n").replace("\r", "\n")


def detect_format(data: bytes) -> str:
    """Best-effort format sniff: returns "srt" or "vtt"."""
    text = _decode(data)
    for raw in text.split("\n"):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("WEBVTT"):
            return "vtt"
        break
    head = "\n".join(text.split("\n")[:50])
    if _SRT_TIME.search(head):
        return "srt"
    if _VTT_TIME.search(head):
        return "vtt"
    raise FormatDetectionError("cannot detect subtitle format (no hint given)")


def _clean_text_line(raw: str, tag_pattern: re.Pattern) -> str:
    return unicodedata.normalize("NFC", tag_pattern.sub("", raw).strip())


def _cue_lines(
    start: float, end: float, body: list[tuple[int, str]], tag_pattern: re.Pattern
) -> list[TranscriptLine]:
    out = []
    for _, raw in body:
        text = _clean_text_line(raw, tag_pattern)
        if text:
            out.append(TranscriptLine(start, end, text))
    return out


def _parse_srt(text: str, doc_id: str) -> TranscriptDocument:
    lines: list[TranscriptLine] = []
    numbered = list(enumerate(text.split("\n"), start=1))
    i = 0
    saw_cue = False
    while i < len(numbered):
        lineno, raw = numbered[i]
        stripped = raw.strip()
        if not stripped:
            i += 1
            continue
        # cue counters are ignored, not validated for contiguity
        if stripped.isdigit() and i + 1 < len(numbered):
            nxt = numbered[i + 1][1]
            if "-->" in nxt:
                i += 1
                lineno, raw = numbered[i]
                stripped = raw.strip()
        m = _SRT_TIME.match(stripped)
        if not m:
            raise ParseError(f"expected timestamp line, got {stripped!r}", line=lineno)
        start = _to_seconds(m.group(1), m.group(2), m.group(3), m.group(4), lineno)
        end = _to_seconds(m.group(5), m.group(6), m.group(7), m.group(8), lineno)
        if start > end:
            raise ParseError(f"cue start {start} after end {end}", line=lineno)
        i += 1
        body = []
        while i < len(numbered) and numbered[i][1].strip():
            body.append(numbered[i])
            i += 1
        lines.extend(_cue_lines(start, end, body, _SRT_TAG))
        saw_cue = True
    if not saw_cue:
        raise ParseError("no cues found")
    return TranscriptDocument(doc_id, tuple(lines))


def _parse_vtt(text: str, doc_id: str) -> TranscriptDocument:
    numbered = list(enumerate(text.split("\n"), start=1))
    i = 0
    # header
    while i < len(numbered) and not numbered[i][1].strip():
        i += 1
    if i >= len(numbered) or not numbered[i][1].strip().startswith("WEBVTT"):
        raise ParseError("missing WEBVTT header", line=1)
    i += 1
    lines: list[TranscriptLine] = []
    while i < len(numbered):
        lineno, raw = numbered[i]
        stripped = raw.strip()
        if not stripped:
            i += 1
            continue
        if stripped.split(" ")[0] in ("NOTE", "STYLE", "REGION"):
            while i < len(numbered) and numbered[i][1].strip():
                i += 1
            continue
        m = _VTT_TIME.search(stripped)
        if m is None:
            # cue identifier line; the timing line must follow
            i += 1
            if i >= len(numbered):
                raise ParseError("dangling cue identifier", line=lineno)
            lineno, raw = numbered[i]
            stripped = raw.strip()
            m = _VTT_TIME.search(stripped)
            if m is None:
                raise ParseError(
                    f"expected timestamp line, got {stripped!r}", line=lineno
                )
        start = _to_seconds(
            m.group(1) or "0", m.group(2), m.group(3), m.group(4), lineno
        )
        end = _to_seconds(m.group(5) or "0", m.group(6), m.group(7), m.group(8), lineno)
        if start > end:
            raise ParseError(f"cue start {start} after end {end}", line=lineno)
        i += 1
        body = []
        while i < len(numbered) and numbered[i][1].strip():
            body.append(numbered[i])
            i += 1
        lines.extend(_cue_lines(start, end, body, _VTT_TAG))
    return TranscriptDocument(doc_id, tuple(lines))


def parse_subtitle(
    data: bytes, format_hint: Optional[str] = None, doc_id: str = ""
) -> TranscriptDocument:
    """Parse SRT or WebVTT bytes into a TranscriptDocument.

    A UTF-8 byte-order mark is tolerated and stripped. With no hint the
    format is sniffed; an undetectable format raises
    FormatDetectionError.
    """
    if not data or not data.strip():
        raise ParseError("empty file")
    fmt = format_hint or detect_format(data)
    if fmt not in ("srt", "vtt"):
        raise FormatDetectionError(f"unknown format hint {fmt!r}")
    text = _decode(data)
    if fmt == "srt":
        return _parse_srt(text, doc_id)
    return _parse_vtt(text, doc_id)


def _format_time(seconds: float, sep: str) -> str:
    if seconds < 0:
        raise ValueError("negative timestamp")
    ms = round(seconds * 1000)
    hours, rem = divmod(ms, 3_600_000)
    if hours > MAX_HOURS:
        raise ValueError(f"timestamp beyond {MAX_HOURS} hours")
    minutes, rem = divmod(rem, 60_000)
    secs, millis = divmod(rem, 1000)
    return f"{hours:02d}:{minutes:02d}:{secs:02d}{sep}{millis:03d}"


def write_srt(doc: TranscriptDocument) -> str:
    """Serialize with one cue per line, millisecond precision."""
    blocks = []
    for i, line in enumerate(doc.lines, start=1):
        stamp = f"{_format_time(line.start, ',')} --> {_format_time(line.end, ',')}"
        blocks.append(f"{i}\n{stamp}\n{line.text}\n")
    return "\n".join(blocks)


def write_vtt(doc: TranscriptDocument) -> str:
    blocks = ["WEBVTT\n"]
    for line in doc.lines:
        stamp = f"{_format_time(line.start, '.')} --> {_format_time(line.end, '.')}"
        blocks.append(f"{stamp}\n{line.text}\n")
    return "\n".join(blocks)
