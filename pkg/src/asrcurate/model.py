"""Core data model shared by every pipeline stage.

All types are immutable after construction and safe to share across
parallel workers. Construction is permissive: invariant violations are
reported by :func:`validate_pair` as findings, not raised, so that dirty
real-world data can be loaded, inspected, and filtered rather than
crashing the pipeline. Parsers are stricter (see ``subtitles``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Optional


@dataclass(frozen=True)
class TranscriptLine:
    """One timed caption line. Timestamps are seconds from document start."""

    start: float
    end: float
    text: str


@dataclass(frozen=True)
class TranscriptDocument:
    """An ordered list of timed caption lines plus identity metadata.

    Lines are sorted by start time on construction (stable, so ties keep
    their original order).
    """

    doc_id: str
    lines: tuple[TranscriptLine, ...]
    text_lang: Optional[str] = None

    def __post_init__(self):
        lines = tuple(self.lines)
        if any(lines[i].start > lines[i + 1].start for i in range(len(lines) - 1)):
            lines = tuple(sorted(lines, key=lambda l: l.start))
        object.__setattr__(self, "lines", lines)

    @property
    def char_count(self) -> int:
        return sum(len(l.text) for l in self.lines)

    def full_text(self) -> str:
        """Line texts joined by single spaces, the unit WER and dedup see."""
        return " ".join(l.text for l in self.lines)

    def max_end(self) -> float:
        return max((l.end for l in self.lines), default=0.0)

    def with_lang(self, tag: Optional[str]) -> "TranscriptDocument":
        return TranscriptDocument(self.doc_id, self.lines, tag)


@dataclass(frozen=True)
class AudioTextPair:
    """A manifest record binding a manual transcript, an optional machine
    transcript, the audio duration, and language tags."""

    doc_id: str
    audio_duration: float
    manual: TranscriptDocument
    machine: Optional[TranscriptDocument] = None
    audio_lang: Optional[str] = None
    audio_lang_confidence: Optional[float] = None

    def with_manual(self, doc: TranscriptDocument) -> "AudioTextPair":
        return AudioTextPair(
            self.doc_id,
            self.audio_duration,
            doc,
            self.machine,
            self.audio_lang,
            self.audio_lang_confidence,
        )


class CaseTag(Enum):
    UPPER = "upper"
    LOWER = "lower"
    MIXED = "mixed"


@dataclass(frozen=True)
class FilterDecision:
    """Outcome of one filter stage for one document (or segment).

    ``reason`` is a short machine-readable code; it must be non-empty
    whenever ``kept`` is false. Segment-level decisions use the id form
    ``{doc_id}#{window_index}``.
    """

    doc_id: str
    stage: str
    kept: bool
    reason: str = ""
    score: Optional[float] = None

    def __post_init__(self):
        if not self.kept and not self.reason:
            raise ValueError("dropped decision requires a reason code")

    def to_json(self) -> str:
        return json.dumps(
            {
                "doc_id": self.doc_id,
                "stage": self.stage,
                "kept": self.kept,
                "reason": self.reason,
                "score": self.score,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(line: str) -> "FilterDecision":
        d = json.loads(line)
        return FilterDecision(
            d["doc_id"], d["stage"], d["kept"], d.get("reason", ""), d.get("score")
        )


@dataclass(frozen=True)
class Segment:
    """A <=30-second training window with timestamps rebased to its start."""

    doc_id: str
    window_index: int
    window_start: float
    window_duration: float
    lines: tuple[TranscriptLine, ...]

    @property
    def segment_id(self) -> str:
        return f"{self.doc_id}#{self.window_index}"

    def full_text(self) -> str:
        return " ".join(l.text for l in self.lines)


@dataclass(frozen=True)
class ValidationFinding:
    severity: str  # "warning" | "error"
    path: str
    message: str


def _check_line(prefix: str, line: TranscriptLine, out: list[ValidationFinding]):
    if line.start < 0:
        out.append(ValidationFinding("error", f"{prefix}.start", "negative start time"))
    if line.start > line.end:
        out.append(
            ValidationFinding(
                "error", prefix, f"start {line.start} after end {line.end}"
            )
        )
    if "\n" in line.text or "\r" in line.text:
        out.append(ValidationFinding("error", f"{prefix}.text", "embedded line break"))


def validate_pair(pair: AudioTextPair) -> list[ValidationFinding]:
    """Check every type invariant; empty list means the pair is clean.

    Findings carry a severity and a field path. An audio duration shorter
    than the last caption is a data-quality warning, not an error.
    """
    findings: list[ValidationFinding] = []
    if pair.manual.doc_id != pair.doc_id:
        findings.append(
            ValidationFinding(
                "error",
                "manual.doc_id",
                f"{pair.manual.doc_id!r} does not match pair id {pair.doc_id!r}",
            )
        )
    if pair.machine is not None and pair.machine.doc_id != pair.doc_id:
        findings.append(
            ValidationFinding(
                "error",
                "machine.doc_id",
                f"{pair.machine.doc_id!r} does not match pair id {pair.doc_id!r}",
            )
        )
    if pair.audio_duration <= 0:
        findings.append(
            ValidationFinding("error", "audio_duration", "must be positive")
        )
    if pair.audio_lang_confidence is not None and not (
        0.0 <= pair.audio_lang_confidence <= 1.0
    ):
        findings.append(
            ValidationFinding("error", "audio_lang_confidence", "outside [0, 1]")
        )
    for i, line in enumerate(pair.manual.lines):
        _check_line(f"manual.lines[{i}]", line, findings)
    if pair.machine is not None:
        for i, line in enumerate(pair.machine.lines):
            _check_line(f"machine.lines[{i}]", line, findings)
    max_end = pair.manual.max_end()
    if max_end > pair.audio_duration:
        findings.append(
            ValidationFinding(
                "warning",
                "audio_duration",
                f"last caption ends at {max_end} but audio lasts {pair.audio_duration}",
            )
        )
    return findings


# --- JSON encoding of pairs (exact float round-trip) ----------------------


def line_to_dict(line: TranscriptLine) -> dict:
    return {"start": line.start, "end": line.end, "text": line.text}


def doc_to_dict(doc: TranscriptDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "text_lang": doc.text_lang,
        "lines": [line_to_dict(l) for l in doc.lines],
    }


def doc_from_dict(d: dict) -> TranscriptDocument:
    return TranscriptDocument(
        d["doc_id"],
        tuple(TranscriptLine(l["start"], l["end"], l["text"]) for l in d["lines"]),
        d.get("text_lang"),
    )


def pair_to_dict(pair: AudioTextPair) -> dict:
    return {
        "doc_id": pair.doc_id,
        "audio_duration": pair.audio_duration,
        "audio_lang": pair.audio_lang,
        "audio_lang_confidence": pair.audio_lang_confidence,
        "manual": doc_to_dict(pair.manual),
        "machine": doc_to_dict(pair.machine) if pair.machine else None,
    }


def pair_from_dict(d: dict) -> AudioTextPair:
    return AudioTextPair(
        d["doc_id"],
        d["audio_duration"],
        doc_from_dict(d["manual"]),
        doc_from_dict(d["machine"]) if d.get("machine") else None,
        d.get("audio_lang"),
        d.get("audio_lang_confidence"),
    )


def encode_pair(pair: AudioTextPair) -> str:
    return json.dumps(pair_to_dict(pair), sort_keys=True)


def decode_pair(s: str) -> AudioTextPair:
    return pair_from_dict(json.loads(s))


def segment_to_dict(seg: Segment) -> dict:
    return {
        "doc_id": seg.doc_id,
        "window_index": seg.window_index,
        "window_start": seg.window_start,
        "window_duration": seg.window_duration,
        "lines": [line_to_dict(l) for l in seg.lines],
    }


def segment_from_dict(d: dict) -> Segment:
    return Segment(
        d["doc_id"],
        d["window_index"],
        d["window_start"],
        d["window_duration"],
        tuple(TranscriptLine(l["start"], l["end"], l["text"]) for l in d["lines"]),
    )
