"""Line-delimited JSON manifests binding transcripts to audio metadata.

A manifest row references its transcript files by paths relative to a
corpus root; absolute paths and parent-directory escapes are rejected so
a manifest cannot read outside its corpus. A per-record failure yields
an error item in the stream instead of aborting the load; a duplicate
doc_id is a hard error because deduplication and reporting key on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path, PurePosixPath
from typing import Iterable, Iterator, Optional, Union

from .errors import DuplicateDocIdError, ManifestError
from .model import (
    AudioTextPair,
    FilterDecision,
    Segment,
    TranscriptDocument,
)
from .subtitles import parse_subtitle, write_srt


@dataclass(frozen=True)
class ManifestRecord:
    doc_id: str
    audio_duration: float
    manual_path: str
    machine_path: Optional[str] = None
    audio_lang: Optional[str] = None
    audio_lang_confidence: Optional[float] = None
    text_lang: Optional[str] = None

    def __post_init__(self):
        for p in (self.manual_path, self.machine_path):
            if p is not None:
                _check_relative(p)

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "audio_duration": self.audio_duration,
            "manual_path": self.manual_path,
            "machine_path": self.machine_path,
            "audio_lang": self.audio_lang,
            "audio_lang_confidence": self.audio_lang_confidence,
            "text_lang": self.text_lang,
        }

    @staticmethod
    def from_dict(d: dict) -> "ManifestRecord":
        return ManifestRecord(
            doc_id=d["doc_id"],
            audio_duration=d["audio_duration"],
            manual_path=d["manual_path"],
            machine_path=d.get("machine_path"),
            audio_lang=d.get("audio_lang"),
            audio_lang_confidence=d.get("audio_lang_confidence"),
            text_lang=d.get("text_lang"),
        )


@dataclass(frozen=True)
class LoadError:
    """Stream item standing in for a record that could not be loaded."""

    doc_id: str
    message: str


def _check_relative(path: str):
    p = PurePosixPath(path)
    if p.is_absolute() or path.startswith("/") or (len(path) > 1 and path[1] == ":"):
        raise ManifestError(f"absolute path not allowed: {path!r}")
    if ".." in p.parts:
        raise ManifestError(f"parent-directory escape not allowed: {path!r}")


def _format_hint(path: str) -> Optional[str]:
    suffix = PurePosixPath(path).suffix.lower()
    return {".srt": "srt", ".vtt": "vtt"}.get(suffix)


def _load_doc(root: Path, rel_path: str, doc_id: str) -> TranscriptDocument:
    data = (root / rel_path).read_bytes()
    return parse_subtitle(data, format_hint=_format_hint(rel_path), doc_id=doc_id)


def load_manifest(
    manifest_path: Union[str, Path], corpus_root: Optional[Union[str, Path]] = None
) -> Iterator[Union[AudioTextPair, LoadError]]:
    """Yield pairs (or LoadError items) in manifest file order.

    Transcript files are parsed lazily as the stream is consumed.
    """
    manifest_path = Path(manifest_path)
    root = Path(corpus_root) if corpus_root is not None else manifest_path.parent
    seen: set[str] = set()
    with manifest_path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = ManifestRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, ManifestError, TypeError) as e:
                yield LoadError("", f"manifest line {lineno}: {e}")
                continue
            if record.doc_id in seen:
                raise DuplicateDocIdError(
                    f"duplicate doc_id {record.doc_id!r} at manifest line {lineno}"
                )
            seen.add(record.doc_id)
            try:
                manual = _load_doc(root, record.manual_path, record.doc_id)
                if record.text_lang is not None:
                    manual = manual.with_lang(record.text_lang)
                machine = None
                if record.machine_path is not None:
                    machine = _load_doc(root, record.machine_path, record.doc_id)
            except Exception as e:  # error item, not abort
                yield LoadError(record.doc_id, str(e))
                continue
            yield AudioTextPair(
                doc_id=record.doc_id,
                audio_duration=record.audio_duration,
                manual=manual,
                machine=machine,
                audio_lang=record.audio_lang,
                audio_lang_confidence=record.audio_lang_confidence,
            )


def _safe_name(doc_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in doc_id)


def write_outputs(
    decisions: Iterable[FilterDecision],
    kept: Iterable[Union[AudioTextPair, Segment]],
    out_dir: Union[str, Path],
) -> dict:
    """Write a loadable output corpus plus the decision log.

    Kept pairs become manifest rows with their transcripts re-serialized
    as SRT; kept segments become rows keyed by ``doc_id#window_index``.
    Output bytes are identical across runs given identical input order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_decisions = 0
    with (out / "decisions.jsonl").open("w", encoding="utf-8") as fh:
        for d in decisions:
            fh.write(d.to_json() + "\n")
            n_decisions += 1
    n_kept = 0
    with (out / "manifest.jsonl").open("w", encoding="utf-8") as fh:
        for item in kept:
            if isinstance(item, AudioTextPair):
                name = _safe_name(item.doc_id)
                manual_rel = f"transcripts/{name}.srt"
                _write_text(out / manual_rel, write_srt(item.manual))
                machine_rel = None
                if item.machine is not None:
                    machine_rel = f"machine/{name}.srt"
                    _write_text(out / machine_rel, write_srt(item.machine))
                row = ManifestRecord(
                    doc_id=item.doc_id,
                    audio_duration=item.audio_duration,
                    manual_path=manual_rel,
                    machine_path=machine_rel,
                    audio_lang=item.audio_lang,
                    audio_lang_confidence=item.audio_lang_confidence,
                    text_lang=item.manual.text_lang,
                ).to_dict()
            elif isinstance(item, Segment):
                name = f"{_safe_name(item.doc_id)}_{item.window_index}"
                rel = f"segments/{name}.srt"
                doc = TranscriptDocument(item.segment_id, item.lines)
                _write_text(out / rel, write_srt(doc))
                row = ManifestRecord(
                    doc_id=item.segment_id,
                    audio_duration=item.window_duration,
                    manual_path=rel,
                ).to_dict()
                row["window_index"] = item.window_index
                row["window_start"] = item.window_start
                row["source_doc_id"] = item.doc_id
            else:
                raise TypeError(f"cannot write {type(item).__name__}")
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            n_kept += 1
    return {"decisions": n_decisions, "kept": n_kept}


def _write_text(path: Path, content: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
