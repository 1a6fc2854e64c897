"""Shared fixtures: synthetic pairs, on-disk corpora, token generators."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from asrcurate.model import AudioTextPair, TranscriptDocument, TranscriptLine
from asrcurate.subtitles import write_srt

# small English-looking vocabulary so the built-in language detector
# recognizes generated docs as English
EN_FILLER = (
    "the and for you that with have this from they know want good time "
    "people just like about there what when make than then them can will"
).split()


def make_lines(texts, start=0.0, step=2.0):
    lines = []
    t = start
    for text in texts:
        lines.append(TranscriptLine(t, t + step * 0.9, text))
        t += step
    return tuple(lines)


def make_doc(doc_id, texts, text_lang=None, start=0.0, step=2.0):
    return TranscriptDocument(doc_id, make_lines(texts, start, step), text_lang)


def english_sentence(rng: random.Random, n_words: int) -> str:
    return " ".join(rng.choice(EN_FILLER) for _ in range(n_words))


def make_pair(
    doc_id,
    n_lines=6,
    duration=None,
    audio_lang="en",
    text_lang="en",
    machine_wer=None,
    rng=None,
    upper=False,
    repeat=False,
    step=2.0,
):
    """A synthetic pair; machine_wer=None means no machine transcript,
    otherwise the machine text is the manual text with that fraction of
    words substituted (per line)."""
    rng = rng or random.Random(doc_id)
    texts = [english_sentence(rng, 8) for _ in range(n_lines)]
    if upper:
        texts = [t.upper() for t in texts]
    if repeat and len(texts) >= 2:
        texts[1] = texts[0]
    manual = make_doc(doc_id, texts, text_lang, step=step)
    machine = None
    if machine_wer is not None:
        machine_texts = []
        for t in texts:
            words = t.split()
            k = round(machine_wer * len(words))
            idxs = rng.sample(range(len(words)), k) if k else []
            for i in idxs:
                words[i] = "zz" + words[i]
            machine_texts.append(" ".join(words))
        machine = make_doc(doc_id, machine_texts, step=step)
    if duration is None:
        duration = manual.max_end() + 1.0
    return AudioTextPair(
        doc_id=doc_id,
        audio_duration=duration,
        manual=manual,
        machine=machine,
        audio_lang=audio_lang,
        audio_lang_confidence=0.95 if audio_lang else None,
    )


def write_corpus(root: Path, pairs) -> Path:
    """Materialize pairs as SRT files plus a manifest; returns its path."""
    root.mkdir(parents=True, exist_ok=True)
    manifest_path = root / "manifest.jsonl"
    with manifest_path.open("w", encoding="utf-8") as fh:
        for pair in pairs:
            manual_rel = f"transcripts/{pair.doc_id}.srt"
            path = root / manual_rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(write_srt(pair.manual), encoding="utf-8")
            machine_rel = None
            if pair.machine is not None:
                machine_rel = f"machine/{pair.doc_id}.srt"
                mpath = root / machine_rel
                mpath.parent.mkdir(parents=True, exist_ok=True)
                mpath.write_text(write_srt(pair.machine), encoding="utf-8")
            fh.write(
                json.dumps(
                    {
                        "doc_id": pair.doc_id,
                        "audio_duration": pair.audio_duration,
                        "manual_path": manual_rel,
                        "machine_path": machine_rel,
                        "audio_lang": pair.audio_lang,
                        "audio_lang_confidence": pair.audio_lang_confidence,
                        "text_lang": pair.manual.text_lang,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    return manifest_path


@pytest.fixture
def mixed_corpus(tmp_path):
    """A corpus exercising every default stage: language mismatches,
    casing, repeats, machine disagreement, near-duplicates."""
    rng = random.Random(7)
    first = make_pair("clean-00", machine_wer=0.0, rng=rng)
    pairs = [
        first,
        make_pair("clean-01", machine_wer=0.1, rng=rng),
        make_pair("clean-02", machine_wer=None, rng=rng),
        make_pair("badlang-es", audio_lang="es", text_lang="es", rng=rng),
        make_pair("badlang-missing", audio_lang=None, rng=rng),
        make_pair("upper-00", upper=True, rng=rng),
        make_pair("repeat-00", repeat=True, rng=rng),
        make_pair("highwer-00", machine_wer=0.8, rng=rng),
        # exact duplicate of clean-00's text under another id
        AudioTextPair(
            doc_id="dupe-of-clean-00",
            audio_duration=first.audio_duration,
            manual=TranscriptDocument("dupe-of-clean-00", first.manual.lines, "en"),
            machine=None,
            audio_lang="en",
            audio_lang_confidence=0.95,
        ),
    ]
    manifest = write_corpus(tmp_path / "corpus", pairs)
    return manifest, pairs
