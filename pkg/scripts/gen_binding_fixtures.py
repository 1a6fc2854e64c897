#!/usr/bin/env python3
"""Regenerate the shared fixtures under fixtures/bindings/.

The language bindings must return bit-identical results to the CLI, so
both sides test against the same frozen inputs and golden outputs:

  corpus/             50-pair corpus (manifest + SRT files)
  pairs.jsonl         the same pairs as JSON request bodies
  wer_cases.json      scoring cases, one dataset per case
  eval_records.jsonl  the same cases as CLI eval input
  golden/decisions.jsonl   CLI `filter` output over the corpus
  golden/wer.json          CLI `eval --json` output per profile

Deterministic: rerunning produces byte-identical files.
"""

from __future__ import annotations

import json
import random
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures" / "bindings"

sys.path.insert(0, str(REPO / "src"))

from asrcurate.cli import main as cli_main  # noqa: E402
from asrcurate.manifest import load_manifest  # noqa: E402
from asrcurate.model import pair_to_dict  # noqa: E402
from asrcurate.subtitles import write_srt  # noqa: E402
from asrcurate.model import AudioTextPair, TranscriptDocument, TranscriptLine  # noqa: E402

WORDS = (
    "the and for you that with have this from they know want good time "
    "people just like about there what when make than then them can will"
).split()


def _sentence(rng: random.Random, n: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n))


def _doc(doc_id, texts, lang=None):
    lines = tuple(
        TranscriptLine(i * 2.0, i * 2.0 + 1.8, t) for i, t in enumerate(texts)
    )
    return TranscriptDocument(doc_id, lines, lang)


def build_pairs() -> list[AudioTextPair]:
    rng = random.Random(20250301)
    pairs = []
    for i in range(50):
        kind = i % 6
        doc_id = f"pair-{i:02d}"
        texts = [_sentence(rng, 8) for _ in range(5)]
        if kind == 1:
            texts = [t.upper() for t in texts]
        if kind == 2:
            texts[2] = texts[1]
        machine = None
        if kind in (3, 4):
            wer = 0.8 if kind == 3 else 0.1
            machine_texts = []
            for t in texts:
                ws = t.split()
                k = round(wer * len(ws))
                for j in rng.sample(range(len(ws)), k):
                    ws[j] = "zz" + ws[j]
                machine_texts.append(" ".join(ws))
            machine = _doc(doc_id, machine_texts)
        audio_lang = "en"
        text_lang = "en"
        if kind == 5:
            audio_lang = rng.choice(["es", None])
            text_lang = rng.choice(["es", None])
        pairs.append(
            AudioTextPair(
                doc_id=doc_id,
                audio_duration=11.0,
                manual=_doc(doc_id, texts, text_lang),
                machine=machine,
                audio_lang=audio_lang,
                audio_lang_confidence=0.9 if audio_lang else None,
            )
        )
    return pairs


def write_corpus(pairs, root: Path):
    root.mkdir(parents=True)
    with (root / "manifest.jsonl").open("w", encoding="utf-8") as fh:
        for pair in pairs:
            manual_rel = f"transcripts/{pair.doc_id}.srt"
            (root / "transcripts").mkdir(exist_ok=True)
            (root / manual_rel).write_text(write_srt(pair.manual), encoding="utf-8")
            machine_rel = None
            if pair.machine is not None:
                machine_rel = f"machine/{pair.doc_id}.srt"
                (root / "machine").mkdir(exist_ok=True)
                (root / machine_rel).write_text(
                    write_srt(pair.machine), encoding="utf-8"
                )
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


WER_CASES = [
    ("identity", "hello world", "hello world", "basic"),
    ("all-subs", "a b c", "x y z", "basic"),
    ("deletion", "the cat sat on the mat", "the cat sat on mat", "basic"),
    ("insertions", "a", "a b c", "basic"),
    ("empty-hyp", "one two three", "", "basic"),
    ("casing", "Hello, WORLD!", "hello world", "basic"),
    ("brackets", "[Music] it's fine", "it's fine", "basic"),
    ("long-mixed", "the quick brown fox jumps over the lazy dog",
     "the quik brown foxes jump over a lazy dog", "basic"),
    ("contraction", "it's a test", "it is a test", "aggressive"),
    ("ampersand", "rock & roll", "rock and roll", "aggressive"),
    ("hyphens", "a well-known fact", "a well known fact", "aggressive"),
    ("numbers", "call 911 now", "call 911 now", "basic"),
]


def main() -> int:
    if FIXTURES.exists():
        shutil.rmtree(FIXTURES)
    golden = FIXTURES / "golden"
    golden.mkdir(parents=True)

    pairs = build_pairs()
    write_corpus(pairs, FIXTURES / "corpus")

    loaded = [
        p for p in load_manifest(FIXTURES / "corpus" / "manifest.jsonl")
        if isinstance(p, AudioTextPair)
    ]
    assert len(loaded) == 50
    with (FIXTURES / "pairs.jsonl").open("w", encoding="utf-8") as fh:
        for pair in loaded:
            fh.write(json.dumps(pair_to_dict(pair), sort_keys=True) + "\n")

    with (FIXTURES / "wer_cases.json").open("w", encoding="utf-8") as fh:
        json.dump(
            [
                {"dataset": n, "reference": r, "hypothesis": h, "profile": p}
                for n, r, h, p in WER_CASES
            ],
            fh,
            indent=2,
        )
        fh.write("\n")

    with (FIXTURES / "eval_records.jsonl").open("w", encoding="utf-8") as fh:
        for name, ref, hyp, _profile in WER_CASES:
            fh.write(
                json.dumps(
                    {
                        "dataset": name,
                        "utterance_id": "u0",
                        "reference": ref,
                        "hypothesis": hyp,
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "filter-out"
        rc = cli_main(
            [
                "filter",
                "--manifest", str(FIXTURES / "corpus" / "manifest.jsonl"),
                "--out-dir", str(out),
            ]
        )
        assert rc == 0
        shutil.copyfile(out / "decisions.jsonl", golden / "decisions.jsonl")

    wer_golden = {}
    for profile in ("basic", "aggressive"):
        cases = [c for c in WER_CASES if c[3] == profile]
        with tempfile.TemporaryDirectory() as tmp:
            records = Path(tmp) / "records.jsonl"
            with records.open("w", encoding="utf-8") as fh:
                for name, ref, hyp, _p in cases:
                    fh.write(
                        json.dumps(
                            {
                                "dataset": name,
                                "utterance_id": "u0",
                                "reference": ref,
                                "hypothesis": hyp,
                            }
                        )
                        + "\n"
                    )
            result = subprocess.run(
                [sys.executable, "-m", "asrcurate.cli", "eval", str(records),
                 "--profile", profile, "--json"],
                capture_output=True,
                text=True,
                check=True,
            )
            report = json.loads(result.stdout)
            for name, breakdown in report["per_dataset"].items():
                wer_golden[name] = {"profile": profile, **breakdown}

    with (golden / "wer.json").open("w", encoding="utf-8") as fh:
        json.dump(wer_golden, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(f"fixtures written under {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
