import hashlib
import json

import pytest

from asrcurate.errors import DuplicateDocIdError, ManifestError
from asrcurate.manifest import (
    LoadError,
    ManifestRecord,
    load_manifest,
    write_outputs,
)
from asrcurate.model import AudioTextPair, FilterDecision, Segment, TranscriptLine

from conftest import make_pair, write_corpus


def test_load_valid_corpus_in_order(tmp_path):
    pairs = [make_pair(f"doc-{i}") for i in range(3)]
    manifest = write_corpus(tmp_path, pairs)
    loaded = list(load_manifest(manifest))
    assert [p.doc_id for p in loaded] == ["doc-0", "doc-1", "doc-2"]
    assert all(isinstance(p, AudioTextPair) for p in loaded)
    assert loaded[0].manual.lines == pairs[0].manual.lines


def test_missing_file_yields_error_item(tmp_path):
    pairs = [make_pair(f"doc-{i}") for i in range(3)]
    manifest = write_corpus(tmp_path, pairs)
    (tmp_path / "transcripts" / "doc-1.srt").unlink()
    loaded = list(load_manifest(manifest))
    good = [p for p in loaded if isinstance(p, AudioTextPair)]
    bad = [p for p in loaded if isinstance(p, LoadError)]
    assert [p.doc_id for p in good] == ["doc-0", "doc-2"]
    assert len(bad) == 1 and bad[0].doc_id == "doc-1"


def test_duplicate_doc_id_is_hard_error(tmp_path):
    manifest = write_corpus(tmp_path, [make_pair("dup")])
    line = manifest.read_text().strip()
    manifest.write_text(line + "\n" + line + "\n")
    with pytest.raises(DuplicateDocIdError, match="dup"):
        list(load_manifest(manifest))


def test_bad_json_line_is_error_item(tmp_path):
    manifest = write_corpus(tmp_path, [make_pair("ok")])
    manifest.write_text(manifest.read_text() + "{not json\n")
    loaded = list(load_manifest(manifest))
    assert sum(isinstance(x, LoadError) for x in loaded) == 1


def test_path_escapes_rejected():
    with pytest.raises(ManifestError):
        ManifestRecord("d", 1.0, "/etc/passwd")
    with pytest.raises(ManifestError):
        ManifestRecord("d", 1.0, "../outside.srt")


def test_text_lang_from_manifest_applies(tmp_path):
    pair = make_pair("doc-0", text_lang="fr")
    manifest = write_corpus(tmp_path, [pair])
    (loaded,) = list(load_manifest(manifest))
    assert loaded.manual.text_lang == "fr"


def test_write_outputs_zero_kept(tmp_path):
    out = tmp_path / "out"
    summary = write_outputs([], [], out)
    assert summary == {"decisions": 0, "kept": 0}
    assert (out / "manifest.jsonl").read_text() == ""


def test_write_outputs_counts(tmp_path):
    decisions = [
        FilterDecision(f"d{i}", "case-filter", i < 3, "case-upper" if i >= 3 else "ok")
        for i in range(5)
    ]
    kept = [make_pair(f"d{i}") for i in range(3)]
    summary = write_outputs(decisions, kept, tmp_path / "out")
    assert summary == {"decisions": 5, "kept": 3}
    assert len((tmp_path / "out" / "decisions.jsonl").read_text().splitlines()) == 5
    assert len((tmp_path / "out" / "manifest.jsonl").read_text().splitlines()) == 3


def _tree_digest(root):
    h = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        h.update(str(path.relative_to(root)).encode())
        h.update(path.read_bytes())
    return h.hexdigest()


def test_write_outputs_byte_identical_across_runs(tmp_path):
    decisions = [FilterDecision("d0", "s", True, "ok", 0.25)]
    kept = [make_pair("d0", machine_wer=0.0)]
    write_outputs(decisions, kept, tmp_path / "a")
    write_outputs(decisions, kept, tmp_path / "b")
    assert _tree_digest(tmp_path / "a") == _tree_digest(tmp_path / "b")


def test_written_corpus_is_loadable(tmp_path):
    kept = [make_pair("d0", machine_wer=0.2), make_pair("d1")]
    write_outputs([], kept, tmp_path / "out")
    loaded = list(load_manifest(tmp_path / "out" / "manifest.jsonl"))
    assert [p.doc_id for p in loaded] == ["d0", "d1"]
    assert loaded[0].machine is not None
    assert loaded[0].manual.lines == kept[0].manual.lines


def test_write_outputs_segments(tmp_path):
    seg = Segment("doc", 2, 60.0, 30.0, (TranscriptLine(1.0, 2.0, "hi"),))
    write_outputs([], [seg], tmp_path / "out")
    row = json.loads((tmp_path / "out" / "manifest.jsonl").read_text())
    assert row["doc_id"] == "doc#2"
    assert row["window_index"] == 2
    assert row["audio_duration"] == 30.0
    (loaded,) = list(load_manifest(tmp_path / "out" / "manifest.jsonl"))
    assert loaded.manual.lines[0].text == "hi"
