"""Guards the shared binding fixtures: the committed golden files must
stay exactly reproducible from the committed corpus through the CLI
code path, because the language bindings compare against them verbatim."""

import json
from pathlib import Path

import pytest

from asrcurate.cli import main as cli_main
from asrcurate.manifest import load_manifest
from asrcurate.model import AudioTextPair, pair_to_dict
from asrcurate.wer import word_error_rate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "bindings"

pytestmark = pytest.mark.skipif(
    not FIXTURES.exists(), reason="binding fixtures not generated"
)


def test_pairs_jsonl_matches_corpus():
    loaded = [
        p
        for p in load_manifest(FIXTURES / "corpus" / "manifest.jsonl")
        if isinstance(p, AudioTextPair)
    ]
    want = [
        json.dumps(pair_to_dict(p), sort_keys=True)
        for p in loaded
    ]
    got = (FIXTURES / "pairs.jsonl").read_text().splitlines()
    assert got == want


def test_golden_decisions_reproducible(tmp_path):
    out = tmp_path / "out"
    rc = cli_main(
        [
            "filter",
            "--manifest", str(FIXTURES / "corpus" / "manifest.jsonl"),
            "--out-dir", str(out),
        ]
    )
    assert rc == 0
    assert (out / "decisions.jsonl").read_bytes() == (
        FIXTURES / "golden" / "decisions.jsonl"
    ).read_bytes()


def test_golden_wer_reproducible():
    cases = json.loads((FIXTURES / "wer_cases.json").read_text())
    golden = json.loads((FIXTURES / "golden" / "wer.json").read_text())
    assert {c["dataset"] for c in cases} == set(golden)
    for case in cases:
        b = word_error_rate(case["reference"], case["hypothesis"], case["profile"])
        g = golden[case["dataset"]]
        assert g["profile"] == case["profile"]
        assert b.to_dict() == {k: g[k] for k in b.to_dict()}
