import random
import unicodedata

import pytest

from asrcurate.errors import FormatDetectionError, ParseError
from asrcurate.model import TranscriptDocument, TranscriptLine
from asrcurate.subtitles import detect_format, parse_subtitle, write_srt, write_vtt


def test_srt_single_cue():
    doc = parse_subtitle(b"1\n00:00:01,000 --> 00:00:02,500\nhello\n", doc_id="d")
    assert doc.lines == (TranscriptLine(1.0, 2.5, "hello"),)


def test_vtt_voice_tag_stripped():
    data = b"WEBVTT\n\n00:01.000 --> 00:02.000\n<v Roger>hi</v>\n"
    doc = parse_subtitle(data, doc_id="d")
    assert doc.lines == (TranscriptLine(1.0, 2.0, "hi"),)


def test_reversed_cue_is_parse_error():
    with pytest.raises(ParseError):
        parse_subtitle(b"1\n00:00:02,000 --> 00:00:01,000\nx\n", format_hint="srt")


def test_multiline_cue_one_line_per_row():
    data = b"1\n00:00:01,000 --> 00:00:04,000\nfirst row\nsecond row\n"
    doc = parse_subtitle(data, format_hint="srt")
    assert [l.text for l in doc.lines] == ["first row", "second row"]
    assert all(l.start == 1.0 and l.end == 4.0 for l in doc.lines)


def test_bom_and_crlf_tolerated():
    data = "﻿1\r\n00:00:00,500 --> 00:00:01,000\r\nhey\r\n".encode("utf-8")
    doc = parse_subtitle(data)
    assert doc.lines[0].text == "hey"
    assert doc.lines[0].start == 0.5


def test_format_detection():
    assert detect_format(b"WEBVTT\n\n00:01.000 --> 00:02.000\nx\n") == "vtt"
    assert detect_format(b"1\n00:00:01,000 --> 00:00:02,000\nx\n") == "srt"
    with pytest.raises(FormatDetectionError):
        parse_subtitle(b"just some text\nwith no timestamps\n")


def test_empty_file_is_error():
    with pytest.raises(ParseError):
        parse_subtitle(b"")
    with pytest.raises(ParseError):
        parse_subtitle(b"   \n  \n")


def test_timestamps_beyond_99_hours_rejected():
    with pytest.raises(ParseError):
        parse_subtitle(b"1\n100:00:00,000 --> 100:00:01,000\nx\n", format_hint="srt")


def test_malformed_timestamp_carries_line_number():
    data = b"1\n00:00:aa,000 --> 00:00:02,000\nx\n"
    with pytest.raises(ParseError, match="line 2"):
        parse_subtitle(data, format_hint="srt")


def test_srt_counters_ignored():
    # counters out of order and missing entirely
    data = b"7\n00:00:01,000 --> 00:00:02,000\na\n\n00:00:03,000 --> 00:00:04,000\nb\n"
    doc = parse_subtitle(data, format_hint="srt")
    assert [l.text for l in doc.lines] == ["a", "b"]


def test_vtt_note_and_identifier_blocks():
    data = (
        b"WEBVTT\n\nNOTE this is a comment\nspanning lines\n\n"
        b"intro-cue\n00:00:01.000 --> 00:00:02.000\nwords here\n"
    )
    doc = parse_subtitle(data)
    assert [l.text for l in doc.lines] == ["words here"]


def test_vtt_cue_settings_after_arrow():
    data = b"WEBVTT\n\n00:00:01.000 --> 00:00:02.000 align:start position:0%\nx\n"
    doc = parse_subtitle(data)
    assert doc.lines[0].text == "x"


def test_srt_styling_tags_stripped():
    data = b"1\n00:00:01,000 --> 00:00:02,000\n<i>soft</i> and <font color=\"red\">loud</font>\n"
    doc = parse_subtitle(data, format_hint="srt")
    assert doc.lines[0].text == "soft and loud"


def test_srt_prose_angle_brackets_survive():
    data = b"1\n00:00:01,000 --> 00:00:02,000\nwe know a < b > c holds\n"
    doc = parse_subtitle(data, format_hint="srt")
    assert doc.lines[0].text == "we know a < b > c holds"


def test_vtt_header_only_is_empty_document():
    doc = parse_subtitle(b"WEBVTT\n", doc_id="d")
    assert doc.lines == ()


def test_nfc_normalization_on_ingest():
    decomposed = "café"  # e + combining acute
    data = f"1\n00:00:01,000 --> 00:00:02,000\n{decomposed}\n".encode("utf-8")
    doc = parse_subtitle(data)
    assert doc.lines[0].text == unicodedata.normalize("NFC", decomposed)


def test_overlapping_cues_allowed_and_sorted():
    data = (
        b"1\n00:00:05,000 --> 00:00:09,000\nlate\n\n"
        b"2\n00:00:01,000 --> 00:00:08,000\nearly\n"
    )
    doc = parse_subtitle(data)
    assert [l.text for l in doc.lines] == ["early", "late"]


def _random_doc(rng: random.Random) -> TranscriptDocument:
    lines = []
    t_ms = 0
    for _ in range(rng.randint(1, 8)):
        t_ms += rng.randint(0, 5000)
        dur_ms = rng.randint(1, 4000)
        text = " ".join(
            rng.choice(["alpha", "beta", "gamma", "delta"])
            for _ in range(rng.randint(1, 5))
        )
        lines.append(TranscriptLine(t_ms / 1000.0, (t_ms + dur_ms) / 1000.0, text))
    return TranscriptDocument("d", tuple(lines))


@pytest.mark.parametrize("fmt", ["srt", "vtt"])
def test_parse_serialize_parse_fixed_point(fmt):
    rng = random.Random(99)
    write = write_srt if fmt == "srt" else write_vtt
    for _ in range(50):
        doc = _random_doc(rng)
        once = parse_subtitle(write(doc).encode("utf-8"), format_hint=fmt, doc_id="d")
        twice = parse_subtitle(write(once).encode("utf-8"), format_hint=fmt, doc_id="d")
        assert once == twice
        assert once == doc  # ms-precision inputs survive exactly


def test_write_srt_layout():
    doc = TranscriptDocument("d", (TranscriptLine(0.5, 1.25, "hi"),))
    assert write_srt(doc) == "1\n00:00:00,500 --> 00:00:01,250\nhi\n"


def test_write_vtt_layout():
    doc = TranscriptDocument("d", (TranscriptLine(61.0, 62.0, "hi"),))
    assert write_vtt(doc) == "WEBVTT\n\n00:01:01.000 --> 00:01:02.000\nhi\n"
