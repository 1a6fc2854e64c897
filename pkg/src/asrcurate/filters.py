"""Pointwise curation heuristics: language alignment, case tagging,
repeating-line detection, and manual-machine WER comparison.

Every filter is a pure function of one pair (or one segment window), so
the surviving set is independent of the order the filters run in. Drops
use strict inequality at thresholds: a pair is removed only when its
score is strictly above the configured threshold. Filters err toward
retention when a heuristic is uninformative (case ties, empty documents).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import GridMismatchError
from .lang_id import UNDETERMINED, tag_text_language
from .model import AudioTextPair, CaseTag, FilterDecision, Segment, TranscriptDocument
from .normalize import PROFILES, normalize_text
from .wer import word_error_rate

STAGE_LANGUAGE = "language-align"
STAGE_CASE = "case-filter"
STAGE_REPEATS = "repeat-filter"
STAGE_DOC_WER = "doc-wer-filter"
STAGE_SEGMENT_WER = "segment-wer-filter"

POINTWISE_STAGES = (STAGE_LANGUAGE, STAGE_CASE, STAGE_REPEATS, STAGE_DOC_WER)


@dataclass(frozen=True)
class FilterConfig:
    required_lang: str = "en"
    doc_wer_threshold: float = 0.5
    segment_wer_threshold: float = 0.7
    case_drop_set: frozenset = frozenset({CaseTag.UPPER})
    repeat_min_run: int = 2
    profile: str = "basic"

    def __post_init__(self):
        if self.doc_wer_threshold < 0 or self.segment_wer_threshold < 0:
            raise ValueError("WER thresholds must be non-negative")
        if self.repeat_min_run < 2:
            raise ValueError("repeat_min_run must be >= 2")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown normalizer profile {self.profile!r}")
        bad = {
            t
            for t in self.case_drop_set
            if t not in (CaseTag.UPPER, CaseTag.LOWER)
        }
        if bad:
            raise ValueError(
                f"case_drop_set must be a subset of {{upper, lower}}, got {bad}"
            )


# --- language alignment ----------------------------------------------------


def language_align(pair: AudioTextPair, cfg: FilterConfig) -> FilterDecision:
    """Keep only pairs whose audio and text tags both equal the required
    language. Missing tags drop the pair and are reported separately from
    mismatches so the cost of absent metadata stays visible."""
    if pair.audio_lang is None:
        return FilterDecision(pair.doc_id, STAGE_LANGUAGE, False, "missing-audio-lang")
    text_lang = pair.manual.text_lang
    if text_lang is None:
        return FilterDecision(pair.doc_id, STAGE_LANGUAGE, False, "missing-text-lang")
    if pair.audio_lang != cfg.required_lang:
        return FilterDecision(
            pair.doc_id, STAGE_LANGUAGE, False, "mismatched-audio-lang"
        )
    if text_lang != cfg.required_lang:
        return FilterDecision(pair.doc_id, STAGE_LANGUAGE, False, "mismatched-text-lang")
    return FilterDecision(pair.doc_id, STAGE_LANGUAGE, True, "lang-match")


# --- text casing ------------------------------------------------------------


@dataclass(frozen=True)
class CaseCounts:
    upper: int = 0
    lower: int = 0
    mixed: int = 0

    @property
    def classified(self) -> int:
        return self.upper + self.lower + self.mixed


def case_tag(doc: TranscriptDocument) -> tuple[CaseTag, CaseCounts]:
    """Majority case class over lines containing alphabetic characters.

    A line is Upper when every alphabetic character is uppercase, Lower
    when every one is lowercase, otherwise Mixed. Ties resolve to Mixed,
    which no default configuration drops.
    """
    upper = lower = mixed = 0
    for line in doc.lines:
        alpha = [c for c in line.text if c.isalpha()]
        if not alpha:
            continue
        if all(c.isupper() for c in alpha):
            upper += 1
        elif all(c.islower() for c in alpha):
            lower += 1
        else:
            mixed += 1
    counts = CaseCounts(upper, lower, mixed)
    best = max(upper, lower, mixed)
    if best == 0:
        return CaseTag.MIXED, counts
    winners = [
        tag
        for tag, n in ((CaseTag.UPPER, upper), (CaseTag.LOWER, lower), (CaseTag.MIXED, mixed))
        if n == best
    ]
    return (winners[0] if len(winners) == 1 else CaseTag.MIXED), counts


def filter_case(pair: AudioTextPair, cfg: FilterConfig) -> FilterDecision:
    tag, _ = case_tag(pair.manual)
    if tag in cfg.case_drop_set:
        return FilterDecision(pair.doc_id, STAGE_CASE, False, f"case-{tag.value}")
    return FilterDecision(pair.doc_id, STAGE_CASE, True, f"case-{tag.value}")


# --- repeating lines ---------------------------------------------------------


def detect_repeats(doc: TranscriptDocument, min_run: int = 2) -> list[tuple[int, int]]:
    """All maximal runs of >= min_run consecutive lines with identical text.

    Texts are compared exactly (they are NFC-normalized on ingest);
    timestamps are ignored.
    """
    if min_run < 2:
        raise ValueError("min_run must be >= 2")
    runs: list[tuple[int, int]] = []
    texts = [l.text for l in doc.lines]
    i = 0
    while i < len(texts):
        j = i + 1
        while j < len(texts) and texts[j] == texts[i]:
            j += 1
        if j - i >= min_run:
            runs.append((i, j - i))
        i = j
    return runs


def filter_repeats(pair: AudioTextPair, cfg: FilterConfig) -> FilterDecision:
    total = len(pair.manual.lines)
    if total == 0:
        return FilterDecision(pair.doc_id, STAGE_REPEATS, True, "empty-document", 0.0)
    runs = detect_repeats(pair.manual, cfg.repeat_min_run)
    repeated = sum(length for _, length in runs)
    score = repeated / total
    if runs:
        return FilterDecision(pair.doc_id, STAGE_REPEATS, False, "repeating-lines", score)
    return FilterDecision(pair.doc_id, STAGE_REPEATS, True, "no-repeats", score)


# --- manual-machine comparison ----------------------------------------------


def doc_wer_filter(pair: AudioTextPair, cfg: FilterConfig) -> FilterDecision:
    """Score the manual transcript against its machine transcript; drop
    when WER exceeds the document threshold (strict inequality).

    The filter abstains (keeps) when there is no machine transcript to
    compare against, and when the manual text normalizes to nothing: empty
    documents are removed later by the segmenter, not here.
    """
    if pair.machine is None:
        return FilterDecision(pair.doc_id, STAGE_DOC_WER, True, "no-machine-transcript")
    reference = pair.manual.full_text()
    if not normalize_text(reference, cfg.profile):
        return FilterDecision(pair.doc_id, STAGE_DOC_WER, True, "empty-manual-text")
    score = word_error_rate(reference, pair.machine.full_text(), cfg.profile).wer
    if score > cfg.doc_wer_threshold:
        return FilterDecision(pair.doc_id, STAGE_DOC_WER, False, "doc-wer-above-threshold", score)
    return FilterDecision(pair.doc_id, STAGE_DOC_WER, True, "doc-wer-ok", score)


def segment_wer_filter(
    pair: Optional[AudioTextPair],
    windows: Sequence[tuple[Segment, Segment]],
    cfg: FilterConfig,
) -> list[FilterDecision]:
    """Per-window manual-machine WER at the segment threshold.

    ``windows`` pairs manual and machine segments cut on the same grid;
    mismatched grids are an error (``pair`` only contextualizes it).
    Windows that are empty on both sides pass through untouched; a window
    with machine text but no manual text is dropped (its WER is
    undefined).
    """
    decisions = []
    for manual_seg, machine_seg in windows:
        if (
            manual_seg.window_index != machine_seg.window_index
            or manual_seg.window_start != machine_seg.window_start
            or manual_seg.window_duration != machine_seg.window_duration
        ):
            doc = pair.doc_id if pair is not None else manual_seg.doc_id
            raise GridMismatchError(
                f"{doc!r}: window grids differ at index "
                f"{manual_seg.window_index} vs {machine_seg.window_index}"
            )
        seg_id = manual_seg.segment_id
        ref = normalize_text(manual_seg.full_text(), cfg.profile)
        hyp = normalize_text(machine_seg.full_text(), cfg.profile)
        if not ref and not hyp:
            decisions.append(
                FilterDecision(seg_id, STAGE_SEGMENT_WER, True, "empty-window")
            )
            continue
        if not ref:
            decisions.append(
                FilterDecision(seg_id, STAGE_SEGMENT_WER, False, "empty-reference")
            )
            continue
        score = word_error_rate(ref, hyp, cfg.profile).wer
        if score > cfg.segment_wer_threshold:
            decisions.append(
                FilterDecision(
                    seg_id, STAGE_SEGMENT_WER, False, "segment-wer-above-threshold", score
                )
            )
        else:
            decisions.append(
                FilterDecision(seg_id, STAGE_SEGMENT_WER, True, "segment-wer-ok", score)
            )
    return decisions


# --- stage dispatch -----------------------------------------------------------

_POINTWISE = {
    STAGE_LANGUAGE: language_align,
    STAGE_CASE: filter_case,
    STAGE_REPEATS: filter_repeats,
    STAGE_DOC_WER: doc_wer_filter,
}


def resolve_text_lang(pair: AudioTextPair) -> AudioTextPair:
    """Fill a missing text tag from the built-in detector; manifest tags
    take precedence and undetermined detections stay missing."""
    if pair.manual.text_lang is not None:
        return pair
    if not pair.manual.full_text().strip():
        return pair
    tag = tag_text_language(pair.manual)
    if tag.tag == UNDETERMINED:
        return pair
    return pair.with_manual(pair.manual.with_lang(tag.tag))


def apply_pointwise(
    pair: AudioTextPair,
    cfg: FilterConfig,
    stages: Sequence[str] = POINTWISE_STAGES,
) -> list[FilterDecision]:
    """Run the pointwise filters in order, stopping after the first drop.

    This is the exact decision stream the pipeline, the CLI, and the
    service emit for one pair; when the language stage participates, a
    missing text tag is resolved through the detector first, exactly as
    the pipeline does at load time.
    """
    if STAGE_LANGUAGE in stages:
        pair = resolve_text_lang(pair)
    decisions = []
    for stage in stages:
        if stage not in _POINTWISE:
            raise ValueError(f"unknown pointwise stage {stage!r}")
        decision = _POINTWISE[stage](pair, cfg)
        decisions.append(decision)
        if not decision.kept:
            break
    return decisions
