"""End-to-end pipeline orchestration with stage-boundary checkpoints.

Stages run as barriers: a stage finishes (and its checkpoint is written)
before the next starts, which corpus-global stages like dedup require.
Per-pair work fans out to a bounded worker pool; decision merging is
sorted, so results are byte-identical for any worker count. Every input
record ends up in exactly one of: kept outputs, dropped decisions, or
the error log.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import dedup as dd
from .config import (
    PAIR_STAGES,
    STAGE_DECONTAMINATE,
    STAGE_DEDUP,
    STAGE_SEGMENT,
    PipelineConfig,
)
from .errors import ConfigError, CurationError, TooShortToShingleError
from .filters import (
    STAGE_SEGMENT_WER,
    FilterConfig,
    apply_pointwise,
    resolve_text_lang,
    segment_wer_filter,
)
from .manifest import LoadError, load_manifest, write_outputs
from .model import (
    AudioTextPair,
    FilterDecision,
    Segment,
    TranscriptDocument,
    TranscriptLine,
)
from .reports import MODE_BASELINE, StageReport, percent_remaining
from .segmenter import pair_hours, segment_document, segment_hours, segment_transcript
from .subtitles import parse_subtitle


@dataclass
class SegmentPair:
    """A manual window and the machine window cut on the same grid."""

    manual: Segment
    machine: Optional[Segment]


@dataclass
class RunResult:
    out_dir: Path
    reports: list
    kept: int
    decisions: int
    errors: int


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class _Checkpoint:
    """Stage-boundary run state under <out_dir>/checkpoint/."""

    def __init__(self, out_dir: Path, fingerprint: str):
        self.dir = out_dir / "checkpoint"
        self.state_path = self.dir / "state.json"
        self.fingerprint = fingerprint
        self.completed: list[dict] = []

    def load(self) -> bool:
        if not self.state_path.exists():
            return False
        state = json.loads(self.state_path.read_text(encoding="utf-8"))
        if state.get("fingerprint") != self.fingerprint:
            raise ConfigError(
                "checkpoint was produced by a different configuration; "
                "remove the output directory or fix the config"
            )
        self.completed = state["completed"]
        return True

    def decisions_path(self, stage: str) -> Path:
        return self.dir / f"decisions-{stage}.jsonl"

    def record(self, stage: str, report: StageReport, kept_ids: list[str],
               decisions: Sequence[FilterDecision]):
        self.dir.mkdir(parents=True, exist_ok=True)
        with self.decisions_path(stage).open("w", encoding="utf-8") as fh:
            for d in decisions:
                fh.write(d.to_json() + "\n")
        self.completed.append(
            {"stage": stage, "report": report.to_dict(), "kept_ids": kept_ids}
        )
        tmp = self.state_path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps(
                {"fingerprint": self.fingerprint, "completed": self.completed},
                sort_keys=True,
            ),
            encoding="utf-8",
        )
        tmp.replace(self.state_path)

    def stage_decisions(self, stage: str) -> list[FilterDecision]:
        out = []
        with self.decisions_path(stage).open("r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(FilterDecision.from_json(line))
        return out


def _segment_all(
    pairs: Sequence[AudioTextPair], cfg: PipelineConfig
) -> tuple[list[SegmentPair], list[FilterDecision]]:
    """Cut every pair; emit a drop decision for pairs with no windows."""

    def cut(pair: AudioTextPair) -> list[SegmentPair]:
        manual_segs = segment_document(pair, cfg.window, cfg.keep_empty)
        if pair.machine is None:
            return [SegmentPair(m, None) for m in manual_segs]
        machine_by_idx = {
            s.window_index: s
            for s in segment_transcript(
                pair.machine, pair.audio_duration, cfg.window, keep_empty=True
            )
        }
        return [
            SegmentPair(m, machine_by_idx.get(m.window_index)) for m in manual_segs
        ]

    per_pair = _pmap(cut, pairs, cfg.workers)
    decisions = []
    entries: list[SegmentPair] = []
    for pair, segs in zip(pairs, per_pair):
        if segs:
            decisions.append(
                FilterDecision(
                    pair.doc_id, STAGE_SEGMENT, True, "segmented", float(len(segs))
                )
            )
            entries.extend(segs)
        else:
            decisions.append(
                FilterDecision(pair.doc_id, STAGE_SEGMENT, False, "no-segments")
            )
    return entries, decisions


def _load_reference_doc(path: Path) -> TranscriptDocument:
    if path.suffix.lower() in (".srt", ".vtt"):
        return parse_subtitle(path.read_bytes(), doc_id=path.stem)
    lines = tuple(
        TranscriptLine(0.0, 0.0, ln.strip())
        for ln in path.read_text(encoding="utf-8").splitlines()
        if ln.strip()
    )
    return TranscriptDocument(path.stem, lines)


def run_pipeline(cfg: PipelineConfig, resume: bool = False) -> RunResult:
    """Execute the configured stages over the corpus. Reproducible
    byte-for-byte given (corpus, config, seed), independent of workers."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    root = cfg.resolved_corpus_root()

    pairs: list[AudioTextPair] = []
    errors: list[LoadError] = []
    for item in load_manifest(Path(cfg.manifest), root):
        if isinstance(item, LoadError):
            errors.append(item)
        else:
            pairs.append(item)
    with (out_dir / "errors.jsonl").open("w", encoding="utf-8") as fh:
        for e in errors:
            fh.write(
                json.dumps({"doc_id": e.doc_id, "message": e.message}, sort_keys=True)
                + "\n"
            )

    checkpoint = _Checkpoint(out_dir, cfg.fingerprint())
    done_stages: list[str] = []
    if resume and checkpoint.load():
        done_stages = [c["stage"] for c in checkpoint.completed]
        for i, stage in enumerate(done_stages):
            if i >= len(cfg.stages) or cfg.stages[i] != stage:
                raise ConfigError("checkpoint stages do not match configuration")

    reports: list[StageReport] = []
    all_decisions: list[FilterDecision] = []
    segments: Optional[list[SegmentPair]] = None
    baseline_hours: Optional[float] = None

    def finish_stage(stage, report, kept_ids, decisions, replayed: bool):
        nonlocal baseline_hours
        if baseline_hours is None:
            baseline_hours = report.input_hours
        reports.append(report)
        all_decisions.extend(decisions)
        if not replayed:
            checkpoint.record(stage, report, kept_ids, decisions)

    for idx, stage in enumerate(cfg.stages):
        replayed = idx < len(done_stages)
        if replayed:
            saved = checkpoint.completed[idx]
            report = StageReport.from_dict(saved["report"])
            decisions = checkpoint.stage_decisions(stage)
            kept_ids = set(saved["kept_ids"])
            if stage == STAGE_SEGMENT:
                segments = [
                    e
                    for e in _segment_all(pairs, cfg)[0]
                    if e.manual.segment_id in kept_ids
                ]
            elif stage == STAGE_SEGMENT_WER:
                assert segments is not None
                segments = [
                    e for e in segments if e.manual.segment_id in kept_ids
                ]
            else:
                pairs = [p for p in pairs if p.doc_id in kept_ids]
            finish_stage(stage, report, saved["kept_ids"], decisions, True)
            continue

        if stage in PAIR_STAGES:
            pairs, report, decisions = _run_pair_stage(
                stage, pairs, cfg, out_dir, baseline_hours
            )
            finish_stage(stage, report, [p.doc_id for p in pairs], decisions, False)
        elif stage == STAGE_SEGMENT:
            in_count, in_hours = len(pairs), pair_hours(pairs)
            segments, decisions = _segment_all(pairs, cfg)
            out_hours = segment_hours(e.manual for e in segments)
            report = StageReport(
                stage=stage,
                unit="segments",
                input_count=in_count,
                input_hours=in_hours,
                output_count=len(segments),
                output_hours=out_hours,
                percent_remaining=_percent(cfg, out_hours, in_hours, baseline_hours),
                drop_reasons=_reason_histogram(decisions),
            )
            finish_stage(
                stage,
                report,
                [e.manual.segment_id for e in segments],
                decisions,
                False,
            )
        elif stage == STAGE_SEGMENT_WER:
            assert segments is not None, "validated: segment runs first"
            segments, report, decisions = _run_segment_wer(segments, cfg, baseline_hours)
            finish_stage(
                stage,
                report,
                [e.manual.segment_id for e in segments],
                decisions,
                False,
            )
        else:  # pragma: no cover - validate_stages guards this
            raise ConfigError(f"unknown stage {stage!r}")

    kept_items = (
        [e.manual for e in segments] if segments is not None else list(pairs)
    )
    summary = write_outputs(all_decisions, kept_items, out_dir)
    (out_dir / "reports.json").write_text(
        json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2),
        encoding="utf-8",
    )
    (out_dir / "run.json").write_text(
        json.dumps(
            {"config": cfg.to_dict(), "fingerprint": cfg.fingerprint()},
            sort_keys=True,
            indent=2,
        ),
        encoding="utf-8",
    )
    return RunResult(
        out_dir=out_dir,
        reports=reports,
        kept=summary["kept"],
        decisions=summary["decisions"],
        errors=len(errors),
    )


def _percent(
    cfg: PipelineConfig,
    out_hours: float,
    in_hours: float,
    baseline_hours: Optional[float],
) -> float:
    denom = (
        baseline_hours
        if cfg.report_mode == MODE_BASELINE and baseline_hours is not None
        else in_hours
    )
    return percent_remaining(out_hours, denom)


def _reason_histogram(decisions: Sequence[FilterDecision]) -> dict:
    hist: dict[str, int] = {}
    for d in decisions:
        if not d.kept:
            hist[d.reason] = hist.get(d.reason, 0) + 1
    return dict(sorted(hist.items()))


def _run_pair_stage(
    stage: str,
    pairs: list[AudioTextPair],
    cfg: PipelineConfig,
    out_dir: Path,
    baseline_hours: Optional[float],
) -> tuple[list[AudioTextPair], StageReport, list[FilterDecision]]:
    in_count, in_hours = len(pairs), pair_hours(pairs)
    fcfg: FilterConfig = cfg.filters

    if stage == STAGE_DEDUP:
        pairs, decisions = _dedup_stage(pairs, cfg, out_dir)
    elif stage == STAGE_DECONTAMINATE:
        pairs, decisions = _decontaminate_stage(pairs, cfg, out_dir)
    else:
        if stage == "language-align":
            # persist detected tags so the output manifest carries them
            pairs = _pmap(resolve_text_lang, pairs, cfg.workers)
        results = _pmap(
            lambda p: apply_pointwise(p, fcfg, stages=[stage])[0], pairs, cfg.workers
        )
        decisions = list(results)
        pairs = [p for p, d in zip(pairs, decisions) if d.kept]

    decisions = sorted(decisions, key=lambda d: d.doc_id)
    out_hours = pair_hours(pairs)
    report = StageReport(
        stage=stage,
        unit="pairs",
        input_count=in_count,
        input_hours=in_hours,
        output_count=len(pairs),
        output_hours=out_hours,
        percent_remaining=_percent(cfg, out_hours, in_hours, baseline_hours),
        drop_reasons=_reason_histogram(decisions),
    )
    return pairs, report, decisions


def _dedup_stage(
    pairs: list[AudioTextPair], cfg: PipelineConfig, out_dir: Path
) -> tuple[list[AudioTextPair], list[FilterDecision]]:
    sigs = []
    too_short: set[str] = set()

    def sign(pair: AudioTextPair):
        try:
            return dd.signature(pair.manual, cfg.minhash)
        except TooShortToShingleError:
            return None

    results = _pmap(sign, pairs, cfg.workers)
    for pair, sig in zip(pairs, results):
        if sig is None:
            too_short.add(pair.doc_id)
        else:
            sigs.append(sig)
    clusters = dd.find_duplicates(sigs, cfg.verify_threshold)
    doomed = dd.duplicates_to_remove(clusters)
    representatives = {sorted(c)[0] for c in clusters}
    if sigs:
        dd.write_signatures(sigs, out_dir / "signatures.bin")
    with (out_dir / "clusters.jsonl").open("w", encoding="utf-8") as fh:
        for cluster in clusters:
            fh.write(json.dumps({"cluster": cluster}) + "\n")
    decisions = []
    kept = []
    for pair in pairs:
        if pair.doc_id in too_short:
            decisions.append(
                FilterDecision(pair.doc_id, STAGE_DEDUP, True, "too-short-to-shingle")
            )
            kept.append(pair)
        elif pair.doc_id in doomed:
            decisions.append(FilterDecision(pair.doc_id, STAGE_DEDUP, False, "duplicate"))
        elif pair.doc_id in representatives:
            decisions.append(
                FilterDecision(pair.doc_id, STAGE_DEDUP, True, "cluster-representative")
            )
            kept.append(pair)
        else:
            decisions.append(FilterDecision(pair.doc_id, STAGE_DEDUP, True, "unique"))
            kept.append(pair)
    return kept, decisions


def _decontaminate_stage(
    pairs: list[AudioTextPair], cfg: PipelineConfig, out_dir: Path
) -> tuple[list[AudioTextPair], list[FilterDecision]]:
    if not cfg.decontam_refs:
        return pairs, [
            FilterDecision(p.doc_id, STAGE_DECONTAMINATE, True, "no-references")
            for p in pairs
        ]
    root = cfg.resolved_corpus_root()
    refs = []
    for raw in cfg.decontam_refs:
        path = Path(raw)
        if not path.is_absolute():
            path = root / path
        if not path.exists():
            raise CurationError(f"decontamination reference not found: {path}")
        refs.append(_load_reference_doc(path))
    index = dd.build_ngram_index(refs, cfg.decontam_n)
    verdicts = _pmap(
        lambda p: dd.decontaminate(p.manual, index), pairs, cfg.workers
    )
    with (out_dir / "contamination.jsonl").open("w", encoding="utf-8") as fh:
        for v in verdicts:
            fh.write(json.dumps(v.to_dict(), sort_keys=True) + "\n")
    decisions = []
    kept = []
    for pair, verdict in zip(pairs, verdicts):
        if verdict.flagged:
            decisions.append(
                FilterDecision(pair.doc_id, STAGE_DECONTAMINATE, False, "contaminated")
            )
        else:
            decisions.append(
                FilterDecision(pair.doc_id, STAGE_DECONTAMINATE, True, "clean")
            )
            kept.append(pair)
    return kept, decisions


def _run_segment_wer(
    entries: list[SegmentPair],
    cfg: PipelineConfig,
    baseline_hours: Optional[float],
) -> tuple[list[SegmentPair], StageReport, list[FilterDecision]]:
    in_count = len(entries)
    in_hours = segment_hours(e.manual for e in entries)

    def decide(entry: SegmentPair) -> FilterDecision:
        if entry.machine is None:
            return FilterDecision(
                entry.manual.segment_id,
                STAGE_SEGMENT_WER,
                True,
                "no-machine-transcript",
            )
        return segment_wer_filter(
            None, [(entry.manual, entry.machine)], cfg.filters
        )[0]

    decisions = _pmap(decide, entries, cfg.workers)
    kept = [e for e, d in zip(entries, decisions) if d.kept]
    ordered = sorted(
        zip(entries, decisions),
        key=lambda pair: (pair[0].manual.doc_id, pair[0].manual.window_index),
    )
    decisions = [d for _, d in ordered]
    out_hours = segment_hours(e.manual for e in kept)
    report = StageReport(
        stage=STAGE_SEGMENT_WER,
        unit="segments",
        input_count=in_count,
        input_hours=in_hours,
        output_count=len(kept),
        output_hours=out_hours,
        percent_remaining=percent_remaining(
            out_hours,
            baseline_hours
            if cfg.report_mode == MODE_BASELINE and baseline_hours is not None
            else in_hours,
        ),
        drop_reasons=_reason_histogram(decisions),
    )
    return kept, report, decisions
