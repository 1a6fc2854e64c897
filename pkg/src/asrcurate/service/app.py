"""FastAPI service wrapping the curation core.

Exposes the per-document operations (normalize, WER, quality filters,
MinHash signatures and duplicate detection, decontamination,
segmentation) for data-loading pipelines and the language bindings.
Corpus-scale batch work stays in the CLI. Data-level errors surface as
HTTP 400 with the library's machine-readable error code and message.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, dedup as dd
from ..errors import CurationError
from ..filters import (
    POINTWISE_STAGES,
    FilterConfig,
    apply_pointwise,
    segment_wer_filter,
)
from ..model import (
    AudioTextPair,
    CaseTag,
    Segment,
    TranscriptDocument,
    TranscriptLine,
)
from ..normalize import normalize_text
from ..segmenter import segment_document, segment_hours
from ..wer import word_error_rate
from . import schemas as s

app = FastAPI(title="asrcurate", version=__version__)


@app.exception_handler(CurationError)
async def curation_error_handler(request: Request, exc: CurationError):
    return JSONResponse(
        status_code=400, content={"code": exc.code, "message": str(exc)}
    )


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(
        status_code=400, content={"code": "invalid-value", "message": str(exc)}
    )


def _doc(m: s.DocumentModel) -> TranscriptDocument:
    return TranscriptDocument(
        m.doc_id,
        tuple(TranscriptLine(l.start, l.end, l.text) for l in m.lines),
        m.text_lang,
    )


def _pair(m: s.PairModel) -> AudioTextPair:
    return AudioTextPair(
        doc_id=m.doc_id,
        audio_duration=m.audio_duration,
        manual=_doc(m.manual),
        machine=_doc(m.machine) if m.machine else None,
        audio_lang=m.audio_lang,
        audio_lang_confidence=m.audio_lang_confidence,
    )


def _filter_config(m: s.FilterConfigModel) -> FilterConfig:
    return FilterConfig(
        required_lang=m.required_lang,
        doc_wer_threshold=m.doc_wer_threshold,
        segment_wer_threshold=m.segment_wer_threshold,
        case_drop_set=frozenset(CaseTag(v) for v in m.case_drop_set),
        repeat_min_run=m.repeat_min_run,
        profile=m.profile,
    )


@app.get("/health", response_model=s.HealthResponse)
def health() -> s.HealthResponse:
    return s.HealthResponse(status="ok", version=__version__)


@app.post("/normalize", response_model=s.NormalizeResponse)
def normalize(req: s.NormalizeRequest) -> s.NormalizeResponse:
    return s.NormalizeResponse(
        normalized=normalize_text(req.text, req.profile), profile=req.profile
    )


@app.post("/wer", response_model=s.WerResponse)
def wer(req: s.WerRequest) -> s.WerResponse:
    b = word_error_rate(req.reference, req.hypothesis, req.profile)
    return s.WerResponse(**b.to_dict())


@app.post("/filters/pair", response_model=s.FilterResponse)
def filter_pair(req: s.FilterRequest) -> s.FilterResponse:
    cfg = _filter_config(req.config)
    stages = tuple(req.stages) if req.stages else POINTWISE_STAGES
    decisions = apply_pointwise(_pair(req.pair), cfg, stages=stages)
    return s.FilterResponse(
        decisions=[
            s.DecisionModel(
                doc_id=d.doc_id,
                stage=d.stage,
                kept=d.kept,
                reason=d.reason,
                score=d.score,
            )
            for d in decisions
        ],
        kept=all(d.kept for d in decisions),
    )


def _segment(m: s.SegmentModel) -> Segment:
    return Segment(
        doc_id=m.doc_id,
        window_index=m.window_index,
        window_start=m.window_start,
        window_duration=m.window_duration,
        lines=tuple(TranscriptLine(l.start, l.end, l.text) for l in m.lines),
    )


@app.post("/filters/segments", response_model=s.SegmentFilterResponse)
def filter_segments(req: s.SegmentFilterRequest) -> s.SegmentFilterResponse:
    cfg = _filter_config(req.config)
    windows = [(_segment(w.manual), _segment(w.machine)) for w in req.windows]
    decisions = segment_wer_filter(None, windows, cfg)
    return s.SegmentFilterResponse(
        decisions=[
            s.DecisionModel(
                doc_id=d.doc_id,
                stage=d.stage,
                kept=d.kept,
                reason=d.reason,
                score=d.score,
            )
            for d in decisions
        ]
    )


@app.post("/dedup/signature", response_model=s.SignatureResponse)
def signature(req: s.SignatureRequest) -> s.SignatureResponse:
    sig = dd.signature(_doc(req.doc), dd.MinHashParams(**req.params.model_dump()))
    return s.SignatureResponse(
        doc_id=sig.doc_id,
        values=list(sig.values),
        band_keys=[k.hex() for k in sig.band_keys],
    )


@app.post("/dedup/find-duplicates", response_model=s.FindDuplicatesResponse)
def find_duplicates(req: s.FindDuplicatesRequest) -> s.FindDuplicatesResponse:
    params = dd.MinHashParams(**req.params.model_dump())
    sigs = []
    too_short = []
    for doc_model in req.docs:
        doc = _doc(doc_model)
        try:
            sigs.append(dd.signature(doc, params))
        except CurationError:
            too_short.append(doc.doc_id)
    clusters = dd.find_duplicates(sigs, req.verify_threshold)
    return s.FindDuplicatesResponse(
        clusters=clusters,
        duplicates=sorted(dd.duplicates_to_remove(clusters)),
        too_short=too_short,
    )


@app.post("/decontaminate", response_model=s.DecontaminateResponse)
def decontaminate(req: s.DecontaminateRequest) -> s.DecontaminateResponse:
    index = dd.build_ngram_index(
        [_doc(r) for r in req.references], req.n, req.profile
    )
    verdict = dd.decontaminate(_doc(req.doc), index)
    return s.DecontaminateResponse(
        doc_id=verdict.doc_id,
        flagged=verdict.flagged,
        sources=list(verdict.sources),
        first_offset=verdict.first_offset,
    )


@app.post("/segment", response_model=s.SegmentResponse)
def segment(req: s.SegmentRequest) -> s.SegmentResponse:
    segments = segment_document(_pair(req.pair), req.window, req.keep_empty)
    return s.SegmentResponse(
        segments=[
            s.SegmentModel(
                doc_id=seg.doc_id,
                window_index=seg.window_index,
                window_start=seg.window_start,
                window_duration=seg.window_duration,
                lines=[
                    s.LineModel(start=l.start, end=l.end, text=l.text)
                    for l in seg.lines
                ],
            )
            for seg in segments
        ],
        total_hours=segment_hours(segments),
    )
