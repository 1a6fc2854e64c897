"""Pydantic request/response models for the HTTP service.

The wire format mirrors the library's JSON encodings exactly, so values
returned here are bit-identical to what the CLI writes for the same
inputs.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel as _Base, ConfigDict, Field


class BaseModel(_Base):
    # unknown keys are caller mistakes; reject them with the key named
    model_config = ConfigDict(extra="forbid")


class LineModel(BaseModel):
    start: float
    end: float
    text: str


class DocumentModel(BaseModel):
    doc_id: str
    lines: list[LineModel]
    text_lang: Optional[str] = None


class PairModel(BaseModel):
    doc_id: str
    audio_duration: float
    manual: DocumentModel
    machine: Optional[DocumentModel] = None
    audio_lang: Optional[str] = None
    audio_lang_confidence: Optional[float] = None


class FilterConfigModel(BaseModel):
    required_lang: str = "en"
    doc_wer_threshold: float = 0.5
    segment_wer_threshold: float = 0.7
    case_drop_set: list[str] = Field(default_factory=lambda: ["upper"])
    repeat_min_run: int = 2
    profile: str = "basic"


class MinHashParamsModel(BaseModel):
    shingle_size: int = 5
    num_hashes: int = 112
    num_bands: int = 14
    rows_per_band: int = 8
    seed: int = 0


class HealthResponse(BaseModel):
    status: str
    version: str


class NormalizeRequest(BaseModel):
    text: str
    profile: str = "basic"


class NormalizeResponse(BaseModel):
    normalized: str
    profile: str


class WerRequest(BaseModel):
    reference: str
    hypothesis: str
    profile: str = "basic"


class WerResponse(BaseModel):
    wer: float
    substitutions: int
    deletions: int
    insertions: int
    reference_words: int


class FilterRequest(BaseModel):
    pair: PairModel
    config: FilterConfigModel = Field(default_factory=FilterConfigModel)
    stages: Optional[list[str]] = None


class DecisionModel(BaseModel):
    doc_id: str
    stage: str
    kept: bool
    reason: str
    score: Optional[float] = None


class FilterResponse(BaseModel):
    decisions: list[DecisionModel]
    kept: bool


class SignatureRequest(BaseModel):
    doc: DocumentModel
    params: MinHashParamsModel = Field(default_factory=MinHashParamsModel)


class SignatureResponse(BaseModel):
    doc_id: str
    values: list[int]
    band_keys: list[str]  # hex digests


class FindDuplicatesRequest(BaseModel):
    docs: list[DocumentModel]
    params: MinHashParamsModel = Field(default_factory=MinHashParamsModel)
    verify_threshold: Optional[float] = None


class FindDuplicatesResponse(BaseModel):
    clusters: list[list[str]]
    duplicates: list[str]
    too_short: list[str]


class DecontaminateRequest(BaseModel):
    doc: DocumentModel
    references: list[DocumentModel]
    n: int = 10
    profile: str = "basic"


class DecontaminateResponse(BaseModel):
    doc_id: str
    flagged: bool
    sources: list[str]
    first_offset: Optional[int] = None


class SegmentRequest(BaseModel):
    pair: PairModel
    window: float = 30.0
    keep_empty: bool = False


class SegmentModel(BaseModel):
    doc_id: str
    window_index: int
    window_start: float
    window_duration: float
    lines: list[LineModel]


class SegmentResponse(BaseModel):
    segments: list[SegmentModel]
    total_hours: float


class SegmentWindowPairModel(BaseModel):
    manual: SegmentModel
    machine: SegmentModel


class SegmentFilterRequest(BaseModel):
    windows: list[SegmentWindowPairModel]
    config: FilterConfigModel = Field(default_factory=FilterConfigModel)


class SegmentFilterResponse(BaseModel):
    decisions: list[DecisionModel]


class ErrorResponse(BaseModel):
    code: str
    message: str
