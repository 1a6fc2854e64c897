"""Pipeline configuration: YAML file, CLI overrides, environment.

Only one environment variable is honored (ASRCURATE_CORPUS_ROOT, a
corpus-root override); everything else comes from the file or flags.
Stage lists are validated against the known stage set and ordering
rules: pair-level stages cannot follow segmentation, and the segment WER
filter requires segmentation to have produced its windows.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import yaml

from .dedup import MinHashParams
from .errors import ConfigError
from .filters import (
    STAGE_CASE,
    STAGE_DOC_WER,
    STAGE_LANGUAGE,
    STAGE_REPEATS,
    STAGE_SEGMENT_WER,
    FilterConfig,
)
from .model import CaseTag
from .reports import MODE_PREVIOUS, REPORT_MODES

ENV_CORPUS_ROOT = "ASRCURATE_CORPUS_ROOT"

STAGE_DEDUP = "dedup"
STAGE_DECONTAMINATE = "decontaminate"
STAGE_SEGMENT = "segment"

DEFAULT_STAGE_ORDER = (
    STAGE_LANGUAGE,
    STAGE_CASE,
    STAGE_REPEATS,
    STAGE_DOC_WER,
    STAGE_DEDUP,
    STAGE_DECONTAMINATE,
    STAGE_SEGMENT,
    STAGE_SEGMENT_WER,
)

PAIR_STAGES = (
    STAGE_LANGUAGE,
    STAGE_CASE,
    STAGE_REPEATS,
    STAGE_DOC_WER,
    STAGE_DEDUP,
    STAGE_DECONTAMINATE,
)

KNOWN_STAGES = DEFAULT_STAGE_ORDER


@dataclass(frozen=True)
class PipelineConfig:
    manifest: str
    out_dir: str
    corpus_root: Optional[str] = None
    stages: tuple = DEFAULT_STAGE_ORDER
    report_mode: str = MODE_PREVIOUS
    workers: int = 1
    seed: int = 0
    window: float = 30.0
    keep_empty: bool = False
    filters: FilterConfig = field(default_factory=FilterConfig)
    minhash: MinHashParams = field(default_factory=MinHashParams)
    verify_threshold: Optional[float] = None
    decontam_refs: tuple = ()
    decontam_n: int = 10

    def __post_init__(self):
        validate_stages(self.stages)
        if self.report_mode not in REPORT_MODES:
            raise ConfigError(f"unknown report mode {self.report_mode!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.window <= 0:
            raise ConfigError("window length must be positive")

    def resolved_corpus_root(self) -> Path:
        env = os.environ.get(ENV_CORPUS_ROOT)
        if env:
            return Path(env)
        if self.corpus_root is not None:
            return Path(self.corpus_root)
        return Path(self.manifest).parent

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "out_dir": self.out_dir,
            "corpus_root": self.corpus_root,
            "stages": list(self.stages),
            "report_mode": self.report_mode,
            "workers": self.workers,
            "seed": self.seed,
            "window": self.window,
            "keep_empty": self.keep_empty,
            "filters": {
                "required_lang": self.filters.required_lang,
                "doc_wer_threshold": self.filters.doc_wer_threshold,
                "segment_wer_threshold": self.filters.segment_wer_threshold,
                "case_drop_set": sorted(t.value for t in self.filters.case_drop_set),
                "repeat_min_run": self.filters.repeat_min_run,
                "profile": self.filters.profile,
            },
            "minhash": self.minhash.to_dict(),
            "verify_threshold": self.verify_threshold,
            "decontam_refs": list(self.decontam_refs),
            "decontam_n": self.decontam_n,
        }

    def fingerprint(self) -> str:
        """Stable digest of everything that affects output content.

        Worker count is excluded (results are identical for any worker
        count, and a resume may legitimately change it); so is the output
        directory, which decides where results land, not what they are.
        """
        d = self.to_dict()
        d.pop("workers")
        d.pop("out_dir")
        blob = json.dumps(d, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def validate_stages(stages: Sequence[str]):
    seen = set()
    for s in stages:
        if s not in KNOWN_STAGES:
            raise ConfigError(f"unknown stage {s!r}; known: {', '.join(KNOWN_STAGES)}")
        if s in seen:
            raise ConfigError(f"stage {s!r} listed twice")
        seen.add(s)
    if STAGE_SEGMENT in stages:
        seg_at = stages.index(STAGE_SEGMENT)
        late_pair = [s for s in stages[seg_at + 1 :] if s in PAIR_STAGES]
        if late_pair:
            raise ConfigError(
                f"pair-level stages cannot follow {STAGE_SEGMENT!r}: {late_pair}"
            )
    if STAGE_SEGMENT_WER in stages and STAGE_SEGMENT not in stages:
        raise ConfigError(f"{STAGE_SEGMENT_WER!r} requires {STAGE_SEGMENT!r}")
    if STAGE_SEGMENT_WER in stages and stages.index(STAGE_SEGMENT_WER) < stages.index(
        STAGE_SEGMENT
    ):
        raise ConfigError(f"{STAGE_SEGMENT_WER!r} must come after {STAGE_SEGMENT!r}")


def _filters_from_dict(d: dict) -> FilterConfig:
    kwargs = {}
    if "required_lang" in d:
        kwargs["required_lang"] = d["required_lang"]
    if "doc_wer_threshold" in d:
        kwargs["doc_wer_threshold"] = float(d["doc_wer_threshold"])
    if "segment_wer_threshold" in d:
        kwargs["segment_wer_threshold"] = float(d["segment_wer_threshold"])
    if "case_drop_set" in d:
        try:
            kwargs["case_drop_set"] = frozenset(
                CaseTag(v) for v in d["case_drop_set"]
            )
        except ValueError as e:
            raise ConfigError(f"bad case_drop_set: {e}") from None
    if "repeat_min_run" in d:
        kwargs["repeat_min_run"] = int(d["repeat_min_run"])
    if "profile" in d:
        kwargs["profile"] = d["profile"]
    try:
        return FilterConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def config_from_dict(d: dict) -> PipelineConfig:
    if "manifest" not in d or "out_dir" not in d:
        raise ConfigError("config requires 'manifest' and 'out_dir'")
    try:
        minhash = MinHashParams.from_dict(d.get("minhash", {}) or {})
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad minhash params: {e}") from None
    return PipelineConfig(
        manifest=d["manifest"],
        out_dir=d["out_dir"],
        corpus_root=d.get("corpus_root"),
        stages=tuple(d.get("stages", DEFAULT_STAGE_ORDER)),
        report_mode=d.get("report_mode", MODE_PREVIOUS),
        workers=int(d.get("workers", 1)),
        seed=int(d.get("seed", 0)),
        window=float(d.get("window", 30.0)),
        keep_empty=bool(d.get("keep_empty", False)),
        filters=_filters_from_dict(d.get("filters", {}) or {}),
        minhash=minhash,
        verify_threshold=d.get("verify_threshold"),
        decontam_refs=tuple(d.get("decontam_refs", ())),
        decontam_n=int(d.get("decontam_n", 10)),
    )


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Read the YAML (or JSON) pipeline configuration file."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        d = yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from None
    if not isinstance(d, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return config_from_dict(d)


def apply_overrides(cfg: PipelineConfig, **overrides) -> PipelineConfig:
    """Apply non-None CLI flag values over the file configuration."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    filter_keys = {
        "required_lang",
        "doc_wer_threshold",
        "segment_wer_threshold",
        "repeat_min_run",
        "profile",
    }
    fkw = {k: clean.pop(k) for k in list(clean) if k in filter_keys}
    if fkw:
        try:
            clean["filters"] = replace(cfg.filters, **fkw)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    if "stages" in clean:
        clean["stages"] = tuple(clean["stages"])
    try:
        return replace(cfg, **clean)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None
