"""Per-dataset WER scoring and distribution-shift robustness analysis.

Scoring pools substitutions, deletions, insertions, and reference words
within each dataset, then macro-averages across datasets with an
unweighted mean. Effective robustness fits a least-squares line of
log10(OOD WER) on log10(ID WER) over non-intervention models and reports
how far each model sits above the fit (positive = lower OOD WER than
predicted). Relative robustness is the plain OOD WER difference between
a model with and without an intervention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CurationError, EmptyReferenceError
from .wer import WerBreakdown, corpus_wer


@dataclass(frozen=True)
class EvalRecord:
    dataset: str
    utterance_id: str
    reference: str
    hypothesis: str

    @staticmethod
    def from_dict(d: dict) -> "EvalRecord":
        return EvalRecord(
            d["dataset"], d["utterance_id"], d["reference"], d["hypothesis"]
        )

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "utterance_id": self.utterance_id,
            "reference": self.reference,
            "hypothesis": self.hypothesis,
        }


@dataclass(frozen=True)
class EvalReport:
    per_dataset: dict  # dataset -> WerBreakdown
    macro_average: float
    profile: str
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "profile": self.profile,
            "per_dataset": {
                name: b.to_dict() for name, b in sorted(self.per_dataset.items())
            },
            "macro_average": self.macro_average,
            "warnings": list(self.warnings),
        }


def macro_average(wers: Sequence[float]) -> float:
    """Unweighted mean of per-dataset WERs."""
    if not wers:
        raise CurationError("no datasets to average")
    return sum(wers) / len(wers)


def evaluate(records: Iterable[EvalRecord], profile: str = "basic") -> EvalReport:
    """Pooled WER per dataset plus the unweighted macro average.

    Datasets with zero records are omitted with a warning (they can only
    arise from the directory convention, not from grouped records).
    """
    grouped: dict[str, list[EvalRecord]] = {}
    for r in records:
        grouped.setdefault(r.dataset, []).append(r)
    per_dataset: dict[str, WerBreakdown] = {}
    warnings = []
    for name in sorted(grouped):
        rows = grouped[name]
        if not rows:
            warnings.append(f"dataset {name!r} has no records; omitted")
            continue
        try:
            per_dataset[name] = corpus_wer(
                ((r.reference, r.hypothesis) for r in rows), profile
            )
        except EmptyReferenceError as e:
            raise EmptyReferenceError(f"dataset {name!r}: {e}") from None
    if not per_dataset:
        raise CurationError("no datasets with records to evaluate")
    avg = macro_average([b.wer for b in per_dataset.values()])
    return EvalReport(per_dataset, avg, profile, tuple(warnings))


def load_eval_records(path: Union[str, Path]) -> list[EvalRecord]:
    """Load records from JSONL or from a dataset/utterance directory tree
    of ``*.ref.txt`` / ``*.hyp.txt`` file pairs."""
    p = Path(path)
    if p.is_dir():
        return _load_records_dir(p)
    records = []
    with p.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(EvalRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as e:
                raise CurationError(f"eval records line {lineno}: {e}") from None
    return records


def _load_records_dir(root: Path) -> list[EvalRecord]:
    records = []
    for dataset_dir in sorted(d for d in root.iterdir() if d.is_dir()):
        for ref_path in sorted(dataset_dir.glob("*.ref.txt")):
            utt = ref_path.name[: -len(".ref.txt")]
            hyp_path = dataset_dir / f"{utt}.hyp.txt"
            if not hyp_path.exists():
                raise CurationError(f"missing hypothesis file for {ref_path}")
            records.append(
                EvalRecord(
                    dataset=dataset_dir.name,
                    utterance_id=utt,
                    reference=ref_path.read_text(encoding="utf-8").strip(),
                    hypothesis=hyp_path.read_text(encoding="utf-8").strip(),
                )
            )
    return records


# --- robustness ----------------------------------------------------------------


@dataclass(frozen=True)
class RobustnessPoint:
    model_id: str
    id_wer: float
    ood_wer: float
    is_intervention: bool = False
    ood_suite: tuple[str, ...] = ()

    def __post_init__(self):
        if self.id_wer <= 0 or self.ood_wer <= 0:
            raise CurationError(
                f"{self.model_id!r}: WERs must be positive for log-domain fitting"
            )

    @staticmethod
    def from_dict(d: dict) -> "RobustnessPoint":
        return RobustnessPoint(
            d["model_id"],
            d["id_wer"],
            d["ood_wer"],
            d.get("is_intervention", False),
            tuple(d.get("ood_suite", ())),
        )


@dataclass(frozen=True)
class RobustnessFit:
    slope: float
    intercept: float
    domain: str  # "log10" | "raw"

    def predict(self, id_wer: float) -> float:
        """Predicted OOD WER (in the fit's domain units) for an ID WER."""
        x = math.log10(id_wer) if self.domain == "log10" else id_wer
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class EffectiveRobustness:
    model_id: str
    value: float  # fit(id) - actual, in domain units; positive = beats the fit
    factor: float  # multiplicative equivalent (10**value for log10 domain)
    is_intervention: bool


def effective_robustness(
    points: Sequence[RobustnessPoint], domain: str = "log10"
) -> tuple[RobustnessFit, list[EffectiveRobustness]]:
    """Least-squares baseline fit over non-intervention points, then the
    signed gap of every model to the fit. ER > 0 means lower OOD WER than
    the baseline trend predicts."""
    if domain not in ("log10", "raw"):
        raise CurationError(f"unknown fit domain {domain!r}")
    baseline = [p for p in points if not p.is_intervention]
    if len(baseline) < 2:
        raise CurationError("need >= 2 non-intervention points to fit a baseline")
    if len({p.id_wer for p in baseline}) < 2:
        raise CurationError("baseline points must have distinct id_wer values")

    def _x(p: RobustnessPoint) -> float:
        return math.log10(p.id_wer) if domain == "log10" else p.id_wer

    def _y(p: RobustnessPoint) -> float:
        return math.log10(p.ood_wer) if domain == "log10" else p.ood_wer

    xs = np.array([_x(p) for p in baseline])
    ys = np.array([_y(p) for p in baseline])
    slope, intercept = np.polyfit(xs, ys, 1)
    fit = RobustnessFit(float(slope), float(intercept), domain)
    out = []
    for p in points:
        gap = fit.predict(p.id_wer) - _y(p)
        factor = 10.0**gap if domain == "log10" else float("nan")
        out.append(EffectiveRobustness(p.model_id, gap, factor, p.is_intervention))
    return fit, out


def relative_robustness(
    with_intervention: RobustnessPoint, without_intervention: RobustnessPoint
) -> float:
    """OOD WER reduction from the intervention; positive = improvement."""
    if with_intervention.ood_suite != without_intervention.ood_suite:
        raise CurationError(
            f"OOD suites differ: {with_intervention.ood_suite} vs "
            f"{without_intervention.ood_suite}"
        )
    return without_intervention.ood_wer - with_intervention.ood_wer
