"""Stage accounting: per-stage counts, hours, and percent-remaining.

Two denominators are first-class because flow diagrams use
"relative to the most recent filtered subset" while ablation tables use
"relative to the unfiltered baseline". Percentages are rounded half-up
to one decimal, the precision the tables print.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence, Union

from .errors import CurationError

MODE_PREVIOUS = "relative-to-previous"
MODE_BASELINE = "relative-to-baseline"
REPORT_MODES = (MODE_PREVIOUS, MODE_BASELINE)


def percent_remaining(output: float, denominator: float) -> float:
    """100 * output / denominator, rounded half-up to one decimal."""
    if denominator <= 0:
        return 0.0
    ratio = Decimal(output) / Decimal(denominator)
    return float((ratio * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass
class StageReport:
    stage: str
    unit: str  # "pairs" | "segments"
    input_count: int
    input_hours: float
    output_count: int
    output_hours: float
    percent_remaining: float  # per the run's configured denominator
    drop_reasons: dict = field(default_factory=dict)
    errored: int = 0

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "unit": self.unit,
            "input_count": self.input_count,
            "input_hours": self.input_hours,
            "output_count": self.output_count,
            "output_hours": self.output_hours,
            "percent_remaining": self.percent_remaining,
            "drop_reasons": dict(sorted(self.drop_reasons.items())),
            "errored": self.errored,
        }

    @staticmethod
    def from_dict(d: dict) -> "StageReport":
        return StageReport(
            stage=d["stage"],
            unit=d.get("unit", "pairs"),
            input_count=d["input_count"],
            input_hours=d["input_hours"],
            output_count=d["output_count"],
            output_hours=d["output_hours"],
            percent_remaining=d.get("percent_remaining", 0.0),
            drop_reasons=d.get("drop_reasons", {}),
            errored=d.get("errored", 0),
        )


def recompute_percents(
    reports: Sequence[StageReport], mode: str
) -> list[StageReport]:
    """Same reports with percent_remaining recomputed for ``mode``.

    Baseline mode divides every stage's output hours by the first stage's
    input hours; previous mode divides by the stage's own input hours.
    """
    if mode not in REPORT_MODES:
        raise CurationError(f"unknown report mode {mode!r}")
    if not reports:
        return []
    baseline = reports[0].input_hours
    out = []
    for r in reports:
        denom = baseline if mode == MODE_BASELINE else r.input_hours
        out.append(
            StageReport(
                stage=r.stage,
                unit=r.unit,
                input_count=r.input_count,
                input_hours=r.input_hours,
                output_count=r.output_count,
                output_hours=r.output_hours,
                percent_remaining=percent_remaining(r.output_hours, denom),
                drop_reasons=dict(r.drop_reasons),
                errored=r.errored,
            )
        )
    return out


def flow_document(reports: Sequence[StageReport]) -> dict:
    """Machine-readable flow: stage nodes plus kept/dropped hour edges,
    suitable for external Sankey rendering."""
    nodes = [r.stage for r in reports]
    edges = []
    for i, r in enumerate(reports):
        target = reports[i + 1].stage if i + 1 < len(reports) else "kept"
        edges.append(
            {
                "from": r.stage,
                "to": target,
                "kind": "kept",
                "count": r.output_count,
                "hours": r.output_hours,
            }
        )
        edges.append(
            {
                "from": r.stage,
                "to": "dropped",
                "kind": "dropped",
                "count": r.input_count - r.output_count,
                "hours": r.input_hours - r.output_hours,
            }
        )
    return {"nodes": nodes, "edges": edges}


def render_table(reports: Sequence[StageReport], mode: str) -> str:
    """Fixed-width text table of the stage flow."""
    rows = recompute_percents(reports, mode)
    header = (
        f"{'stage':<22} {'unit':<9} {'in':>9} {'in hours':>13} "
        f"{'out':>9} {'out hours':>13} {'remaining %':>12}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.stage:<22} {r.unit:<9} {r.input_count:>9} {r.input_hours:>13.3f} "
            f"{r.output_count:>9} {r.output_hours:>13.3f} {r.percent_remaining:>12.1f}"
        )
    if not rows:
        lines.append("(no stages)")
    return "\n".join(lines)


@dataclass
class StatsDocument:
    mode: str
    reports: list
    flow: dict
    table: str

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "stages": [r.to_dict() for r in self.reports],
            "flow": self.flow,
        }


def stats(path: Union[str, Path], mode: str = MODE_PREVIOUS) -> StatsDocument:
    """Build the stage-flow report from a run directory (reports.json) or
    from a bare decisions.jsonl (counts only, hours unavailable)."""
    p = Path(path)
    if p.is_dir():
        reports_path = p / "reports.json"
        if not reports_path.exists():
            raise CurationError(f"no reports.json under {p}")
        raw = json.loads(reports_path.read_text(encoding="utf-8"))
        reports = [StageReport.from_dict(d) for d in raw]
    elif p.suffix == ".json":
        raw = json.loads(p.read_text(encoding="utf-8"))
        reports = [StageReport.from_dict(d) for d in raw]
    else:
        reports = _reports_from_decisions(p)
    reports = recompute_percents(reports, mode)
    return StatsDocument(
        mode=mode,
        reports=reports,
        flow=flow_document(reports),
        table=render_table(reports, mode),
    )


def _reports_from_decisions(path: Path) -> list[StageReport]:
    """Count-only stage reports reconstructed from a decision log; hour
    columns mirror the counts because hours are not recorded there."""
    from .model import FilterDecision

    stages: dict[str, dict] = {}
    order: list[str] = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            d = FilterDecision.from_json(line)
            if d.stage not in stages:
                stages[d.stage] = {"in": 0, "out": 0, "reasons": {}}
                order.append(d.stage)
            s = stages[d.stage]
            s["in"] += 1
            if d.kept:
                s["out"] += 1
            else:
                s["reasons"][d.reason] = s["reasons"].get(d.reason, 0) + 1
    out = []
    for name in order:
        s = stages[name]
        out.append(
            StageReport(
                stage=name,
                unit="records",
                input_count=s["in"],
                input_hours=float(s["in"]),
                output_count=s["out"],
                output_hours=float(s["out"]),
                percent_remaining=percent_remaining(s["out"], s["in"]),
                drop_reasons=s["reasons"],
            )
        )
    return out
