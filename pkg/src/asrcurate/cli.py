"""Command-line interface.

Subcommands: parse, filter, dedup, decontaminate, segment, stats, eval,
robustness, run, serve. The CLI is a thin layer over the library; every
command builds a configuration and calls the same functions the HTTP
service exposes. Exit codes: 0 success, 1 usage/config error, 2 data
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import (
    STAGE_DECONTAMINATE,
    STAGE_DEDUP,
    STAGE_SEGMENT,
    PipelineConfig,
    apply_overrides,
    config_from_dict,
    load_config,
)
from .errors import ConfigError, CurationError
from .evaluation import (
    RobustnessPoint,
    effective_robustness,
    evaluate,
    load_eval_records,
    relative_robustness,
)
from .filters import POINTWISE_STAGES
from .model import doc_to_dict
from .pipeline import run_pipeline
from .reports import MODE_PREVIOUS, REPORT_MODES, stats
from .subtitles import parse_subtitle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this project reserves 2 for data
    errors, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="asrcurate", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=None, help="global RNG seed")
    parser.add_argument("--workers", type=int, default=None, help="worker pool size")
    parser.add_argument(
        "--report-mode", choices=REPORT_MODES, default=None, help="percent denominator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse one SRT/VTT file to document JSON")
    p.add_argument("file", type=Path)
    p.add_argument("--format", choices=("srt", "vtt"), default=None)
    p.add_argument("--doc-id", default=None)
    p.add_argument("-o", "--output", type=Path, default=None)

    corpus_flags = {
        "--manifest": dict(required=True, help="line-delimited JSON manifest"),
        "--corpus-root": dict(default=None, help="root for relative paths"),
        "--out-dir": dict(required=True, help="output directory"),
    }

    def add_corpus(sp):
        for flag, kw in corpus_flags.items():
            sp.add_argument(flag, **kw)

    p = sub.add_parser("filter", help="run the pointwise quality filters")
    add_corpus(p)
    p.add_argument("--required-lang", default=None)
    p.add_argument("--doc-wer-threshold", type=float, default=None)
    p.add_argument("--repeat-min-run", type=int, default=None)
    p.add_argument("--profile", choices=("basic", "aggressive"), default=None)
    p.add_argument(
        "--stages",
        default=",".join(POINTWISE_STAGES),
        help="comma-separated pointwise stages to run, in order",
    )

    p = sub.add_parser("dedup", help="MinHash near-duplicate detection")
    add_corpus(p)
    p.add_argument("--verify-threshold", type=float, default=None)

    p = sub.add_parser("decontaminate", help="n-gram decontamination")
    add_corpus(p)
    p.add_argument("--refs", nargs="+", required=True, help="evaluation reference files")
    p.add_argument("--n", type=int, default=10, help="n-gram size")

    p = sub.add_parser("segment", help="cut documents into training windows")
    add_corpus(p)
    p.add_argument("--window", type=float, default=30.0)
    p.add_argument("--keep-empty", action="store_true")

    p = sub.add_parser("stats", help="stage-accounting tables and flow data")
    p.add_argument("path", type=Path, help="run directory, reports.json, or decisions.jsonl")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("eval", help="score hypothesis transcripts per dataset")
    p.add_argument("records", type=Path, help="JSONL records or ref/hyp directory")
    p.add_argument("--profile", choices=("basic", "aggressive"), default="basic")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("robustness", help="effective/relative robustness analysis")
    p.add_argument("points", type=Path, help="JSON list of robustness points")
    p.add_argument("--raw-domain", action="store_true", help="fit raw WER, not log10")
    p.add_argument(
        "--relative",
        nargs=2,
        metavar=("WITH", "WITHOUT"),
        default=None,
        help="also report relative robustness between two named models",
    )

    p = sub.add_parser("run", help="run the full configured pipeline")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--manifest", default=None)
    p.add_argument("--corpus-root", default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--stages", default=None, help="comma-separated stage list")
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--keep-empty", action="store_true", default=None)
    p.add_argument("--required-lang", default=None)
    p.add_argument("--doc-wer-threshold", type=float, default=None)
    p.add_argument("--segment-wer-threshold", type=float, default=None)
    p.add_argument("--repeat-min-run", type=int, default=None)
    p.add_argument("--profile", choices=("basic", "aggressive"), default=None)
    p.add_argument("--verify-threshold", type=float, default=None)
    p.add_argument("--decontam-refs", nargs="+", default=None)
    p.add_argument("--decontam-n", type=int, default=None)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8570)

    return parser


def _emit(payload: str, output: Optional[Path]):
    if output is None:
        print(payload)
    else:
        output.write_text(payload + "\n", encoding="utf-8")


def _stage_config(args, stages, **extra) -> PipelineConfig:
    d = {
        "manifest": args.manifest,
        "out_dir": args.out_dir,
        "corpus_root": args.corpus_root,
        "stages": stages,
        **extra,
    }
    cfg = config_from_dict({k: v for k, v in d.items() if v is not None})
    return apply_overrides(
        cfg,
        seed=args.seed,
        workers=args.workers,
        report_mode=args.report_mode,
    )


def _cmd_parse(args) -> int:
    doc = parse_subtitle(
        args.file.read_bytes(),
        format_hint=args.format,
        doc_id=args.doc_id or args.file.stem,
    )
    _emit(json.dumps(doc_to_dict(doc), sort_keys=True, indent=2), args.output)
    return EXIT_OK


def _cmd_filter(args) -> int:
    stages = tuple(s.strip() for s in args.stages.split(",") if s.strip())
    cfg = _stage_config(args, stages)
    cfg = apply_overrides(
        cfg,
        required_lang=args.required_lang,
        doc_wer_threshold=args.doc_wer_threshold,
        repeat_min_run=args.repeat_min_run,
        profile=args.profile,
    )
    result = run_pipeline(cfg)
    print(f"kept {result.kept} of {result.decisions} decisions -> {result.out_dir}")
    return EXIT_OK


def _cmd_dedup(args) -> int:
    cfg = _stage_config(args, (STAGE_DEDUP,), verify_threshold=args.verify_threshold)
    result = run_pipeline(cfg)
    print(f"kept {result.kept} pairs -> {result.out_dir}")
    return EXIT_OK


def _cmd_decontaminate(args) -> int:
    cfg = _stage_config(
        args, (STAGE_DECONTAMINATE,), decontam_refs=tuple(args.refs), decontam_n=args.n
    )
    result = run_pipeline(cfg)
    print(f"kept {result.kept} pairs -> {result.out_dir}")
    return EXIT_OK


def _cmd_segment(args) -> int:
    cfg = _stage_config(
        args, (STAGE_SEGMENT,), window=args.window, keep_empty=args.keep_empty
    )
    result = run_pipeline(cfg)
    print(f"wrote {result.kept} segments -> {result.out_dir}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    doc = stats(args.path, args.report_mode or MODE_PREVIOUS)
    if args.as_json:
        print(json.dumps(doc.to_dict(), sort_keys=True, indent=2))
    else:
        print(doc.table)
    return EXIT_OK


def _cmd_eval(args) -> int:
    records = load_eval_records(args.records)
    report = evaluate(records, args.profile)
    if args.as_json:
        print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
        return EXIT_OK
    for name in sorted(report.per_dataset):
        b = report.per_dataset[name]
        print(
            f"{name:<24} wer {100 * b.wer:6.2f}%  "
            f"S={b.substitutions} D={b.deletions} I={b.insertions} N={b.reference_words}"
        )
    print(f"{'macro average':<24} wer {100 * report.macro_average:6.2f}%")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _cmd_robustness(args) -> int:
    raw = json.loads(args.points.read_text(encoding="utf-8"))
    points = [RobustnessPoint.from_dict(d) for d in raw]
    domain = "raw" if args.raw_domain else "log10"
    fit, ers = effective_robustness(points, domain)
    payload = {
        "fit": {"slope": fit.slope, "intercept": fit.intercept, "domain": fit.domain},
        "effective_robustness": [
            {
                "model_id": e.model_id,
                "value": e.value,
                "factor": e.factor,
                "is_intervention": e.is_intervention,
            }
            for e in ers
        ],
    }
    if args.relative:
        with_id, without_id = args.relative
        by_id = {p.model_id: p for p in points}
        try:
            rr = relative_robustness(by_id[with_id], by_id[without_id])
        except KeyError as e:
            raise ConfigError(f"unknown model id {e.args[0]!r}") from None
        payload["relative_robustness"] = {
            "with": with_id,
            "without": without_id,
            "value": rr,
        }
    print(json.dumps(payload, sort_keys=True, indent=2))
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    cfg = apply_overrides(
        cfg,
        manifest=args.manifest,
        corpus_root=args.corpus_root,
        out_dir=args.out_dir,
        seed=args.seed,
        workers=args.workers,
        report_mode=args.report_mode,
        stages=tuple(s.strip() for s in args.stages.split(",")) if args.stages else None,
        window=args.window,
        keep_empty=args.keep_empty,
        required_lang=args.required_lang,
        doc_wer_threshold=args.doc_wer_threshold,
        segment_wer_threshold=args.segment_wer_threshold,
        repeat_min_run=args.repeat_min_run,
        profile=args.profile,
        verify_threshold=args.verify_threshold,
        decontam_refs=tuple(args.decontam_refs) if args.decontam_refs else None,
        decontam_n=args.decontam_n,
    )
    result = run_pipeline(cfg, resume=args.resume)
    for r in result.reports:
        print(
            f"{r.stage:<22} {r.input_count:>8} -> {r.output_count:<8} "
            f"({r.percent_remaining:.1f}% remaining)"
        )
    print(
        f"kept {result.kept}, decisions {result.decisions}, "
        f"errors {result.errors} -> {result.out_dir}"
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "parse": _cmd_parse,
    "filter": _cmd_filter,
    "dedup": _cmd_dedup,
    "decontaminate": _cmd_decontaminate,
    "segment": _cmd_segment,
    "stats": _cmd_stats,
    "eval": _cmd_eval,
    "robustness": _cmd_robustness,
    "run": _cmd_run,
    "serve": _cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
