"""Command-line interface.

Exit codes: 0 success, 1 validation warnings, 2 configuration or input
errors, 3 corpus errors during a run.  The BIS_ANCHOR environment variable
overrides the default clock anchor when --anchor is not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .adapters import AdapterError, get_predictions
from .anchor import DEFAULT_ANCHOR, parse_anchor
from .corpus import CorpusLoadError, load_corpus
from .fixtures import write_fixtures
from .parser import parse
from .render import render
from .report import report_to_csv, report_to_json, report_to_markdown, summary_text
from .results import VERDICT_EXECUTION_ERROR, ExecutionError, ResultScore, execute, score_result_pair
from .runner import ConfigError, EvalOptions, evaluate, validate_corpus
from .semantic import CorpusError, semantic_similarity
from .sqlast import ParseError

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_CONFIG = 2
EXIT_CORPUS_ERRORS = 3


def _resolve_anchor(value: str | None) -> str:
    if value:
        return value
    return os.environ.get("BIS_ANCHOR") or DEFAULT_ANCHOR.isoformat()


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_CONFIG


def cmd_score(args: argparse.Namespace) -> int:
    try:
        anchor = parse_anchor(_resolve_anchor(args.anchor))
    except ValueError as exc:
        return _fail(f"invalid anchor: {exc}")

    try:
        semantic = semantic_similarity(args.truth, args.predicted)
    except CorpusError as exc:
        return _fail(str(exc))
    print(f"semantic: {semantic.value:.3f}")

    if args.db is None:
        return EXIT_OK
    if not Path(args.db).is_file():
        return _fail(f"database not readable: {args.db}")
    try:
        truth_table = execute(args.truth, args.db, anchor, timeout_s=args.timeout_s)
    except ExecutionError as exc:
        return _fail(f"ground-truth query failed: {exc}")
    try:
        predicted_table = execute(args.predicted, args.db, anchor, timeout_s=args.timeout_s)
        result = score_result_pair(predicted_table, truth_table, args.order_insensitive)
    except ExecutionError:
        result = ResultScore.failure(VERDICT_EXECUTION_ERROR)
    print(f"precision: {result.precision:.3f}")
    print(f"recall: {result.recall:.3f}")
    print(f"f1: {result.f1:.3f}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    try:
        anchor = parse_anchor(_resolve_anchor(args.anchor))
    except ValueError as exc:
        return _fail(f"invalid anchor: {exc}")
    if not Path(args.db_dir).is_dir():
        return _fail(f"database directory not found: {args.db_dir}")
    try:
        questions = load_corpus(args.corpus)
    except CorpusLoadError as exc:
        return _fail(str(exc))
    if not questions:
        return _fail(f"no questions in corpus file {args.corpus}")

    try:
        predictions = get_predictions(questions, args.adapter, db_dir=args.db_dir, timeout_s=args.adapter_timeout_s)
    except (AdapterError, ValueError) as exc:
        return _fail(str(exc))

    try:
        options = EvalOptions(
            order_insensitive=args.order_insensitive,
            workers=args.workers,
            query_timeout_s=args.timeout_s,
        )
        report = evaluate(questions, predictions, args.db_dir, anchor, options)
    except ConfigError as exc:
        return _fail(str(exc))

    if args.report_json:
        Path(args.report_json).write_text(report_to_json(report), encoding="utf-8")
    if args.report_csv:
        Path(args.report_csv).write_text(report_to_csv(report), encoding="utf-8")
    if args.report_md:
        Path(args.report_md).write_text(report_to_markdown(report), encoding="utf-8")

    print(summary_text(report))
    if report.corpus_errors:
        print()
        for message in report.corpus_errors:
            print(f"corpus error: {message}")
        return EXIT_CORPUS_ERRORS
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        anchor = parse_anchor(_resolve_anchor(args.anchor))
    except ValueError as exc:
        return _fail(f"invalid anchor: {exc}")
    if not Path(args.db_dir).is_dir():
        return _fail(f"database directory not found: {args.db_dir}")
    try:
        questions = load_corpus(args.corpus)
    except CorpusLoadError as exc:
        return _fail(str(exc))
    warnings = validate_corpus(questions, args.db_dir, anchor)
    if not warnings:
        print(f"corpus ok: {len(questions)} questions, no warnings")
        return EXIT_OK
    for message in warnings:
        print(f"warning: {message}")
    return EXIT_WARNINGS


def cmd_fixtures(args: argparse.Namespace) -> int:
    corpus_path, db_dir = write_fixtures(args.out)
    print(f"wrote corpus: {corpus_path}")
    print(f"wrote databases: {db_dir}")
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    try:
        print(render(parse(args.sql)))
    except ParseError as exc:
        return _fail(str(exc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqlscore", description="Partial-credit scoring for NL2SQL predictions.")
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score one predicted query against the ground truth")
    score.add_argument("truth", help="ground-truth SQL")
    score.add_argument("predicted", help="predicted SQL")
    score.add_argument("--db", help="fixture database; adds result-similarity scores")
    score.add_argument("--anchor", help="ISO-8601 clock anchor (default 2023-01-17T00:00:00)")
    score.add_argument("--order-insensitive", action="store_true", help="sort column values before comparing")
    score.add_argument("--timeout-s", type=float, default=10.0, help="per-query execution timeout")
    score.set_defaults(func=cmd_score)

    run = sub.add_parser("run", help="evaluate a whole corpus")
    run.add_argument("--corpus", required=True, help="question file (JSON array)")
    run.add_argument("--db-dir", required=True, help="directory with <db_id>.sqlite files")
    run.add_argument("--adapter", default="identity", help="identity | file:preds.jsonl | cmd:command | http(s)://url")
    run.add_argument("--anchor", help="ISO-8601 clock anchor")
    run.add_argument("--order-insensitive", action="store_true")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--timeout-s", type=float, default=10.0, help="per-query execution timeout")
    run.add_argument("--adapter-timeout-s", type=float, default=60.0, help="per-question adapter timeout")
    run.add_argument("--report-json")
    run.add_argument("--report-csv")
    run.add_argument("--report-md")
    run.set_defaults(func=cmd_run)

    validate = sub.add_parser("validate", help="check corpus and fixture-data health")
    validate.add_argument("--corpus", required=True)
    validate.add_argument("--db-dir", required=True)
    validate.add_argument("--anchor")
    validate.set_defaults(func=cmd_validate)

    fixtures = sub.add_parser("fixtures", help="write the built-in fixture corpus and databases")
    fixtures.add_argument("--out", required=True, help="output directory")
    fixtures.set_defaults(func=cmd_fixtures)

    normalize = sub.add_parser("normalize", help="parse and re-render a statement in canonical form")
    normalize.add_argument("sql")
    normalize.set_defaults(func=cmd_normalize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
