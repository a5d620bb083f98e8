"""Partial-credit evaluation toolkit for NL2SQL models.

Two metrics score a predicted query against its ground truth: a statement
similarity computed from a classified AST edit script, and a result
similarity computed by matching executed result columns one-to-one.  A
benchmark runner evaluates whole question corpora against fixture
databases under a frozen clock and aggregates per question category.
"""

from .adapters import AdapterError, Prediction, get_predictions, parse_adapter_spec
from .anchor import DEFAULT_ANCHOR, parse_anchor, rewrite_time_anchor
from .corpus import CASE_TYPES, BenchmarkQuestion, CorpusLoadError, category_counts, load_corpus
from .diff import EditOp, EditOpKind, EditScript, diff
from .fixtures import FIXTURE_QUESTIONS, build_fixture_database, write_fixtures
from .parser import parse, tokenize
from .render import render, render_expression
from .report import report_to_csv, report_to_dict, report_to_json, report_to_markdown, summary_text
from .results import (
    ExecutionError,
    ResultScore,
    ResultTable,
    cells_equal,
    execute,
    match_columns,
    score_result_pair,
)
from .runner import (
    Aggregate,
    ConfigError,
    EvalOptions,
    EvalReport,
    InstanceResult,
    evaluate,
    validate_corpus,
)
from .semantic import CorpusError, ScoreBreakdown, SemanticScore, semantic_score_from_asts, semantic_similarity
from .sqlast import Dialect, Node, NodeKind, ParseError, SqlAst

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "Aggregate",
    "BenchmarkQuestion",
    "CASE_TYPES",
    "ConfigError",
    "CorpusError",
    "CorpusLoadError",
    "DEFAULT_ANCHOR",
    "Dialect",
    "EditOp",
    "EditOpKind",
    "EditScript",
    "EvalOptions",
    "EvalReport",
    "ExecutionError",
    "FIXTURE_QUESTIONS",
    "InstanceResult",
    "Node",
    "NodeKind",
    "ParseError",
    "Prediction",
    "ResultScore",
    "ResultTable",
    "ScoreBreakdown",
    "SemanticScore",
    "SqlAst",
    "build_fixture_database",
    "category_counts",
    "cells_equal",
    "diff",
    "evaluate",
    "execute",
    "get_predictions",
    "load_corpus",
    "match_columns",
    "parse",
    "parse_adapter_spec",
    "parse_anchor",
    "render",
    "render_expression",
    "report_to_csv",
    "report_to_dict",
    "report_to_json",
    "report_to_markdown",
    "rewrite_time_anchor",
    "score_result_pair",
    "semantic_score_from_asts",
    "semantic_similarity",
    "summary_text",
    "tokenize",
    "validate_corpus",
    "write_fixtures",
]
