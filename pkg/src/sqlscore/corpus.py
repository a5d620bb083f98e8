"""Question-corpus loading.

A corpus file is a JSON array of instances with the keys ``db_id``,
``query`` (ground truth SQL), ``question``, ``language`` and ``case_type``,
plus an optional stable ``id``.  Instances without an id get their
zero-based file position.  Unknown extra fields are preserved but ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

CASE_TYPES = (
    "filtering",
    "time_period",
    "comparison",
    "trend_comparison",
    "multi_table",
    "rank",
    "percentage",
    "aggregation",
    "language",
)

_REQUIRED_FIELDS = ("db_id", "query", "question", "language", "case_type")


class CorpusLoadError(Exception):
    """The question file is malformed; the message names the offending instance."""


@dataclass(frozen=True)
class BenchmarkQuestion:
    db_id: str
    query: str
    question: str
    language: str
    case_type: str
    id: Any = None
    extra: dict = field(default_factory=dict, compare=False)


def question_from_mapping(raw: dict, index: int) -> BenchmarkQuestion:
    for name in _REQUIRED_FIELDS:
        if name not in raw:
            raise CorpusLoadError(f"instance {index}: missing required field {name!r}")
        if not isinstance(raw[name], str):
            raise CorpusLoadError(f"instance {index}: field {name!r} must be a string")
    if raw["case_type"] not in CASE_TYPES:
        raise CorpusLoadError(f"instance {index}: unknown case_type {raw['case_type']!r}")
    extra = {k: v for k, v in raw.items() if k not in _REQUIRED_FIELDS and k != "id"}
    return BenchmarkQuestion(
        db_id=raw["db_id"],
        query=raw["query"],
        question=raw["question"],
        language=raw["language"],
        case_type=raw["case_type"],
        id=raw.get("id", index),
        extra=extra,
    )


def load_corpus(path: str | Path) -> list[BenchmarkQuestion]:
    """Parse a question file; raises CorpusLoadError on any defect."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusLoadError(f"cannot read corpus file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusLoadError(f"corpus file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise CorpusLoadError(f"corpus file {path} must contain a JSON array of instances")

    questions: list[BenchmarkQuestion] = []
    seen_ids: set = set()
    for index, item in enumerate(raw):
        if not isinstance(item, dict):
            raise CorpusLoadError(f"instance {index}: expected a JSON object")
        question = question_from_mapping(item, index)
        if question.id in seen_ids:
            raise CorpusLoadError(f"instance {index}: duplicate id {question.id!r}")
        seen_ids.add(question.id)
        questions.append(question)
    return questions


def category_counts(questions: list[BenchmarkQuestion]) -> dict[str, int]:
    counts = {name: 0 for name in CASE_TYPES}
    for q in questions:
        counts[q.case_type] += 1
    return counts
