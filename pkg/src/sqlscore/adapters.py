"""Pluggable prediction sources.

Any NL2SQL model can be hooked up through one of four adapters:

- ``file:<path>``    pre-computed predictions, JSON-lines of {"id", "sql"}
- ``cmd:<command>``  a subprocess run once per question; the question
                     object arrives as JSON on stdin, raw SQL on stdout
- ``http(s)://url``  POST {"question", "db_id", "schema"}, {"sql"} back
- ``identity``       echoes the ground-truth query (smoke-test baseline)

Adapter failures (timeout, non-zero exit, bad response) degrade to an
empty-SQL prediction that scores as invalid, never an aborted run; only an
adapter that produced nothing at all raises AdapterError.
"""

from __future__ import annotations

import json
import shlex
import sqlite3
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import requests

from .corpus import BenchmarkQuestion

DEFAULT_ADAPTER_TIMEOUT_S = 60.0
HTTP_RETRIES = 3


class AdapterError(Exception):
    """The adapter yielded no usable prediction for any question."""


@dataclass(frozen=True)
class Prediction:
    question_id: Any
    sql: str
    latency_ms: int | None = None


def parse_adapter_spec(spec: str) -> tuple[str, str]:
    if spec == "identity":
        return "identity", ""
    if spec.startswith("file:"):
        return "file", spec[len("file:") :]
    if spec.startswith("cmd:"):
        return "cmd", spec[len("cmd:") :]
    if spec.startswith(("http://", "https://")):
        return "http", spec
    if spec.startswith("http:"):
        return "http", spec[len("http:") :]
    raise ValueError(f"unknown adapter spec {spec!r}; expected identity, file:..., cmd:... or http(s)://...")


def _question_payload(question: BenchmarkQuestion) -> dict:
    payload = {
        "id": question.id,
        "db_id": question.db_id,
        "query": question.query,
        "question": question.question,
        "language": question.language,
        "case_type": question.case_type,
    }
    payload.update(question.extra)
    return payload


def _schema_text(db_path: Path) -> str:
    if not db_path.is_file():
        return ""
    conn = sqlite3.connect(f"file:{db_path}?mode=ro", uri=True)
    try:
        rows = conn.execute("SELECT sql FROM sqlite_master WHERE type = 'table' AND sql IS NOT NULL ORDER BY name").fetchall()
    finally:
        conn.close()
    return ";\n".join(r[0] for r in rows)


def _load_predictions_file(path: str) -> dict:
    by_id: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterError(f"predictions file {path}, line {line_no}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict) or "id" not in record or "sql" not in record:
            raise AdapterError(f"predictions file {path}, line {line_no}: expected an object with 'id' and 'sql'")
        by_id[record["id"]] = record
    return by_id


def _run_subprocess(command: str, payload: dict, timeout_s: float) -> str:
    try:
        proc = subprocess.run(
            shlex.split(command),
            input=json.dumps(payload, ensure_ascii=False),
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except (subprocess.TimeoutExpired, OSError):
        return ""
    if proc.returncode != 0:
        return ""
    return proc.stdout.strip()


def _post_http(url: str, payload: dict, timeout_s: float, backoff_s: float) -> str | None:
    """Returns SQL text, or None when the endpoint stayed unreachable."""
    for attempt in range(HTTP_RETRIES):
        try:
            response = requests.post(url, json=payload, timeout=timeout_s)
            response.raise_for_status()
            body = response.json()
            sql = body.get("sql") if isinstance(body, dict) else None
            return sql if isinstance(sql, str) else ""
        except (requests.RequestException, ValueError):
            if attempt + 1 < HTTP_RETRIES:
                time.sleep(backoff_s * (2**attempt))
    return None


def get_predictions(
    questions: list[BenchmarkQuestion],
    adapter: str = "identity",
    *,
    db_dir: str | Path | None = None,
    timeout_s: float = DEFAULT_ADAPTER_TIMEOUT_S,
    backoff_s: float = 0.5,
) -> list[Prediction]:
    """One Prediction per question, in question order.

    Raises AdapterError only when the adapter configuration is unusable or
    when not a single prediction could be obtained.
    """
    kind, value = parse_adapter_spec(adapter)
    predictions: list[Prediction] = []

    if kind == "identity":
        return [Prediction(q.id, q.query) for q in questions]

    if kind == "file":
        by_id = _load_predictions_file(value)
        for q in questions:
            record = by_id.get(q.id)
            if record is None:
                record = by_id.get(str(q.id), {})
            latency = record.get("latency_ms")
            predictions.append(Prediction(q.id, str(record.get("sql", "")), latency if isinstance(latency, int) else None))
        return predictions

    schemas: dict[str, str] = {}
    obtained = 0
    for q in questions:
        started = time.monotonic()
        if kind == "cmd":
            sql = _run_subprocess(value, _question_payload(q), timeout_s)
        else:
            if q.db_id not in schemas:
                schemas[q.db_id] = _schema_text(Path(db_dir) / f"{q.db_id}.sqlite") if db_dir else ""
            reply = _post_http(value, {"question": q.question, "db_id": q.db_id, "schema": schemas[q.db_id]}, timeout_s, backoff_s)
            sql = reply if reply is not None else ""
        elapsed_ms = int((time.monotonic() - started) * 1000)
        if sql:
            obtained += 1
        predictions.append(Prediction(q.id, sql, elapsed_ms))
    if questions and obtained == 0:
        raise AdapterError(f"adapter {adapter!r} produced no predictions for any of the {len(questions)} questions")
    return predictions
