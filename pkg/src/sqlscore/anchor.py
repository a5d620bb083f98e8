"""Freeze the clock: rewrite current-time function calls to a fixed instant.

Temporally-phrased questions ("last 2 weeks") only reproduce if "now" means
the same thing on every run, so the evaluation pins it by rewriting the AST
rather than hooking the engine clock.  The default anchor matches the time
span of the fixture data.
"""

from __future__ import annotations

from datetime import datetime

from .sqlast import Node, NodeKind, SqlAst

DEFAULT_ANCHOR = datetime(2023, 1, 17, 0, 0, 0)

# Functions whose 'now' argument designates the current instant.
TIME_VALUE_FUNCTIONS = {"datetime", "date", "time", "strftime", "julianday", "unixepoch", "timediff"}


def parse_anchor(value: str | datetime) -> datetime:
    if isinstance(value, datetime):
        return value
    return datetime.fromisoformat(value)


def _timestamp_literal(anchor: datetime) -> Node:
    return Node(NodeKind.LITERAL, f"'{anchor.strftime('%Y-%m-%d %H:%M:%S')}'")


def rewrite_time_anchor(ast: SqlAst, anchor: str | datetime = DEFAULT_ANCHOR) -> SqlAst:
    """Replace every current-time call with the anchor as a literal.

    ``now()`` and ``current_timestamp`` become a timestamp literal,
    ``current_date``/``current_time`` keep their granularity, and a ``'now'``
    argument inside the date/time function family is substituted in place,
    so ``datetime('now', '-14 days')`` keeps its modifier.  Idempotent;
    trees without time functions pass through unchanged.
    """
    instant = parse_anchor(anchor)
    ts = _timestamp_literal(instant)

    def rewrite(node: Node) -> Node:
        if node.kind is NodeKind.FUNCTION_CALL:
            if node.text == "now" and not node.children:
                return ts
            if node.text == "current_timestamp" and not node.children:
                return ts
            if node.text == "current_date" and not node.children:
                return Node(NodeKind.LITERAL, f"'{instant.strftime('%Y-%m-%d')}'")
            if node.text == "current_time" and not node.children:
                return Node(NodeKind.LITERAL, f"'{instant.strftime('%H:%M:%S')}'")
            if node.text in TIME_VALUE_FUNCTIONS:
                args = tuple(ts if a.kind is NodeKind.LITERAL and a.text == "'now'" else rewrite(a) for a in node.children)
                return node.replace_children(args)
        if not node.children:
            return node
        return node.replace_children(tuple(rewrite(c) for c in node.children))

    return SqlAst(rewrite(ast.root), ast.dialect)
