"""Core AST types shared by the parser, renderer, diff and scoring layers.

Trees are immutable: every transformation builds new nodes, so values are
safe to share between worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator


class Dialect(Enum):
    """Target dialect for parsing and rendering.

    SQLITE is the execution dialect of the fixture databases; GENERIC is a
    plain ANSI-style mode for comparing queries without executing them.
    The supported statement surface is identical in both.
    """

    SQLITE = "sqlite"
    GENERIC = "generic"


class NodeKind(str, Enum):
    STATEMENT = "statement"
    SELECT_LIST = "select-list"
    COLUMN_REF = "column-ref"
    TABLE_REF = "table-ref"
    ALIAS = "alias"
    LITERAL = "literal"
    FUNCTION_CALL = "function-call"
    WHERE = "where"
    GROUP_BY = "group-by"
    ORDER_BY = "order-by"
    LIMIT = "limit"
    JOIN = "join"
    CTE = "cte"
    OPERATOR = "operator"


@dataclass(frozen=True)
class Node:
    """One AST node: a kind, its own token text, and ordered children.

    ``text`` holds the piece of the statement the node contributes itself:
    an identifier for column/table refs, the function or operator name, the
    rendered form of a literal (quotes included), the alias label, or the
    join type.  Structural nodes (statement, clauses) have empty text,
    except a select list which carries ``"distinct"`` when quantified.
    """

    kind: NodeKind
    text: str = ""
    children: tuple["Node", ...] = ()

    def walk(self) -> Iterator["Node"]:
        """Preorder traversal of this subtree."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    @property
    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def find_all(self, kind: NodeKind) -> list["Node"]:
        return [n for n in self.walk() if n.kind is kind]

    def replace_children(self, children: tuple["Node", ...]) -> "Node":
        return Node(self.kind, self.text, children)


@dataclass(frozen=True)
class SqlAst:
    """A dialect-normalized syntax tree for a single SELECT statement."""

    root: Node
    dialect: Dialect = Dialect.SQLITE

    @property
    def node_count(self) -> int:
        return self.root.size

    def walk(self) -> Iterator[Node]:
        return self.root.walk()


class ParseError(Exception):
    """Raised for any statement outside the supported SQL surface.

    ``position`` is a character offset into the source text, clamped to
    ``[0, len(source)]``.
    """

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


def accessed_tables(root: Node) -> set[str]:
    """Names of every table reference in the tree, CTE references included."""
    return {n.text for n in root.walk() if n.kind is NodeKind.TABLE_REF}


def cte_names(root: Node) -> set[str]:
    """Names bound by WITH clauses anywhere in the tree."""
    return {n.text for n in root.walk() if n.kind is NodeKind.CTE}


def physical_tables(root: Node) -> set[str]:
    """Table references that do not resolve to a CTE defined in the tree."""
    return accessed_tables(root) - cte_names(root)
