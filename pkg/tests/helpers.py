"""Shared test utilities: random generators, AST mutators, brute-force oracles.

The oracles here are deliberately naive and independent of the library's
algorithms; they exist so expected values are computed, not invented.
"""

from __future__ import annotations

import random

from sqlscore import Node, NodeKind, ResultTable, SqlAst, parse
from sqlscore.diff import _CLAUSE_KINDS  # clause buckets are part of the matcher contract

# -- random query generation --------------------------------------------------

_TABLES = ["t", "u", "orders", "metrics"]
_COLUMNS = ["a", "b", "c", "day", "region", "value"]
_FUNCTIONS = ["count", "sum", "avg", "min", "max"]


def random_query(rng: random.Random) -> str:
    """A random statement inside the supported surface."""

    def column():
        return rng.choice(_COLUMNS)

    def scalar():
        return rng.choice([str(rng.randint(0, 99)), f"'{rng.choice(['x', 'y', 'z'])}'", f"{rng.randint(1, 9)}.5"])

    def select_item():
        roll = rng.random()
        if roll < 0.4:
            return column()
        if roll < 0.7:
            return f"{rng.choice(_FUNCTIONS)}({column()})"
        if roll < 0.8:
            return "count(*)"
        return f"{column()} AS {rng.choice(['lbl', 'out', 'v'])}{rng.randint(0, 9)}"

    def condition():
        op = rng.choice(["=", "!=", "<", ">", "<=", ">="])
        return f"{column()} {op} {scalar()}"

    items = ", ".join(select_item() for _ in range(rng.randint(1, 3)))
    sql = f"SELECT {items} FROM {rng.choice(_TABLES)}"
    if rng.random() < 0.6:
        sql += " WHERE " + " AND ".join(condition() for _ in range(rng.randint(1, 3)))
    if rng.random() < 0.4:
        sql += f" GROUP BY {column()}"
    if rng.random() < 0.3:
        sql += f" ORDER BY {column()}" + (" DESC" if rng.random() < 0.5 else "")
    if rng.random() < 0.3:
        sql += f" LIMIT {rng.randint(1, 20)}"
    return sql


# -- AST mutators --------------------------------------------------------------


def _rebuild(node: Node, target: Node, replacement: Node | None) -> Node:
    """Copy of the tree with ``target`` replaced (or removed when None)."""
    if node is target:
        assert replacement is not None
        return replacement
    children = []
    for child in node.children:
        if child is target and replacement is None:
            continue
        children.append(_rebuild(child, target, replacement))
    return Node(node.kind, node.text, tuple(children))


def swap_table(ast: SqlAst, new_name: str = "zz_other") -> SqlAst:
    """Rename the first physical table reference."""
    from sqlscore.sqlast import cte_names

    ctes = cte_names(ast.root)
    target = next(n for n in ast.root.walk() if n.kind is NodeKind.TABLE_REF and n.text not in ctes)
    return SqlAst(_rebuild(ast.root, target, Node(NodeKind.TABLE_REF, new_name)), ast.dialect)


def _first_select_list(ast: SqlAst) -> Node:
    return next(n for n in ast.root.walk() if n.kind is NodeKind.SELECT_LIST)


def add_column_alias(ast: SqlAst, label: str = "extra_label") -> SqlAst:
    """Wrap the first unaliased, non-star select item in an alias."""
    select_list = _first_select_list(ast)
    target = next(c for c in select_list.children if c.kind is not NodeKind.ALIAS and c.text != "*")
    return SqlAst(_rebuild(ast.root, target, Node(NodeKind.ALIAS, label, (target,))), ast.dialect)


def rename_column_alias(ast: SqlAst, label: str = "renamed_label") -> SqlAst:
    target = next(n for n in ast.root.walk() if n.kind is NodeKind.ALIAS and n.children[0].kind is not NodeKind.TABLE_REF)
    return SqlAst(_rebuild(ast.root, target, Node(NodeKind.ALIAS, label, target.children)), ast.dialect)


def drop_select_column(ast: SqlAst) -> SqlAst:
    """Remove the first select-list item (the list must keep >= 1 item)."""
    select_list = _first_select_list(ast)
    assert len(select_list.children) >= 2
    return SqlAst(_rebuild(ast.root, select_list.children[0], None), ast.dialect)


# -- brute-force oracles --------------------------------------------------------


def max_matching_oracle(compat: list[list[bool]]) -> int:
    """Exhaustive maximum one-to-one matching cardinality (small M, N)."""
    n_truth = len(compat[0]) if compat else 0

    def best(p_idx: int, used: frozenset) -> int:
        if p_idx == len(compat):
            return 0
        top = best(p_idx + 1, used)  # leave this predicted column unmatched
        for t_idx in range(n_truth):
            if compat[p_idx][t_idx] and t_idx not in used:
                top = max(top, 1 + best(p_idx + 1, used | {t_idx}))
        return top

    return best(0, frozenset())


def _bucket_map(root: Node) -> dict[int, str]:
    buckets = {}

    def walk(node: Node, bucket: str) -> None:
        buckets[id(node)] = bucket
        child_bucket = node.kind.value if node.kind in _CLAUSE_KINDS else bucket
        for child in node.children:
            walk(child, child_bucket)

    walk(root, "")
    return buckets


def optimal_nonkeep_oracle(truth: SqlAst, predicted: SqlAst) -> int:
    """Minimum possible non-keep op count over all kind- and clause-respecting
    one-to-one node matchings.  Exponential; only for trees of ~12 nodes."""
    t_nodes = list(truth.walk())
    p_nodes = list(predicted.walk())
    t_buckets = _bucket_map(truth.root)
    p_buckets = _bucket_map(predicted.root)

    t_parent = {id(truth.root): None}
    t_index = {id(truth.root): 0}
    for node in t_nodes:
        for i, child in enumerate(node.children):
            t_parent[id(child)] = node
            t_index[id(child)] = i
    p_parent = {id(predicted.root): None}
    p_index = {id(predicted.root): 0}
    for node in p_nodes:
        for i, child in enumerate(node.children):
            p_parent[id(child)] = node
            p_index[id(child)] = i

    candidates = [
        [p for p in p_nodes if p.kind is t.kind and p_buckets[id(p)] == t_buckets[id(t)]]
        for t in t_nodes
    ]
    best = [len(t_nodes) + len(p_nodes)]

    def is_keep(t: Node, p: Node, assignment: dict[int, Node]) -> bool:
        if t.text != p.text or t_index[id(t)] != p_index[id(p)]:
            return False
        tp, pp = t_parent[id(t)], p_parent[id(p)]
        if tp is None or pp is None:
            return tp is None and pp is None
        return assignment.get(id(tp)) is pp

    def search(i: int, cost: int, used: set, assignment: dict[int, Node]) -> None:
        if cost >= best[0]:
            return
        if i == len(t_nodes):
            inserts = len(p_nodes) - len(assignment)
            total = cost + inserts
            best[0] = min(best[0], total)
            return
        t = t_nodes[i]
        for p in candidates[i]:
            if id(p) in used:
                continue
            pair_cost = 0 if is_keep(t, p, assignment) else 1  # move or update
            used.add(id(p))
            assignment[id(t)] = p
            search(i + 1, cost + pair_cost, used, assignment)
            del assignment[id(t)]
            used.discard(id(p))
        search(i + 1, cost + 1, used, assignment)  # delete t

    search(0, 0, set(), {})
    return best[0]


# -- random result tables --------------------------------------------------------


def random_result_table(rng: random.Random, max_columns: int = 4, max_rows: int = 4) -> ResultTable:
    """Random small table with nulls, mixed types and duplicated columns."""
    n_rows = rng.randint(0, max_rows)
    n_cols = rng.randint(1, max_columns)
    pool: list = [None, 0, 1, 2, 2.0, 3.5, "x", "y", ""]
    columns: list[tuple] = []
    for _ in range(n_cols):
        if columns and rng.random() < 0.3:
            columns.append(rng.choice(columns))  # duplicate an existing column
        else:
            columns.append(tuple(rng.choice(pool) for _ in range(n_rows)))
    labels = tuple(f"c{i}" for i in range(len(columns)))
    return ResultTable(labels, tuple(columns))


def parse_pair(truth_sql: str, predicted_sql: str) -> tuple[SqlAst, SqlAst]:
    return parse(truth_sql), parse(predicted_sql)
