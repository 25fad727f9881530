"""Contextual rules: they need the schema, the whole workload or both."""

from __future__ import annotations

import re
from collections import defaultdict
from typing import Iterator, Optional

from sql_assistant.context.models import ApplicationContext, IndexDecl, TableSchema
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.detection.intra_rules import column_table, quote
from sql_assistant.detection.models import Finding, Location, Phase
from sql_assistant.detection.registry import DML, TABLE_DDL, register_rule
from sql_assistant.parser.models import (
    AnnotatedStatement,
    ClauseRole,
    ColumnRef,
    ConstraintKind,
    StatementKind,
    canonical,
)

K = AntiPatternKind
INTER = Phase.INTER_QUERY

_NUMBERED = re.compile(r"^(?P<base>.*?[A-Za-z])_?(?P<n>\d+)$")
_IN_LIST = re.compile(r"^\s*\(?\s*(?P<column>[\w.\"`\[\]]+)\s+IN\s*\((?P<items>.*)\)\s*\)?\s*$", re.IGNORECASE | re.DOTALL)
_LIST_ITEM = re.compile(r"\s*(?:'(?P<text>(?:[^']|'')*)'|(?P<number>-?\d+(?:\.\d+)?))\s*(?:,|$)")


def finding_in(
    ctx: ApplicationContext,
    stmt: AnnotatedStatement,
    kind: AntiPatternKind,
    evidence: str,
    table: Optional[str] = None,
    column: Optional[str] = None,
    **details,
) -> Finding:
    return Finding(
        kind=kind,
        location=Location(statement=stmt.source_id, table=table, column=column),
        evidence=evidence,
        phase=INTER,
        context_ref=ctx.fingerprint,
        details=details,
    )


def owner_statement(ctx: ApplicationContext, table: str) -> Optional[str]:
    """Source id of the statement that defines ``table``: its CREATE TABLE, else the first DDL naming it."""
    schema = ctx.schema(table)
    if schema is not None and schema.source_id:
        return schema.source_id
    for stmt in ctx.query_registry:
        if stmt.kind in TABLE_DDL and canonical(stmt.target_table) == canonical(table):
            return stmt.source_id
    return None


def _owning_schema(stmt: AnnotatedStatement, column: str, ctx: ApplicationContext) -> Optional[TableSchema]:
    owners = [s for t in stmt.tables_referenced if (s := ctx.schema(t)) is not None and s.has_column(column)]
    return owners[0] if len(owners) == 1 else None


def selective_columns(stmt: AnnotatedStatement, ctx: ApplicationContext) -> list[ColumnRef]:
    """Columns compared against a value by equality or range in the WHERE clause, resolved to tables."""
    found: dict[tuple[str, str], ColumnRef] = {}
    for predicate in stmt.predicates:
        if predicate.clause is not ClauseRole.WHERE or not predicate.is_selective:
            continue
        operand = predicate.column_operand()
        if operand is None or operand.column is None:
            continue
        schema = ctx.schema(column_table(stmt, operand.column)) or _owning_schema(stmt, operand.column.column, ctx)
        if schema is None:
            continue
        ref = ColumnRef(schema.name, operand.column.column)
        found.setdefault(ref.key, ref)
    return list(found.values())


def _leading(index: IndexDecl) -> str:
    return index.column_keys[0] if index.columns else ""


# ---------- logical design ----------

@register_rule(K.NO_PRIMARY_KEY, frozenset({StatementKind.CREATE_TABLE}), phase=INTER)
def _table_without_key(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    schema = ctx.schema(stmt.target_table)
    if schema is None or not schema.from_ddl or schema.source_id != stmt.source_id or schema.primary_key:
        return
    candidates = [
        c.name for c in schema.columns
        if (profile := ctx.profile(schema.name, c.name)) is not None and profile.looks_unique
    ]
    yield finding_in(
        ctx, stmt, K.NO_PRIMARY_KEY,
        f"table {schema.name} declares no PRIMARY KEY in any CREATE or ALTER statement",
        table=schema.name,
        unique_columns=candidates,
    )


def _has_foreign_key(schema: TableSchema, column: str, target: str) -> bool:
    decl = schema.foreign_key_on(column)
    return decl is not None and canonical(decl.target_table) == canonical(target)


def _is_key(schema: TableSchema, column: str) -> bool:
    return schema.is_key_column(column) or schema.is_unique_column(column)


@register_rule(K.NO_FOREIGN_KEY, DML, phase=INTER)
def _join_without_foreign_key(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for edge in sorted(ctx.join_graph):
        if ctx.join_graph[edge] != stmt.source_id:
            continue
        a, b = edge.left_ref, edge.right_ref
        sa, sb = ctx.schema(a.table), ctx.schema(b.table)
        if sa is None or sb is None or sa.name == sb.name:
            continue
        if not (sa.has_column(a.column) and sb.has_column(b.column)):
            continue
        if _has_foreign_key(sa, a.column, sb.name) or _has_foreign_key(sb, b.column, sa.name):
            continue
        (child, child_schema), (parent, parent_schema) = (a, sa), (b, sb)
        if _is_key(sa, a.column) and not _is_key(sb, b.column):
            (child, child_schema), (parent, parent_schema) = (b, sb), (a, sa)
        yield finding_in(
            ctx, stmt, K.NO_FOREIGN_KEY,
            f"{child_schema.name}.{child.column} is joined with {parent_schema.name}.{parent.column} "
            f"but no FOREIGN KEY declares the relationship",
            table=child_schema.name,
            column=child_schema.column(child.column).name,
            parent_table=parent_schema.name,
            parent_column=parent_schema.column(parent.column).name,
        )


@register_rule(K.DATA_IN_METADATA, TABLE_DDL, phase=INTER)
def _numbered_columns(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    schema = ctx.schema(stmt.target_table)
    if schema is None or owner_statement(ctx, schema.name) != stmt.source_id:
        return
    groups: dict[str, list[str]] = defaultdict(list)
    for column in schema.columns:
        match = _NUMBERED.match(column.name)
        if match:
            groups[canonical(match.group("base"))].append(column.name)
    for base, columns in groups.items():
        if len(columns) >= 2:
            yield finding_in(
                ctx, stmt, K.DATA_IN_METADATA,
                f"{schema.name} spreads one attribute over numbered columns {', '.join(columns)}",
                table=schema.name,
                column=columns[0],
                columns=columns,
            )


@register_rule(K.ADJACENCY_LIST, TABLE_DDL, phase=INTER)
def _self_reference(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for decl in stmt.constraints:
        table = decl.table or stmt.target_table
        if decl.kind is ConstraintKind.FOREIGN_KEY and table and canonical(decl.target_table) == canonical(table):
            yield finding_in(
                ctx, stmt, K.ADJACENCY_LIST,
                f"{table}.{', '.join(decl.columns)} references {table} itself to store a hierarchy",
                table=table,
                column=decl.columns[0] if decl.columns else None,
            )


# ---------- physical design ----------

def parse_in_list(expression: str) -> Optional[tuple[str, list[str]]]:
    """``(column, values)`` for a ``col IN ('a', 'b')`` check expression made of literals only."""
    match = _IN_LIST.match(expression)
    if not match:
        return None
    items = match.group("items").strip()
    values: list[str] = []
    position = 0
    while position < len(items):
        item = _LIST_ITEM.match(items, position)
        if item is None or item.end() == position:
            return None
        text = item.group("text")
        values.append(text.replace("''", "'") if text is not None else item.group("number"))
        position = item.end()
    column = match.group("column").split(".")[-1].strip('"`[]')
    return (column, values) if values else None


@register_rule(K.ENUMERATED_TYPES, TABLE_DDL, phase=INTER)
def _check_in_list(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for decl in stmt.constraints:
        if decl.kind is not ConstraintKind.CHECK:
            continue
        parsed = parse_in_list(decl.expression_text or "")
        if parsed is None:
            continue
        column, values = parsed
        table = decl.table or stmt.target_table
        schema = ctx.schema(table)
        # dropped later in the workload
        if schema is not None and not any(
            c.kind is ConstraintKind.CHECK and c.expression_text == decl.expression_text for c in schema.constraints
        ):
            continue
        yield finding_in(
            ctx, stmt, K.ENUMERATED_TYPES,
            f"CHECK constraint restricts {table}.{column} to the fixed value list {', '.join(values)}",
            table=table,
            column=column,
            values=values,
            constraint=decl.name,
        )


def _workload(ctx: ApplicationContext, table: str) -> list[tuple[AnnotatedStatement, set[str]]]:
    key = canonical(table)
    result = []
    for stmt in ctx.query_registry:
        if stmt.kind not in DML:
            continue
        columns = {ref.key[1] for ref in selective_columns(stmt, ctx) if ref.key[0] == key}
        if columns:
            result.append((stmt, columns))
    return result


def best_index(indexes: tuple[IndexDecl, ...], columns: set[str]) -> Optional[IndexDecl]:
    """
    Index a query filtering ``columns`` would use: the longest matched prefix,
    then unique indexes, then the narrowest, then declaration order.
    """
    best, best_key = None, None
    for position, index in enumerate(indexes):
        prefix = 0
        for column in index.column_keys:
            if column not in columns:
                break
            prefix += 1
        if not prefix:
            continue
        key = (prefix, index.unique, -len(index.columns), -position)
        if best_key is None or key > best_key:
            best, best_key = index, key
    return best


@register_rule(K.INDEX_OVERUSE, TABLE_DDL | {StatementKind.CREATE_INDEX}, phase=INTER)
def _unused_index(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for schema in ctx.schemas.values():
        declared_here = [i for i in schema.indexes if i.source_id == stmt.source_id and not i.implicit]
        if not declared_here:
            continue
        workload = _workload(ctx, schema.name)
        if not workload:
            continue
        chosen = {}
        for query, columns in workload:
            index = best_index(schema.indexes, columns)
            if index is not None:
                chosen.setdefault(canonical(index.name), index.name)
        for index in declared_here:
            if canonical(index.name) in chosen:
                continue
            used = ", ".join(chosen.values()) or "no index"
            yield finding_in(
                ctx, stmt, K.INDEX_OVERUSE,
                f"index {index.name} on {schema.name}({', '.join(index.columns)}) is not the best access path "
                f"for any of the {len(workload)} queries filtering {schema.name}; they use {used}",
                table=schema.name,
                index=index.name,
                index_columns=list(index.columns),
            )


@register_rule(K.INDEX_UNDERUSE, DML, phase=INTER)
def _unindexed_filter(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    threshold = ctx.build_config.index_use_min
    for ref in selective_columns(stmt, ctx):
        schema = ctx.schema(ref.table)
        if any(_leading(index) == ref.key[1] for index in schema.indexes):
            continue
        users = [
            s for s in ctx.query_registry
            if s.kind in DML and ref.key in {other.key for other in selective_columns(s, ctx)}
        ]
        if len(users) < threshold or users[0].source_id != stmt.source_id:
            continue
        predicate = next(
            p for p in stmt.predicates
            if p.clause is ClauseRole.WHERE and p.is_selective and p.column_operand().column
            and canonical(p.column_operand().column.column) == ref.key[1]
        )
        yield finding_in(
            ctx, stmt, K.INDEX_UNDERUSE,
            f"{schema.name}.{ref.column} is filtered by {len(users)} queries (e.g. `{quote(stmt, predicate)}`) "
            f"but no index starts with it",
            table=schema.name,
            column=ref.column,
            queries=[s.source_id for s in users],
        )


@register_rule(K.CLONE_TABLE, frozenset({StatementKind.CREATE_TABLE}), phase=INTER)
def _numbered_tables(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    groups: dict[str, list[TableSchema]] = defaultdict(list)
    for schema in ctx.schemas.values():
        match = _NUMBERED.match(schema.name)
        if match and schema.from_ddl:
            groups[canonical(match.group("base"))].append(schema)
    for base, members in groups.items():
        if len(members) < 2 or members[0].source_id != stmt.source_id:
            continue
        names = [m.name for m in members]
        yield finding_in(
            ctx, stmt, K.CLONE_TABLE,
            f"tables {', '.join(names)} share the base name {base} and split one entity by a number suffix",
            table=members[0].name,
            tables=names,
        )
