"""Repair rules per anti-pattern kind.

Every kind has a textual fix. The kinds below with a ``transform`` or
``create`` function also get rewritten SQL whenever the schema facts the
rewrite needs are present in the context; otherwise they fall back to text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from sql_assistant.context.models import ApplicationContext, TableSchema
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.detection.intra_rules import WORD_BOUNDARY_MARKERS, column_table, wildcard_items
from sql_assistant.detection.models import Finding
from sql_assistant.exception.custom_exception import RenderError
from sql_assistant.parser.models import (
    AnnotatedStatement,
    ClauseRole,
    OperandKind,
    Predicate,
    Span,
    StatementKind,
    TableRef,
    TokenType,
    canonical,
)
from sql_assistant.parser.renderer import apply_edits, render, reparse
from sql_assistant.repair.models import (
    CreateFn,
    RepairRule,
    StatementTransformation,
    TextualFn,
    TransformFn,
    TransformOp,
)

K = AntiPatternKind

REPAIR_RULES: dict[AntiPatternKind, RepairRule] = {}

_LIST_SUFFIX = re.compile(r"_?ids?$", re.IGNORECASE)
_ID_NAME = re.compile(r"id$", re.IGNORECASE)
DEFAULT_KEY_TYPE = "VARCHAR(64)"


def repair_rule(
    kind: AntiPatternKind, transform: Optional[TransformFn] = None, create: Optional[CreateFn] = None
) -> Callable[[TextualFn], TextualFn]:
    def decorator(textual: TextualFn) -> TextualFn:
        REPAIR_RULES[kind] = RepairRule(kind=kind, textual=textual, transform=transform, create=create)
        return textual

    return decorator


# ---------- rendering helpers ----------

def rewrite(stmt: AnnotatedStatement, edits: Iterable[tuple[Span, str]], description: str) -> StatementTransformation:
    """Apply token edits to ``stmt`` and render the result; the new text must parse cleanly."""
    fixed = apply_edits(stmt, edits)
    if fixed.diagnostics:
        raise RenderError(f"{stmt.source_id}: rewritten statement does not parse: {'; '.join(fixed.diagnostics)}")
    return StatementTransformation(TransformOp.REWRITE_EXISTING, stmt.source_id, description, render(fixed))


def create_new(sql: str, description: str) -> StatementTransformation:
    parsed = reparse(sql, "new")
    if parsed.diagnostics or parsed.kind is StatementKind.OTHER:
        raise RenderError(f"generated statement does not parse: {sql}")
    return StatementTransformation(TransformOp.CREATE_NEW, "", description, render(parsed))


def annotate(stmt: AnnotatedStatement, note: str) -> StatementTransformation:
    return StatementTransformation(TransformOp.ANNOTATE, stmt.source_id, note)


def _own(stmt: AnnotatedStatement, finding: Finding) -> bool:
    return stmt.source_id == finding.location.statement


def _span_text(stmt: AnnotatedStatement, span: Span) -> str:
    return "".join(t.text for t in stmt.tokens[span.start:span.end])


def _fresh_name(ctx: ApplicationContext, base: str) -> str:
    taken = set(ctx.schemas) | {canonical(i.name) for s in ctx.schemas.values() for i in s.indexes}
    name, n = base, 2
    while canonical(name) in taken:
        name, n = f"{base}_{n}", n + 1
    return name


def _column_type(schema: Optional[TableSchema], column: str) -> str:
    declared = schema.column(column) if schema else None
    return declared.declared_type if declared and declared.declared_type else DEFAULT_KEY_TYPE


def _sql_literal(value: str) -> str:
    return "'" + str(value).replace("'", "''") + "'"


def _where(finding: Finding) -> str:
    loc = finding.location
    return f" (see {loc.statement})" if loc.statement else ""


# ---------- multi-valued attribute ----------

@dataclass(frozen=True)
class _IntersectionDesign:
    owner: TableSchema
    column: str
    entity: TableSchema
    xref: str
    owner_key: str
    entity_key: str
    owner_ref: str
    entity_ref: str


def _entity_for(ctx: ApplicationContext, column: str) -> Optional[TableSchema]:
    base = _LIST_SUFFIX.sub("", column)
    if not base:
        return None
    for candidate in (base, base + "s", base + "es"):
        schema = ctx.schema(candidate)
        if schema is not None and len(schema.primary_key) == 1:
            return schema
    return None


def _intersection(finding: Finding, ctx: ApplicationContext) -> Optional[_IntersectionDesign]:
    owner = ctx.schema(finding.location.table)
    column = finding.location.column
    if owner is None or column is None or len(owner.primary_key) != 1 or not owner.has_column(column):
        return None
    entity = _entity_for(ctx, column)
    if entity is None or entity.name == owner.name:
        return None
    owner_key, entity_key = owner.primary_key[0], entity.primary_key[0]
    owner_ref, entity_ref = owner_key, entity_key
    if canonical(owner_ref) == canonical(entity_ref):
        owner_ref, entity_ref = f"{owner.name}_{owner_key}", f"{entity.name}_{entity_key}"
    return _IntersectionDesign(
        owner=owner,
        column=owner.column(column).name,
        entity=entity,
        xref=_fresh_name(ctx, f"{owner.name}_{entity.name}_xref"),
        owner_key=owner_key,
        entity_key=entity_key,
        owner_ref=owner_ref,
        entity_ref=entity_ref,
    )


def _intersection_tables(finding: Finding, ctx: ApplicationContext) -> Optional[list[StatementTransformation]]:
    design = _intersection(finding, ctx)
    if design is None:
        return None
    d = design
    ddl = (
        f"CREATE TABLE {d.xref} ("
        f"{d.owner_ref} {_column_type(d.owner, d.owner_key)} REFERENCES {d.owner.name}({d.owner_key}), "
        f"{d.entity_ref} {_column_type(d.entity, d.entity_key)} REFERENCES {d.entity.name}({d.entity_key}), "
        f"PRIMARY KEY ({d.owner_ref}, {d.entity_ref}))"
    )
    return [
        create_new(ddl, f"create intersection table {d.xref} between {d.owner.name} and {d.entity.name}"),
        create_new(
            f"ALTER TABLE {d.owner.name} DROP COLUMN {d.column}",
            f"drop the list column {d.owner.name}.{d.column}",
        ),
    ]


def _list_value(pattern: str) -> Optional[str]:
    text = pattern.strip()
    if len(text) < 2 or text[0] != "'" or text[-1] != "'":
        return None
    body = text[1:-1]
    for marker in WORD_BOUNDARY_MARKERS:
        body = body.replace(marker, "")
    body = body.strip("%,;| ")
    if not body or any(ch in body for ch in "%_,;|[]()^$*"):
        return None
    return body.replace("''", "'")


def _ref_for(stmt: AnnotatedStatement, table: str) -> Optional[TableRef]:
    return next((r for r in stmt.table_refs if canonical(r.name) == canonical(table)), None)


def _list_predicate(stmt: AnnotatedStatement, d: _IntersectionDesign) -> Optional[Predicate]:
    for predicate in stmt.predicates:
        left = predicate.left.column
        if not predicate.is_pattern_match or predicate.negated or left is None:
            continue
        if canonical(left.column) == canonical(d.column) and canonical(column_table(stmt, left)) == canonical(d.owner.name):
            return predicate
    return None


def _rewrite_list_query(stmt: AnnotatedStatement, d: _IntersectionDesign) -> Optional[StatementTransformation]:
    """Turn a pattern lookup or pattern join on the list column into a join through the intersection table."""
    predicate = _list_predicate(stmt, d)
    owner_ref = _ref_for(stmt, d.owner.name)
    if predicate is None or owner_ref is None or not stmt.table_refs:
        return None
    alias = "H" if canonical("h") not in stmt.aliases else f"{d.xref}_h"
    first = stmt.table_refs[0]

    def link(ref: TableRef) -> str:
        key_ref, key = (d.owner_ref, d.owner_key) if ref is owner_ref else (d.entity_ref, d.entity_key)
        return f"{_span_text(stmt, ref.span)} JOIN {d.xref} AS {alias} ON {alias}.{key_ref} = {ref.qualifier}.{key}"

    if predicate.right.kind is OperandKind.LITERAL:
        value = _list_value(predicate.right.text)
        if value is None or first is not owner_ref:
            return None
        edits = [
            (first.span, f"{d.xref} AS {alias} JOIN {_span_text(stmt, first.span)} "
                         f"ON {alias}.{d.owner_ref} = {first.qualifier}.{d.owner_key}"),
            (predicate.span, f"{alias}.{d.entity_ref} = {_sql_literal(value)}"),
        ]
        return rewrite(stmt, edits, f"look up {d.owner.name} rows through {d.xref}")

    entity_refs = [c for c in predicate.right.columns if canonical(column_table(stmt, c)) == canonical(d.entity.name)]
    entity_ref = _ref_for(stmt, d.entity.name)
    if len(entity_refs) != 1 or entity_ref is None or first not in (owner_ref, entity_ref):
        return None
    other = entity_ref if first is owner_ref else owner_ref
    if predicate.span.start < other.span.end:
        return None
    other_ref, other_key = (d.entity_ref, d.entity_key) if other is entity_ref else (d.owner_ref, d.owner_key)
    edits = [
        (first.span, link(first)),
        (predicate.span, f"{alias}.{other_ref} = {other.qualifier}.{other_key}"),
    ]
    return rewrite(stmt, edits, f"join {d.owner.name} and {d.entity.name} through {d.xref}")


def _drop_column_definition(stmt: AnnotatedStatement, column: str) -> Optional[StatementTransformation]:
    definition = next((c for c in stmt.column_defs if canonical(c.name) == canonical(column) and c.span), None)
    if definition is None or len(stmt.column_defs) < 2:
        return None
    span = definition.span
    before = span.start - 1
    while before >= 0 and not stmt.tokens[before].is_significant:
        before -= 1
    if before >= 0 and stmt.tokens[before].type is TokenType.PUNCTUATION and stmt.tokens[before].text == ",":
        cut = Span(before, span.end)
    else:
        after = span.end
        while after < len(stmt.tokens) and not stmt.tokens[after].is_significant:
            after += 1
        if after >= len(stmt.tokens) or stmt.tokens[after].text != ",":
            return None
        cut = Span(span.start, after + 1)
    return rewrite(stmt, [(cut, "")], f"remove column {column} from {stmt.target_table}")


def _rewrite_list_users(
    stmt: AnnotatedStatement, finding: Finding, ctx: ApplicationContext
) -> Optional[list[StatementTransformation]]:
    d = _intersection(finding, ctx)
    if d is None:
        return None
    if stmt.kind is StatementKind.CREATE_TABLE and canonical(stmt.target_table) == canonical(d.owner.name):
        dropped = _drop_column_definition(stmt, d.column)
        if dropped is not None:
            return [dropped]
    if stmt.kind is StatementKind.ALTER_TABLE and canonical(d.column) in {canonical(c) for c in stmt.dropped_columns}:
        return None
    if stmt.kind is StatementKind.SELECT:
        rewritten = _rewrite_list_query(stmt, d)
        if rewritten is not None:
            return [rewritten]
    return [
        annotate(
            stmt,
            f"{stmt.kind.value.replace('_', ' ')} statement uses {d.owner.name}.{d.column}; "
            f"read or write its values through {d.xref}({d.owner_ref}, {d.entity_ref}) instead",
        )
    ]


@repair_rule(K.MULTI_VALUED_ATTRIBUTE, transform=_rewrite_list_users, create=_intersection_tables)
def _multi_valued_text(finding: Finding, ctx: ApplicationContext) -> str:
    loc = finding.location
    if loc.table is None or loc.column is None:
        return (
            "Replace the delimiter-separated list column searched here with an intersection table "
            f"holding one row per (owner, value) pair{_where(finding)}."
        )
    design = _intersection(finding, ctx)
    xref = design.xref if design else f"{loc.table}_<referenced table>_xref"
    return (
        f"Store each value of {loc.table}.{loc.column} in its own row: create an intersection table {xref} "
        f"with a foreign key to {loc.table} and one to the referenced table, copy the list entries into it, "
        f"then ALTER TABLE {loc.table} DROP COLUMN {loc.column} and join through {xref} instead of pattern "
        f"matching. Existing rows must be migrated by hand."
    )


# ---------- implicit columns ----------

def _first_row_width(stmt: AnnotatedStatement) -> Optional[int]:
    tokens = [t for t in stmt.clause_tokens(ClauseRole.VALUES) if t.is_significant]
    opener = next((i for i, t in enumerate(tokens) if t.type is TokenType.PUNCTUATION and t.text == "("), None)
    if opener is None:
        return None
    depth, width = 0, 1
    for token in tokens[opener:]:
        if token.type is not TokenType.PUNCTUATION:
            continue
        if token.text == "(":
            depth += 1
        elif token.text == ")":
            depth -= 1
            if depth == 0:
                return width
        elif token.text == "," and depth == 1:
            width += 1
    return None


def _name_insert_columns(
    stmt: AnnotatedStatement, finding: Finding, ctx: ApplicationContext
) -> Optional[list[StatementTransformation]]:
    schema = ctx.schema(stmt.target_table)
    targets = stmt.spans(ClauseRole.TARGET)
    if not _own(stmt, finding) or schema is None or not schema.columns or not targets:
        return None
    if _first_row_width(stmt) != len(schema.columns):
        return None
    end = targets[0].end
    columns = ", ".join(c.name for c in schema.columns)
    return [rewrite(stmt, [(Span(end, end), f" ({columns})")], f"name the {len(schema.columns)} target columns")]


@repair_rule(K.IMPLICIT_COLUMNS, transform=_name_insert_columns)
def _implicit_columns_text(finding: Finding, ctx: ApplicationContext) -> str:
    table = finding.location.table or "the target table"
    schema = ctx.schema(finding.location.table)
    columns = f" ({', '.join(c.name for c in schema.columns)})" if schema and schema.columns else " (<column list>)"
    return f"List the target columns explicitly: INSERT INTO {table}{columns} VALUES (...){_where(finding)}."


# ---------- column wildcard ----------

def _expand_wildcards(
    stmt: AnnotatedStatement, finding: Finding, ctx: ApplicationContext
) -> Optional[list[StatementTransformation]]:
    if not _own(stmt, finding):
        return None
    items = stmt.items(ClauseRole.PROJECTION)
    edits = []
    for index, qualifier in wildcard_items(stmt):
        if qualifier is not None:
            refs = [r for r in stmt.table_refs if canonical(r.name) == canonical(qualifier)][:1]
        else:
            refs = list(stmt.table_refs)
        if not refs:
            return None
        names = []
        for ref in refs:
            schema = ctx.schema(ref.name)
            if schema is None or not schema.columns:
                return None
            prefix = f"{ref.qualifier}." if qualifier is not None or len(refs) > 1 else ""
            names.extend(prefix + c.name for c in schema.columns)
        edits.append((items[index], ", ".join(names)))
    if not edits:
        return None
    return [rewrite(stmt, edits, "expand * into the table's columns")]


@repair_rule(K.COLUMN_WILDCARD_USAGE, transform=_expand_wildcards)
def _wildcard_text(finding: Finding, ctx: ApplicationContext) -> str:
    schema = ctx.schema(finding.location.table)
    if schema and schema.columns:
        return f"Select only the columns the application reads from {schema.name}, e.g. {', '.join(c.name for c in schema.columns)}{_where(finding)}."
    return f"Replace * with the list of columns the application actually reads{_where(finding)}."


# ---------- concatenate nulls ----------

def _coalesce_operands(
    stmt: AnnotatedStatement, finding: Finding, ctx: ApplicationContext
) -> Optional[list[StatementTransformation]]:
    if not _own(stmt, finding) or finding.location.column is None:
        return None
    column, table = canonical(finding.location.column), canonical(finding.location.table)
    spans: dict[Span, str] = {}
    for pair in stmt.concatenations:
        for operand in pair:
            ref = operand.column
            if operand.kind is not OperandKind.COLUMN or ref is None or canonical(ref.column) != column:
                continue
            if table and canonical(column_table(stmt, ref)) not in ("", table):
                continue
            spans[operand.span] = f"COALESCE({operand.text}, '')"
    if not spans:
        return None
    return [rewrite(stmt, spans.items(), f"default NULL {finding.location.column} to an empty string")]


@repair_rule(K.CONCATENATE_NULLS, transform=_coalesce_operands)
def _concatenate_nulls_text(finding: Finding, ctx: ApplicationContext) -> str:
    column = finding.location.column or "each nullable operand"
    return (
        f"Wrap {column} in COALESCE({column}, '') before concatenating, or declare it NOT NULL "
        f"if NULL is never a valid value{_where(finding)}."
    )


# ---------- enumerated types ----------

def _lookup_table(
    finding: Finding, ctx: ApplicationContext
) -> Optional[list[StatementTransformation]]:
    table, column = finding.location.table, finding.location.column
    values = list(finding.details.get("values", ()))
    if table is None or column is None or not values:
        return None
    check_form = "constraint" in finding.details
    constraint = finding.details.get("constraint")
    if check_form and not constraint:
        return None
    lookup = _fresh_name(ctx, f"{column}_lookup")
    column_type = _column_type(ctx.schema(table), column)
    rows = ", ".join(f"({_sql_literal(v)})" for v in values)
    plan = [
        create_new(f"CREATE TABLE {lookup} ({column} {column_type} PRIMARY KEY)", f"create lookup table {lookup}"),
        create_new(f"INSERT INTO {lookup} ({column}) VALUES {rows}", f"populate {lookup} with {len(values)} values"),
    ]
    if constraint:
        plan.append(
            create_new(
                f"ALTER TABLE {table} DROP CONSTRAINT IF EXISTS {constraint}",
                f"drop the value-list check {constraint}",
            )
        )
    plan.append(
        create_new(
            f"ALTER TABLE {table} ADD FOREIGN KEY ({column}) REFERENCES {lookup}({column})",
            f"reference {lookup} from {table}.{column}",
        )
    )
    return plan


@repair_rule(K.ENUMERATED_TYPES, create=_lookup_table)
def _enumerated_text(finding: Finding, ctx: ApplicationContext) -> str:
    table, column = finding.location.table, finding.location.column or "<column>"
    values = ", ".join(_sql_literal(v) for v in finding.details.get("values", ()))
    constraint = finding.details.get("constraint")
    drop = f" and drop the check with ALTER TABLE {table} DROP CONSTRAINT IF EXISTS {constraint}" if constraint else ""
    return (
        f"Create lookup table {column}_lookup({column} PRIMARY KEY) holding the allowed values"
        f"{' (' + values + ')' if values else ''}, reference it with ALTER TABLE {table} ADD FOREIGN KEY "
        f"({column}) REFERENCES {column}_lookup({column}){drop}. New values then become inserts instead of schema changes."
    )


# ---------- index underuse ----------

def _create_index(finding: Finding, ctx: ApplicationContext) -> Optional[list[StatementTransformation]]:
    schema = ctx.schema(finding.location.table)
    column = finding.location.column
    if schema is None or column is None or not schema.has_column(column):
        return None
    name = _fresh_name(ctx, f"idx_{schema.name}_{column}".lower())
    return [create_new(f"CREATE INDEX {name} ON {schema.name} ({column})", f"index {schema.name}.{column}")]


@repair_rule(K.INDEX_UNDERUSE, create=_create_index)
def _index_underuse_text(finding: Finding, ctx: ApplicationContext) -> str:
    table, column = finding.location.table, finding.location.column
    queries = ", ".join(finding.details.get("queries", ()))
    return f"CREATE INDEX idx_{table}_{column} ON {table} ({column}); it is filtered by {queries or 'several queries'}."


# ---------- no primary key ----------

def _add_primary_key(finding: Finding, ctx: ApplicationContext) -> Optional[list[StatementTransformation]]:
    table = finding.location.table
    candidates = [c for c in finding.details.get("unique_columns", ()) if _ID_NAME.search(c)]
    if table is None or not candidates:
        return None
    return [create_new(f"ALTER TABLE {table} ADD PRIMARY KEY ({candidates[0]})", f"make {candidates[0]} the key of {table}")]


@repair_rule(K.NO_PRIMARY_KEY, create=_add_primary_key)
def _no_primary_key_text(finding: Finding, ctx: ApplicationContext) -> str:
    table = finding.location.table
    unique = list(finding.details.get("unique_columns", ()))
    hint = f" {unique[0]} is unique in the sampled data." if unique else ""
    return f"Declare a primary key: ALTER TABLE {table} ADD PRIMARY KEY (<column>), or add a surrogate key column.{hint}"


# ---------- textual-only kinds ----------

@repair_rule(K.NO_FOREIGN_KEY)
def _no_foreign_key_text(finding: Finding, ctx: ApplicationContext) -> str:
    loc, d = finding.location, finding.details
    parent, parent_column = d.get("parent_table", "<parent>"), d.get("parent_column", "<key>")
    return (
        f"ALTER TABLE {loc.table} ADD FOREIGN KEY ({loc.column}) REFERENCES {parent}({parent_column}) "
        f"so the join{_where(finding)} is backed by referential integrity."
    )


@repair_rule(K.GENERIC_PRIMARY_KEY)
def _generic_key_text(finding: Finding, ctx: ApplicationContext) -> str:
    table = finding.location.table or "the table"
    return f"Rename {table}.{finding.location.column} to {table}_id and update the queries and foreign keys that use it."


@repair_rule(K.DATA_IN_METADATA)
def _data_in_metadata_text(finding: Finding, ctx: ApplicationContext) -> str:
    columns = ", ".join(finding.details.get("columns", ())) or finding.location.column
    return (
        f"Move {columns} of {finding.location.table} into a child table with one row per value "
        f"and a foreign key back to {finding.location.table}."
    )


@repair_rule(K.ADJACENCY_LIST)
def _adjacency_list_text(finding: Finding, ctx: ApplicationContext) -> str:
    table = finding.location.table
    return (
        f"Keep the hierarchy of {table} in a closure table {table}_paths(ancestor, descendant, depth) "
        f"so subtree queries need one join instead of recursion."
    )


@repair_rule(K.GOD_TABLE)
def _god_table_text(finding: Finding, ctx: ApplicationContext) -> str:
    return (
        f"Split {finding.location.table} ({finding.details.get('columns', 'many')} columns) into tables that each "
        f"describe one entity, linked by foreign keys."
    )


@repair_rule(K.ROUNDING_ERRORS)
def _rounding_text(finding: Finding, ctx: ApplicationContext) -> str:
    return f"Declare {finding.location.table}.{finding.location.column} as NUMERIC(p, s) to store exact values."


@repair_rule(K.EXTERNAL_DATA_STORAGE)
def _external_storage_text(finding: Finding, ctx: ApplicationContext) -> str:
    return (
        f"{finding.location.table}.{finding.location.column} points at data outside the database; store the "
        f"content in a BLOB column, or keep the reference and verify it on every read."
    )


@repair_rule(K.INDEX_OVERUSE)
def _index_overuse_text(finding: Finding, ctx: ApplicationContext) -> str:
    index = finding.details.get("index", "<index>")
    return f"DROP INDEX {index}; no query in the workload prefers it, and it slows every write to {finding.location.table}."


@repair_rule(K.CLONE_TABLE)
def _clone_table_text(finding: Finding, ctx: ApplicationContext) -> str:
    tables = ", ".join(finding.details.get("tables", ())) or finding.location.table
    return f"Merge {tables} into one table with an extra column holding the number suffix."


@repair_rule(K.ORDERING_BY_RAND)
def _random_order_text(finding: Finding, ctx: ApplicationContext) -> str:
    table = finding.location.table or "the table"
    return (
        f"Pick a random offset in the application from SELECT COUNT(*) FROM {table}, then read one row "
        f"with LIMIT 1 OFFSET <offset> instead of sorting by a random value{_where(finding)}."
    )


@repair_rule(K.PATTERN_MATCHING)
def _pattern_matching_text(finding: Finding, ctx: ApplicationContext) -> str:
    target = ".".join(p for p in (finding.location.table, finding.location.column) if p) or "the column"
    return f"Use a full-text index on {target}, or anchor the pattern at the start so an index applies{_where(finding)}."


@repair_rule(K.DISTINCT_AND_JOIN)
def _distinct_join_text(finding: Finding, ctx: ApplicationContext) -> str:
    return f"Replace DISTINCT over the join with an EXISTS subquery on the joined table{_where(finding)}."


@repair_rule(K.TOO_MANY_JOINS)
def _too_many_joins_text(finding: Finding, ctx: ApplicationContext) -> str:
    return (
        f"Split the {finding.details.get('joins', 'many')}-join statement into smaller queries or precompute "
        f"the combination in a view{_where(finding)}."
    )


@repair_rule(K.MISSING_TIMEZONE)
def _missing_timezone_text(finding: Finding, ctx: ApplicationContext) -> str:
    return (
        f"Declare {finding.location.table}.{finding.location.column} as TIMESTAMP WITH TIME ZONE "
        f"and store values in UTC."
    )


@repair_rule(K.INCORRECT_DATA_TYPE)
def _incorrect_type_text(finding: Finding, ctx: ApplicationContext) -> str:
    inferred = finding.details.get("inferred", "a numeric type")
    return (
        f"{finding.location.table}.{finding.location.column} is declared "
        f"{finding.details.get('declared_type', 'as text')} but holds {inferred} values; change its type."
    )


@repair_rule(K.DENORMALIZED_TABLE)
def _denormalized_text(finding: Finding, ctx: ApplicationContext) -> str:
    paired = finding.details.get("paired_with", "its paired column")
    return (
        f"{finding.location.column} and {paired} of {finding.location.table} determine each other; move them "
        f"into a separate table keyed by {finding.location.column} and reference it."
    )


@repair_rule(K.INFORMATION_DUPLICATION)
def _duplication_text(finding: Finding, ctx: ApplicationContext) -> str:
    source = finding.details.get("source", "another column")
    if isinstance(source, (list, tuple)):
        source = " and ".join(source)
    return (
        f"{finding.location.table}.{finding.location.column} is derivable from {source} "
        f"({finding.details.get('transform', 'derived')}); drop it and compute it in a view or generated column."
    )


@repair_rule(K.REDUNDANT_COLUMN)
def _redundant_text(finding: Finding, ctx: ApplicationContext) -> str:
    return f"ALTER TABLE {finding.location.table} DROP COLUMN {finding.location.column}; it carries no information."


@repair_rule(K.NO_DOMAIN_CONSTRAINT)
def _domain_text(finding: Finding, ctx: ApplicationContext) -> str:
    low, high = finding.details.get("low", 0), finding.details.get("high", "<max>")
    column = finding.location.column
    return f"ALTER TABLE {finding.location.table} ADD CHECK ({column} BETWEEN {low} AND {high})."
