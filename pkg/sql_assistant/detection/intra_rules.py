"""Context-free rules: each looks at one statement in isolation.

Contextual confirmation functions sit next to the rule they review; they only
run when inter-query analysis is enabled.
"""

from __future__ import annotations

import re
from typing import Iterator, Optional

from sql_assistant.context.models import ApplicationContext, is_textual
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.detection.models import Finding, Location, Phase
from sql_assistant.detection.registry import ALL_DML, DML, SELECT, TABLE_DDL, register_rule
from sql_assistant.parser.models import (
    AnnotatedStatement,
    ClauseRole,
    ColumnRef,
    ConstraintKind,
    OperandKind,
    Predicate,
    StatementKind,
    TokenType,
    canonical,
)

K = AntiPatternKind

WORD_BOUNDARY_MARKERS = ("[[:<:]]", "[[:>:]]", "\\b", "\\m", "\\M", "\\y", "(^|,)", "(,|$)")
_LIST_ID_COLUMN = re.compile(r"ids?$", re.IGNORECASE)
_DELIMITED_LIKE = re.compile(r"^'%[,;|]|[,;|]%'$")
_RANDOM_FUNCTIONS = frozenset({"RAND", "RANDOM", "NEWID", "DBMS_RANDOM"})
_FLOAT_TYPE = re.compile(r"\b(FLOAT\d*|REAL|DOUBLE)\b", re.IGNORECASE)
_EXTERNAL_NAME = re.compile(r"(path|file|url|uri)", re.IGNORECASE)
_REGEX_OPERATORS = frozenset({"REGEXP", "RLIKE", "SIMILAR TO", "~", "~*", "!~", "!~*"})


def finding_at(
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
        phase=Phase.INTRA_QUERY,
        details=details,
    )


def quote(stmt: AnnotatedStatement, predicate: Predicate) -> str:
    text = "".join(t.text for t in stmt.tokens[predicate.span.start:predicate.span.end])
    return " ".join(text.split())


def column_table(stmt: AnnotatedStatement, ref: Optional[ColumnRef]) -> Optional[str]:
    if ref is None:
        return None
    if ref.table:
        return ref.table
    return stmt.tables_referenced[0] if len(stmt.tables_referenced) == 1 else None


def wildcard_items(stmt: AnnotatedStatement) -> list[tuple[int, Optional[str]]]:
    """``(item index, qualifier)`` for each ``*`` or ``q.*`` projection item."""
    found = []
    for index, span in enumerate(stmt.items(ClauseRole.PROJECTION)):
        tokens = stmt.significant(span)
        texts = [t.text for t in tokens]
        if texts == ["*"]:
            found.append((index, None))
        elif len(texts) == 3 and texts[1:] == [".", "*"]:
            found.append((index, stmt.aliases.get(canonical(tokens[0].name), tokens[0].name)))
    return found


# ---------- multi-valued attribute (string tricks over a list column) ----------

def _looks_like_list_lookup(predicate: Predicate) -> bool:
    if not predicate.is_pattern_match or predicate.negated:
        return False
    column = predicate.column_operand()
    if column is None or column is predicate.right:
        return False
    pattern = predicate.right.text
    if any(marker in pattern for marker in WORD_BOUNDARY_MARKERS):
        return True
    if _DELIMITED_LIKE.search(pattern.replace(" ", "")):
        return True
    return bool(column.column and _LIST_ID_COLUMN.search(column.column.column))


def _confirm_list_column(finding: Finding, stmt: AnnotatedStatement, ctx: ApplicationContext) -> Optional[str]:
    table, column = finding.location.table, finding.location.column
    profile = ctx.profile(table, column)
    if profile is not None and profile.non_null_count:
        if profile.delimiter_list_fraction < ctx.build_config.mva_fraction:
            return (
                f"only {profile.delimiter_list_fraction:.0%} of sampled {table}.{column} values are "
                f"delimiter-separated lists"
            )
        return None
    declared = ctx.resolve_column(table, column) if column else None
    if declared is not None and declared.declared_type and not is_textual(declared.declared_type):
        return f"{table}.{column} is declared {declared.declared_type}, which cannot hold a list"
    return None


@register_rule(K.MULTI_VALUED_ATTRIBUTE, DML, confirm=_confirm_list_column)
def _list_pattern_lookup(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    seen: set[tuple[str, str]] = set()
    for predicate in stmt.predicates:
        if not _looks_like_list_lookup(predicate):
            continue
        ref = predicate.left.column
        table = column_table(stmt, ref)
        key = (canonical(table), canonical(ref.column))
        if key in seen:
            continue
        seen.add(key)
        yield finding_at(
            stmt, K.MULTI_VALUED_ATTRIBUTE,
            f"pattern match `{quote(stmt, predicate)}` searches inside {ref.column} as if it held a list of values",
            table=table, column=ref.column,
        )
    if not seen and any(t.type is not TokenType.COMMENT and t.upper == "FIND_IN_SET" for t in stmt.tokens):
        yield finding_at(stmt, K.MULTI_VALUED_ATTRIBUTE, "FIND_IN_SET() searches a comma-separated list column")


# ---------- query rules ----------

@register_rule(K.COLUMN_WILDCARD_USAGE, SELECT)
def _wildcard_projection(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    if not stmt.has_wildcard_projection:
        return
    items = wildcard_items(stmt)
    table = items[0][1] if items else None
    if table is None and len(stmt.tables_referenced) == 1:
        table = stmt.tables_referenced[0]
    yield finding_at(
        stmt, K.COLUMN_WILDCARD_USAGE,
        "projection selects every column with *; list the columns the application reads",
        table=table,
    )


@register_rule(K.ORDERING_BY_RAND, DML)
def _random_order(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    tokens = [t for t in stmt.clause_tokens(ClauseRole.ORDER_BY) if t.is_significant]
    for token, following in zip(tokens, tokens[1:]):
        if token.upper in _RANDOM_FUNCTIONS and following.text == "(":
            yield finding_at(
                stmt, K.ORDERING_BY_RAND,
                f"ORDER BY {token.text}() sorts the whole result to pick random rows",
                table=stmt.tables_referenced[0] if stmt.tables_referenced else None,
            )
            return


def _confirm_nullable(finding: Finding, stmt: AnnotatedStatement, ctx: ApplicationContext) -> Optional[str]:
    table, column = finding.location.table, finding.location.column
    schema = ctx.schema(table)
    if schema is None or column is None:
        return None
    declared = schema.column(column)
    if declared is not None and (not declared.nullable or schema.is_key_column(column)):
        return f"{table}.{column} is declared NOT NULL"
    return None


@register_rule(K.CONCATENATE_NULLS, ALL_DML, confirm=_confirm_nullable)
def _nullable_concatenation(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    seen: set[tuple[str, str]] = set()
    for pair in stmt.concatenations:
        for operand in pair:
            if operand.kind is not OperandKind.COLUMN or operand.column is None:
                continue
            table = column_table(stmt, operand.column)
            key = (canonical(table), canonical(operand.column.column))
            if key in seen:
                continue
            seen.add(key)
            yield finding_at(
                stmt, K.CONCATENATE_NULLS,
                f"`{operand.text}` is concatenated with || and may be NULL, which makes the whole result NULL",
                table=table, column=operand.column.column,
            )


def _unanchored(predicate: Predicate) -> bool:
    if predicate.op in _REGEX_OPERATORS:
        return True
    if predicate.op not in ("LIKE", "ILIKE"):
        return False
    pattern = predicate.right
    if pattern.kind is not OperandKind.LITERAL:
        return True
    text = pattern.text.strip()
    body = text[1:] if text[:1] in ("'", '"') else text
    return body[:1] in ("%", "_") or "[[:" in body


@register_rule(K.PATTERN_MATCHING, DML)
def _unanchored_pattern(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for predicate in stmt.predicates:
        if predicate.is_pattern_match and _unanchored(predicate):
            column = predicate.column_operand()
            ref = column.column if column else None
            yield finding_at(
                stmt, K.PATTERN_MATCHING,
                f"`{quote(stmt, predicate)}` cannot use an index and scans every row",
                table=column_table(stmt, ref), column=ref.column if ref else None,
            )
            return


@register_rule(K.IMPLICIT_COLUMNS, frozenset({StatementKind.INSERT}))
def _insert_without_columns(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    if stmt.target_table and not stmt.spans(ClauseRole.COLUMN_LIST):
        yield finding_at(
            stmt, K.IMPLICIT_COLUMNS,
            f"INSERT INTO {stmt.target_table} does not name its columns and depends on their declared order",
            table=stmt.target_table,
        )


@register_rule(K.DISTINCT_AND_JOIN, SELECT)
def _distinct_over_join(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    if stmt.distinct_present and stmt.join_count >= 1:
        yield finding_at(
            stmt, K.DISTINCT_AND_JOIN,
            f"DISTINCT removes duplicates produced by {stmt.join_count} join(s); an EXISTS subquery avoids them",
        )


@register_rule(K.TOO_MANY_JOINS, DML)
def _join_count(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    threshold = ctx.build_config.join_threshold
    if stmt.join_count >= threshold:
        yield finding_at(
            stmt, K.TOO_MANY_JOINS,
            f"statement joins {stmt.join_count + 1} tables ({stmt.join_count} joins, threshold {threshold})",
            joins=stmt.join_count,
        )


# ---------- declaration rules ----------

@register_rule(K.ROUNDING_ERRORS, TABLE_DDL)
def _floating_point_columns(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for column in stmt.column_defs:
        if _FLOAT_TYPE.search(column.declared_type):
            yield finding_at(
                stmt, K.ROUNDING_ERRORS,
                f"{column.name} is declared {column.declared_type}, an inexact binary floating-point type",
                table=column.table or stmt.target_table, column=column.name,
            )


@register_rule(K.GENERIC_PRIMARY_KEY, TABLE_DDL)
def _primary_key_named_id(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for decl in stmt.constraints:
        if decl.kind is ConstraintKind.PRIMARY_KEY and len(decl.columns) == 1 and canonical(decl.columns[0]) == "id":
            table = decl.table or stmt.target_table
            yield finding_at(
                stmt, K.GENERIC_PRIMARY_KEY,
                f"primary key of {table} is the generic column name {decl.columns[0]}",
                table=table, column=decl.columns[0],
            )


@register_rule(K.GOD_TABLE, frozenset({StatementKind.CREATE_TABLE}))
def _wide_table(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    threshold = ctx.build_config.god_table_threshold
    if len(stmt.column_defs) >= threshold:
        yield finding_at(
            stmt, K.GOD_TABLE,
            f"{stmt.target_table} declares {len(stmt.column_defs)} columns (threshold {threshold})",
            table=stmt.target_table, columns=len(stmt.column_defs),
        )


@register_rule(K.EXTERNAL_DATA_STORAGE, TABLE_DDL)
def _file_reference_columns(stmt: AnnotatedStatement, ctx: ApplicationContext) -> Iterator[Finding]:
    for column in stmt.column_defs:
        if _EXTERNAL_NAME.search(column.name) and is_textual(column.declared_type):
            yield finding_at(
                stmt, K.EXTERNAL_DATA_STORAGE,
                f"{column.name} ({column.declared_type}) looks like a reference to data stored outside "
                f"the database (name heuristic)",
                table=column.table or stmt.target_table, column=column.name,
            )
