"""Data types produced by the tolerant SQL front end.

Every type here is immutable. Names keep their original casing (quotes stripped);
lookups go through :func:`canonical`, which lower-cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Optional


def canonical(name: Optional[str]) -> str:
    """Case-insensitive lookup key for an identifier."""
    return (name or "").lower()


def unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"`":
        return text[1:-1].replace(text[0] * 2, text[0])
    if len(text) >= 2 and text[0] == "[" and text[-1] == "]":
        return text[1:-1]
    return text


class StatementKind(str, Enum):
    SELECT = "select"
    INSERT = "insert"
    UPDATE = "update"
    DELETE = "delete"
    CREATE_TABLE = "create_table"
    ALTER_TABLE = "alter_table"
    CREATE_INDEX = "create_index"
    DROP = "drop"
    OTHER = "other"


class TokenType(str, Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    LITERAL = "literal"
    OPERATOR = "operator"
    PUNCTUATION = "punctuation"
    COMMENT = "comment"
    WHITESPACE = "whitespace"
    UNKNOWN = "unknown"


class ClauseRole(str, Enum):
    PROJECTION = "projection"
    FROM = "from"
    JOINS = "joins"
    WHERE = "where"
    GROUP_BY = "group-by"
    HAVING = "having"
    ORDER_BY = "order-by"
    LIMIT = "limit"
    VALUES = "values"
    COLUMN_LIST = "column-list"
    CONSTRAINT_LIST = "constraint-list"
    INDEX_COLUMNS = "index-columns"
    TARGET = "target"
    SET = "set"
    ACTIONS = "actions"


class ConstraintKind(str, Enum):
    PRIMARY_KEY = "primary_key"
    FOREIGN_KEY = "foreign_key"
    CHECK = "check"
    UNIQUE = "unique"
    NOT_NULL = "not_null"


class OperandKind(str, Enum):
    COLUMN = "column"
    LITERAL = "literal"
    EXPRESSION = "expression"


@dataclass(frozen=True, slots=True)
class Token:
    type: TokenType
    text: str

    @property
    def upper(self) -> str:
        return self.text.upper()

    @property
    def is_significant(self) -> bool:
        return self.type not in (TokenType.WHITESPACE, TokenType.COMMENT)

    @property
    def is_word(self) -> bool:
        return self.type in (TokenType.KEYWORD, TokenType.IDENTIFIER)

    @property
    def name(self) -> str:
        """Identifier text without quoting."""
        return unquote(self.text)


@dataclass(frozen=True, slots=True)
class Span:
    """Half-open token range ``[start, end)``."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def __contains__(self, index: int) -> bool:
        return self.start <= index < self.end


@dataclass(frozen=True, slots=True)
class RawStatement:
    text: str
    source_id: str
    ordinal: int = 0
    line: int = 1

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("a statement needs non-empty text")


@dataclass(frozen=True, slots=True)
class ColumnRef:
    table: Optional[str]
    column: str

    @property
    def key(self) -> tuple[str, str]:
        return canonical(self.table), canonical(self.column)

    def __str__(self) -> str:
        return f"{self.table}.{self.column}" if self.table else self.column


@dataclass(frozen=True, slots=True)
class ConstraintDecl:
    kind: ConstraintKind
    columns: tuple[str, ...] = ()
    table: Optional[str] = None
    name: Optional[str] = None
    target_table: Optional[str] = None
    target_columns: tuple[str, ...] = ()
    expression_text: Optional[str] = None
    span: Optional[Span] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind is ConstraintKind.FOREIGN_KEY and not self.target_table:
            raise ValueError("a foreign key needs a target table")
        if self.kind is ConstraintKind.CHECK and self.expression_text is None:
            raise ValueError("a check constraint needs its expression text")

    @property
    def target(self) -> Optional[tuple[str, Optional[str]]]:
        if self.target_table is None:
            return None
        return self.target_table, (self.target_columns[0] if self.target_columns else None)


@dataclass(frozen=True, slots=True)
class ColumnDef:
    table: Optional[str]
    name: str
    declared_type: str
    nullable: bool = True
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class IndexDef:
    name: Optional[str]
    table: Optional[str]
    columns: tuple[str, ...]
    unique: bool = False


@dataclass(frozen=True, slots=True)
class TableRef:
    name: str
    alias: Optional[str]
    span: Span = field(compare=False)

    @property
    def qualifier(self) -> str:
        return self.alias or self.name


@dataclass(frozen=True, slots=True)
class Operand:
    kind: OperandKind
    text: str
    span: Span = field(compare=False)
    column: Optional[ColumnRef] = None
    columns: tuple[ColumnRef, ...] = ()


@dataclass(frozen=True, slots=True)
class Predicate:
    """``left op right`` found in a WHERE, ON or HAVING condition."""

    op: str
    left: Operand
    right: Operand
    clause: ClauseRole
    span: Span = field(compare=False)
    negated: bool = False

    @property
    def is_pattern_match(self) -> bool:
        return self.op in PATTERN_OPERATORS

    @property
    def is_selective(self) -> bool:
        """Equality or range test of one named column against a value."""
        if self.op not in SELECTIVE_OPERATORS or self.negated:
            return False
        kinds = {self.left.kind, self.right.kind}
        return OperandKind.COLUMN in kinds and (
            self.left.kind is not OperandKind.COLUMN or self.right.kind is not OperandKind.COLUMN
        ) and not (self.left.columns and self.right.columns)

    def column_operand(self) -> Optional[Operand]:
        if self.left.kind is OperandKind.COLUMN:
            return self.left
        if self.right.kind is OperandKind.COLUMN:
            return self.right
        return None


PATTERN_OPERATORS = frozenset({"LIKE", "ILIKE", "RLIKE", "REGEXP", "SIMILAR TO", "~", "~*", "!~", "!~*"})
SELECTIVE_OPERATORS = frozenset({"=", "==", "<", ">", "<=", ">=", "BETWEEN", "IN"})


@dataclass(frozen=True)
class AnnotatedStatement:
    source_id: str
    ordinal: int
    kind: StatementKind
    tokens: tuple[Token, ...]
    clauses: Mapping[ClauseRole, tuple[Span, ...]]
    tables_referenced: tuple[str, ...] = ()
    columns_referenced: tuple[ColumnRef, ...] = ()
    constraints: tuple[ConstraintDecl, ...] = ()
    column_defs: tuple[ColumnDef, ...] = ()
    index_defs: tuple[IndexDef, ...] = ()
    table_refs: tuple[TableRef, ...] = ()
    predicates: tuple[Predicate, ...] = ()
    concatenations: tuple[tuple[Operand, Operand], ...] = ()
    target_table: Optional[str] = None
    dropped_columns: tuple[str, ...] = ()
    dropped_constraints: tuple[str, ...] = ()
    dropped_tables: tuple[str, ...] = ()
    dropped_indexes: tuple[str, ...] = ()
    has_wildcard_projection: bool = False
    join_count: int = 0
    distinct_present: bool = False
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", MappingProxyType(dict(self.clauses)))

    @property
    def text(self) -> str:
        return "".join(token.text for token in self.tokens)

    @property
    def aliases(self) -> dict[str, str]:
        """Canonical alias (or table name) -> table name."""
        mapping: dict[str, str] = {}
        for ref in self.table_refs:
            mapping.setdefault(canonical(ref.name), ref.name)
            if ref.alias:
                mapping.setdefault(canonical(ref.alias), ref.name)
        return mapping

    def spans(self, role: ClauseRole) -> tuple[Span, ...]:
        return self.clauses.get(role, ())

    def clause_tokens(self, role: ClauseRole) -> list[Token]:
        return [self.tokens[i] for span in self.spans(role) for i in range(span.start, span.end)]

    def clause_text(self, role: ClauseRole) -> str:
        return " ".join(
            "".join(self.tokens[i].text for i in range(span.start, span.end)).strip()
            for span in self.spans(role)
        )

    def _trim(self, start: int, end: int) -> Optional[Span]:
        while start < end and not self.tokens[start].is_significant:
            start += 1
        while end > start and not self.tokens[end - 1].is_significant:
            end -= 1
        return Span(start, end) if start < end else None

    def items(self, role: ClauseRole) -> list[Span]:
        """Top-level comma-separated items of a clause, trimmed to significant tokens."""
        result: list[Optional[Span]] = []
        for span in self.spans(role):
            depth = 0
            start = span.start
            for i in range(span.start, span.end):
                token = self.tokens[i]
                if token.type is not TokenType.PUNCTUATION:
                    continue
                if token.text == "(":
                    depth += 1
                elif token.text == ")":
                    depth -= 1
                elif token.text == "," and depth == 0:
                    result.append(self._trim(start, i))
                    start = i + 1
            result.append(self._trim(start, span.end))
        return [item for item in result if item is not None]

    def significant(self, span: Span) -> list[Token]:
        return [self.tokens[i] for i in range(span.start, span.end) if self.tokens[i].is_significant]

    def references_table(self, table: str) -> bool:
        return canonical(table) in {canonical(t) for t in self.tables_referenced}

    def annotation_key(self) -> tuple:
        """Whitespace-insensitive summary used to compare a statement with its re-parse."""
        return (
            self.kind,
            tuple(sorted((role.value, len(spans)) for role, spans in self.clauses.items())),
            tuple(canonical(t) for t in self.tables_referenced),
            tuple(ref.key for ref in self.columns_referenced),
            tuple(
                (c.kind, tuple(map(canonical, c.columns)), canonical(c.target_table))
                for c in self.constraints
            ),
            self.has_wildcard_projection,
            self.join_count,
            self.distinct_present,
        )
