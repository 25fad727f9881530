"""Immutable application context: schemas, query registry, join graph and data profiles."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, fields
from enum import Enum
from types import MappingProxyType
from typing import Any, Mapping, Optional

from sql_assistant.parser.models import (
    AnnotatedStatement,
    ColumnRef,
    ConstraintDecl,
    ConstraintKind,
    canonical,
)


class ValueClass(str, Enum):
    INTEGER = "Integer"
    DECIMAL = "Decimal"
    TEXT = "Text"
    DATETIME = "DateTime"
    BOOLEAN = "Boolean"
    MIXED = "Mixed"


NUMERIC_CLASSES = frozenset({ValueClass.INTEGER, ValueClass.DECIMAL})

_TEXTUAL_TYPE = re.compile(r"CHAR|TEXT|CLOB|STRING|NAME|UUID|ENUM|JSON", re.IGNORECASE)
_INTEGER_TYPE = re.compile(r"INT|SERIAL", re.IGNORECASE)
_DECIMAL_TYPE = re.compile(r"DEC|NUM|REAL|FLOA|DOUB|MONEY", re.IGNORECASE)
_TEMPORAL_TYPE = re.compile(r"DATE|TIME", re.IGNORECASE)
_BOOLEAN_TYPE = re.compile(r"BOOL|BIT", re.IGNORECASE)
_KEY_NAME = re.compile(r"(^|_)id$", re.IGNORECASE)


def type_family(declared_type: Optional[str]) -> Optional[ValueClass]:
    """Map a declared SQL type (or a synthesized class name) to a value class."""
    if not declared_type:
        return None
    for value_class in ValueClass:
        if declared_type == value_class.value:
            return value_class
    if _TEXTUAL_TYPE.search(declared_type):
        return ValueClass.TEXT
    if _TEMPORAL_TYPE.search(declared_type):
        return ValueClass.DATETIME
    if _BOOLEAN_TYPE.search(declared_type):
        return ValueClass.BOOLEAN
    if _INTEGER_TYPE.search(declared_type):
        return ValueClass.INTEGER
    if _DECIMAL_TYPE.search(declared_type):
        return ValueClass.DECIMAL
    return None


def is_textual(declared_type: Optional[str]) -> bool:
    return type_family(declared_type) is ValueClass.TEXT


@dataclass(frozen=True)
class BuildConfig:
    """Detection thresholds and sampling knobs shared by every phase."""

    god_table_threshold: int = 10
    join_threshold: int = 5
    index_use_min: int = 2
    mva_fraction: float = 0.5
    enum_distinct_max: int = 8
    enum_min_rows: int = 50
    incorrect_type_fraction: float = 0.95
    denormalized_duplication: float = 0.5
    sample_size: int = 1000
    seed: Optional[int] = None
    workers: int = 1
    inter_query: bool = True
    data_rules: bool = True

    def __post_init__(self) -> None:
        if self.sample_size < 1:
            raise ValueError("sample_size must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        for name in ("mva_fraction", "incorrect_type_fraction", "denormalized_duplication"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def threshold_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls) if f.name not in ("inter_query", "data_rules", "seed", "workers"))

    def thresholds(self) -> dict[str, Any]:
        return {name: getattr(self, name) for name in self.threshold_names()}


@dataclass(frozen=True)
class ColumnDecl:
    name: str
    declared_type: str
    nullable: bool = True


@dataclass(frozen=True)
class IndexDecl:
    name: str
    columns: tuple[str, ...]
    source_id: str
    unique: bool = False
    implicit: bool = False

    @property
    def column_keys(self) -> tuple[str, ...]:
        return tuple(canonical(c) for c in self.columns)


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[ColumnDecl, ...] = ()
    constraints: tuple[ConstraintDecl, ...] = ()
    indexes: tuple[IndexDecl, ...] = ()
    source: str = "ddl"
    source_id: Optional[str] = None

    def __post_init__(self) -> None:
        keys = [canonical(c.name) for c in self.columns]
        if len(keys) != len(set(keys)):
            raise ValueError(f"duplicate column names in table {self.name}")

    @property
    def from_ddl(self) -> bool:
        return self.source == "ddl"

    def column(self, name: str) -> Optional[ColumnDecl]:
        key = canonical(name)
        return next((c for c in self.columns if canonical(c.name) == key), None)

    def has_column(self, name: str) -> bool:
        return self.column(name) is not None

    def constraints_of(self, kind: ConstraintKind) -> tuple[ConstraintDecl, ...]:
        return tuple(c for c in self.constraints if c.kind is kind)

    @property
    def primary_key(self) -> tuple[str, ...]:
        for decl in self.constraints_of(ConstraintKind.PRIMARY_KEY):
            return decl.columns
        return ()

    def is_key_column(self, name: str) -> bool:
        return canonical(name) in {canonical(c) for c in self.primary_key}

    def has_check_on(self, column: str) -> bool:
        key = canonical(column)
        return any(key in {canonical(c) for c in decl.columns} for decl in self.constraints_of(ConstraintKind.CHECK))

    def foreign_key_on(self, column: str) -> Optional[ConstraintDecl]:
        key = canonical(column)
        for decl in self.constraints_of(ConstraintKind.FOREIGN_KEY):
            if key in {canonical(c) for c in decl.columns}:
                return decl
        return None

    def is_unique_column(self, column: str) -> bool:
        key = (canonical(column),)
        return any(
            tuple(canonical(c) for c in decl.columns) == key
            for decl in self.constraints
            if decl.kind in (ConstraintKind.PRIMARY_KEY, ConstraintKind.UNIQUE)
        )


@dataclass(frozen=True)
class ColumnProfile:
    """Statistics of one column computed over a sample of its rows."""

    table: str
    column: str
    row_count_sampled: int
    non_null_count: int
    distinct_count: int
    null_fraction: float
    inferred_value_class: ValueClass
    delimiter_list_fraction: float
    constant_fraction: float
    timezone_annotated: bool
    has_time_component: bool = False
    class_fractions: Mapping[str, float] = field(default_factory=dict)
    numeric_min: Optional[float] = None
    numeric_max: Optional[float] = None
    declared_type: Optional[str] = None
    sample: tuple[Optional[str], ...] = ()

    def __post_init__(self) -> None:
        if self.distinct_count > self.row_count_sampled:
            raise ValueError("distinct_count exceeds row_count_sampled")
        for name in ("null_fraction", "delimiter_list_fraction", "constant_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        object.__setattr__(self, "class_fractions", MappingProxyType(dict(self.class_fractions)))

    @property
    def duplication_ratio(self) -> float:
        if not self.row_count_sampled:
            return 0.0
        return 1.0 - self.distinct_count / self.row_count_sampled

    @property
    def numeric_fraction(self) -> float:
        return self.class_fractions.get(ValueClass.INTEGER.value, 0.0) + self.class_fractions.get(
            ValueClass.DECIMAL.value, 0.0
        )

    @property
    def looks_unique(self) -> bool:
        return self.row_count_sampled > 0 and self.distinct_count == self.non_null_count == self.row_count_sampled


@dataclass(frozen=True, order=True)
class JoinEdge:
    """Unordered pair of joined columns, stored with the smaller side first."""

    left: tuple[str, str]
    right: tuple[str, str]
    left_ref: ColumnRef = field(compare=False)
    right_ref: ColumnRef = field(compare=False)

    @classmethod
    def of(cls, a: ColumnRef, b: ColumnRef) -> "JoinEdge":
        if b.key < a.key:
            a, b = b, a
        return cls(a.key, b.key, a, b)

    def __str__(self) -> str:
        return f"{self.left_ref} = {self.right_ref}"


@dataclass(frozen=True)
class ApplicationContext:
    schemas: Mapping[str, TableSchema]
    query_registry: tuple[AnnotatedStatement, ...]
    join_graph: Mapping[JoinEdge, str]
    profiles: Mapping[tuple[str, str], ColumnProfile]
    build_config: BuildConfig
    warnings: tuple[str, ...] = ()
    fingerprint: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "schemas", MappingProxyType(dict(self.schemas)))
        object.__setattr__(self, "join_graph", MappingProxyType(dict(self.join_graph)))
        object.__setattr__(self, "profiles", MappingProxyType(dict(self.profiles)))
        if not self.fingerprint:
            object.__setattr__(self, "fingerprint", self._compute_fingerprint())

    def _compute_fingerprint(self) -> str:
        summary = {
            "schemas": {
                key: {
                    "columns": [[c.name, c.declared_type, c.nullable] for c in schema.columns],
                    "constraints": [[c.kind.value, list(c.columns), c.target_table] for c in schema.constraints],
                    "indexes": [[i.name, list(i.columns)] for i in schema.indexes],
                }
                for key, schema in self.schemas.items()
            },
            "queries": [[s.source_id, s.text] for s in self.query_registry],
            "joins": sorted(str(edge) for edge in self.join_graph),
            "profiles": [
                [list(key), p.row_count_sampled, p.distinct_count, p.null_fraction] for key, p in self.profiles.items()
            ],
            "config": self.build_config.thresholds(),
        }
        digest = hashlib.sha256(json.dumps(summary, sort_keys=True, default=str).encode("utf-8")).hexdigest()
        return f"ctx-{digest[:16]}"

    @classmethod
    def empty(cls, config: Optional[BuildConfig] = None) -> "ApplicationContext":
        return cls({}, (), {}, {}, config or BuildConfig())

    @property
    def has_data(self) -> bool:
        return bool(self.profiles)

    def schema(self, table: Optional[str]) -> Optional[TableSchema]:
        return self.schemas.get(canonical(table)) if table else None

    def profile(self, table: Optional[str], column: Optional[str]) -> Optional[ColumnProfile]:
        if not table or not column:
            return None
        return self.profiles.get((canonical(table), canonical(column)))

    def resolve_column(self, table: Optional[str], column: str) -> Optional[ColumnDecl]:
        schema = self.schema(table)
        return schema.column(column) if schema else None

    def statement(self, source_id: str) -> Optional[AnnotatedStatement]:
        return next((s for s in self.query_registry if s.source_id == source_id), None)

    def tables_with_column(self, column: str) -> list[TableSchema]:
        return [schema for schema in self.schemas.values() if schema.has_column(column)]

    def is_key_like(self, table: str, column: str) -> bool:
        """Declared primary/unique key, or an ``id``-named column whose sample is all distinct."""
        schema = self.schema(table)
        if schema and (schema.is_key_column(column) or schema.is_unique_column(column)):
            return True
        if not _KEY_NAME.search(column):
            return False
        profile = self.profile(table, column)
        return profile is None or profile.looks_unique
