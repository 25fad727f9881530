"""The anti-pattern catalog: 26 kinds in four categories with their impact flags."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Category(str, Enum):
    LOGICAL_DESIGN = "logical_design"
    PHYSICAL_DESIGN = "physical_design"
    QUERY = "query"
    DATA = "data"


class DaDirection(str, Enum):
    UP = "up"
    DOWN = "down"
    NONE = "none"


@dataclass(frozen=True)
class ImpactFlags:
    performance: bool = False
    maintainability: bool = False
    data_amplification: bool = False
    data_integrity: bool = False
    accuracy: bool = False
    da_direction: DaDirection = DaDirection.NONE

    def __post_init__(self) -> None:
        if self.data_amplification == (self.da_direction is DaDirection.NONE):
            raise ValueError("da_direction must be set exactly when data_amplification is flagged")


@dataclass(frozen=True)
class KindInfo:
    category: Category
    title: str
    flags: ImpactFlags


def _flags(flags: str, direction: DaDirection = DaDirection.NONE) -> ImpactFlags:
    parts = set(flags.split())
    if "DA" in parts and direction is DaDirection.NONE:
        direction = DaDirection.DOWN
    return ImpactFlags(
        performance="P" in parts,
        maintainability="M" in parts,
        data_amplification="DA" in parts,
        data_integrity="DI" in parts,
        accuracy="A" in parts,
        da_direction=direction,
    )


class AntiPatternKind(str, Enum):
    # logical design
    MULTI_VALUED_ATTRIBUTE = "multi_valued_attribute"
    NO_PRIMARY_KEY = "no_primary_key"
    NO_FOREIGN_KEY = "no_foreign_key"
    GENERIC_PRIMARY_KEY = "generic_primary_key"
    DATA_IN_METADATA = "data_in_metadata"
    ADJACENCY_LIST = "adjacency_list"
    GOD_TABLE = "god_table"
    # physical design
    ROUNDING_ERRORS = "rounding_errors"
    ENUMERATED_TYPES = "enumerated_types"
    EXTERNAL_DATA_STORAGE = "external_data_storage"
    INDEX_OVERUSE = "index_overuse"
    INDEX_UNDERUSE = "index_underuse"
    CLONE_TABLE = "clone_table"
    # query
    COLUMN_WILDCARD_USAGE = "column_wildcard_usage"
    CONCATENATE_NULLS = "concatenate_nulls"
    ORDERING_BY_RAND = "ordering_by_rand"
    PATTERN_MATCHING = "pattern_matching"
    IMPLICIT_COLUMNS = "implicit_columns"
    DISTINCT_AND_JOIN = "distinct_and_join"
    TOO_MANY_JOINS = "too_many_joins"
    # data
    MISSING_TIMEZONE = "missing_timezone"
    INCORRECT_DATA_TYPE = "incorrect_data_type"
    DENORMALIZED_TABLE = "denormalized_table"
    INFORMATION_DUPLICATION = "information_duplication"
    REDUNDANT_COLUMN = "redundant_column"
    NO_DOMAIN_CONSTRAINT = "no_domain_constraint"

    @property
    def info(self) -> KindInfo:
        return CATALOG[self]

    @property
    def category(self) -> Category:
        return CATALOG[self].category

    @property
    def title(self) -> str:
        return CATALOG[self].title

    @property
    def order(self) -> int:
        return _ORDER[self]


K = AntiPatternKind
L, PH, Q, D = Category.LOGICAL_DESIGN, Category.PHYSICAL_DESIGN, Category.QUERY, Category.DATA

CATALOG: dict[AntiPatternKind, KindInfo] = {
    K.MULTI_VALUED_ATTRIBUTE: KindInfo(L, "Multi-Valued Attribute", _flags("P M DA DI", DaDirection.UP)),
    K.NO_PRIMARY_KEY: KindInfo(L, "No Primary Key", _flags("P DI")),
    K.NO_FOREIGN_KEY: KindInfo(L, "No Foreign Key", _flags("DI A")),
    K.GENERIC_PRIMARY_KEY: KindInfo(L, "Generic Primary Key", _flags("M")),
    K.DATA_IN_METADATA: KindInfo(L, "Data In Metadata", _flags("P M")),
    K.ADJACENCY_LIST: KindInfo(L, "Adjacency List", _flags("P")),
    K.GOD_TABLE: KindInfo(L, "God Table", _flags("P M")),
    K.ROUNDING_ERRORS: KindInfo(PH, "Rounding Errors", _flags("A")),
    K.ENUMERATED_TYPES: KindInfo(PH, "Enumerated Types", _flags("P M DA")),
    K.EXTERNAL_DATA_STORAGE: KindInfo(PH, "External Data Storage", _flags("M DI")),
    K.INDEX_OVERUSE: KindInfo(PH, "Index Overuse", _flags("P M DA")),
    K.INDEX_UNDERUSE: KindInfo(PH, "Index Underuse", _flags("P")),
    K.CLONE_TABLE: KindInfo(PH, "Clone Table", _flags("P M")),
    K.COLUMN_WILDCARD_USAGE: KindInfo(Q, "Column Wildcard Usage", _flags("P M")),
    K.CONCATENATE_NULLS: KindInfo(Q, "Concatenate Nulls", _flags("A")),
    K.ORDERING_BY_RAND: KindInfo(Q, "Ordering By RAND", _flags("P")),
    K.PATTERN_MATCHING: KindInfo(Q, "Pattern Matching", _flags("P")),
    K.IMPLICIT_COLUMNS: KindInfo(Q, "Implicit Columns", _flags("M")),
    K.DISTINCT_AND_JOIN: KindInfo(Q, "Distinct And Join", _flags("P")),
    K.TOO_MANY_JOINS: KindInfo(Q, "Too Many Joins", _flags("P")),
    K.MISSING_TIMEZONE: KindInfo(D, "Missing Timezone", _flags("A")),
    K.INCORRECT_DATA_TYPE: KindInfo(D, "Incorrect Data Type", _flags("P DA")),
    K.DENORMALIZED_TABLE: KindInfo(D, "Denormalized Table", _flags("M DA DI")),
    K.INFORMATION_DUPLICATION: KindInfo(D, "Information Duplication", _flags("M DA")),
    K.REDUNDANT_COLUMN: KindInfo(D, "Redundant Column", _flags("M DA")),
    K.NO_DOMAIN_CONSTRAINT: KindInfo(D, "No Domain Constraint", _flags("DI A")),
}

_ORDER = {kind: index for index, kind in enumerate(AntiPatternKind)}


def kinds_in(category: Category) -> list[AntiPatternKind]:
    return [kind for kind in AntiPatternKind if kind.category is category]


def parse_kind(name: str) -> AntiPatternKind:
    """Accept ``multi_valued_attribute``, ``MultiValuedAttribute`` or ``Multi-Valued Attribute``."""
    key = "".join(ch for ch in name.lower() if ch.isalnum())
    for kind in AntiPatternKind:
        if key in (kind.value.replace("_", ""), "".join(ch for ch in kind.title.lower() if ch.isalnum())):
            return kind
    raise ValueError(f"unknown anti-pattern kind: {name}")
