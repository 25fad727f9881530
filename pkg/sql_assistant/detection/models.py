from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from types import MappingProxyType
from typing import Any, Mapping, Optional

from sql_assistant.detection.catalog import AntiPatternKind, Category


class Phase(str, Enum):
    INTRA_QUERY = "intra_query"
    INTER_QUERY = "inter_query"
    DATA = "data"

    @property
    def order(self) -> int:
        return list(Phase).index(self)


@dataclass(frozen=True)
class Location:
    statement: Optional[str] = None
    table: Optional[str] = None
    column: Optional[str] = None

    def __post_init__(self) -> None:
        if self.statement is None and self.table is None:
            raise ValueError("a location needs a statement or a table")

    def __str__(self) -> str:
        target = ".".join(p for p in (self.table, self.column) if p)
        if self.statement and target:
            return f"{self.statement} ({target})"
        return self.statement or target

    def to_dict(self) -> dict[str, Optional[str]]:
        return {"statement": self.statement, "table": self.table, "column": self.column}


@dataclass(frozen=True)
class Finding:
    kind: AntiPatternKind
    location: Location
    evidence: str
    phase: Phase
    suppressed_by_context: bool = False
    context_ref: Optional[str] = None
    details: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.evidence or not self.evidence.strip():
            raise ValueError("a finding needs evidence")
        if self.phase is not Phase.INTRA_QUERY and not self.context_ref:
            raise ValueError(f"{self.phase.value} findings carry a context reference")
        object.__setattr__(self, "details", MappingProxyType(dict(self.details)))

    @property
    def category(self) -> Category:
        return self.kind.category

    @property
    def active(self) -> bool:
        return not self.suppressed_by_context

    def suppressed(self, reason: str, context_ref: Optional[str] = None) -> "Finding":
        return replace(
            self,
            suppressed_by_context=True,
            context_ref=context_ref or self.context_ref,
            details={**self.details, "suppressed_because": reason},
        )

    def identity(self) -> tuple:
        """Kind plus location, used to match findings across runs."""
        loc = self.location
        return (
            self.kind,
            loc.statement,
            (loc.table or "").lower(),
            (loc.column or "").lower(),
            str(self.details.get("index", "")).lower(),
        )
