from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from sql_assistant.context.models import ApplicationContext
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.detection.models import Finding
from sql_assistant.parser.models import AnnotatedStatement


class TransformOp(str, Enum):
    REWRITE_EXISTING = "rewrite_existing"
    CREATE_NEW = "create_new"
    ANNOTATE = "annotate"


@dataclass(frozen=True)
class StatementTransformation:
    """One change to the workload: a rewritten statement, a new statement, or a note on one."""

    op: TransformOp
    target: str
    tree_edit: str
    rendered: str = ""

    def __post_init__(self) -> None:
        if not self.tree_edit:
            raise ValueError("a transformation describes its edit")
        if self.op is not TransformOp.ANNOTATE and not self.rendered.strip():
            raise ValueError(f"{self.op.value} transformations carry rendered SQL")

    def to_dict(self) -> dict:
        return {"op": self.op.value, "target": self.target, "edit": self.tree_edit, "sql": self.rendered or None}


# per-statement rewrite: None when the statement needs no change
TransformFn = Callable[[AnnotatedStatement, Finding, ApplicationContext], Optional[list[StatementTransformation]]]
# statements created once per finding: None when a required schema fact is missing
CreateFn = Callable[[Finding, ApplicationContext], Optional[list[StatementTransformation]]]
TextualFn = Callable[[Finding, ApplicationContext], str]


@dataclass(frozen=True)
class RepairRule:
    kind: AntiPatternKind
    textual: TextualFn
    transform: Optional[TransformFn] = None
    create: Optional[CreateFn] = None

    @property
    def automated(self) -> bool:
        return self.transform is not None or self.create is not None


@dataclass(frozen=True)
class RepairPlan:
    finding: Finding
    transformations: tuple[StatementTransformation, ...] = ()
    textual_fix: Optional[str] = None
    impacted: tuple[str, ...] = ()
    to_transform: tuple[str, ...] = ()
    rank: Optional[int] = None
    notes: tuple[str, ...] = ()
    conflicts_with: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if bool(self.transformations) == bool(self.textual_fix):
            raise ValueError("a plan carries either transformations or a textual fix")
        allowed = set(self.to_transform)
        for t in self.transformations:
            if t.op is not TransformOp.CREATE_NEW and t.target not in allowed:
                raise ValueError(f"transformation target {t.target} is not among the statements to transform")

    @property
    def mode(self) -> str:
        return "rewrite" if self.transformations else "textual"

    @property
    def statements(self) -> list[str]:
        """Rendered SQL of the rewritten and new statements, in plan order."""
        return [t.rendered for t in self.transformations if t.op is not TransformOp.ANNOTATE]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "statements": self.statements,
            "transformations": [t.to_dict() for t in self.transformations],
            "text": self.textual_fix,
            "impacted": list(self.impacted),
            "notes": list(self.notes),
            "conflicts_with": list(self.conflicts_with),
        }
