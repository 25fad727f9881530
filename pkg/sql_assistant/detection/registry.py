"""In-process registry of query detection rules.

A rule registers with the decorator :func:`register_rule`; the built-in rules
live in ``intra_rules`` and ``inter_rules`` and are loaded on first lookup.
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from sql_assistant.context.models import ApplicationContext
from sql_assistant.detection.catalog import AntiPatternKind, Category
from sql_assistant.detection.models import Finding, Phase
from sql_assistant.parser.models import AnnotatedStatement, StatementKind

DetectFn = Callable[[AnnotatedStatement, ApplicationContext], Iterable[Finding]]
# returns a suppression reason, or None when the context confirms the finding
ConfirmFn = Callable[[Finding, AnnotatedStatement, ApplicationContext], Optional[str]]

BUILTIN_RULE_MODULES = ("sql_assistant.detection.intra_rules", "sql_assistant.detection.inter_rules")

SELECT = frozenset({StatementKind.SELECT})
DML = frozenset({StatementKind.SELECT, StatementKind.UPDATE, StatementKind.DELETE})
WRITES = frozenset({StatementKind.INSERT, StatementKind.UPDATE, StatementKind.DELETE})
ALL_DML = DML | WRITES
TABLE_DDL = frozenset({StatementKind.CREATE_TABLE, StatementKind.ALTER_TABLE})


@dataclass(frozen=True)
class DetectionRule:
    name: str
    kind: AntiPatternKind
    phase: Phase
    applicable_statement_kinds: frozenset[StatementKind]
    detect: DetectFn
    confirm: Optional[ConfirmFn] = None

    def __post_init__(self) -> None:
        if self.phase is Phase.DATA:
            raise ValueError("data rules run over profiles, not statements")
        if StatementKind.OTHER in self.applicable_statement_kinds:
            raise ValueError("no rule applies to unclassified statements")

    @property
    def category(self) -> Category:
        return self.kind.category

    def applies_to(self, stmt: AnnotatedStatement) -> bool:
        return stmt.kind in self.applicable_statement_kinds


_RULES: list[DetectionRule] = []
_loaded = False


def register_rule(
    kind: AntiPatternKind,
    applicable: Iterable[StatementKind],
    phase: Phase = Phase.INTRA_QUERY,
    confirm: Optional[ConfirmFn] = None,
) -> Callable[[DetectFn], DetectFn]:
    """Decorator adding a detect function to the registry, in definition order."""

    def decorator(fn: DetectFn) -> DetectFn:
        _RULES.append(
            DetectionRule(
                name=fn.__name__.lstrip("_"),
                kind=kind,
                phase=phase,
                applicable_statement_kinds=frozenset(applicable),
                detect=fn,
                confirm=confirm,
            )
        )
        return fn

    return decorator


def _ensure_loaded() -> None:
    global _loaded
    if not _loaded:
        _loaded = True
        for module in BUILTIN_RULE_MODULES:
            importlib.import_module(module)


def all_rules() -> list[DetectionRule]:
    _ensure_loaded()
    return list(_RULES)


def rules_for_query(stmt: AnnotatedStatement, phase: Optional[Phase] = None) -> list[DetectionRule]:
    """
    Rules applicable to the statement's kind, in registry order.

    Args:
        stmt (AnnotatedStatement): Parsed statement.
        phase (Optional[Phase]): Restrict to intra- or inter-query rules.

    Returns:
        list[DetectionRule]: Empty for ``Other`` statements.
    """
    return [r for r in all_rules() if r.applies_to(stmt) and (phase is None or r.phase is phase)]
