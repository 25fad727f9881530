"""End-to-end analysis: parse, build context, detect, rank and fix."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from sql_assistant.context.builder import build_context
from sql_assistant.context.models import ApplicationContext
from sql_assistant.detection.catalog import AntiPatternKind, Category, parse_kind
from sql_assistant.detection.engine import detect_all
from sql_assistant.detection.models import Finding
from sql_assistant.etl.dataset_adapter import DatasetAdapter, open_dataset
from sql_assistant.exception.custom_exception import DatasetError
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.parser.annotator import parse
from sql_assistant.parser.models import AnnotatedStatement
from sql_assistant.parser.splitter import split_statements
from sql_assistant.ranking.ranker import RankedFinding, rank
from sql_assistant.repair.engine import fix
from sql_assistant.repair.models import RepairPlan
from sql_assistant.utils.settings_loader import Settings, SettingsLoader

Source = tuple[str, str]


@dataclass(frozen=True)
class AnalysisResult:
    statements: tuple[AnnotatedStatement, ...]
    context: ApplicationContext
    findings: tuple[Finding, ...]
    ranked: tuple[RankedFinding, ...]
    plans: tuple[RepairPlan, ...]
    settings: Settings
    warnings: tuple[str, ...] = field(default=())

    @property
    def active(self) -> list[RankedFinding]:
        return [r for r in self.ranked if r.finding.active]

    def plan_for(self, ranked: RankedFinding) -> Optional[RepairPlan]:
        return next((p for p in self.plans if p.rank == ranked.rank), None)

    def failing(self, fail_on: Iterable[str] = ()) -> list[RankedFinding]:
        """Active findings matching ``fail_on`` (category or kind names); all active ones when empty."""
        selectors = [s.strip() for s in fail_on if s and s.strip()]
        if not selectors:
            return self.active
        categories: set[Category] = set()
        kinds: set[AntiPatternKind] = set()
        for selector in selectors:
            category = next((c for c in Category if c.value == selector.lower().replace("-", "_")), None)
            if category is not None:
                categories.add(category)
            else:
                kinds.add(parse_kind(selector))
        return [r for r in self.active if r.finding.kind in kinds or r.finding.category in categories]


def _parse_sources(sources: Sequence[Source]) -> list[AnnotatedStatement]:
    statements = []
    for origin, text in sources:
        for raw in split_statements(text, origin):
            statements.append(parse(replace(raw, ordinal=len(statements))))
    return statements


def _open(dataset: Union[DatasetAdapter, str, Path, None], warnings: list[str]) -> Optional[DatasetAdapter]:
    if dataset is None or isinstance(dataset, DatasetAdapter):
        return dataset
    try:
        return open_dataset(dataset)
    except DatasetError as e:
        log.warning("Dataset unavailable, continuing with DDL only", dataset=str(dataset), error=e.error_message)
        warnings.append(f"dataset {dataset} unavailable, using DDL only: {e.error_message}")
        return None


def run_analysis(
    sources: Sequence[Source],
    dataset: Union[DatasetAdapter, str, Path, None] = None,
    settings: Optional[Settings] = None,
) -> AnalysisResult:
    """
    Analyse a SQL workload.

    Args:
        sources (Sequence[tuple[str, str]]): ``(origin, sql text)`` pairs, analysed as one workload.
        dataset: An open adapter, or a path to a SQLite file or CSV directory.
            An unreadable dataset degrades the run to DDL-only analysis with a warning.
        settings (Optional[Settings]): Defaults to the packaged configuration.

    Returns:
        AnalysisResult: Statements, context, findings, ranking and one repair plan per finding.
    """
    settings = settings or SettingsLoader().load()
    warnings: list[str] = []
    statements = _parse_sources(sources)
    log.info("Statements parsed", sources=len(sources), statements=len(statements))

    adapter = _open(dataset, warnings)
    owned = adapter is not None and not isinstance(dataset, DatasetAdapter)
    try:
        ctx = build_context(statements, adapter, settings.build_config)
    finally:
        if owned:
            adapter.close()

    findings = detect_all(statements, ctx)
    ranked = rank(findings, settings.ranking_config, settings.metrics_table, [s.source_id for s in statements])
    plans = fix(ranked, ctx)
    return AnalysisResult(
        statements=tuple(statements),
        context=ctx,
        findings=tuple(findings),
        ranked=tuple(ranked),
        plans=tuple(plans),
        settings=settings,
        warnings=tuple(warnings) + ctx.warnings,
    )


def find_anti_patterns(query: str, settings: Optional[Settings] = None, origin: str = "query") -> AnalysisResult:
    """Analyse a single SQL string (one or more statements) without a dataset."""
    return run_analysis([(origin, query)], settings=settings)
