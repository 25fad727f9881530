from __future__ import annotations

from dataclasses import replace
from typing import Optional, Sequence, Union

from sql_assistant.context.builder import impacted_queries
from sql_assistant.context.models import ApplicationContext
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.detection.models import Finding
from sql_assistant.exception.custom_exception import RenderError
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.parser.models import AnnotatedStatement, canonical
from sql_assistant.parser.renderer import reparse
from sql_assistant.ranking.ranker import RankedFinding
from sql_assistant.repair.models import RepairPlan, StatementTransformation, TransformOp
from sql_assistant.repair.rules import REPAIR_RULES

K = AntiPatternKind

# kinds whose automated fix creates schema objects once per (table, column)
_SHARED_FIXES = frozenset({K.MULTI_VALUED_ATTRIBUTE, K.ENUMERATED_TYPES, K.INDEX_UNDERUSE, K.NO_PRIMARY_KEY})
_MIGRATION_NOTE = "existing rows are not migrated; copy the data before dropping anything"


def textual_fix(finding: Finding, ctx: ApplicationContext) -> str:
    """Guidance naming the concrete table, column and statement; never empty."""
    rule = REPAIR_RULES.get(finding.kind)
    text = rule.textual(finding, ctx) if rule else ""
    return text or f"Review {finding.kind.title} at {finding.location}."


def _to_transform(finding: Finding, ctx: ApplicationContext) -> tuple[list[str], list[str]]:
    impacted = [s.source_id for s in impacted_queries(ctx, finding)]
    own = finding.location.statement
    ids = set(impacted) | ({own} if own else set())
    ordered = [s.source_id for s in ctx.query_registry if s.source_id in ids]
    if own and own not in ordered:
        ordered.insert(0, own)
    return impacted, ordered


def _transform(finding: Finding, ctx: ApplicationContext, to_transform: Sequence[str]) -> list[StatementTransformation]:
    rule = REPAIR_RULES.get(finding.kind)
    if rule is None or not rule.automated:
        return []
    created: list[StatementTransformation] = []
    if rule.create is not None:
        created = rule.create(finding, ctx)
        if created is None:
            return []
    rewritten: list[StatementTransformation] = []
    if rule.transform is not None:
        for source_id in to_transform:
            stmt = ctx.statement(source_id)
            if stmt is None:
                continue
            rewritten.extend(rule.transform(stmt, finding, ctx) or [])
    transformations = created + rewritten
    if not any(t.op is not TransformOp.ANNOTATE for t in transformations):
        return []
    return transformations


def _plan(finding: Finding, ctx: ApplicationContext, rank: Optional[int]) -> RepairPlan:
    impacted, to_transform = _to_transform(finding, ctx)
    notes: list[str] = []
    transformations: list[StatementTransformation] = []
    if finding.active:
        try:
            transformations = _transform(finding, ctx, to_transform)
        except RenderError as e:
            log.warning("Rewrite failed, using textual fix", kind=finding.kind.value, error=e.error_message)
            notes.append(f"automated rewrite failed: {e.error_message}")
            transformations = []
    else:
        notes.append(f"suppressed: {finding.details.get('suppressed_because', 'contradicted by context')}")

    label = rank if rank is not None else "x"
    numbered = []
    for n, t in enumerate(transformations, start=1):
        numbered.append(replace(t, target=f"fix-{label}-{n}") if t.op is TransformOp.CREATE_NEW else t)
    if numbered and finding.kind in (K.MULTI_VALUED_ATTRIBUTE, K.ENUMERATED_TYPES):
        notes.append(_MIGRATION_NOTE)
    return RepairPlan(
        finding=finding,
        transformations=tuple(numbered),
        textual_fix=None if numbered else textual_fix(finding, ctx),
        impacted=tuple(impacted),
        to_transform=tuple(to_transform),
        rank=rank,
        notes=tuple(notes),
    )


def _shared_key(finding: Finding) -> tuple:
    loc = finding.location
    return finding.kind, canonical(loc.table), canonical(loc.column)


def _touched_tables(plan: RepairPlan, ctx: ApplicationContext) -> set[str]:
    finding = plan.finding
    names = {finding.location.table, finding.details.get("parent_table")}
    names.update(finding.details.get("tables", ()))
    if finding.location.table is None and finding.location.statement:
        stmt = ctx.statement(finding.location.statement)
        names.update(stmt.tables_referenced if stmt else ())
    return {canonical(n) for n in names if n}


def fix(findings: Sequence[Union[RankedFinding, Finding]], ctx: ApplicationContext) -> list[RepairPlan]:
    """
    One repair plan per finding, in the given (ranking) order.

    Every plan carries either rendered transformations or a textual fix. A second
    finding asking for the same schema change as an earlier automated plan (for
    example the same list column found by a query rule and by a data rule) gets a
    textual pointer to that plan. Each plan lists the ranks of other plans that
    touch one of its tables.
    """
    plans: list[RepairPlan] = []
    automated: dict[tuple, int] = {}
    for position, item in enumerate(findings, start=1):
        finding, rank = (item.finding, item.rank) if isinstance(item, RankedFinding) else (item, position)
        key = _shared_key(finding)
        if finding.kind in _SHARED_FIXES and key in automated and finding.active:
            impacted, to_transform = _to_transform(finding, ctx)
            plans.append(
                RepairPlan(
                    finding=finding,
                    textual_fix=f"Resolved by fix #{automated[key]}. {textual_fix(finding, ctx)}",
                    impacted=tuple(impacted),
                    to_transform=tuple(to_transform),
                    rank=rank,
                )
            )
            continue
        plan = _plan(finding, ctx, rank)
        if plan.mode == "rewrite" and finding.kind in _SHARED_FIXES:
            automated[key] = rank
        plans.append(plan)

    tables = [_touched_tables(plan, ctx) for plan in plans]
    annotated = []
    for index, plan in enumerate(plans):
        others = tuple(
            other.rank for j, other in enumerate(plans)
            if j != index and other.rank is not None and tables[index] & tables[j]
        )
        annotated.append(replace(plan, conflicts_with=others))
    log.info(
        "Repair plans built",
        plans=len(annotated),
        rewrites=sum(1 for p in annotated if p.mode == "rewrite"),
        textual=sum(1 for p in annotated if p.mode == "textual"),
    )
    return annotated


def apply_plans(statements: Sequence[AnnotatedStatement], plans: Sequence[RepairPlan]) -> list[AnnotatedStatement]:
    """
    The workload with every plan applied, in memory.

    Rewritten statements replace their originals in place (the first plan to
    rewrite a statement wins); created statements are appended in plan order.
    """
    rewrites: dict[str, str] = {}
    created: list[StatementTransformation] = []
    for plan in plans:
        for t in plan.transformations:
            if t.op is TransformOp.REWRITE_EXISTING:
                if t.target in rewrites:
                    log.warning("Skipping second rewrite of a statement", statement=t.target, rank=plan.rank)
                    continue
                rewrites[t.target] = t.rendered
            elif t.op is TransformOp.CREATE_NEW:
                created.append(t)

    result = []
    for stmt in statements:
        text = rewrites.get(stmt.source_id)
        result.append(reparse(text, stmt.source_id, len(result)) if text is not None else stmt)
    for t in created:
        result.append(reparse(t.rendered, t.target, len(result)))
    return result
