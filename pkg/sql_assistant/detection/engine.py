"""Runs the registered rules over statements and merges findings in a stable order."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from sql_assistant.context.models import ApplicationContext, BuildConfig
from sql_assistant.detection.models import Finding, Phase
from sql_assistant.detection.registry import rules_for_query
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.parser.models import AnnotatedStatement
from sql_assistant.profiler.data_rules import data_rules


def _run(stmt: AnnotatedStatement, ctx: ApplicationContext, phase: Phase) -> list[Finding]:
    findings: list[Finding] = []
    for rule in rules_for_query(stmt, phase):
        findings.extend(rule.detect(stmt, ctx))
    return findings


def detect_intra(stmt: AnnotatedStatement, config: Optional[BuildConfig] = None) -> list[Finding]:
    """Context-free findings for one statement, in registry order."""
    return _run(stmt, ApplicationContext.empty(config), Phase.INTRA_QUERY)


def review(findings: Sequence[Finding], stmt: AnnotatedStatement, ctx: ApplicationContext) -> list[Finding]:
    """Mark intra findings the context contradicts as suppressed; the rest pass through unchanged."""
    confirm = {r.kind: r.confirm for r in rules_for_query(stmt, Phase.INTRA_QUERY) if r.confirm}
    reviewed = []
    for finding in findings:
        check = confirm.get(finding.kind)
        reason = check(finding, stmt, ctx) if check and finding.active else None
        reviewed.append(finding.suppressed(reason, ctx.fingerprint) if reason else finding)
    return reviewed


def detect_inter(
    stmt: AnnotatedStatement, ctx: ApplicationContext, intra: Sequence[Finding] = ()
) -> list[Finding]:
    """
    Contextual pass for one statement.

    Args:
        stmt (AnnotatedStatement): A statement from ``ctx.query_registry``.
        ctx (ApplicationContext): Context built over the whole workload.
        intra (Sequence[Finding]): The statement's intra-query findings to review.

    Returns:
        list[Finding]: The reviewed intra findings (same order, some suppressed)
        followed by the context-only findings of the inter-query rules.
    """
    return review(intra, stmt, ctx) + _run(stmt, ctx, Phase.INTER_QUERY)


def _per_statement(fn, queries: Sequence[AnnotatedStatement], workers: int) -> list[list[Finding]]:
    if workers > 1 and len(queries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps input order, so the merge below is schedule-independent
            return list(pool.map(fn, queries))
    return [fn(stmt) for stmt in queries]


def detect_all(queries: Sequence[AnnotatedStatement], ctx: ApplicationContext) -> list[Finding]:
    """
    Every finding for the workload: intra findings of all statements, then the
    inter findings, then the data findings.

    With ``inter_query`` disabled only the intra phase runs and nothing is
    suppressed. Suppressed findings stay in the list, flagged.
    """
    config = ctx.build_config
    intra = _per_statement(lambda stmt: _run(stmt, ctx, Phase.INTRA_QUERY), queries, config.workers)

    findings: list[Finding] = []
    if not config.inter_query:
        for batch in intra:
            findings.extend(batch)
        log.info("Findings detected", statements=len(queries), findings=len(findings), inter_query=False)
        return findings

    reviewed = [review(batch, stmt, ctx) for batch, stmt in zip(intra, queries)]
    for batch in reviewed:
        findings.extend(batch)
    for batch in _per_statement(lambda stmt: _run(stmt, ctx, Phase.INTER_QUERY), queries, config.workers):
        findings.extend(batch)
    if config.data_rules and (ctx.has_data or ctx.schemas):
        findings.extend(data_rules(ctx))

    log.info(
        "Findings detected",
        statements=len(queries),
        findings=len(findings),
        suppressed=sum(1 for f in findings if not f.active),
    )
    return findings
