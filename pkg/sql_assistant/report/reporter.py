"""Report serialization shared by the CLI and the REST service."""

from __future__ import annotations

import json
from collections import Counter
from typing import Any

import pandas as pd

from sql_assistant.detection.catalog import Category
from sql_assistant.workflow.pipeline import AnalysisResult

REPORT_VERSION = "1.0"
FORMATS = ("json", "text")
SCORE_DIGITS = 6


def _round(value: float) -> float:
    return round(value, SCORE_DIGITS)


def summarize(result: AnalysisResult) -> dict[str, Any]:
    active = [r.finding for r in result.ranked if r.finding.active]
    by_category = Counter(f.category.value for f in active)
    by_kind = Counter(f.kind.value for f in active)
    return {
        "total": len(active),
        "suppressed": len(result.ranked) - len(active),
        "by_category": {c.value: by_category.get(c.value, 0) for c in Category},
        "by_kind": dict(sorted(by_kind.items())),
    }


def finding_entries(result: AnalysisResult) -> list[dict[str, Any]]:
    entries = []
    for ranked in result.ranked:
        finding = ranked.finding
        plan = result.plan_for(ranked)
        score = {key: _round(value) for key, value in ranked.breakdown.to_dict().items()}
        fix = plan.to_dict() if plan else {"mode": "textual", "statements": [], "text": ""}
        entries.append(
            {
                "rank": ranked.rank,
                "kind": finding.kind.value,
                "title": finding.kind.title,
                "category": finding.category.value,
                "location": finding.location.to_dict(),
                "phase": finding.phase.value,
                "suppressed": finding.suppressed_by_context,
                "evidence": finding.evidence,
                "details": {k: v for k, v in finding.details.items()},
                "context_ref": finding.context_ref,
                "score": score,
                "fix": fix,
            }
        )
    return entries


def report_dict(result: AnalysisResult) -> dict[str, Any]:
    cfg = result.settings.ranking_config
    return {
        "version": REPORT_VERSION,
        "config": {
            "preset": cfg.preset,
            "weights": {key: _round(value) for key, value in cfg.weights().items()},
            "inter_query_mode": cfg.inter_query_mode.value,
            "thresholds": result.settings.build_config.thresholds(),
            "inter_query": result.settings.build_config.inter_query,
            "data_rules": result.settings.build_config.data_rules,
        },
        "statements": len(result.statements),
        "warnings": list(result.warnings),
        "findings": finding_entries(result),
        "summary": summarize(result),
    }


def _text(result: AnalysisResult) -> str:
    lines = [f"sql-sense report: {len(result.statements)} statements, preset {result.settings.preset}"]
    for warning in result.warnings:
        lines.append(f"warning: {warning}")
    if not result.ranked:
        lines.append("No anti-patterns found.")
        return "\n".join(lines) + "\n"

    table = pd.DataFrame(
        [
            {
                "rank": r.rank,
                "score": f"{r.score:.3f}",
                "kind": r.finding.kind.title,
                "category": r.finding.category.value,
                "location": str(r.finding.location),
                "status": "suppressed" if not r.finding.active else "",
            }
            for r in result.ranked
        ]
    )
    lines.append(table.to_string(index=False))

    for ranked in result.ranked:
        plan = result.plan_for(ranked)
        lines.append("")
        lines.append(f"#{ranked.rank} {ranked.finding.kind.title} at {ranked.finding.location}")
        lines.append(f"  {ranked.finding.evidence}")
        if plan is None:
            continue
        if plan.textual_fix:
            lines.append(f"  fix: {plan.textual_fix}")
        for t in plan.transformations:
            lines.append(f"  -- {t.op.value} {t.target}: {t.tree_edit}")
            if t.rendered:
                lines.append(f"  {t.rendered};")
        for note in plan.notes:
            lines.append(f"  note: {note}")
        if plan.conflicts_with:
            lines.append(f"  touches the same tables as: {', '.join(f'#{r}' for r in plan.conflicts_with)}")

    summary = summarize(result)
    counts = ", ".join(f"{k}={v}" for k, v in summary["by_category"].items())
    lines.append("")
    lines.append(f"{summary['total']} active, {summary['suppressed']} suppressed ({counts})")
    return "\n".join(lines) + "\n"


def emit_report(result: AnalysisResult, fmt: str = "json") -> bytes:
    """
    Serialize an analysis result.

    Args:
        result (AnalysisResult): Output of the pipeline.
        fmt (str): ``json`` or ``text``.

    Returns:
        bytes: UTF-8 report. JSON output is byte-identical for identical inputs.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format: {fmt}")
    if fmt == "text":
        return _text(result).encode("utf-8")
    return (json.dumps(report_dict(result), indent=2, ensure_ascii=False, default=str) + "\n").encode("utf-8")
