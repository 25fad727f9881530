from __future__ import annotations

from typing import Iterable

from sql_assistant.exception.custom_exception import RenderError
from sql_assistant.parser.annotator import parse
from sql_assistant.parser.models import AnnotatedStatement, RawStatement, Span


def check_spans(stmt: AnnotatedStatement) -> None:
    """Raise RenderError when a clause span is out of range or overlaps another."""
    spans = sorted(
        ((span, role) for role, role_spans in stmt.clauses.items() for span in role_spans),
        key=lambda item: (item[0].start, item[0].end),
    )
    size = len(stmt.tokens)
    previous = None
    for span, role in spans:
        if span.end > size:
            raise RenderError(
                f"{stmt.source_id}: {role.value} span [{span.start}, {span.end}) exceeds {size} tokens"
            )
        if previous is not None and previous[0].overlaps(span):
            raise RenderError(
                f"{stmt.source_id}: {previous[1].value} and {role.value} spans overlap"
            )
        previous = (span, role)


def render(stmt: AnnotatedStatement) -> str:
    """Turn an annotated statement back into SQL text."""
    check_spans(stmt)
    return "".join(token.text for token in stmt.tokens).strip()


def reparse(text: str, source_id: str, ordinal: int = 0) -> AnnotatedStatement:
    return parse(RawStatement(text=text, source_id=source_id, ordinal=ordinal))


def apply_edits(stmt: AnnotatedStatement, edits: Iterable[tuple[Span, str]]) -> AnnotatedStatement:
    """Replace token ranges with new text and re-annotate the result.

    Edits must not overlap. The returned statement keeps the source id and
    ordinal of ``stmt``.
    """
    ordered = sorted(edits, key=lambda edit: edit[0].start)
    size = len(stmt.tokens)
    for index, (span, _) in enumerate(ordered):
        if span.end > size:
            raise RenderError(f"{stmt.source_id}: edit [{span.start}, {span.end}) exceeds {size} tokens")
        if index and ordered[index - 1][0].end > span.start:
            raise RenderError(f"{stmt.source_id}: overlapping edits at token {span.start}")
    check_spans(stmt)

    pieces: list[str] = []
    cursor = 0
    for span, text in ordered:
        pieces.extend(token.text for token in stmt.tokens[cursor:span.start])
        pieces.append(text)
        cursor = span.end
    pieces.extend(token.text for token in stmt.tokens[cursor:])
    return reparse("".join(pieces).strip(), stmt.source_id, stmt.ordinal)
