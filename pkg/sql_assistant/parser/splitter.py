from __future__ import annotations

from sql_assistant.parser.lexer import tokenize
from sql_assistant.parser.models import RawStatement, Token, TokenType


def _position(corpus: str, offset: int) -> tuple[int, int]:
    line = corpus.count("\n", 0, offset) + 1
    column = offset - (corpus.rfind("\n", 0, offset) + 1) + 1
    return line, column


def split_statements(corpus: str, origin: str = "<input>") -> list[RawStatement]:
    """Split a SQL corpus on ``;`` terminators outside literals and comments.

    Comments between statements travel with the statement that follows them;
    trailing comment-only text is dropped. Never raises on malformed input:
    an unterminated literal or comment turns the remainder into one statement.
    ``source_id`` is ``origin:line:column`` of the statement's first significant token.
    """
    if not corpus or not corpus.strip():
        return []

    statements: list[RawStatement] = []
    chunk: list[tuple[Token, int]] = []

    def flush() -> None:
        significant = [offset for token, offset in chunk if token.is_significant]
        if not significant:
            return
        line, column = _position(corpus, significant[0])
        statements.append(
            RawStatement(
                text="".join(token.text for token, _ in chunk).strip(),
                source_id=f"{origin}:{line}:{column}",
                ordinal=len(statements),
                line=line,
            )
        )

    offset = 0
    for token in tokenize(corpus):
        if token.type is TokenType.PUNCTUATION and token.text == ";":
            if any(t.is_significant for t, _ in chunk):
                flush()
                chunk = []
        else:
            chunk.append((token, offset))
        offset += len(token.text)

    flush()
    return statements
