"""Lossless tokenizer built on ``sqlparse``'s lexer.

The concatenated token texts always reproduce the input exactly. Keyword
classification is ours rather than sqlparse's, so words such as ``User`` or
``Role`` stay identifiers.
"""

from __future__ import annotations

import re
from typing import Iterable

from sqlparse import lexer as sql_lexer
from sqlparse import tokens as T

from sql_assistant.parser.models import Token, TokenType

RESERVED = frozenset(
    """
    ADD ALL ALTER AND ANY AS ASC AUTOINCREMENT AUTO_INCREMENT BEGIN BETWEEN BY CASCADE CASE
    CHECK COLLATE COLUMN CONCURRENTLY CONSTRAINT CREATE CROSS CURRENT_DATE CURRENT_TIME
    CURRENT_TIMESTAMP CURRENT_USER DEFAULT DELETE DESC DISTINCT DO DROP ELSE END ESCAPE
    EXCEPT EXISTS FETCH FIRST FOREIGN FROM FULL FULLTEXT GLOBAL GROUP HAVING IF ILIKE IN INDEX
    FOR INNER INSERT INTERSECT INTERVAL INTO IS JOIN KEY LAST LATERAL LEFT LIKE LIMIT LOCAL
    LOCALTIMESTAMP NATURAL NOT NULL NULLS OFFSET ON OR ORDER OUTER OVER PARTITION PRIMARY QUALIFY
    RECURSIVE REFERENCES REGEXP RENAME REPLACE RESTRICT RETURNING RIGHT RLIKE SELECT SET
    SIMILAR SPATIAL STRAIGHT_JOIN TABLE TEMP TEMPORARY THEN TO TOP TRUNCATE UNION UNIQUE
    UPDATE USING VALUES VIEW WHEN WHERE WINDOW WITH
    """.split()
)
LITERAL_WORDS = frozenset({"TRUE", "FALSE"})

_DOLLAR_QUOTED = re.compile(r"\$([A-Za-z_]\w*)?\$[\s\S]*?\$\1\$")
_WORD = re.compile(r"^[\w$@#]+$")


def _classify_word(text: str) -> TokenType:
    upper = text.upper()
    if upper in LITERAL_WORDS:
        return TokenType.LITERAL
    if upper in RESERVED:
        return TokenType.KEYWORD
    return TokenType.IDENTIFIER


def _split_words(text: str) -> Iterable[Token]:
    # sqlparse folds phrases such as "LEFT OUTER JOIN" or "NOT NULL" into one token
    for piece in re.split(r"(\s+)", text):
        if not piece:
            continue
        if piece.isspace():
            yield Token(TokenType.WHITESPACE, piece)
        elif _WORD.match(piece):
            yield Token(_classify_word(piece), piece)
        else:
            yield Token(TokenType.OPERATOR, piece)


def _convert(ttype, value: str) -> list[Token]:
    if ttype in T.Comment:
        return [Token(TokenType.COMMENT, value)]
    if ttype in T.Whitespace or ttype in T.Newline or value.isspace():
        return [Token(TokenType.WHITESPACE, value)]
    if ttype in T.String.Symbol:
        return [Token(TokenType.IDENTIFIER, value)]
    if ttype in T.Name.Placeholder or ttype in T.Literal:
        return [Token(TokenType.LITERAL, value)]
    if ttype in T.Punctuation:
        return [Token(TokenType.PUNCTUATION, value)]
    if ttype in T.Error:
        return [Token(TokenType.UNKNOWN, value)]
    if ttype in T.Keyword or ttype in T.Name or _WORD.match(value.split()[0] if value.split() else value):
        return list(_split_words(value))
    return [Token(TokenType.OPERATOR, value)]


def _lex_plain(text: str) -> list[Token]:
    tokens: list[Token] = []
    pending = list(sql_lexer.tokenize(text))
    offset = 0
    for index, (ttype, value) in enumerate(pending):
        converted = _convert(ttype, value)
        # an unterminated literal or block comment swallows the rest of the input
        if converted[0].type is TokenType.UNKNOWN and value in ("'", '"', "`"):
            tokens.append(Token(TokenType.UNKNOWN, text[offset:]))
            return tokens
        if value == "/" and index + 1 < len(pending) and pending[index + 1][1].startswith("*"):
            tokens.append(Token(TokenType.COMMENT, text[offset:]))
            return tokens
        tokens.extend(converted)
        offset += len(value)
    return tokens


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; dollar-quoted bodies become one literal each."""
    tokens: list[Token] = []
    position = 0
    for match in _DOLLAR_QUOTED.finditer(text):
        if match.start() > position:
            tokens.extend(_lex_plain(text[position:match.start()]))
        tokens.append(Token(TokenType.LITERAL, match.group(0)))
        position = match.end()
    if position < len(text):
        tokens.extend(_lex_plain(text[position:]))
    return tokens
