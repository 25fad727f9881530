from sql_assistant.parser.annotator import parse
from sql_assistant.parser.lexer import tokenize
from sql_assistant.parser.models import (
    AnnotatedStatement,
    ClauseRole,
    ColumnDef,
    ColumnRef,
    ConstraintDecl,
    ConstraintKind,
    IndexDef,
    Operand,
    OperandKind,
    Predicate,
    RawStatement,
    Span,
    StatementKind,
    TableRef,
    Token,
    TokenType,
    canonical,
)
from sql_assistant.parser.renderer import apply_edits, render, reparse
from sql_assistant.parser.splitter import split_statements

__all__ = [
    "AnnotatedStatement",
    "ClauseRole",
    "ColumnDef",
    "ColumnRef",
    "ConstraintDecl",
    "ConstraintKind",
    "IndexDef",
    "Operand",
    "OperandKind",
    "Predicate",
    "RawStatement",
    "Span",
    "StatementKind",
    "TableRef",
    "Token",
    "TokenType",
    "apply_edits",
    "canonical",
    "parse",
    "render",
    "reparse",
    "split_statements",
    "tokenize",
]
