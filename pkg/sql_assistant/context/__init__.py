from sql_assistant.context.builder import build_context, impacted_queries
from sql_assistant.context.models import (
    ApplicationContext,
    BuildConfig,
    ColumnDecl,
    ColumnProfile,
    IndexDecl,
    JoinEdge,
    TableSchema,
    ValueClass,
)

__all__ = [
    "ApplicationContext",
    "BuildConfig",
    "ColumnDecl",
    "ColumnProfile",
    "IndexDecl",
    "JoinEdge",
    "TableSchema",
    "ValueClass",
    "build_context",
    "impacted_queries",
]
