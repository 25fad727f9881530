# Standard Library Imports
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

# Local Application Imports
from sql_assistant.context.models import (
    ApplicationContext,
    BuildConfig,
    ColumnDecl,
    ColumnProfile,
    IndexDecl,
    JoinEdge,
    TableSchema,
)
from sql_assistant.detection.models import Finding
from sql_assistant.etl.dataset_adapter import DatasetAdapter
from sql_assistant.exception.custom_exception import DatasetError
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.parser.models import (
    AnnotatedStatement,
    ClauseRole,
    ColumnRef,
    ConstraintDecl,
    ConstraintKind,
    IndexDef,
    OperandKind,
    StatementKind,
    canonical,
)
from sql_assistant.profiler.data_profiler import profile_table

JOIN_SOURCES = frozenset({StatementKind.SELECT, StatementKind.UPDATE, StatementKind.DELETE})
DDL_KINDS = frozenset(
    {StatementKind.CREATE_TABLE, StatementKind.ALTER_TABLE, StatementKind.CREATE_INDEX, StatementKind.DROP}
)
PRIMARY_KEY_SENTINEL = "PRIMARY KEY"


@dataclass
class _SchemaDraft:
    """Mutable table schema assembled while DDL statements are replayed in order."""

    name: str
    source: str = "ddl"
    source_id: Optional[str] = None
    columns: list[ColumnDecl] = field(default_factory=list)
    constraints: list[ConstraintDecl] = field(default_factory=list)
    indexes: list[IndexDecl] = field(default_factory=list)

    def has_column(self, name: str) -> bool:
        return any(canonical(c.name) == canonical(name) for c in self.columns)

    def add_column(self, decl: ColumnDecl) -> None:
        if not self.has_column(decl.name):
            self.columns.append(decl)

    def add_index(self, index: IndexDecl) -> None:
        self.indexes = [i for i in self.indexes if canonical(i.name) != canonical(index.name)]
        self.indexes.append(index)

    def add_constraint(self, decl: ConstraintDecl, source_id: str) -> None:
        self.constraints.append(decl)
        if decl.kind in (ConstraintKind.PRIMARY_KEY, ConstraintKind.UNIQUE) and decl.columns:
            suffix = "pkey" if decl.kind is ConstraintKind.PRIMARY_KEY else "_".join(decl.columns) + "_key"
            self.add_index(
                IndexDecl(decl.name or f"{self.name}_{suffix}", decl.columns, source_id, unique=True, implicit=True)
            )

    def drop_column(self, name: str) -> None:
        key = canonical(name)
        self.columns = [c for c in self.columns if canonical(c.name) != key]
        self.constraints = [c for c in self.constraints if key not in {canonical(x) for x in c.columns}]
        self.indexes = [i for i in self.indexes if key not in i.column_keys]

    def drop_constraint(self, name: str) -> None:
        if name == PRIMARY_KEY_SENTINEL:
            dropped = [c for c in self.constraints if c.kind is ConstraintKind.PRIMARY_KEY]
        else:
            dropped = [c for c in self.constraints if c.name and canonical(c.name) == canonical(name)]
        self.constraints = [c for c in self.constraints if c not in dropped]
        for decl in dropped:
            self.indexes = [
                i for i in self.indexes
                if not (i.implicit and i.column_keys == tuple(canonical(c) for c in decl.columns))
            ]

    def drop_index(self, name: str) -> bool:
        before = len(self.indexes)
        self.indexes = [i for i in self.indexes if canonical(i.name) != canonical(name)]
        return len(self.indexes) != before

    def freeze(self) -> TableSchema:
        return TableSchema(
            name=self.name,
            columns=tuple(self.columns),
            constraints=tuple(self.constraints),
            indexes=tuple(self.indexes),
            source=self.source,
            source_id=self.source_id,
        )


def _index_name(index: IndexDef, table: str) -> str:
    return index.name or f"{table}_{'_'.join(index.columns)}_idx"


class _SchemaReplay:
    """Replays DDL statements in registry order into table drafts."""

    def __init__(self) -> None:
        self.drafts: dict[str, _SchemaDraft] = {}
        self.pending_indexes: list[tuple[IndexDef, str]] = []
        self.warnings: list[str] = []

    def draft(self, table: str, source: str = "partial") -> _SchemaDraft:
        key = canonical(table)
        if key not in self.drafts:
            self.drafts[key] = _SchemaDraft(name=table, source=source)
        return self.drafts[key]

    def apply(self, stmt: AnnotatedStatement) -> None:
        handler = {
            StatementKind.CREATE_TABLE: self._create_table,
            StatementKind.ALTER_TABLE: self._alter_table,
            StatementKind.CREATE_INDEX: self._create_index,
            StatementKind.DROP: self._drop,
        }.get(stmt.kind)
        if handler is not None:
            handler(stmt)

    def _own(self, items: Iterable, table: str) -> list:
        return [i for i in items if i.table is None or canonical(i.table) == canonical(table)]

    def _add_definitions(self, draft: _SchemaDraft, stmt: AnnotatedStatement) -> None:
        for column in self._own(stmt.column_defs, draft.name):
            draft.add_column(ColumnDecl(column.name, column.declared_type, column.nullable))
        for decl in self._own(stmt.constraints, draft.name):
            draft.add_constraint(decl, stmt.source_id)
        for index in self._own(stmt.index_defs, draft.name):
            columns = tuple(c for c in index.columns if draft.has_column(c))
            if columns:
                draft.add_index(IndexDecl(_index_name(index, draft.name), columns, stmt.source_id, index.unique))

    def _create_table(self, stmt: AnnotatedStatement) -> None:
        if not stmt.target_table:
            return
        draft = _SchemaDraft(name=stmt.target_table, source_id=stmt.source_id)
        self.drafts[canonical(stmt.target_table)] = draft
        self._add_definitions(draft, stmt)

    def _alter_table(self, stmt: AnnotatedStatement) -> None:
        if not stmt.target_table:
            return
        draft = self.draft(stmt.target_table)
        self._add_definitions(draft, stmt)
        for column in stmt.dropped_columns:
            draft.drop_column(column)
        for name in stmt.dropped_constraints:
            draft.drop_constraint(name)
        for name in stmt.dropped_indexes:
            draft.drop_index(name)

    def _create_index(self, stmt: AnnotatedStatement) -> None:
        for index in stmt.index_defs:
            if index.table is None:
                self.pending_indexes.append((index, stmt.source_id))
            else:
                self._attach_index(self.draft(index.table), index, stmt.source_id)

    def _attach_index(self, draft: _SchemaDraft, index: IndexDef, source_id: str) -> None:
        if draft.source == "ddl":
            missing = [c for c in index.columns if not draft.has_column(c)]
            if missing:
                self._warn(f"index {_index_name(index, draft.name)} names unknown columns of {draft.name}: {missing}")
            columns = tuple(c for c in index.columns if draft.has_column(c))
        else:
            columns = index.columns
            for column in columns:
                draft.add_column(ColumnDecl(column, ""))
        if columns:
            draft.add_index(IndexDecl(_index_name(index, draft.name), columns, source_id, index.unique))

    def _drop(self, stmt: AnnotatedStatement) -> None:
        for table in stmt.dropped_tables:
            self.drafts.pop(canonical(table), None)
        for name in stmt.dropped_indexes:
            self.pending_indexes = [(i, s) for i, s in self.pending_indexes if canonical(i.name) != canonical(name)]
            for draft in self.drafts.values():
                draft.drop_index(name)

    def resolve_pending(self) -> None:
        """Attach ``CREATE INDEX name (cols)`` statements to the only table owning every listed column."""
        for index, source_id in self.pending_indexes:
            owners = [d for d in self.drafts.values() if all(d.has_column(c) for c in index.columns)]
            if len(owners) == 1:
                self._attach_index(owners[0], index, source_id)
            else:
                self._warn(
                    f"index {index.name or list(index.columns)} has no ON clause and matches "
                    f"{len(owners)} tables; ignored"
                )
        self.pending_indexes = []

    def _warn(self, message: str) -> None:
        log.warning("Schema replay", detail=message)
        self.warnings.append(message)


def _resolve_ref(
    ref: Optional[ColumnRef], stmt: AnnotatedStatement, drafts: dict[str, _SchemaDraft]
) -> Optional[ColumnRef]:
    if ref is None:
        return None
    if ref.table:
        return ref
    owners = [
        t for t in stmt.tables_referenced
        if canonical(t) in drafts and drafts[canonical(t)].has_column(ref.column)
    ]
    if len(owners) == 1:
        return ColumnRef(owners[0], ref.column)
    return None


def _join_graph(queries: Sequence[AnnotatedStatement], drafts: dict[str, _SchemaDraft]) -> dict[JoinEdge, str]:
    graph: dict[JoinEdge, str] = {}
    for stmt in queries:
        if stmt.kind not in JOIN_SOURCES:
            continue
        for predicate in stmt.predicates:
            if predicate.op not in ("=", "==") or predicate.negated:
                continue
            if predicate.left.kind is not OperandKind.COLUMN or predicate.right.kind is not OperandKind.COLUMN:
                continue
            left = _resolve_ref(predicate.left.column, stmt, drafts)
            right = _resolve_ref(predicate.right.column, stmt, drafts)
            if left is None or right is None or left.key == right.key:
                continue
            graph.setdefault(JoinEdge.of(left, right), stmt.source_id)
    return graph


def _profile_dataset(
    adapter: DatasetAdapter,
    drafts: dict[str, _SchemaDraft],
    config: BuildConfig,
) -> list[tuple[str, list[tuple[str, Optional[str]]], dict[str, ColumnProfile]]]:
    tables = adapter.list_tables()

    def work(table: str):
        draft = drafts.get(canonical(table))
        declared = {c.name: c.declared_type for c in draft.columns if c.declared_type} if draft else {}
        return table, adapter.table_columns(table), profile_table(adapter, table, config, declared)

    if config.workers > 1 and len(tables) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(work, tables))
    return [work(table) for table in tables]


def build_context(
    queries: Sequence[AnnotatedStatement],
    dataset: Optional[DatasetAdapter] = None,
    config: Optional[BuildConfig] = None,
) -> ApplicationContext:
    """
    Build the application context for a workload.

    Schemas come from replaying CREATE/ALTER/DROP statements in order and are
    augmented, never overridden, by dataset metadata. Equality predicates
    between two columns in SELECT/UPDATE/DELETE statements form the join graph.

    Args:
        queries (Sequence[AnnotatedStatement]): The full parsed workload.
        dataset (Optional[DatasetAdapter]): Open dataset to profile.
        config (Optional[BuildConfig]): Thresholds and sampling settings.

    Returns:
        ApplicationContext: Immutable context. When the dataset cannot be read
        the context is built from DDL only and carries a warning.
    """
    config = config or BuildConfig()
    replay = _SchemaReplay()
    for stmt in queries:
        replay.apply(stmt)
    replay.resolve_pending()
    drafts = replay.drafts
    warnings = list(replay.warnings)

    join_graph = _join_graph(queries, drafts)

    profiles: dict[tuple[str, str], ColumnProfile] = {}
    if dataset is not None:
        try:
            profiled = _profile_dataset(dataset, drafts, config)
        except DatasetError as e:
            message = f"dataset {dataset.name} unavailable, using DDL only: {e.error_message}"
            log.warning("Dataset profiling failed", dataset=dataset.name, error=e.error_message)
            warnings.append(message)
            profiled = []
        for table, columns, table_profiles in profiled:
            draft = drafts.get(canonical(table))
            if draft is None:
                draft = drafts.setdefault(canonical(table), _SchemaDraft(name=table, source="data"))
            for name, adapter_type in columns:
                profile = table_profiles.get(name)
                synthesized = adapter_type or (profile.inferred_value_class.value if profile else "")
                draft.add_column(ColumnDecl(name, synthesized))
            for name, profile in table_profiles.items():
                profiles[(canonical(table), canonical(name))] = profile

    ctx = ApplicationContext(
        schemas={key: draft.freeze() for key, draft in drafts.items()},
        query_registry=tuple(queries),
        join_graph=join_graph,
        profiles=profiles,
        build_config=config,
        warnings=tuple(warnings),
    )
    log.info(
        "Context built",
        statements=len(ctx.query_registry),
        tables=len(ctx.schemas),
        joins=len(ctx.join_graph),
        profiled_columns=len(ctx.profiles),
        fingerprint=ctx.fingerprint,
    )
    return ctx


def _touches_column(stmt: AnnotatedStatement, table: str, column: Optional[str]) -> bool:
    key = canonical(table)
    col = canonical(column) if column else None
    if stmt.kind is StatementKind.DROP:
        return key in {canonical(t) for t in stmt.dropped_tables}
    if stmt.kind in DDL_KINDS:
        for decl in stmt.constraints:
            if decl.target_table and canonical(decl.target_table) == key and (
                col is None or col in {canonical(c) for c in decl.target_columns}
            ):
                return True
        if canonical(stmt.target_table) != key:
            return False
        if col is None or stmt.kind is StatementKind.CREATE_TABLE:
            return True
        return any(canonical(ref.column) == col for ref in stmt.columns_referenced)
    if not stmt.references_table(table):
        return False
    if col is None:
        return True
    # an INSERT without a column list writes every column
    if (
        stmt.kind is StatementKind.INSERT
        and canonical(stmt.target_table) == key
        and not stmt.spans(ClauseRole.COLUMN_LIST)
    ):
        return True
    for ref in stmt.columns_referenced:
        if canonical(ref.column) == col and (ref.table is None or canonical(ref.table) == key):
            return True
    return stmt.has_wildcard_projection


def impacted_queries(ctx: ApplicationContext, finding: Finding) -> list[AnnotatedStatement]:
    """
    Registered statements that reference the finding's table or column.

    Args:
        ctx (ApplicationContext): Built context.
        finding (Finding): A detected anti-pattern.

    Returns:
        list[AnnotatedStatement]: Matches in registry order; empty for an unknown table.
    """
    location = finding.location
    if location.table is None:
        return [s for s in ctx.query_registry if s.source_id == location.statement]
    if ctx.schema(location.table) is None and not any(
        s.references_table(location.table) for s in ctx.query_registry
    ):
        return []
    return [s for s in ctx.query_registry if _touches_column(s, location.table, location.column)]
