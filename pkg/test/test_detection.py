import pytest

from sql_assistant.context import BuildConfig, build_context
from sql_assistant.detection import (
    CATALOG,
    AntiPatternKind as K,
    Category,
    Phase,
    all_rules,
    detect_all,
    detect_inter,
    detect_intra,
    parse_kind,
)
from sql_assistant.parser import RawStatement, parse


def _active(findings, kind):
    return [f for f in findings if f.kind is kind and f.active]


def _detect(parse_sql, sql, config=None):
    statements = parse_sql(sql)
    ctx = build_context(statements, None, config or BuildConfig())
    return statements, detect_all(statements, ctx)


def test_catalog_covers_four_categories():
    assert len(CATALOG) == 26
    counts = {c: sum(1 for info in CATALOG.values() if info.category is c) for c in Category}
    assert counts == {
        Category.LOGICAL_DESIGN: 7,
        Category.PHYSICAL_DESIGN: 6,
        Category.QUERY: 7,
        Category.DATA: 6,
    }
    assert parse_kind("Index Underuse") is K.INDEX_UNDERUSE
    assert parse_kind("index-underuse") is K.INDEX_UNDERUSE
    with pytest.raises(ValueError):
        parse_kind("spaghetti")


def test_every_statement_kind_rule_is_registered_once():
    rules = all_rules()
    names = [r.name for r in rules]
    assert len(names) == len(set(names))
    statement_kinds = {r.kind for r in rules}
    assert statement_kinds == {k for k, info in CATALOG.items() if info.category is not Category.DATA}


def test_index_overuse_with_lookup_workload(workload):
    statements, ctx = workload("tenant_indexes.sql", "workload_lookup.sql")
    findings = detect_all(statements, ctx)
    overuse = _active(findings, K.INDEX_OVERUSE)
    assert sorted(f.details["index"] for f in overuse) == ["idx_actv", "idx_zone"]
    assert all(f.phase is Phase.INTER_QUERY and f.context_ref == ctx.fingerprint for f in overuse)
    assert not _active(findings, K.INDEX_UNDERUSE)


def test_index_overuse_with_single_column_workload(workload):
    statements, ctx = workload("tenant_indexes.sql", "workload_single.sql")
    overuse = _active(detect_all(statements, ctx), K.INDEX_OVERUSE)
    assert [f.details["index"] for f in overuse] == ["idx_zone_actv"]
    assert overuse[0].location.statement == statements[1].source_id


def test_index_underuse_reported_once_at_first_query(workload):
    statements, ctx = workload("ranking.sql")
    underuse = _active(detect_all(statements, ctx), K.INDEX_UNDERUSE)
    assert len(underuse) == 1
    (finding,) = underuse
    assert finding.location.statement == statements[3].source_id
    assert (finding.location.table, finding.location.column) == ("Tenant", "Zone_ID")
    assert finding.details["queries"] == [statements[3].source_id, statements[4].source_id]


def test_index_underuse_respects_threshold(workload):
    statements, ctx = workload("ranking.sql", config=BuildConfig(index_use_min=3))
    assert not _active(detect_all(statements, ctx), K.INDEX_UNDERUSE)


def test_missing_foreign_key_needs_context(workload):
    statements, ctx = workload("questionnaire.sql")
    (finding,) = _active(detect_all(statements, ctx), K.NO_FOREIGN_KEY)
    assert (finding.location.table, finding.location.column) == ("Questionnaire", "Tenant_ID")
    assert finding.details["parent_table"] == "Tenant"
    assert finding.details["parent_column"] == "Tenant_ID"
    assert finding.phase is Phase.INTER_QUERY

    statements, ctx = workload("questionnaire.sql", config=BuildConfig(inter_query=False))
    assert not _active(detect_all(statements, ctx), K.NO_FOREIGN_KEY)


def test_declared_foreign_key_silences_rule(parse_sql):
    _, findings = _detect(
        parse_sql,
        "CREATE TABLE Tenant (Tenant_ID INTEGER PRIMARY KEY);"
        "CREATE TABLE Questionnaire (Questionnaire_ID UUID PRIMARY KEY, "
        "Tenant_ID INTEGER REFERENCES Tenant(Tenant_ID));"
        "SELECT * FROM Questionnaire q JOIN Tenant t ON t.Tenant_ID = q.Tenant_ID;",
    )
    assert not _active(findings, K.NO_FOREIGN_KEY)


def test_enumerated_check_constraint(workload):
    statements, ctx = workload("user_roles.sql")
    (finding,) = _active(detect_all(statements, ctx), K.ENUMERATED_TYPES)
    assert (finding.location.table, finding.location.column) == ("User", "ROLE")
    assert finding.details["values"] == ["R1", "R2", "R3"]
    assert finding.details["constraint"] == "User_Role_Check"


def test_pattern_lookups_on_list_column(workload):
    statements, ctx = workload("user_lists.sql")
    findings = detect_all(statements, ctx)
    for stmt in statements[2:]:
        kinds = {f.kind for f in findings if f.location.statement == stmt.source_id and f.active}
        assert {K.MULTI_VALUED_ATTRIBUTE, K.COLUMN_WILDCARD_USAGE, K.PATTERN_MATCHING} <= kinds
    mva = _active(findings, K.MULTI_VALUED_ATTRIBUTE)
    assert {(f.location.table, f.location.column) for f in mva} == {("Tenants", "User_IDs")}


def test_key_column_concatenation_is_suppressed(workload):
    statements, ctx = workload("user_lists.sql")
    findings = detect_all(statements, ctx)
    concat = [f for f in findings if f.kind is K.CONCATENATE_NULLS]
    assert concat and all(not f.active for f in concat)
    assert all("suppressed_because" in f.details for f in concat)


def test_list_lookup_on_numeric_column_is_suppressed(parse_sql):
    sql = "CREATE TABLE t (id INT PRIMARY KEY, tag_ids INTEGER); SELECT id FROM t WHERE tag_ids LIKE '%,5,%';"
    _, findings = _detect(parse_sql, sql)
    (mva,) = [f for f in findings if f.kind is K.MULTI_VALUED_ATTRIBUTE]
    assert not mva.active
    assert mva.context_ref

    _, findings = _detect(parse_sql, sql, BuildConfig(inter_query=False))
    assert _active(findings, K.MULTI_VALUED_ATTRIBUTE)


def test_detect_inter_reviews_then_adds(workload):
    statements, ctx = workload("user_lists.sql")
    stmt = statements[3]
    intra = detect_intra(stmt)
    reviewed = detect_inter(stmt, ctx, intra)
    assert [f.kind for f in reviewed[: len(intra)]] == [f.kind for f in intra]
    assert any(not f.active for f in reviewed)
    assert all(f.active for f in intra)


@pytest.mark.parametrize(
    "sql, kind",
    [
        ("SELECT a FROM t ORDER BY RAND() LIMIT 1", K.ORDERING_BY_RAND),
        ("SELECT DISTINCT a.x FROM a JOIN b ON a.id = b.a_id", K.DISTINCT_AND_JOIN),
        ("SELECT first_name || last_name FROM people", K.CONCATENATE_NULLS),
        ("SELECT * FROM t WHERE name LIKE '%son'", K.PATTERN_MATCHING),
        ("INSERT INTO Users VALUES (1, 'foo')", K.IMPLICIT_COLUMNS),
        (
            "SELECT * FROM a JOIN b ON a.x = b.x JOIN c ON b.x = c.x JOIN d ON c.x = d.x "
            "JOIN e ON d.x = e.x JOIN f ON e.x = f.x",
            K.TOO_MANY_JOINS,
        ),
        ("CREATE TABLE prices (id INT PRIMARY KEY, amount FLOAT)", K.ROUNDING_ERRORS),
        ("CREATE TABLE bugs (id INT PRIMARY KEY, title TEXT)", K.GENERIC_PRIMARY_KEY),
        ("CREATE TABLE docs (doc_id INT PRIMARY KEY, file_path VARCHAR(200))", K.EXTERNAL_DATA_STORAGE),
        (
            "CREATE TABLE wide (" + ", ".join(f"c{chr(97 + i)} INT" for i in range(10)) + ")",
            K.GOD_TABLE,
        ),
    ],
)
def test_intra_rules(sql, kind):
    findings = detect_intra(parse(RawStatement(sql, "q:1:1")))
    assert kind in {f.kind for f in findings}
    assert all(f.phase is Phase.INTRA_QUERY for f in findings)


def test_anchored_like_is_not_pattern_matching():
    findings = detect_intra(parse(RawStatement("SELECT a FROM t WHERE name LIKE 'Sm%'", "q:1:1")))
    assert K.PATTERN_MATCHING not in {f.kind for f in findings}


@pytest.mark.parametrize(
    "sql, kind",
    [
        ("CREATE TABLE log (msg TEXT);", K.NO_PRIMARY_KEY),
        (
            "CREATE TABLE node (node_id INT PRIMARY KEY, parent_id INT REFERENCES node(node_id));",
            K.ADJACENCY_LIST,
        ),
        ("CREATE TABLE bugs (bug_id INT PRIMARY KEY, tag1 TEXT, tag2 TEXT, tag3 TEXT);", K.DATA_IN_METADATA),
        (
            "CREATE TABLE sales_2023 (sale_id INT PRIMARY KEY); CREATE TABLE sales_2024 (sale_id INT PRIMARY KEY);",
            K.CLONE_TABLE,
        ),
    ],
)
def test_schema_rules(parse_sql, sql, kind):
    _, findings = _detect(parse_sql, sql)
    assert len(_active(findings, kind)) == 1


def test_bounded_name_without_data(parse_sql):
    _, findings = _detect(parse_sql, "CREATE TABLE reviews (review_id INT PRIMARY KEY, rating INT);")
    (finding,) = _active(findings, K.NO_DOMAIN_CONSTRAINT)
    assert finding.details["heuristic"] == "column-name"
    assert finding.phase is Phase.DATA


def test_detection_order_is_deterministic(workload):
    statements, ctx = workload("user_lists.sql", "questionnaire.sql")
    first = [f.identity() for f in detect_all(statements, ctx)]
    parallel = build_context(statements, None, BuildConfig(workers=4))
    assert [f.identity() for f in detect_all(statements, parallel)] == first
