import pytest

from sql_assistant.context import build_context
from sql_assistant.detection import AntiPatternKind as K, Finding, Location, Phase, detect_all
from sql_assistant.etl.dataset_adapter import open_dataset
from sql_assistant.parser.renderer import reparse
from sql_assistant.repair import TransformOp, apply_plans, fix
from sql_assistant.workflow import run_analysis

TENANT_DDL = (
    "CREATE TABLE Tenant (Tenant_ID VARCHAR(30) PRIMARY KEY, Zone_ID VARCHAR(30), "
    "Active BOOLEAN, User_IDs VARCHAR(255));"
)


def _plans(result, kind):
    return [p for p in result.plans if p.finding.kind is kind]


def _reanalyse(result, kind, dataset=None):
    """Apply the plans of one kind and detect again on the rewritten workload."""
    applied = apply_plans(result.statements, _plans(result, kind))
    config = result.settings.build_config
    if dataset is None:
        ctx = build_context(applied, None, config)
    else:
        with open_dataset(dataset) as adapter:
            ctx = build_context(applied, adapter, config)
    return applied, [f for f in detect_all(applied, ctx) if f.kind is kind and f.active]


def test_every_finding_gets_a_plan(read_fixture, settings):
    sql = read_fixture("user_lists.sql", "ranking.sql")
    result = run_analysis([("app.sql", sql)], settings=settings)
    assert len(result.plans) == len(result.ranked)
    for ranked, plan in zip(result.ranked, result.plans):
        assert plan.rank == ranked.rank
        assert result.plan_for(ranked) is plan
        assert plan.mode in ("rewrite", "textual")
        if plan.mode == "textual":
            assert plan.textual_fix.strip()


def test_list_column_plan(read_fixture, settings):
    result = run_analysis([("lists.sql", read_fixture("user_lists.sql"))], settings=settings)
    first, second = [p for p in _plans(result, K.MULTI_VALUED_ATTRIBUTE) if p.finding.active]
    assert first.mode == "rewrite"
    created = [t for t in first.transformations if t.op is TransformOp.CREATE_NEW]
    assert [t.rendered for t in created] == [
        "CREATE TABLE Tenants_Users_xref (Tenant_ID VARCHAR(30) REFERENCES Tenants(Tenant_ID), "
        "User_ID VARCHAR(30) REFERENCES Users(User_ID), PRIMARY KEY (Tenant_ID, User_ID))",
        "ALTER TABLE Tenants DROP COLUMN User_IDs",
    ]
    assert [t.target for t in created] == [f"fix-{first.rank}-1", f"fix-{first.rank}-2"]

    rewrites = {t.target: t.rendered for t in first.transformations if t.op is TransformOp.REWRITE_EXISTING}
    ddl, lookup, join = (s.source_id for s in result.statements[1:])
    assert "User_IDs" not in rewrites[ddl] and rewrites[ddl].startswith("CREATE TABLE Tenants")
    assert rewrites[lookup].endswith(
        "SELECT * FROM Tenants_Users_xref AS H JOIN Tenants ON H.Tenant_ID = Tenants.Tenant_ID "
        "WHERE H.User_ID = 'U1'"
    )
    assert rewrites[join].endswith(
        "SELECT * FROM Tenants AS t JOIN Tenants_Users_xref AS H ON H.Tenant_ID = t.Tenant_ID "
        "JOIN Users AS u ON H.User_ID = u.User_ID WHERE t.Tenant_ID = 'T1'"
    )
    assert any("not migrated" in note for note in first.notes)
    assert first.conflicts_with

    assert second.mode == "textual"
    assert second.textual_fix.startswith(f"Resolved by fix #{first.rank}.")


def test_rendered_statements_parse_cleanly(read_fixture, settings):
    sql = read_fixture("user_lists.sql", "ranking.sql")
    result = run_analysis([("app.sql", sql)], settings=settings)
    rendered = [s for plan in result.plans for s in plan.statements]
    assert rendered
    for text in rendered:
        assert not reparse(text, "check").diagnostics, text


def test_insert_gets_column_list(settings):
    sql = TENANT_DDL + "INSERT INTO Tenant VALUES ('T1','Z1',True,'U1,U2');"
    result = run_analysis([("insert.sql", sql)], settings=settings)
    (plan,) = _plans(result, K.IMPLICIT_COLUMNS)
    assert plan.statements == [
        "INSERT INTO Tenant (Tenant_ID, Zone_ID, Active, User_IDs) VALUES ('T1','Z1',True,'U1,U2')"
    ]
    _, remaining = _reanalyse(result, K.IMPLICIT_COLUMNS)
    assert not remaining


def test_insert_with_wrong_width_falls_back_to_text(settings):
    sql = TENANT_DDL + "INSERT INTO Tenant VALUES ('T1','Z1');"
    (plan,) = _plans(run_analysis([("insert.sql", sql)], settings=settings), K.IMPLICIT_COLUMNS)
    assert plan.mode == "textual"
    assert "Tenant_ID, Zone_ID, Active, User_IDs" in plan.textual_fix


def test_wildcard_is_expanded(settings):
    sql = TENANT_DDL + "SELECT * FROM Tenant WHERE Zone_ID = 'Z1';"
    result = run_analysis([("star.sql", sql)], settings=settings)
    (plan,) = _plans(result, K.COLUMN_WILDCARD_USAGE)
    assert plan.statements == ["SELECT Tenant_ID, Zone_ID, Active, User_IDs FROM Tenant WHERE Zone_ID = 'Z1'"]
    _, remaining = _reanalyse(result, K.COLUMN_WILDCARD_USAGE)
    assert not remaining


def test_wildcard_without_schema_is_textual(settings):
    (plan,) = _plans(run_analysis([("q", "SELECT * FROM nowhere")], settings=settings), K.COLUMN_WILDCARD_USAGE)
    assert plan.mode == "textual"


def test_nullable_concatenation_gets_default(settings):
    result = run_analysis([("q", "SELECT 'Dr. ' || Name FROM People;")], settings=settings)
    (plan,) = _plans(result, K.CONCATENATE_NULLS)
    assert plan.statements == ["SELECT 'Dr. ' || COALESCE(Name, '') FROM People"]
    _, remaining = _reanalyse(result, K.CONCATENATE_NULLS)
    assert not remaining


def test_index_underuse_creates_index(read_fixture, settings):
    result = run_analysis([("ranking.sql", read_fixture("ranking.sql"))], settings=settings)
    (plan,) = _plans(result, K.INDEX_UNDERUSE)
    assert plan.statements == ["CREATE INDEX idx_tenant_zone_id ON Tenant (Zone_ID)"]
    applied, remaining = _reanalyse(result, K.INDEX_UNDERUSE)
    assert not remaining
    assert applied[-1].source_id == f"fix-{plan.rank}-1"


def test_enumerated_check_becomes_lookup_table(read_fixture, settings):
    result = run_analysis([("roles.sql", read_fixture("user_roles.sql"))], settings=settings)
    (plan,) = _plans(result, K.ENUMERATED_TYPES)
    assert plan.statements == [
        "CREATE TABLE ROLE_lookup (ROLE VARCHAR(64) PRIMARY KEY)",
        "INSERT INTO ROLE_lookup (ROLE) VALUES ('R1'), ('R2'), ('R3')",
        "ALTER TABLE User DROP CONSTRAINT IF EXISTS User_Role_Check",
        "ALTER TABLE User ADD FOREIGN KEY (ROLE) REFERENCES ROLE_lookup(ROLE)",
    ]


def test_enumerated_fix_is_idempotent(read_fixture, settings):
    result = run_analysis([("ranking.sql", read_fixture("ranking.sql"))], settings=settings)
    (plan,) = _plans(result, K.ENUMERATED_TYPES)
    assert plan.statements[0] == "CREATE TABLE Role_lookup (Role VARCHAR(10) PRIMARY KEY)"
    _, remaining = _reanalyse(result, K.ENUMERATED_TYPES)
    assert not remaining


def test_unnamed_check_gets_textual_fix(settings):
    sql = "CREATE TABLE Bug (bug_id INT PRIMARY KEY, status VARCHAR(10) CHECK (status IN ('NEW', 'FIXED')));"
    (plan,) = _plans(run_analysis([("bugs.sql", sql)], settings=settings), K.ENUMERATED_TYPES)
    assert plan.mode == "textual"
    assert "status_lookup" in plan.textual_fix


def test_list_column_fix_is_idempotent(read_fixture, settings):
    result = run_analysis([("lists.sql", read_fixture("user_lists.sql"))], settings=settings)
    applied, remaining = _reanalyse(result, K.MULTI_VALUED_ATTRIBUTE)
    assert not remaining
    assert len(applied) == len(result.statements) + 2


def test_missing_key_uses_unique_id_column(seeded_db, settings):
    sql = "CREATE TABLE events (event_id INTEGER, created_at TEXT);"
    result = run_analysis([("events.sql", sql)], dataset=seeded_db, settings=settings)
    (plan,) = _plans(result, K.NO_PRIMARY_KEY)
    assert plan.statements == ["ALTER TABLE events ADD PRIMARY KEY (event_id)"]
    _, remaining = _reanalyse(result, K.NO_PRIMARY_KEY, dataset=seeded_db)
    assert not remaining


def test_missing_key_without_data_is_textual(settings):
    (plan,) = _plans(run_analysis([("log.sql", "CREATE TABLE log (msg TEXT);")], settings=settings), K.NO_PRIMARY_KEY)
    assert plan.mode == "textual"
    assert "ALTER TABLE log ADD PRIMARY KEY" in plan.textual_fix


def test_suppressed_finding_is_explained(workload):
    statements, ctx = workload("user_lists.sql")
    findings = detect_all(statements, ctx)
    suppressed = [f for f in findings if not f.active]
    assert suppressed
    for plan in fix(suppressed, ctx):
        assert plan.mode == "textual"
        assert plan.notes and plan.notes[0].startswith("suppressed:")


@pytest.mark.parametrize("kind", [K.GOD_TABLE, K.NO_FOREIGN_KEY, K.INDEX_OVERUSE, K.REDUNDANT_COLUMN])
def test_textual_fixes_name_the_table(kind, workload):
    statements, ctx = workload("questionnaire.sql")
    finding = Finding(kind, Location(statement=statements[1].source_id, table="Questionnaire", column="Tenant_ID"),
                      "evidence", Phase.INTER_QUERY, context_ref=ctx.fingerprint)
    (plan,) = fix([finding], ctx)
    assert plan.mode == "textual"
    assert "Questionnaire" in plan.textual_fix
