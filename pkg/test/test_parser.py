import pytest

from sql_assistant.exception.custom_exception import RenderError
from sql_assistant.parser import (
    ClauseRole,
    ConstraintKind,
    OperandKind,
    RawStatement,
    Span,
    StatementKind,
    TokenType,
    apply_edits,
    parse,
    render,
    split_statements,
    tokenize,
)


def _one(sql: str):
    return parse(RawStatement(sql, "q:1:1"))


def test_split_assigns_position_ids():
    statements = split_statements("SELECT 1;\n  SELECT 2;\n", "app.sql")
    assert [s.source_id for s in statements] == ["app.sql:1:1", "app.sql:2:3"]
    assert [s.text for s in statements] == ["SELECT 1", "SELECT 2"]
    assert [s.ordinal for s in statements] == [0, 1]


def test_split_ignores_semicolons_in_literals_and_comments():
    corpus = "INSERT INTO t VALUES ('a;b'); -- c;d\nSELECT 1 /* ; */ FROM t;"
    statements = split_statements(corpus)
    assert len(statements) == 2
    assert statements[0].text == "INSERT INTO t VALUES ('a;b')"
    assert statements[1].text.startswith("-- c;d")
    assert statements[1].source_id == "<input>:2:1"


def test_split_drops_empty_chunks_and_trailing_comments():
    assert split_statements("  ;; \n") == []
    assert len(split_statements("SELECT 1;;\n-- the end\n")) == 1


def test_split_keeps_unterminated_literal_as_one_statement():
    statements = split_statements("SELECT 'abc; SELECT 2")
    assert len(statements) == 1


@pytest.mark.parametrize(
    "text",
    [
        "SELECT * FROM t WHERE a = 'x' -- trailing\n",
        "CREATE TABLE t (a INT /* c */, b VARCHAR(3))",
        "SELECT $$body; with ; semicolons$$, \"Quoted Name\" FROM [t]",
        "SELECT 'unterminated",
        "",
        "éè \t\r\n ???",
    ],
)
def test_tokens_reproduce_input(text):
    assert "".join(t.text for t in tokenize(text)) == text


def test_user_and_role_are_identifiers():
    types = {t.text: t.type for t in tokenize("SELECT ROLE FROM User WHERE Active = TRUE")}
    assert types["ROLE"] is TokenType.IDENTIFIER
    assert types["User"] is TokenType.IDENTIFIER
    assert types["SELECT"] is TokenType.KEYWORD
    assert types["TRUE"] is TokenType.LITERAL


@pytest.mark.parametrize(
    "sql, kind",
    [
        ("SELECT 1", StatementKind.SELECT),
        ("WITH x AS (SELECT 1) SELECT * FROM x", StatementKind.SELECT),
        ("INSERT INTO t VALUES (1)", StatementKind.INSERT),
        ("UPDATE t SET a = 1", StatementKind.UPDATE),
        ("DELETE FROM t WHERE a = 1", StatementKind.DELETE),
        ("CREATE TABLE t (a INT)", StatementKind.CREATE_TABLE),
        ("ALTER TABLE t ADD b INT", StatementKind.ALTER_TABLE),
        ("CREATE UNIQUE INDEX i ON t (a)", StatementKind.CREATE_INDEX),
        ("DROP TABLE t", StatementKind.DROP),
        ("GRANT ALL ON t TO bob", StatementKind.OTHER),
    ],
)
def test_statement_kinds(sql, kind):
    assert _one(sql).kind is kind


def test_create_table_collects_columns_and_constraints():
    stmt = _one(
        "CREATE TABLE Questionnaire (Questionnaire_ID UUID PRIMARY KEY, Tenant_ID INTEGER NOT NULL, "
        "Name VARCHAR(30), FOREIGN KEY (Tenant_ID) REFERENCES Tenant(Tenant_ID))"
    )
    assert stmt.target_table == "Questionnaire"
    assert [(c.name, c.declared_type, c.nullable) for c in stmt.column_defs] == [
        ("Questionnaire_ID", "UUID", False),
        ("Tenant_ID", "INTEGER", False),
        ("Name", "VARCHAR(30)", True),
    ]
    kinds = {c.kind for c in stmt.constraints}
    assert {ConstraintKind.PRIMARY_KEY, ConstraintKind.FOREIGN_KEY} <= kinds
    fk = next(c for c in stmt.constraints if c.kind is ConstraintKind.FOREIGN_KEY)
    assert fk.columns == ("Tenant_ID",)
    assert fk.target == ("Tenant", "Tenant_ID")


def test_alter_table_check_constraint():
    stmt = _one("ALTER TABLE User ADD CONSTRAINT User_Role_Check CHECK (ROLE IN ('R1', 'R2', 'R3'))")
    assert stmt.kind is StatementKind.ALTER_TABLE
    assert stmt.target_table == "User"
    check = next(c for c in stmt.constraints if c.kind is ConstraintKind.CHECK)
    assert check.name == "User_Role_Check"
    assert "ROLE IN" in check.expression_text


def test_insert_without_column_list():
    stmt = _one("INSERT INTO Tenant VALUES ('T1','Z1',True,'U1,U2')")
    assert stmt.target_table == "Tenant"
    assert not stmt.spans(ClauseRole.COLUMN_LIST)
    assert stmt.spans(ClauseRole.VALUES)


def test_join_aliases_and_pattern_predicate():
    stmt = _one(
        "SELECT * FROM Tenants AS t JOIN Users AS u "
        "ON t.User_IDs LIKE '[[:<:]]'||u.User_ID||'[[:>:]]' WHERE t.Tenant_ID = 'T1'"
    )
    assert stmt.tables_referenced == ("Tenants", "Users")
    assert stmt.aliases["t"] == "Tenants"
    assert stmt.join_count == 1
    assert stmt.has_wildcard_projection
    like = next(p for p in stmt.predicates if p.op == "LIKE")
    assert like.clause is ClauseRole.JOINS
    assert like.left.column.key == ("tenants", "user_ids")
    assert like.right.kind is OperandKind.EXPRESSION
    where = next(p for p in stmt.predicates if p.clause is ClauseRole.WHERE)
    assert where.is_selective
    assert stmt.concatenations


def test_create_index_without_table():
    stmt = _one("CREATE INDEX idx_zone_actv (Zone_ID, Active)")
    assert stmt.kind is StatementKind.CREATE_INDEX
    (index,) = stmt.index_defs
    assert index.name == "idx_zone_actv"
    assert index.table is None
    assert index.columns == ("Zone_ID", "Active")


@pytest.mark.parametrize(
    "sql",
    ["SELECT FROM WHERE (", "CREATE TABLE (", "ALTER TABLE", "INSERT INTO", ")))(((", "SELECT 'open"],
)
def test_parse_never_raises(sql):
    stmt = _one(sql)
    assert stmt.text == sql


def test_render_round_trips_and_edits_reparse():
    stmt = _one("SELECT * FROM Tenant WHERE Zone_ID = 'Z1'")
    assert render(stmt) == stmt.text
    (projection,) = stmt.items(ClauseRole.PROJECTION)
    fixed = apply_edits(stmt, [(projection, "Tenant_ID, Zone_ID")])
    assert fixed.text == "SELECT Tenant_ID, Zone_ID FROM Tenant WHERE Zone_ID = 'Z1'"
    assert fixed.source_id == stmt.source_id
    assert not fixed.has_wildcard_projection


def test_overlapping_edits_are_rejected():
    stmt = _one("SELECT a, b FROM t")
    with pytest.raises(RenderError):
        apply_edits(stmt, [(Span(0, 3), "x"), (Span(2, 4), "y")])
