import json

import pytest
from click.testing import CliRunner

from sql_assistant.cli import EXIT_CLEAN, EXIT_ERROR, EXIT_FINDINGS, cli


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def sql_file(tmp_path, read_fixture):
    path = tmp_path / "ranking.sql"
    path.write_text(read_fixture("ranking.sql"), encoding="utf-8")
    return path


def test_clean_sql_exits_zero(runner, tmp_path):
    path = tmp_path / "clean.sql"
    path.write_text("SELECT a FROM t;\n", encoding="utf-8")
    result = runner.invoke(cli, ["check", str(path), "--format", "json"])
    assert result.exit_code == EXIT_CLEAN
    assert json.loads(result.stdout)["summary"]["total"] == 0


def test_findings_exit_one(runner, sql_file):
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json"])
    assert result.exit_code == EXIT_FINDINGS
    report = json.loads(result.stdout)
    assert [f["kind"] for f in report["findings"]] == ["index_underuse", "enumerated_types"]


@pytest.mark.parametrize("preset, top", [("C1", "index_underuse"), ("C2", "enumerated_types")])
def test_preset_decides_default_order(runner, sql_file, preset, top):
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json", "--preset", preset])
    report = json.loads(result.stdout)
    assert report["config"]["preset"] == preset
    assert report["findings"][0]["kind"] == top


def test_preset_and_mode_change_order(runner, sql_file):
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json", "--preset", "C1", "--inter-query", "score"])
    assert json.loads(result.stdout)["findings"][0]["kind"] == "index_underuse"
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json", "--preset", "C2", "--inter-query", "score"])
    assert json.loads(result.stdout)["findings"][0]["kind"] == "enumerated_types"


@pytest.mark.parametrize(
    "args, message",
    [
        (["missing.sql"], "SQL source not found"),
        (["{sql}", "--preset", "C9"], "unknown ranking preset"),
        (["{sql}", "--fail-on", "spaghetti"], "spaghetti"),
    ],
)
def test_usage_errors_exit_two(runner, sql_file, args, message):
    args = [a.format(sql=sql_file) for a in args]
    result = runner.invoke(cli, ["check", *args])
    assert result.exit_code == EXIT_ERROR
    assert result.stderr.startswith("Error: ")
    assert message in result.stderr


def test_fail_on_filters_categories(runner, sql_file):
    result = runner.invoke(cli, ["check", str(sql_file), "--fail-on", "query,data"])
    assert result.exit_code == EXIT_CLEAN
    result = runner.invoke(cli, ["check", str(sql_file), "--fail-on", "Index Underuse"])
    assert result.exit_code == EXIT_FINDINGS


def test_output_file(runner, sql_file, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json", "-o", str(out)])
    assert result.exit_code == EXIT_FINDINGS
    assert result.stdout == ""
    assert json.loads(out.read_text(encoding="utf-8"))["statements"] == 5


def test_json_output_is_reproducible(runner, sql_file):
    first = runner.invoke(cli, ["check", str(sql_file), "--format", "json"]).stdout_bytes
    second = runner.invoke(cli, ["check", str(sql_file), "--format", "json"]).stdout_bytes
    assert first == second


def test_reads_stdin(runner):
    result = runner.invoke(cli, ["check", "-", "--format", "json"], input="INSERT INTO Users VALUES (1, 'foo');")
    assert result.exit_code == EXIT_FINDINGS
    (finding,) = json.loads(result.stdout)["findings"]
    assert finding["kind"] == "implicit_columns"
    assert finding["location"]["statement"] == "<stdin>:1:1"


def test_directory_sources_are_sorted(runner, tmp_path, read_fixture):
    (tmp_path / "b.sql").write_text("SELECT Tenant_ID FROM Tenant WHERE Zone_ID = 'Z2';", encoding="utf-8")
    (tmp_path / "a.sql").write_text(read_fixture("ranking.sql"), encoding="utf-8")
    result = runner.invoke(cli, ["check", str(tmp_path), "--format", "json"])
    assert json.loads(result.stdout)["statements"] == 6


def test_unreadable_dataset_degrades_to_ddl(runner, sql_file, tmp_path):
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json", "--data", str(tmp_path / "nope.db")])
    assert result.exit_code == EXIT_FINDINGS
    warnings = json.loads(result.stdout)["warnings"]
    assert any("nope.db" in w for w in warnings)


def test_dataset_adds_data_findings(runner, seeded_db, tmp_path):
    path = tmp_path / "empty.sql"
    path.write_text("-- schema comes from the data\n", encoding="utf-8")
    result = runner.invoke(cli, ["check", str(path), "--format", "json", "--data", str(seeded_db)])
    summary = json.loads(result.stdout)["summary"]
    assert summary["by_category"]["data"] == 6
    assert result.exit_code == EXIT_FINDINGS


def test_thresholds_file(runner, sql_file, tmp_path):
    overrides = tmp_path / "thresholds.yaml"
    overrides.write_text("index_use_min: 3\n", encoding="utf-8")
    result = runner.invoke(cli, ["check", str(sql_file), "--format", "json", "--thresholds", str(overrides)])
    kinds = [f["kind"] for f in json.loads(result.stdout)["findings"]]
    assert kinds == ["enumerated_types"]
    overrides.write_text("god_table_threshold: 3\nbogus: 1\n", encoding="utf-8")
    result = runner.invoke(cli, ["check", str(sql_file), "--thresholds", str(overrides)])
    assert result.exit_code == EXIT_ERROR
