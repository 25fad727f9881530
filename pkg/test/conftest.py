import sqlite3
from pathlib import Path

import pytest

from sql_assistant.context.builder import build_context
from sql_assistant.context.models import BuildConfig
from sql_assistant.parser.annotator import parse
from sql_assistant.parser.splitter import split_statements
from sql_assistant.utils.settings_loader import SettingsLoader

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(*names: str) -> str:
    return "\n".join((FIXTURES / name).read_text(encoding="utf-8") for name in names)


def parse_all(sql: str, origin: str = "test") -> list:
    return [parse(raw) for raw in split_statements(sql, origin)]


@pytest.fixture
def read_fixture():
    return fixture_text


@pytest.fixture
def parse_sql():
    return parse_all


@pytest.fixture(scope="session")
def loader() -> SettingsLoader:
    return SettingsLoader()


@pytest.fixture(scope="session")
def settings(loader):
    return loader.load()


@pytest.fixture
def workload():
    """Parse fixture files into one workload and build its context."""

    def build(*names: str, dataset=None, config: BuildConfig | None = None):
        statements = parse_all(fixture_text(*names))
        return statements, build_context(statements, dataset, config or BuildConfig())

    return build


# rows per table in the seeded dataset; below the enumerated-type row minimum
DATASET_ROWS = 40


def _seeded_tables() -> dict[str, tuple[list[tuple[str, str]], list[tuple]]]:
    n = DATASET_ROWS
    names = {0: "Alice", 1: "Bob", 2: "Carol"}
    return {
        "tenants": (
            [("tenant_id", "INTEGER"), ("user_ids", "TEXT")],
            [(i + 1, f"U{i},U{i + 1}") for i in range(n)],
        ),
        "events": (
            [("event_id", "INTEGER"), ("created_at", "TEXT")],
            [(i + 1, f"2024-01-{1 + i % 28:02d} {i % 24:02d}:{i:02d}:00") for i in range(n)],
        ),
        "products": (
            [("product_id", "INTEGER"), ("price", "TEXT")],
            [(i + 1, f"{10 + i}.5") for i in range(n)],
        ),
        "orders": (
            [("order_id", "INTEGER"), ("customer_code", "TEXT"), ("customer_name", "TEXT")],
            [(i + 1, f"C{i % 3}", names[i % 3]) for i in range(n)],
        ),
        "people": (
            [("person_id", "INTEGER"), ("birth_date", "TEXT"), ("birth_year", "INTEGER")],
            [(i + 1, f"{1950 + i}-05-17", 1950 + i) for i in range(n)],
        ),
        "settings": (
            [("setting_id", "INTEGER"), ("legacy_flag", "TEXT"), ("name", "TEXT")],
            [(i + 1, None, f"setting_{i}") for i in range(n)],
        ),
        "reviews": (
            [("review_id", "INTEGER"), ("stars", "INTEGER"), ("comment", "TEXT")],
            [(i + 1, 1 + i % 5, f"review {i}") for i in range(n)],
        ),
    }


@pytest.fixture
def seeded_db(tmp_path) -> Path:
    """SQLite file with one table per data anti-pattern."""
    path = tmp_path / "app.db"
    conn = sqlite3.connect(path)
    for table, (columns, rows) in _seeded_tables().items():
        conn.execute(f"CREATE TABLE {table} ({', '.join(f'{c} {t}' for c, t in columns)})")
        marks = ", ".join("?" for _ in columns)
        conn.executemany(f"INSERT INTO {table} VALUES ({marks})", rows)
    conn.commit()
    conn.close()
    return path


@pytest.fixture
def seeded_csv(tmp_path) -> Path:
    """The seeded tables as a directory of CSV files."""
    import pandas as pd

    directory = tmp_path / "csv"
    directory.mkdir()
    for table, (columns, rows) in _seeded_tables().items():
        frame = pd.DataFrame(rows, columns=[c for c, _ in columns])
        frame.to_csv(directory / f"{table}.csv", index=False)
    return directory
