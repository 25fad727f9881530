import random
import sqlite3
from collections import Counter

import pytest

from sql_assistant.context import BuildConfig, ValueClass, build_context
from sql_assistant.detection import AntiPatternKind as K, Category, Phase, detect_all
from sql_assistant.etl.dataset_adapter import CsvDirectoryAdapter, SQLiteDatasetAdapter, open_dataset
from sql_assistant.exception.custom_exception import DatasetError
from sql_assistant.profiler import classify_value, is_delimited_list, profile_column, profile_table

EXPECTED_DATA_FINDINGS = {
    (K.MULTI_VALUED_ATTRIBUTE, "tenants", "user_ids"),
    (K.MISSING_TIMEZONE, "events", "created_at"),
    (K.INCORRECT_DATA_TYPE, "products", "price"),
    (K.DENORMALIZED_TABLE, "orders", "customer_code"),
    (K.INFORMATION_DUPLICATION, "people", "birth_year"),
    (K.REDUNDANT_COLUMN, "settings", "legacy_flag"),
    (K.NO_DOMAIN_CONSTRAINT, "reviews", "stars"),
}


def _data_findings(adapter, config=None):
    ctx = build_context([], adapter, config or BuildConfig())
    return ctx, [f for f in detect_all([], ctx) if f.phase is Phase.DATA]


@pytest.mark.parametrize(
    "value, expected",
    [
        ("42", ValueClass.INTEGER),
        ("-3.5e2", ValueClass.DECIMAL),
        ("true", ValueClass.BOOLEAN),
        ("2024-01-05", ValueClass.DATETIME),
        ("2024-01-05T10:00:00+02:00", ValueClass.DATETIME),
        ("5/17/1999 10:00", ValueClass.DATETIME),
        ("U1,U2", ValueClass.TEXT),
    ],
)
def test_classify_value(value, expected):
    assert classify_value(value) is expected


def test_delimited_lists():
    assert is_delimited_list("U1,U2")
    assert is_delimited_list("a;b;c")
    assert not is_delimited_list("Smith, John Q")
    assert not is_delimited_list("plain")
    assert not is_delimited_list("a,")


def test_profile_column_statistics():
    values = ["a", "a", "b", None, "2024-01-01 10:00:00"]
    profile = profile_column("t", "c", values, BuildConfig(), "VARCHAR(10)")
    assert profile.row_count_sampled == 5
    assert profile.non_null_count == 4
    assert profile.distinct_count == 3
    assert profile.null_fraction == pytest.approx(0.2)
    assert profile.constant_fraction == pytest.approx(0.5)
    assert profile.inferred_value_class is ValueClass.MIXED
    assert profile.has_time_component and not profile.timezone_annotated


def test_declared_zone_type_counts_as_annotated():
    profile = profile_column("t", "at", ["2024-01-01 10:00:00"], BuildConfig(), "TIMESTAMP WITH TIME ZONE")
    assert profile.timezone_annotated


def test_empty_column_profile():
    profile = profile_column("t", "c", [], BuildConfig())
    assert profile.row_count_sampled == profile.distinct_count == 0
    assert profile.null_fraction == 0.0


def test_each_data_anti_pattern_detected_once(seeded_db):
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        ctx, findings = _data_findings(adapter)
    found = Counter((f.kind, f.location.table, f.location.column) for f in findings)
    assert set(found) == EXPECTED_DATA_FINDINGS
    assert all(n == 1 for n in found.values())
    data_kinds = {f.kind for f in findings if f.category is Category.DATA}
    assert len(data_kinds) == 6
    assert all(f.context_ref == ctx.fingerprint and f.location.statement is None for f in findings)


def test_finding_details(seeded_db):
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        _, findings = _data_findings(adapter)
    by_kind = {f.kind: f for f in findings}
    assert by_kind[K.DENORMALIZED_TABLE].details["paired_with"] == "customer_name"
    assert by_kind[K.INFORMATION_DUPLICATION].details["source"] == "birth_date"
    assert by_kind[K.INFORMATION_DUPLICATION].details["transform"] == "year"
    assert by_kind[K.NO_DOMAIN_CONSTRAINT].details["high"] == 5.0
    assert by_kind[K.MULTI_VALUED_ATTRIBUTE].details["delimiter_list_fraction"] == 1.0


def test_list_query_confirmed_by_data(seeded_db, parse_sql):
    statements = parse_sql(
        "SELECT tenant_id FROM tenants WHERE user_ids LIKE '%U3,%';"
        "SELECT event_id FROM events WHERE created_at LIKE '%2024,%';"
    )
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        ctx = build_context(statements, adapter, BuildConfig())
    findings = detect_all(statements, ctx)
    intra = [f for f in findings if f.kind is K.MULTI_VALUED_ATTRIBUTE and f.phase is Phase.INTRA_QUERY]
    by_table = {f.location.table: f for f in intra}
    assert by_table["tenants"].active
    assert not by_table["events"].active


def test_declared_check_silences_domain_rule(seeded_db, parse_sql):
    statements = parse_sql(
        "CREATE TABLE reviews (review_id INTEGER PRIMARY KEY, stars INTEGER CHECK (stars BETWEEN 1 AND 5), comment TEXT);"
    )
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        ctx = build_context(statements, adapter, BuildConfig())
    findings = detect_all(statements, ctx)
    assert not [f for f in findings if f.kind is K.NO_DOMAIN_CONSTRAINT]


def test_profiles_match_full_scan(seeded_db):
    conn = sqlite3.connect(seeded_db)
    config = BuildConfig()
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        for table in adapter.list_tables():
            profiles = profile_table(adapter, table, config)
            for column, profile in profiles.items():
                rows, non_null, distinct = conn.execute(
                    f"SELECT COUNT(*), COUNT({column}), COUNT(DISTINCT {column}) FROM {table}"
                ).fetchone()
                assert profile.row_count_sampled == rows
                assert profile.non_null_count == non_null
                assert profile.distinct_count == distinct
                assert profile.null_fraction == pytest.approx((rows - non_null) / rows)
    conn.close()


def test_seeded_sampling_is_reproducible(tmp_path):
    path = tmp_path / "big.db"
    rng = random.Random(11)
    conn = sqlite3.connect(path)
    conn.execute("CREATE TABLE t (v INTEGER)")
    conn.executemany("INSERT INTO t VALUES (?)", [(rng.randint(0, 10_000),) for _ in range(500)])
    conn.commit()
    conn.close()

    with SQLiteDatasetAdapter(path) as adapter:
        first_n = adapter.sample_rows("t", 50)
        seeded = adapter.sample_rows("t", 50, seed=7)
        again = adapter.sample_rows("t", 50, seed=7)
        full = adapter.sample_rows("t", 1000)
    assert len(first_n) == len(seeded) == 50
    assert first_n["v"].tolist() == full["v"].tolist()[:50]
    assert seeded["v"].tolist() == again["v"].tolist()
    assert len(full) == 500


def test_csv_dataset_matches_sqlite_without_declared_types(seeded_csv):
    with open_dataset(seeded_csv) as adapter:
        assert isinstance(adapter, CsvDirectoryAdapter)
        _, findings = _data_findings(adapter)
    found = {(f.kind, f.location.table, f.location.column) for f in findings}
    assert found == EXPECTED_DATA_FINDINGS - {(K.INCORRECT_DATA_TYPE, "products", "price")}


def test_parallel_profiling_is_deterministic(seeded_db):
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        _, serial = _data_findings(adapter)
    with SQLiteDatasetAdapter(seeded_db) as adapter:
        _, parallel = _data_findings(adapter, BuildConfig(workers=4))
    assert [f.identity() for f in parallel] == [f.identity() for f in serial]


def test_open_dataset_errors(tmp_path):
    with pytest.raises(DatasetError):
        open_dataset(tmp_path / "missing.db")
    not_sqlite = tmp_path / "notes.txt"
    not_sqlite.write_text("hello")
    with pytest.raises(DatasetError):
        open_dataset(not_sqlite)
