# Standard Library Imports
import re
from collections import Counter
from typing import Mapping, Optional

# Third-Party Imports
import pandas as pd

# Local Application Imports
from sql_assistant.context.models import BuildConfig, ColumnProfile, ValueClass
from sql_assistant.etl.dataset_adapter import DatasetAdapter
from sql_assistant.logger import GLOBAL_LOGGER as log

LIST_DELIMITERS = (",", ";", "|")
MAX_LIST_TOKEN = 32

_INTEGER = re.compile(r"^[+-]?\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")
_BOOLEAN_WORDS = frozenset({"true", "false", "t", "f", "yes", "no"})
_TZ_SUFFIX = r"(Z|[+-]\d{2}(:?\d{2})?)"
_ISO_DATETIME = re.compile(
    r"^\d{4}-\d{2}-\d{2}(?P<time>[ T]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(?P<tz>\s?" + _TZ_SUFFIX + r")?)?$"
)
_SLASH_DATETIME = re.compile(r"^\d{1,2}/\d{1,2}/\d{4}(?P<time>\s+\d{1,2}:\d{2}(:\d{2})?)?$")
_TZ_DECLARED = re.compile(r"WITH\s+TIME\s+ZONE|TIMESTAMPTZ|TIMETZ", re.IGNORECASE)


def classify_value(value: str) -> ValueClass:
    """Value class of a single non-null cell."""
    text = value.strip()
    if _INTEGER.match(text):
        return ValueClass.INTEGER
    if _DECIMAL.match(text):
        return ValueClass.DECIMAL
    if text.lower() in _BOOLEAN_WORDS:
        return ValueClass.BOOLEAN
    if _ISO_DATETIME.match(text) or _SLASH_DATETIME.match(text):
        return ValueClass.DATETIME
    return ValueClass.TEXT


def is_delimited_list(value: str) -> bool:
    """True when ``value`` splits on one delimiter into >= 2 short, space-free tokens."""
    for delimiter in LIST_DELIMITERS:
        if delimiter not in value:
            continue
        parts = [part.strip() for part in value.split(delimiter)]
        if len(parts) >= 2 and all(0 < len(p) <= MAX_LIST_TOKEN and not re.search(r"\s", p) for p in parts):
            return True
    return False


def _time_parts(value: str) -> tuple[bool, bool]:
    """(has time of day, carries a zone) for a datetime-looking value."""
    text = value.strip()
    match = _ISO_DATETIME.match(text)
    if match:
        return match.group("time") is not None, match.group("tz") is not None
    match = _SLASH_DATETIME.match(text)
    if match:
        return match.group("time") is not None, False
    return False, False


def _infer_class(fractions: Mapping[ValueClass, float], threshold: float) -> ValueClass:
    if not fractions:
        return ValueClass.TEXT
    best, share = max(fractions.items(), key=lambda item: (item[1], -list(ValueClass).index(item[0])))
    if share >= threshold:
        return best
    if fractions.get(ValueClass.INTEGER, 0.0) + fractions.get(ValueClass.DECIMAL, 0.0) >= threshold:
        return ValueClass.DECIMAL
    return ValueClass.MIXED


def profile_column(
    table: str,
    column: str,
    values: list[Optional[str]],
    config: BuildConfig,
    declared_type: Optional[str] = None,
) -> ColumnProfile:
    """
    Compute the profile of one column from its sampled cells.

    Args:
        table (str): Owning table.
        column (str): Column name.
        values (list[Optional[str]]): Sampled cells, ``None`` for NULL.
        config (BuildConfig): Supplies the class-inference threshold.
        declared_type (Optional[str]): Declared SQL type, when known.

    Returns:
        ColumnProfile: Statistics over exactly the given cells.
    """
    rows = len(values)
    present = [str(v) for v in values if v is not None and not pd.isna(v)]
    counts = Counter(present)
    non_null = len(present)

    classes = Counter(classify_value(v) for v in present)
    fractions = {cls: n / non_null for cls, n in classes.items()} if non_null else {}
    inferred = _infer_class(fractions, config.incorrect_type_fraction)

    time_flags = [_time_parts(v) for v in present if classify_value(v) is ValueClass.DATETIME]
    with_time = [zone for has_time, zone in time_flags if has_time]
    if _TZ_DECLARED.search(declared_type or ""):
        tz_annotated = True
    else:
        tz_annotated = bool(with_time) and all(with_time)

    numbers = [float(v) for v in present if classify_value(v) in (ValueClass.INTEGER, ValueClass.DECIMAL)]

    return ColumnProfile(
        table=table,
        column=column,
        row_count_sampled=rows,
        non_null_count=non_null,
        distinct_count=len(counts),
        null_fraction=(rows - non_null) / rows if rows else 0.0,
        inferred_value_class=inferred,
        delimiter_list_fraction=sum(1 for v in present if is_delimited_list(v)) / non_null if non_null else 0.0,
        constant_fraction=counts.most_common(1)[0][1] / non_null if non_null else 0.0,
        timezone_annotated=tz_annotated,
        has_time_component=bool(with_time),
        class_fractions={cls.value: share for cls, share in fractions.items()},
        numeric_min=min(numbers) if numbers else None,
        numeric_max=max(numbers) if numbers else None,
        declared_type=declared_type,
        sample=tuple(None if v is None or pd.isna(v) else str(v) for v in values),
    )


def profile_table(
    adapter: DatasetAdapter,
    table: str,
    config: BuildConfig,
    declared_types: Optional[Mapping[str, Optional[str]]] = None,
) -> dict[str, ColumnProfile]:
    """
    Sample a table and profile every column.

    Up to ``config.sample_size`` rows are read, first-N or seeded per
    ``config.seed``; smaller tables are read in full.

    Args:
        adapter (DatasetAdapter): Open dataset.
        table (str): Table to profile.
        config (BuildConfig): Sampling and threshold settings.
        declared_types (Optional[Mapping]): Column -> declared type overrides (DDL wins over the adapter).

    Returns:
        dict[str, ColumnProfile]: Profiles keyed by column name, in column order.

    Raises:
        DatasetError: If the adapter cannot read the table.
    """
    columns = adapter.table_columns(table)
    frame = adapter.sample_rows(table, config.sample_size, config.seed)
    declared = {k.lower(): v for k, v in (declared_types or {}).items()}

    profiles: dict[str, ColumnProfile] = {}
    for name, adapter_type in columns:
        if name in frame.columns:
            cells = [None if pd.isna(v) else v for v in frame[name].tolist()]
        else:
            cells = [None] * len(frame)
        declared_type = declared.get(name.lower()) or adapter_type
        profiles[name] = profile_column(table, name, cells, config, declared_type)

    log.info("Profiled table", table=table, rows=len(frame), columns=len(profiles))
    return profiles
