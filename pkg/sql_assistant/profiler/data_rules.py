"""Rules evaluated over sampled column data rather than query text."""

from __future__ import annotations

import re
from itertools import combinations, permutations
from typing import Callable, Iterable, Optional

from sql_assistant.context.models import (
    NUMERIC_CLASSES,
    ApplicationContext,
    ColumnProfile,
    ValueClass,
    is_textual,
    type_family,
)
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.detection.models import Finding, Location, Phase
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.parser.models import canonical
from sql_assistant.profiler.data_profiler import is_delimited_list

K = AntiPatternKind

MIN_RELATION_ROWS = 5
DOMAIN_BOUNDS = (1.0, 5.0, 10.0, 100.0)
_BOUNDED_NAME = re.compile(
    r"^(rating|score|percent|percentage|pct|age|grade|stars)$|_(rating|score|percent|pct|age|grade)$",
    re.IGNORECASE,
)
_CONCAT_SEPARATORS = ("", " ", ",", ", ", "-", "_", "/")


def _finding(
    ctx: ApplicationContext,
    kind: AntiPatternKind,
    table: str,
    column: Optional[str],
    evidence: str,
    **details,
) -> Finding:
    return Finding(
        kind=kind,
        location=Location(table=table, column=column),
        evidence=evidence,
        phase=Phase.DATA,
        context_ref=ctx.fingerprint,
        details=details,
    )


def _example(profile: ColumnProfile, predicate: Callable[[str], bool] = lambda v: True) -> str:
    return next((v for v in profile.sample if v is not None and predicate(v)), "")


def _by_table(ctx: ApplicationContext) -> dict[str, list[ColumnProfile]]:
    tables: dict[str, list[ColumnProfile]] = {}
    for profile in ctx.profiles.values():
        tables.setdefault(profile.table, []).append(profile)
    return tables


def _is_text(profile: ColumnProfile) -> bool:
    if profile.declared_type and type_family(profile.declared_type) is not None:
        return is_textual(profile.declared_type)
    return profile.inferred_value_class in (ValueClass.TEXT, ValueClass.MIXED)


def _is_mva(profile: ColumnProfile, ctx: ApplicationContext) -> bool:
    return _is_text(profile) and profile.non_null_count > 0 and (
        profile.delimiter_list_fraction >= ctx.build_config.mva_fraction
    )


# ---------- single-column rules ----------

def _multi_valued(ctx, profile):
    if not _is_mva(profile, ctx):
        return None
    return _finding(
        ctx, K.MULTI_VALUED_ATTRIBUTE, profile.table, profile.column,
        f"{profile.delimiter_list_fraction:.0%} of sampled values in {profile.table}.{profile.column} "
        f"are delimiter-separated lists (e.g. {_example(profile, is_delimited_list)!r})",
        delimiter_list_fraction=profile.delimiter_list_fraction,
    )


def _enumerated(ctx, profile):
    cfg = ctx.build_config
    schema = ctx.schema(profile.table)
    if not _is_text(profile) or profile.inferred_value_class is not ValueClass.TEXT:
        return None
    if not (2 <= profile.distinct_count <= cfg.enum_distinct_max and profile.row_count_sampled >= cfg.enum_min_rows):
        return None
    if _is_mva(profile, ctx) or ctx.is_key_like(profile.table, profile.column):
        return None
    if schema and (schema.foreign_key_on(profile.column) or schema.has_check_on(profile.column)):
        return None
    values = sorted({v for v in profile.sample if v is not None})
    return _finding(
        ctx, K.ENUMERATED_TYPES, profile.table, profile.column,
        f"{profile.table}.{profile.column} holds only {profile.distinct_count} distinct values over "
        f"{profile.row_count_sampled} sampled rows: {', '.join(values)}",
        values=values,
    )


def _missing_timezone(ctx, profile):
    if profile.inferred_value_class is not ValueClass.DATETIME:
        return None
    if not profile.has_time_component or profile.timezone_annotated:
        return None
    return _finding(
        ctx, K.MISSING_TIMEZONE, profile.table, profile.column,
        f"{profile.table}.{profile.column} stores timestamps without a zone offset "
        f"(e.g. {_example(profile)!r})",
    )


def _incorrect_type(ctx, profile):
    if not profile.non_null_count or not is_textual(profile.declared_type):
        return None
    if profile.numeric_fraction < ctx.build_config.incorrect_type_fraction:
        return None
    return _finding(
        ctx, K.INCORRECT_DATA_TYPE, profile.table, profile.column,
        f"{profile.table}.{profile.column} is declared {profile.declared_type} but "
        f"{profile.numeric_fraction:.0%} of sampled values are numeric",
        declared_type=profile.declared_type,
        inferred=profile.inferred_value_class.value,
    )


def _redundant(ctx, profile):
    if not profile.row_count_sampled or ctx.is_key_like(profile.table, profile.column):
        return None
    if profile.null_fraction == 1.0:
        reason = "is NULL in every sampled row"
    elif profile.row_count_sampled >= 2 and profile.distinct_count == 1 and profile.constant_fraction == 1.0:
        reason = f"holds the single value {_example(profile)!r} in every sampled row"
    else:
        return None
    return _finding(ctx, K.REDUNDANT_COLUMN, profile.table, profile.column, f"{profile.table}.{profile.column} {reason}")


def _domain(ctx, profile):
    schema = ctx.schema(profile.table)
    if profile.inferred_value_class not in NUMERIC_CLASSES or ctx.is_key_like(profile.table, profile.column):
        return None
    if schema and (schema.has_check_on(profile.column) or schema.foreign_key_on(profile.column)):
        return None
    if profile.distinct_count < 2 or profile.duplication_ratio < ctx.build_config.denormalized_duplication:
        return None
    low, high = profile.numeric_min, profile.numeric_max
    if low is None or high is None or low < 0:
        return None
    bound = next((b for b in DOMAIN_BOUNDS if high <= b), None)
    if bound is None:
        return None
    return _finding(
        ctx, K.NO_DOMAIN_CONSTRAINT, profile.table, profile.column,
        f"every sampled value of {profile.table}.{profile.column} lies in [0, {bound:g}] "
        f"but no CHECK constraint restricts the range",
        low=low,
        high=high,
    )


COLUMN_RULES = (_multi_valued, _enumerated, _missing_timezone, _incorrect_type, _redundant, _domain)


# ---------- column-pair rules ----------

def _aligned(a: ColumnProfile, b: ColumnProfile) -> list[tuple[Optional[str], Optional[str]]]:
    return list(zip(a.sample, b.sample))


def _bijective(pairs: list[tuple[Optional[str], Optional[str]]]) -> bool:
    forward: dict[str, str] = {}
    backward: dict[str, str] = {}
    for x, y in pairs:
        if (x is None) != (y is None):
            return False
        if x is None:
            continue
        if forward.setdefault(x, y) != y or backward.setdefault(y, x) != x:
            return False
    return True


def _denormalized(ctx: ApplicationContext, table: str, profiles: list[ColumnProfile]) -> Iterable[Finding]:
    threshold = ctx.build_config.denormalized_duplication
    candidates = [
        p for p in profiles
        if p.distinct_count >= 2
        and p.duplication_ratio >= threshold
        and not ctx.is_key_like(table, p.column)
    ]
    for a, b in combinations(candidates, 2):
        if a.distinct_count == b.distinct_count and _bijective(_aligned(a, b)):
            yield _finding(
                ctx, K.DENORMALIZED_TABLE, table, a.column,
                f"{table}.{a.column} and {table}.{b.column} determine each other on every sampled row "
                f"and repeat ({a.duplication_ratio:.0%} duplication); move them to their own table",
                paired_with=b.column,
            )


def _year(value: str) -> Optional[int]:
    match = re.match(r"^(\d{4})-\d{2}-\d{2}", value.strip())
    if match:
        return int(match.group(1))
    match = re.match(r"^\d{1,2}/\d{1,2}/(\d{4})", value.strip())
    return int(match.group(1)) if match else None


def _as_int(value: str) -> Optional[int]:
    try:
        return int(value.strip())
    except ValueError:
        return None


def _derived_by(source: ColumnProfile, target: ColumnProfile) -> Optional[str]:
    """Name of the transform mapping ``source`` onto ``target``, if one holds on every row."""
    pairs = [(x, y) for x, y in _aligned(source, target) if x is not None or y is not None]
    if len(pairs) < MIN_RELATION_ROWS or any(x is None or y is None for x, y in pairs):
        return None
    years = [_year(x) for x, _ in pairs]
    numbers = [_as_int(y) for _, y in pairs]
    if None not in numbers:
        if None not in years:
            if all(y == n for y, n in zip(years, numbers)):
                return "year"
            if len({y + n for y, n in zip(years, numbers)}) == 1:
                return "age"
        if source.inferred_value_class is ValueClass.TEXT and all(len(x) == n for (x, _), n in zip(pairs, numbers)):
            return "length"
    return None


def _concatenated(first: ColumnProfile, second: ColumnProfile, target: ColumnProfile) -> Optional[str]:
    rows = list(zip(first.sample, second.sample, target.sample))
    if len(rows) < MIN_RELATION_ROWS or any(v is None for row in rows for v in row):
        return None
    for separator in _CONCAT_SEPARATORS:
        if all(a + separator + b == c for a, b, c in rows):
            return separator
    return None


def _information_duplication(ctx: ApplicationContext, table: str, profiles: list[ColumnProfile]) -> Iterable[Finding]:
    candidates = [p for p in profiles if p.distinct_count >= 2 and not ctx.is_key_like(table, p.column)]
    derived: set[str] = set()
    for source, target in permutations(candidates, 2):
        if canonical(target.column) in derived:
            continue
        transform = _derived_by(source, target)
        if transform:
            derived.add(canonical(target.column))
            yield _finding(
                ctx, K.INFORMATION_DUPLICATION, table, target.column,
                f"{table}.{target.column} equals {transform}({table}.{source.column}) on all "
                f"{target.row_count_sampled} sampled rows",
                source=source.column,
                transform=transform,
            )
    textual = [p for p in candidates if p.inferred_value_class is ValueClass.TEXT]
    for target in textual:
        if canonical(target.column) in derived:
            continue
        for first, second in permutations([p for p in candidates if p is not target], 2):
            separator = _concatenated(first, second, target)
            if separator is not None:
                derived.add(canonical(target.column))
                yield _finding(
                    ctx, K.INFORMATION_DUPLICATION, table, target.column,
                    f"{table}.{target.column} is the concatenation of {first.column} and {second.column} "
                    f"on all {target.row_count_sampled} sampled rows",
                    source=[first.column, second.column],
                    transform="concatenation",
                    separator=separator,
                )
                break


def _bounded_names(ctx: ApplicationContext) -> Iterable[Finding]:
    """Schema-level check for columns whose name implies a range, when no sample exists."""
    for schema in ctx.schemas.values():
        for column in schema.columns:
            if ctx.profile(schema.name, column.name) is not None or not _BOUNDED_NAME.search(column.name):
                continue
            family = type_family(column.declared_type)
            if family is not None and family not in NUMERIC_CLASSES:
                continue
            if schema.has_check_on(column.name) or schema.foreign_key_on(column.name):
                continue
            yield _finding(
                ctx, K.NO_DOMAIN_CONSTRAINT, schema.name, column.name,
                f"{schema.name}.{column.name} is named like a bounded quantity but no CHECK constraint "
                f"restricts its range (name heuristic)",
                heuristic="column-name",
            )


def data_rules(ctx: ApplicationContext) -> list[Finding]:
    """
    Run every data rule over the context's column profiles.

    Tables are visited in profiling order and columns in declaration order;
    the column-name heuristic for range constraints runs last over DDL schemas.
    """
    findings: list[Finding] = []
    for table, profiles in _by_table(ctx).items():
        for profile in profiles:
            for rule in COLUMN_RULES:
                finding = rule(ctx, profile)
                if finding is not None:
                    findings.append(finding)
        findings.extend(_denormalized(ctx, table, profiles))
        findings.extend(_information_duplication(ctx, table, profiles))
    findings.extend(_bounded_names(ctx))
    log.info("Data rules evaluated", tables=len(_by_table(ctx)), findings=len(findings))
    return findings
