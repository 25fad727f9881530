"""Impact scoring and ordering of findings.

Each finding is scored from its kind's impact vector: every metric is squashed
into [0, 1] by its normalizer and the normalized terms are combined with the
configured weights. Findings are then ordered inside each statement by score
and statements are ordered against each other by finding count (ties by score sum)
or by score sum alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from sql_assistant.detection.catalog import AntiPatternKind, parse_kind
from sql_assistant.detection.models import Finding
from sql_assistant.exception.custom_exception import ConfigError, DomainError, MissingMetricsError
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.utils.config_loader import config_dir, load_config, load_yaml

METRICS = ("rp", "wp", "m", "da", "di", "a")
BINARY_METRICS = frozenset({"di", "a"})
# metric -> value at which its normalized term saturates to 1
SATURATION = {"rp": 5.0, "wp": 5.0, "m": 5.0, "da": 8.0}
WEIGHT_TOLERANCE = 1e-9


def normalize(metric: str, x: float) -> float:
    """
    Map a raw metric value onto [0, 1].

    ``rp``, ``wp`` and ``m`` saturate at 5, ``da`` at 8; ``di`` and ``a`` are
    binary and pass through.

    Raises:
        DomainError: negative input, a non-binary ``di``/``a``, or an unknown metric.
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric: {metric}")
    if x < 0:
        raise DomainError(f"{metric} must be non-negative, got {x}")
    if metric in BINARY_METRICS:
        if x not in (0, 1):
            raise DomainError(f"{metric} is binary, got {x}")
        return float(x)
    return min(1.0, x / SATURATION[metric])


@dataclass(frozen=True)
class ImpactVector:
    rp: float = 0.0
    wp: float = 0.0
    m: float = 0.0
    da: float = 0.0
    di: int = 0
    a: int = 0

    def __post_init__(self) -> None:
        for metric in METRICS:
            value = getattr(self, metric)
            if value < 0:
                raise DomainError(f"{metric} must be non-negative, got {value}")
            if metric in BINARY_METRICS and value not in (0, 1):
                raise DomainError(f"{metric} is binary, got {value}")

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "ImpactVector":
        unknown = set(values) - set(METRICS)
        if unknown:
            raise ConfigError(f"unknown impact metrics: {sorted(unknown)}")
        return cls(**{k: values[k] for k in METRICS if k in values})

    def as_dict(self) -> dict[str, float]:
        return {metric: getattr(self, metric) for metric in METRICS}


class InterQueryMode(str, Enum):
    COUNT = "count"
    SCORE = "score"


@dataclass(frozen=True)
class RankingConfig:
    w_rp: float
    w_wp: float
    w_m: float
    w_da: float
    w_di: float
    w_a: float
    inter_query_mode: InterQueryMode = InterQueryMode.COUNT
    preset: Optional[str] = None
    # named presets keep their published weights unless they sum above 1
    renormalize: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inter_query_mode", InterQueryMode(self.inter_query_mode))
        weights = self.weights()
        negative = [k for k, w in weights.items() if w < 0]
        if negative:
            raise ConfigError(f"weights must be non-negative: {negative}")
        total = sum(weights.values())
        if total <= 0:
            raise ConfigError("at least one weight must be positive")
        off = abs(total - 1.0) > WEIGHT_TOLERANCE if self.renormalize else total > 1.0 + WEIGHT_TOLERANCE
        if off:
            log.warning("Ranking weights renormalized", total=total, preset=self.preset)
            for metric, weight in weights.items():
                object.__setattr__(self, f"w_{metric}", weight / total)

    def weights(self) -> dict[str, float]:
        return {metric: getattr(self, f"w_{metric}") for metric in METRICS}

    @classmethod
    def from_weights(
        cls,
        weights: Mapping[str, float],
        mode: InterQueryMode | str = InterQueryMode.COUNT,
        preset: Optional[str] = None,
        renormalize: bool = True,
    ) -> "RankingConfig":
        """
        Build from a ``{w_rp: ..., ...}`` mapping; the ``w_`` prefix is optional.

        Weights that do not sum to 1 are rescaled with a warning. With
        ``renormalize=False`` they are kept as given unless the sum exceeds 1.
        """
        resolved = {}
        for key, value in weights.items():
            metric = key[2:] if key.startswith("w_") else key
            if metric not in METRICS:
                raise ConfigError(f"unknown weight: {key}")
            resolved[f"w_{metric}"] = float(value)
        missing = [f"w_{m}" for m in METRICS if f"w_{m}" not in resolved]
        if missing:
            raise ConfigError(f"missing weights: {missing}")
        return cls(**resolved, inter_query_mode=InterQueryMode(mode), preset=preset, renormalize=renormalize)

    @classmethod
    def from_preset(
        cls, name: str = "C1", mode: InterQueryMode | str | None = None, config: Optional[dict] = None
    ) -> "RankingConfig":
        ranking = (config if config is not None else load_config()).get("ranking", {})
        presets = ranking.get("presets", {})
        match = next((key for key in presets if key.lower() == name.lower()), None)
        if match is None:
            raise ConfigError(f"unknown ranking preset: {name} (known: {', '.join(presets)})")
        return cls.from_weights(
            presets[match], mode or ranking.get("inter_query_mode", "count"), preset=match, renormalize=False
        )


@dataclass(frozen=True)
class ScoreBreakdown:
    terms: Mapping[str, float]
    contributions: Mapping[str, float]
    total: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", MappingProxyType(dict(self.terms)))
        object.__setattr__(self, "contributions", MappingProxyType(dict(self.contributions)))

    def to_dict(self) -> dict[str, float]:
        data = {f"s_{metric}": value for metric, value in self.terms.items()}
        data.update({f"c_{metric}": value for metric, value in self.contributions.items()})
        data["total"] = self.total
        return data


def score(iv: ImpactVector, cfg: RankingConfig) -> ScoreBreakdown:
    terms = {metric: normalize(metric, getattr(iv, metric)) for metric in METRICS}
    weights = cfg.weights()
    contributions = {metric: weights[metric] * terms[metric] for metric in METRICS}
    total = 0.0
    for metric in METRICS:
        total += contributions[metric]
    return ScoreBreakdown(terms=terms, contributions=contributions, total=total)


@dataclass(frozen=True)
class RankedFinding:
    rank: int
    finding: Finding
    breakdown: ScoreBreakdown = field(compare=False)

    @property
    def score(self) -> float:
        return self.breakdown.total


def _group_key(finding: Finding) -> str:
    loc = finding.location
    return loc.statement if loc.statement is not None else f"table:{(loc.table or '').lower()}"


def rank(
    findings: Sequence[Finding],
    cfg: RankingConfig,
    metrics_table: Mapping[AntiPatternKind, ImpactVector],
    statement_order: Sequence[str] = (),
) -> list[RankedFinding]:
    """
    Order findings for the developer.

    Args:
        findings (Sequence[Finding]): Detected findings, in detection order.
        cfg (RankingConfig): Weights and the inter-query ordering mode.
        metrics_table (Mapping): Impact vector per anti-pattern kind.
        statement_order (Sequence[str]): Source ids in source order; statements not
            listed (and table-level data findings) follow in first-appearance order.

    Returns:
        list[RankedFinding]: Active findings first (statements by count then score, or score,
        findings inside a statement by descending score), then the suppressed ones.

    Raises:
        MissingMetricsError: a finding's kind has no impact vector.
    """
    missing = sorted({f.kind.value for f in findings if f.kind not in metrics_table})
    if missing:
        raise MissingMetricsError(f"no impact metrics for: {', '.join(missing)}")

    position = {sid: i for i, sid in enumerate(statement_order)}
    appearance: dict[str, int] = {}
    for finding in findings:
        appearance.setdefault(_group_key(finding), len(appearance))

    def source_position(group: str) -> tuple[int, int]:
        if group in position:
            return 0, position[group]
        return 1, appearance[group]

    scored = [(i, f, score(metrics_table[f.kind], cfg)) for i, f in enumerate(findings)]
    active = [item for item in scored if item[1].active]
    suppressed = [item for item in scored if not item[1].active]

    groups: dict[str, list] = {}
    for item in active:
        groups.setdefault(_group_key(item[1]), []).append(item)
    for members in groups.values():
        members.sort(key=lambda item: (-item[2].total, item[1].kind.order, item[0]))

    def group_rank(group: str) -> tuple:
        members = groups[group]
        score_sum = round(sum(item[2].total for item in members), 12)
        if cfg.inter_query_mode is InterQueryMode.SCORE:
            return -score_sum, source_position(group)
        # equal counts fall back to the score sum
        return -len(members), -score_sum, source_position(group)

    ordered = [item for group in sorted(groups, key=group_rank) for item in groups[group]]
    ordered += sorted(
        suppressed,
        key=lambda item: (source_position(_group_key(item[1])), -item[2].total, item[1].kind.order, item[0]),
    )
    ranked = [RankedFinding(rank=i + 1, finding=f, breakdown=b) for i, (_, f, b) in enumerate(ordered)]
    log.info(
        "Findings ranked",
        findings=len(ranked),
        statements=len(groups),
        preset=cfg.preset,
        mode=cfg.inter_query_mode.value,
    )
    return ranked


def load_metrics_table(path: Optional[str | Path] = None) -> dict[AntiPatternKind, ImpactVector]:
    """
    Read an impact metrics file (``kind: {rp: .., wp: .., ...}``).

    Without a path the packaged table is read. Kind names accept any spelling
    :func:`parse_kind` understands.
    """
    path = Path(path) if path is not None else config_dir() / "metrics.yaml"
    table: dict[AntiPatternKind, ImpactVector] = {}
    for name, values in load_yaml(path).items():
        try:
            kind = parse_kind(str(name))
        except ValueError as e:
            raise ConfigError(f"{path}: {e}", e) from e
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: metrics for {name} must be a mapping")
        try:
            table[kind] = ImpactVector.from_mapping(values)
        except DomainError as e:
            raise ConfigError(f"{path}: {name}: {e.error_message}", e) from e
    return table
