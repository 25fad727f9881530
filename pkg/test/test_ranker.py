import random
from dataclasses import replace

import pytest

from sql_assistant.detection import AntiPatternKind as K, Finding, Location, Phase
from sql_assistant.exception.custom_exception import ConfigError, DomainError, MissingMetricsError
from sql_assistant.ranking import (
    METRICS,
    ImpactVector,
    InterQueryMode,
    RankingConfig,
    load_metrics_table,
    normalize,
    rank,
    score,
)
from sql_assistant.utils.config_loader import load_config
from sql_assistant.workflow import find_anti_patterns, run_analysis

INDEX_UNDERUSE = ImpactVector(rp=1.5)
ENUMERATED = ImpactVector(wp=10, m=2, da=1)


def _finding(kind, statement="q:1:1", active=True):
    finding = Finding(kind, Location(statement=statement, table="t"), "evidence", Phase.INTRA_QUERY)
    return finding if active else finding.suppressed("context says no", "ctx-1")


@pytest.fixture(scope="module")
def metrics():
    return load_metrics_table()


@pytest.mark.parametrize(
    "preset, iv, expected",
    [
        ("C1", INDEX_UNDERUSE, 0.21),
        ("C1", ENUMERATED, 0.175),
        ("C2", INDEX_UNDERUSE, 0.12),
        ("C2", ENUMERATED, 0.445),
    ],
)
def test_preset_scores(preset, iv, expected):
    assert score(iv, RankingConfig.from_preset(preset)).total == pytest.approx(expected, abs=1e-9)


def test_packaged_metrics_reproduce_scores(metrics):
    c1 = RankingConfig.from_preset("C1")
    assert metrics[K.INDEX_UNDERUSE] == INDEX_UNDERUSE
    assert metrics[K.ENUMERATED_TYPES] == ENUMERATED
    assert score(metrics[K.INDEX_UNDERUSE], c1).total == pytest.approx(0.21)
    assert len(metrics) == 26


@pytest.mark.parametrize(
    "metric, x, expected",
    [("rp", 1.5, 0.3), ("rp", 636, 1.0), ("wp", 0, 0.0), ("m", 2, 0.4), ("da", 1, 0.125), ("da", 16, 1.0), ("di", 1, 1.0)],
)
def test_normalize(metric, x, expected):
    assert normalize(metric, x) == pytest.approx(expected)


@pytest.mark.parametrize("metric, x", [("rp", -1), ("di", 0.5), ("a", 2), ("speed", 1)])
def test_normalize_rejects_out_of_domain(metric, x):
    with pytest.raises(DomainError):
        normalize(metric, x)


def test_impact_vector_domain():
    with pytest.raises(DomainError):
        ImpactVector(rp=-0.1)
    with pytest.raises(DomainError):
        ImpactVector(di=3)


def test_breakdown_sums_to_total():
    breakdown = score(ENUMERATED, RankingConfig.from_preset("C2"))
    assert sum(breakdown.contributions.values()) == pytest.approx(breakdown.total)
    as_dict = breakdown.to_dict()
    assert as_dict["s_wp"] == 1.0
    assert as_dict["c_wp"] == pytest.approx(0.4)
    assert not any(key.startswith("w_") for key in as_dict)


@pytest.mark.parametrize("preset", ["C1", "C2"])
def test_presets_keep_configured_weights(preset):
    configured = load_config()["ranking"]["presets"][preset]
    weights = RankingConfig.from_preset(preset).weights()
    assert weights == {metric: float(configured[f"w_{metric}"]) for metric in METRICS}
    assert sum(weights.values()) == pytest.approx(0.98)


def test_preset_above_one_is_renormalized():
    config = {"ranking": {"presets": {"heavy": {"w_rp": 1, "w_wp": 1, "w_m": 0, "w_da": 0, "w_di": 0, "w_a": 0}}}}
    cfg = RankingConfig.from_preset("heavy", config=config)
    assert cfg.w_rp == pytest.approx(0.5)
    assert score(ImpactVector(rp=5, wp=5), cfg).total == pytest.approx(1.0)


def test_weights_are_renormalized():
    cfg = RankingConfig.from_weights({"rp": 7, "wp": 1.5, "m": 0.5, "da": 0.4, "di": 0.3, "a": 0.3})
    assert sum(cfg.weights().values()) == pytest.approx(1.0)
    assert cfg.w_rp == pytest.approx(0.7)


@pytest.mark.parametrize(
    "weights",
    [
        {"w_rp": -1, "w_wp": 1, "w_m": 0, "w_da": 0, "w_di": 0, "w_a": 0},
        {"w_rp": 0, "w_wp": 0, "w_m": 0, "w_da": 0, "w_di": 0, "w_a": 0},
        {"w_rp": 1},
        {"w_rp": 1, "w_wp": 0, "w_m": 0, "w_da": 0, "w_di": 0, "w_a": 0, "w_speed": 1},
    ],
)
def test_bad_weights(weights):
    with pytest.raises(ConfigError):
        RankingConfig.from_weights(weights)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        RankingConfig.from_preset("C9")


def test_missing_metrics_raises():
    with pytest.raises(MissingMetricsError):
        rank([_finding(K.GOD_TABLE)], RankingConfig.from_preset("C1"), {K.INDEX_UNDERUSE: INDEX_UNDERUSE})


@pytest.mark.parametrize("preset, top", [("C1", K.INDEX_UNDERUSE), ("C2", K.ENUMERATED_TYPES)])
def test_preset_decides_order_within_statement(metrics, preset, top):
    findings = [_finding(K.ENUMERATED_TYPES), _finding(K.INDEX_UNDERUSE)]
    ranked = rank(findings, RankingConfig.from_preset(preset), metrics)
    assert [r.rank for r in ranked] == [1, 2]
    assert ranked[0].finding.kind is top


@pytest.mark.parametrize("preset, top", [("C1", K.INDEX_UNDERUSE), ("C2", K.ENUMERATED_TYPES)])
def test_preset_decides_order_across_workload(read_fixture, settings, preset, top):
    ranking = RankingConfig.from_preset(preset, InterQueryMode.SCORE)
    result = run_analysis([("ranking.sql", read_fixture("ranking.sql"))], settings=replace(settings, ranking_config=ranking))
    assert [r.finding.kind for r in result.active] == [top, ({K.INDEX_UNDERUSE, K.ENUMERATED_TYPES} - {top}).pop()]
    expected = {("C1", K.INDEX_UNDERUSE): 0.21, ("C1", K.ENUMERATED_TYPES): 0.175,
                ("C2", K.INDEX_UNDERUSE): 0.12, ("C2", K.ENUMERATED_TYPES): 0.445}
    for ranked in result.active:
        assert ranked.score == pytest.approx(expected[(preset, ranked.finding.kind)])


@pytest.mark.parametrize("preset, top", [("C1", K.INDEX_UNDERUSE), ("C2", K.ENUMERATED_TYPES)])
def test_preset_decides_order_with_default_settings(read_fixture, loader, preset, top):
    result = find_anti_patterns(read_fixture("ranking.sql"), settings=loader.load(preset=preset))
    assert result.settings.ranking_config.inter_query_mode is InterQueryMode.COUNT
    kinds = [r.finding.kind for r in result.active]
    assert kinds[0] is top
    assert sorted(kinds, key=lambda k: k.value) == [K.ENUMERATED_TYPES, K.INDEX_UNDERUSE]


@pytest.mark.parametrize("preset, first", [("C1", "b:1:1"), ("C2", "a:1:1")])
def test_count_ties_fall_back_to_score(metrics, preset, first):
    findings = [_finding(K.ENUMERATED_TYPES, "a:1:1"), _finding(K.INDEX_UNDERUSE, "b:1:1")]
    ranked = rank(findings, RankingConfig.from_preset(preset), metrics, ["a:1:1", "b:1:1"])
    assert ranked[0].finding.location.statement == first


def test_statements_ordered_by_finding_count(metrics):
    findings = [
        _finding(K.IMPLICIT_COLUMNS, "a:1:1"),
        _finding(K.IMPLICIT_COLUMNS, "b:1:1"),
        _finding(K.COLUMN_WILDCARD_USAGE, "b:1:1"),
        _finding(K.IMPLICIT_COLUMNS, "c:1:1"),
        _finding(K.COLUMN_WILDCARD_USAGE, "c:1:1"),
        _finding(K.PATTERN_MATCHING, "c:1:1"),
    ]
    ranked = rank(findings, RankingConfig.from_preset("C1"), metrics, ["a:1:1", "b:1:1", "c:1:1"])
    statements = [r.finding.location.statement for r in ranked]
    assert statements == ["c:1:1"] * 3 + ["b:1:1"] * 2 + ["a:1:1"]


def test_ties_follow_source_order(metrics):
    findings = [_finding(K.GOD_TABLE, "b:1:1"), _finding(K.GOD_TABLE, "a:1:1")]
    ranked = rank(findings, RankingConfig.from_preset("C1"), metrics, ["a:1:1", "b:1:1"])
    assert [r.finding.location.statement for r in ranked] == ["a:1:1", "b:1:1"]


def test_suppressed_findings_rank_last(metrics):
    findings = [_finding(K.MULTI_VALUED_ATTRIBUTE, active=False), _finding(K.IMPLICIT_COLUMNS, "z:9:9")]
    ranked = rank(findings, RankingConfig.from_preset("C1"), metrics)
    assert ranked[0].finding.kind is K.IMPLICIT_COLUMNS
    assert not ranked[-1].finding.active


def _reference_score(iv, weights):
    caps = {"rp": 5.0, "wp": 5.0, "m": 5.0, "da": 8.0}
    terms = {m: (min(1.0, getattr(iv, m) / caps[m]) if m in caps else float(getattr(iv, m))) for m in METRICS}
    total = sum(weights.values())
    return sum(weights[m] / total * terms[m] for m in METRICS)


def _random_vector(rng):
    return ImpactVector(
        rp=rng.uniform(0, 10), wp=rng.uniform(0, 10), m=rng.uniform(0, 10), da=rng.uniform(0, 16),
        di=rng.randint(0, 1), a=rng.randint(0, 1),
    )


def test_scores_bounded_and_match_reference():
    rng = random.Random(2024)
    for _ in range(1000):
        weights = {m: rng.uniform(0.01, 1.0) for m in METRICS}
        cfg = RankingConfig.from_weights(weights)
        iv = _random_vector(rng)
        total = score(iv, cfg).total
        assert 0.0 <= total <= 1.0 + 1e-12
        assert total == pytest.approx(_reference_score(iv, weights), abs=1e-9)


def test_weight_scaling_keeps_order():
    rng = random.Random(7)
    vectors = [_random_vector(rng) for _ in range(50)]
    weights = {m: rng.uniform(0.01, 1.0) for m in METRICS}
    base = RankingConfig.from_weights(weights)
    scaled = RankingConfig.from_weights({m: w * 37.5 for m, w in weights.items()})

    def order(cfg):
        return sorted(range(len(vectors)), key=lambda i: (-round(score(vectors[i], cfg).total, 9), i))

    assert order(base) == order(scaled)
