from sql_assistant.ranking.ranker import (
    METRICS,
    ImpactVector,
    InterQueryMode,
    RankedFinding,
    RankingConfig,
    ScoreBreakdown,
    load_metrics_table,
    normalize,
    rank,
    score,
)

__all__ = [
    "METRICS",
    "ImpactVector",
    "InterQueryMode",
    "RankedFinding",
    "RankingConfig",
    "ScoreBreakdown",
    "load_metrics_table",
    "normalize",
    "rank",
    "score",
]
