from dataclasses import dataclass, fields
from typing import Any, Mapping, Optional

from sql_assistant.context.models import BuildConfig
from sql_assistant.detection.catalog import AntiPatternKind
from sql_assistant.exception.custom_exception import ConfigError
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.ranking.ranker import ImpactVector, InterQueryMode, RankingConfig, load_metrics_table
from sql_assistant.utils.config_loader import config_dir, load_config, load_yaml

SAMPLING_KEYS = ("sample_size", "seed", "workers")


@dataclass(frozen=True)
class Settings:
    build_config: BuildConfig
    ranking_config: RankingConfig
    metrics_table: Mapping[AntiPatternKind, ImpactVector]
    server: Mapping[str, Any]

    @property
    def preset(self) -> Optional[str]:
        return self.ranking_config.preset


class SettingsLoader:
    """
    Assembles detection thresholds, ranking weights and the metrics table from
    the YAML configuration plus optional override files.
    """

    def __init__(self, config_path: Optional[str] = None):
        self.config = load_config(config_path)
        log.info("YAML config loaded", config_keys=list(self.config.keys()))

    def build_config(
        self,
        thresholds_file: Optional[str] = None,
        seed: Optional[int] = None,
        inter_query: bool = True,
        data_rules: bool = True,
        workers: Optional[int] = None,
    ) -> BuildConfig:
        values: dict[str, Any] = {}
        values.update(self.config.get("detection", {}))
        values.update({k: v for k, v in self.config.get("sampling", {}).items() if k in SAMPLING_KEYS})
        if thresholds_file:
            overrides = load_yaml(thresholds_file)
            allowed = set(BuildConfig.threshold_names()) | set(SAMPLING_KEYS)
            unknown = sorted(set(overrides) - allowed)
            if unknown:
                raise ConfigError(f"unknown threshold keys in {thresholds_file}: {', '.join(unknown)}")
            values.update(overrides)
            log.info("Threshold overrides applied", file=thresholds_file, keys=sorted(overrides))
        if seed is not None:
            values["seed"] = seed
        if workers is not None:
            values["workers"] = workers
        known = {f.name for f in fields(BuildConfig)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown detection settings: {', '.join(unknown)}")
        try:
            return BuildConfig(**values, inter_query=inter_query, data_rules=data_rules)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid detection settings: {e}", e) from e

    def ranking_config(
        self,
        preset: Optional[str] = None,
        weights_file: Optional[str] = None,
        inter_query_mode: Optional[str] = None,
    ) -> RankingConfig:
        ranking = self.config.get("ranking", {})
        mode = inter_query_mode or ranking.get("inter_query_mode", InterQueryMode.COUNT.value)
        try:
            mode = InterQueryMode(mode)
        except ValueError as e:
            raise ConfigError(f"unknown inter-query mode: {mode}", e) from e
        if weights_file:
            cfg = RankingConfig.from_weights(load_yaml(weights_file), mode, preset="custom")
        else:
            cfg = RankingConfig.from_preset(preset or ranking.get("default_preset", "C1"), mode, self.config)
        log.info("Ranking configured", preset=cfg.preset, mode=cfg.inter_query_mode.value, weights=cfg.weights())
        return cfg

    def metrics_table(self, metrics_file: Optional[str] = None) -> dict[AntiPatternKind, ImpactVector]:
        packaged = self.config.get("ranking", {}).get("metrics_file", "metrics.yaml")
        table = load_metrics_table(config_dir() / packaged)
        if metrics_file:
            overrides = load_metrics_table(metrics_file)
            table.update(overrides)
            log.info("Metrics overrides applied", file=metrics_file, kinds=sorted(k.value for k in overrides))
        return table

    def load(
        self,
        preset: Optional[str] = None,
        weights_file: Optional[str] = None,
        metrics_file: Optional[str] = None,
        thresholds_file: Optional[str] = None,
        inter_query_mode: Optional[str] = None,
        seed: Optional[int] = None,
        inter_query: bool = True,
        data_rules: bool = True,
        workers: Optional[int] = None,
    ) -> Settings:
        return Settings(
            build_config=self.build_config(thresholds_file, seed, inter_query, data_rules, workers),
            ranking_config=self.ranking_config(preset, weights_file, inter_query_mode),
            metrics_table=self.metrics_table(metrics_file),
            server=dict(self.config.get("server", {})),
        )
