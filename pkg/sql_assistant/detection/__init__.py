from sql_assistant.detection.catalog import CATALOG, AntiPatternKind, Category, DaDirection, ImpactFlags, parse_kind
from sql_assistant.detection.engine import detect_all, detect_inter, detect_intra
from sql_assistant.detection.models import Finding, Location, Phase
from sql_assistant.detection.registry import DetectionRule, all_rules, register_rule, rules_for_query

__all__ = [
    "CATALOG",
    "AntiPatternKind",
    "Category",
    "DaDirection",
    "DetectionRule",
    "Finding",
    "ImpactFlags",
    "Location",
    "Phase",
    "all_rules",
    "detect_all",
    "detect_inter",
    "detect_intra",
    "parse_kind",
    "register_rule",
    "rules_for_query",
]
