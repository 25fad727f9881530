from sql_assistant.repair.engine import apply_plans, fix, textual_fix
from sql_assistant.repair.models import RepairPlan, RepairRule, StatementTransformation, TransformOp
from sql_assistant.repair.rules import REPAIR_RULES

__all__ = [
    "REPAIR_RULES",
    "RepairPlan",
    "RepairRule",
    "StatementTransformation",
    "TransformOp",
    "apply_plans",
    "fix",
    "textual_fix",
]
