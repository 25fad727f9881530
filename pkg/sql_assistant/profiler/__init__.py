from sql_assistant.profiler.data_profiler import classify_value, is_delimited_list, profile_column, profile_table
from sql_assistant.profiler.data_rules import data_rules

__all__ = ["classify_value", "data_rules", "is_delimited_list", "profile_column", "profile_table"]
