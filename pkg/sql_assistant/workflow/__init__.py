from sql_assistant.workflow.pipeline import AnalysisResult, find_anti_patterns, run_analysis

__all__ = ["AnalysisResult", "find_anti_patterns", "run_analysis"]
