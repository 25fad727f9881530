from sql_assistant.workflow.pipeline import AnalysisResult, find_anti_patterns, run_analysis

__version__ = "0.1.0"

__all__ = ["AnalysisResult", "__version__", "find_anti_patterns", "run_analysis"]
