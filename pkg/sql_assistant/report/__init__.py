from sql_assistant.report.reporter import FORMATS, emit_report, report_dict, summarize

__all__ = ["FORMATS", "emit_report", "report_dict", "summarize"]
