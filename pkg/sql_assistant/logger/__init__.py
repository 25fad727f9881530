from sql_assistant.logger.custom_logger import CustomLogger

GLOBAL_LOGGER = CustomLogger().get_logger("sql_sense")

__all__ = ["CustomLogger", "GLOBAL_LOGGER"]
