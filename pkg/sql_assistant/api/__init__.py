from sql_assistant.api.service import create_app, handle_check

__all__ = ["create_app", "handle_check"]
