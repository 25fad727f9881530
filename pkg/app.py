import uvicorn

from sql_assistant.api.service import create_app
from sql_assistant.utils.settings_loader import SettingsLoader

settings = SettingsLoader().load()
app = create_app(settings)


def main():
    uvicorn.run(app, host=settings.server.get("host", "127.0.0.1"), port=int(settings.server.get("port", 8080)))


if __name__ == "__main__":
    main()
