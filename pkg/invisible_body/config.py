from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # App
    PROJECT_NAME: str = "Invisible Body Kernel"
    VERSION: str = "1.0.0"

    # Sweeps: size of the process pool, 1 keeps tracing in-process
    WORKERS: int = Field(1, ge=1)

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    class Config:
        env_file = ".env"
        env_prefix = "INVIS_"
        case_sensitive = True


settings = Settings()
