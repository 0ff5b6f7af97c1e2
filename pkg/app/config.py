from pydantic_settings import BaseSettings

SCHEMA_VERSION = 1


class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"

    # Ensemble execution
    workers: int = 1
    joblib_backend: str = "loky"
    chunk_size: int = 25

    # Dispatch: largest commitment problem solved exactly by branch-and-bound
    exact_unit_limit: int = 12

    model_config = {"env_file": ".env", "env_file_encoding": "utf-8", "env_prefix": "GRIDSTORM_"}


settings = Settings()
