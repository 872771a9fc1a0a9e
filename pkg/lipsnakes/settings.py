from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    ENV: str = "dev"
    LOG_LEVEL: str = "INFO"

    # numeric oracle
    TOLERANCE: float = 0.05
    T_GRID: list[float] = [1e-2, 1e-3, 1e-4, 1e-5]
    NUMERIC_FLOOR: float = 1e-300
    NE_SAMPLES: int = 33

    DEFAULT_FORMAT: str = "text"

settings = Settings()
