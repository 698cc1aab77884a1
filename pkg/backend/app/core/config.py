from pydantic_settings import BaseSettings
from typing import List


class Settings(BaseSettings):
    # API Configuration
    PROJECT_NAME: str = "Planar Map Arboreal Toolkit"
    VERSION: str = "1.0.0"
    API_V1_STR: str = "/api/v1"

    LOG_LEVEL: str = "INFO"

    # Enumeration caps
    DEGREE_CAP: int = 12
    MAX_KEPT_WORD_LENGTH: int = 16
    KIRCHHOFF_MAX_K: int = 7
    BKAR_MAX_K: int = 5
    BKAR_MAX_DEGREE: int = 6

    # Finite-N symbolic guard
    GHASTLY_MAX_N: int = 2
    GHASTLY_MAX_POINTS: int = 4
    GHASTLY_MAX_VERTICES: int = 3

    # Sweeps
    WORKERS: int = 1

    # Monte-Carlo
    DEFAULT_SEED: int = 20240229
    MC_GRID: List[int] = [25, 50, 100]
    MC_SAMPLES: int = 10000
    JACKKNIFE_BLOCKS: int = 50
    MC_BATCH: int = 200

    class Config:
        env_file = ".env"
        env_prefix = "PLANARMAP_"


settings = Settings()
