from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

PACKAGE_DIR = Path(__file__).resolve().parent


class BaseConfig(BaseSettings):
    ENV_STATE: Optional[str] = None
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


class GlobalConfig(BaseConfig):
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "."
    LOG_FILE: str = "vqcfd-api.log"

    OUTPUT_DIR: str = "out"
    DATA_DIR: str = str(PACKAGE_DIR / "data")
    DEFAULT_SEED: int = 20240601

    # statevectors hold 2**MAX_QUBITS amplitudes
    MAX_QUBITS: int = 14

    model_config = SettingsConfigDict(env_prefix="")

    @property
    def tables_dir(self) -> Path:
        return Path(self.DATA_DIR) / "tables"

    @property
    def hardware_dir(self) -> Path:
        return Path(self.DATA_DIR) / "hardware"


class DevConfig(GlobalConfig):
    LOG_LEVEL: str = "DEBUG"


class TestConfig(GlobalConfig):
    LOG_DIR: str = "/tmp"
    OUTPUT_DIR: str = "/tmp/vqcfd-test-out"


@lru_cache()
def get_config(env_state: str):
    match env_state:
        case "test":
            return TestConfig()
        case "dev":
            return DevConfig()
        case _:
            return GlobalConfig()


config = get_config(BaseConfig().ENV_STATE)
