import os
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.shared.errors import UsageError

load_dotenv()

ENV_NAMES = {
    "log_level": "IHCALC_LOG_LEVEL",
    "log_to_file": "IHCALC_LOG_TO_FILE",
    "log_dir": "IHCALC_LOG_DIR",
    "max_workers": "IHCALC_MAX_WORKERS",
}


def _env_flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).lower() in ['true', '1', 'yes']


class EngineSettings(BaseModel):
    """Diagnostics settings. None of these change report content."""
    log_level: str = "INFO"
    log_to_file: bool = False
    log_dir: str = "logs"
    max_workers: int = Field(default=4, ge=1)

    @classmethod
    def from_env(cls) -> "EngineSettings":
        # Read every setting from environment, falling back to the defaults above
        try:
            return cls(
                log_level=os.getenv('IHCALC_LOG_LEVEL', 'INFO').upper(),
                log_to_file=_env_flag('IHCALC_LOG_TO_FILE'),
                log_dir=os.getenv('IHCALC_LOG_DIR', 'logs'),
                max_workers=os.getenv('IHCALC_MAX_WORKERS', '4'),
            )
        except ValidationError as e:
            problems = [
                f"{ENV_NAMES.get(str(error['loc'][0]), error['loc'][0])}: {error['msg']}"
                for error in e.errors()
            ]
            raise UsageError("invalid settings: " + "; ".join(problems))


def get_settings() -> EngineSettings:
    return EngineSettings.from_env()
