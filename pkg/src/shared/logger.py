import logging
import sys
from pathlib import Path
from datetime import datetime

from src.shared.errors import UsageError
from src.shared.settings import EngineSettings, get_settings


def _settings() -> EngineSettings:
    # Bad settings are reported by the command that reads them; logging keeps the defaults
    try:
        return get_settings()
    except UsageError:
        return EngineSettings()


def setup_logger(
    name: str,
    level=None,
    log_to_file: bool | None = None,
    log_dir: str | None = None,
    console_format: str = '%(levelname)s - %(message)s',
    file_format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
):
    settings = _settings()
    if level is None:
        level = logging.getLevelName(settings.log_level)
        if not isinstance(level, int):
            level = logging.INFO
    if log_to_file is None:
        log_to_file = settings.log_to_file
    if log_dir is None:
        log_dir = settings.log_dir

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    # Console handler; stdout is reserved for reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(console_format))
    logger.addHandler(console_handler)

    if log_to_file:
        try:
            log_path = Path(log_dir)
            log_path.mkdir(parents=True, exist_ok=True)

            timestamp = datetime.now().strftime('%Y%m%d')
            log_file = log_path / f"{name.replace('.', '_')}_{timestamp}.log"

            file_handler = logging.FileHandler(log_file, encoding='utf-8')
            file_handler.setLevel(level)
            file_handler.setFormatter(logging.Formatter(file_format))
            logger.addHandler(file_handler)

            logger.debug(f"Logging to file: {log_file}")

        except Exception as e:
            logger.warning(f"Failed to setup file logging: {e}")

    return logger


def setup_run_logger(
    run_name: str,
    execution_id: str = None,
    level=None
):
    """Logger for one CLI invocation, announced with a banner."""
    if not execution_id:
        execution_id = datetime.now().strftime('%Y%m%d_%H%M%S')

    settings = _settings()
    logger = setup_logger(
        name=f"ihcalc.{run_name}",
        level=level,
        log_dir=f"{settings.log_dir}/{run_name}",
        console_format='%(asctime)s - %(levelname)s - %(message)s',
        file_format='%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
    )

    logger.info("=" * 60)
    logger.info(f"Starting run: {run_name}")
    logger.info(f"Execution ID: {execution_id}")
    logger.info("=" * 60)

    return logger
