from typing import Any, Callable

from src.shared.errors import IHCalcError, get_error_category
from src.shared.logger import setup_logger

logger = setup_logger(__name__)


class StageRunner:
    """Runs the named steps of one engine run.

    Steps are pure computations, so there is nothing to retry: a failing step
    is logged with its category and re-raised with the stratum attached.
    """

    def __init__(self, run_name: str):
        self.run_name = run_name
        self.completed_steps: list[str] = []

    def execute(
        self,
        step_name: str,
        handler_func: Callable,
        *args,
        stratum: int | None = None,
        **kwargs
    ) -> Any:
        label = step_name if stratum is None else f"{step_name} [A_{stratum}]"
        logger.info(f"{self.run_name}: executing {label}")

        try:
            result = handler_func(*args, **kwargs)
        except IHCalcError as e:
            e.with_context(stratum=stratum)
            error_category = get_error_category(e)
            logger.error(f"Step {label} failed: {error_category} - {str(e)[:200]}")
            raise

        self.completed_steps.append(label)
        logger.debug(f"{self.run_name}: {label} completed")
        return result
