import sys

import fire
from fire.core import FireExit
from pydantic import BaseModel, ValidationError, model_validator
from rich.console import Console

from src.shared.errors import IHCalcError, OutOfRange, UsageError, exit_code_for_error, format_error_for_display
from src.shared.logger import setup_run_logger
from src.shared.settings import get_settings
from src.features.datasets.registry import load_registry
from src.features.datasets.report_writer import (
    serialize_defect,
    serialize_links,
    serialize_report,
    serialize_taut,
)
from src.features.decomposition.decomposition_engine import DecompositionEngine
from src.features.decomposition.handlers import StratificationHandler

COMMANDS = ("run", "links", "taut", "defect", "check")
FORMATS = ("text", "csv")
GENUS_LIMITS = {"taut": 20, "links": 12}

error_console = Console(stderr=True)


class CliConfig(BaseModel):
    """Validated flags of one invocation."""
    command: str
    genus: int | None = None
    data_dir: str | None = None
    format: str = "text"
    emit_constraints: bool = False

    @model_validator(mode="after")
    def _check(self) -> "CliConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command '{self.command}', expected one of {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise UsageError(f"--format must be text or csv, got '{self.format}'")
        if self.command != "check":
            if self.genus is None:
                raise UsageError(f"{self.command} needs --genus")
            if self.genus < 1:
                raise OutOfRange(f"genus must be at least 1, got {self.genus}")
            limit = GENUS_LIMITS.get(self.command)
            if limit is not None and self.genus > limit:
                raise OutOfRange(f"{self.command} supports genus up to {limit}, got {self.genus}")
        return self


class IHCalcCli:
    """Intersection cohomology of Satake compactifications, one ledger at a time.

    Commands:
        run     --genus N [--data DIR] [--format text|csv] [--emit-constraints]
        links   --genus N [--format text|csv]
        taut    --genus N [--format text|csv]
        defect  --genus N [--data DIR] [--format text|csv]
        check   [--data DIR] [--format text|csv]
    """

    def __init__(self):
        self.exit_code = 0

    def _emit(self, text: str) -> None:
        sys.stdout.write(text)

    def run(self, genus: int = None, data: str = None, format: str = "text", emit_constraints: bool = False):
        """Run the decomposition ledger for Sat_genus and print the report."""
        config = CliConfig(command="run", genus=genus, data_dir=data, format=format, emit_constraints=emit_constraints)
        setup_run_logger("run")
        registry = load_registry(config.data_dir)
        report = DecompositionEngine(registry).run_genus(config.genus)
        self._emit(serialize_report(report, fmt=config.format, emit_constraints=config.emit_constraints))

    def links(self, genus: int = None, format: str = "text"):
        """IH^q(N_{g-1,g}) for q <= g-1, with the Leray page it is read from."""
        config = CliConfig(command="links", genus=genus, format=format)
        setup_run_logger("links")
        self._emit(serialize_links(config.genus, fmt=config.format))

    def taut(self, genus: int = None, format: str = "text"):
        """Graded dimensions of the tautological ring and the pairing check."""
        config = CliConfig(command="taut", genus=genus, format=format)
        setup_run_logger("taut")
        self._emit(serialize_taut(config.genus, fmt=config.format))

    def defect(self, genus: int = None, data: str = None, format: str = "text"):
        """Stratification of Sat_genus with the fiber dimensions from the datasets, and the defect."""
        config = CliConfig(command="defect", genus=genus, data_dir=data, format=format)
        setup_run_logger("defect")
        registry = load_registry(config.data_dir)
        handler = StratificationHandler()
        fiber_dims = [registry.fiber_dim(config.genus, k) for k in range(config.genus)]
        strat = handler.make_stratification(config.genus, fiber_dims)
        self._emit(serialize_defect(strat, handler.defect(strat), fmt=config.format))

    def check(self, data: str = None, format: str = "text"):
        """Run every acceptance criterion; exit 1 if any fails."""
        from src.features.cli.acceptance import run_acceptance, serialize_results

        config = CliConfig(command="check", data_dir=data, format=format)
        setup_run_logger("check")
        results = run_acceptance(config.data_dir)
        self._emit(serialize_results(results, fmt=config.format))
        if not all(r.passed for r in results):
            self.exit_code = 1


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    if argv is None:
        argv = sys.argv[1:]
    cli = IHCalcCli()
    try:
        get_settings()
        fire.Fire(cli, command=list(argv), name="ihcalc")
    except FireExit as e:
        return 0 if e.code in (None, 0) else 2
    except ValidationError as e:
        error_console.print(f"[red]Usage error:[/red] {e.errors()[0]['msg']}")
        return 2
    except IHCalcError as e:
        error_console.print(format_error_for_display(e), style="red", highlight=False)
        return exit_code_for_error(e)
    return cli.exit_code
