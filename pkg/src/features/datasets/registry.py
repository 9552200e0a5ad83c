from collections.abc import Mapping
from functools import lru_cache
from pathlib import Path
from typing import Iterator

from src.shared.errors import DatasetError, MissingDataset
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum
from src.features.spectral_sequences.graded_table import GradedTable
from src.features.spectral_sequences.gysin import gysin_assemble
from src.features.spectral_sequences.leray import invariant_kummer_row
from src.features.decomposition.models import BettiWithUnknowns
from src.features.datasets.dataset_parser import DatasetSection, parse_dataset, parse_partition

logger = setup_logger(__name__)

DATA_DIR = Path(__file__).parent / "data"
DATASET_SUFFIX = ".ihdat"


class DatasetRegistry(Mapping):
    """Datasets by name, plus the lookups the engine needs."""

    def __init__(self, sections: dict[str, DatasetSection]):
        self._sections = dict(sorted(sections.items()))

    def __getitem__(self, name: str) -> DatasetSection:
        return self._sections[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._sections)

    def __len__(self) -> int:
        return len(self._sections)

    def with_sections(self, sections: dict[str, DatasetSection]) -> "DatasetRegistry":
        merged = dict(self._sections)
        merged.update(sections)
        return DatasetRegistry(merged)

    # ------------------------------------------------------------------
    # Engine lookups
    # ------------------------------------------------------------------

    def fiber_table(self, g: int, k: int) -> GradedTable:
        section = self._sections.get(f"fiber g={g} k={k}")
        if section is not None:
            return section.table
        page = self._sections.get(f"gysin g={g} k={k}")
        if page is not None:
            return gysin_assemble(page.gysin).strip_twists()
        raise MissingDataset(f"no dataset for the fiber over A_{k} in genus {g}")

    def fiber_dim(self, g: int, k: int) -> int:
        section = self._sections.get(f"fiber g={g} k={k}")
        if section is not None and "dim" in section.meta:
            return int(section.meta["dim"])
        return self.fiber_table(g, k).max_degree // 2

    def gysin_page(self, g: int, k: int):
        section = self._sections.get(f"gysin g={g} k={k}")
        return None if section is None else section.gysin

    def _betti(self, role: str, g: int) -> DatasetSection | None:
        for section in self._sections.values():
            if section.kind == "betti" and section.meta.get("role") == role and section.int_meta("genus") == g:
                return section
        return None

    def toroidal_betti(self, g: int) -> BettiWithUnknowns:
        section = self._betti("toroidal", g)
        if section is None:
            raise MissingDataset(f"no dataset for genus {g}")
        return section.betti

    def exceptional_table(self, g: int) -> GradedTable | None:
        section = self._betti("exceptional", g)
        if section is None:
            return None
        entries = {d: IrrepSum.trivial(v.exact) for d, v in enumerate(section.betti.values) if v.is_known and v.exact}
        return GradedTable(entries=entries, context_genus=0)

    def link_seeds(self, g: int) -> list[tuple[int, int, tuple[int, ...], GradedTable, str]]:
        """Seeded link families usable up to genus g, as (k, r, coefficient, table, name)."""
        seeds = []
        for section in self._sections.values():
            if section.kind != "link-seed" or section.int_meta("upper") > g:
                continue
            k, r = section.int_meta("lower"), section.int_meta("upper")
            coefficient = parse_partition(section.meta.get("coeff", "Q"), r)
            seeds.append((k, r, coefficient, section.table, section.name))
        return seeds


# ============================================================================
# Loading
# ============================================================================

def validate_section(section: DatasetSection) -> None:
    """Load-time checks: the fiber over A_{g-1} is the Kummer variety."""
    if section.kind != "fiber":
        return
    g, k = section.int_meta("genus"), section.int_meta("stratum")
    if k != g - 1:
        return

    table = section.table
    dims = table.dimension_row()
    top = len(dims) - 1
    if any(dims[d] != dims[top - d] for d in range(top + 1)):
        raise DatasetError(f"{section.name}: dimensions {dims} are not Poincare symmetric")

    expected = invariant_kummer_row(g, through=2 * (g - 1))
    if not table.matches(expected):
        raise DatasetError(
            f"{section.name}: {table.row_labels()} differs from the invariant Kummer cohomology {expected.row_labels()}"
        )


def load_sections(paths: list[Path]) -> dict[str, DatasetSection]:
    sections: dict[str, DatasetSection] = {}
    for path in paths:
        dataset = parse_dataset(path.read_text(encoding="utf-8"), source=path.name)
        for section in dataset.sections:
            try:
                validate_section(section)
            except DatasetError as e:
                e.with_source(path.name)
                raise
            if section.is_derived:
                logger.warning(f"{section.name} is derived, not printed data; cross-check against its source if available")
            sections[section.name] = section
    return sections


def _dataset_paths(directory: Path) -> list[Path]:
    if not directory.is_dir():
        raise MissingDataset(f"data directory {directory} does not exist")
    return sorted(directory.glob(f"*{DATASET_SUFFIX}"))


@lru_cache(maxsize=1)
def builtin_registry() -> DatasetRegistry:
    registry = DatasetRegistry(load_sections(_dataset_paths(DATA_DIR)))
    logger.debug(f"Loaded {len(registry)} builtin datasets")
    return registry


def load_registry(data_dir: str | Path | None = None) -> DatasetRegistry:
    """Builtin datasets, overridden by name with those found in data_dir."""
    registry = builtin_registry()
    if data_dir is None:
        return registry
    overrides = load_sections(_dataset_paths(Path(data_dir)))
    logger.info(f"Overriding {len(overrides)} datasets from {data_dir}: {sorted(overrides)}")
    return registry.with_sections(overrides)
