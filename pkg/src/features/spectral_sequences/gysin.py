from pydantic import BaseModel, ConfigDict, model_validator

from src.shared.errors import MismatchedDifferential, NegativeMultiplicity
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum, sum_add, sum_subtract
from src.features.spectral_sequences.graded_table import GradedTable

logger = setup_logger(__name__)

Cell = tuple[int, int]


class ForcedDifferential(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: Cell
    target: Cell
    cancelled: IrrepSum

    @model_validator(mode="after")
    def _check_shape(self) -> "ForcedDifferential":
        p, q = self.source
        if self.target != (p + 1, q):
            raise MismatchedDifferential(f"d_1 must go from {self.source} to {(p + 1, q)}, not {self.target}")
        if self.cancelled.is_zero:
            raise MismatchedDifferential(f"differential {self.source}->{self.target} cancels nothing")
        return self

    @property
    def label(self) -> str:
        return f"{self.source}->{self.target}: {self.cancelled}"


class GysinPage(BaseModel):
    """E_1 page of the Gysin sequence: column p holds H^*_c of the p-th stratum piece."""
    model_config = ConfigDict(frozen=True)

    columns: dict[int, GradedTable]
    context_genus: int
    forced_differentials: tuple[ForcedDifferential, ...] = ()

    def entry(self, p: int, q: int) -> IrrepSum:
        column = self.columns.get(p)
        return column.at(q) if column is not None else IrrepSum.zero()

    def cells(self) -> dict[Cell, IrrepSum]:
        return {
            (p, q): column.at(q)
            for p, column in sorted(self.columns.items())
            for q in column.degrees()
        }

    def without_differentials(self) -> "GysinPage":
        return GysinPage(columns=self.columns, context_genus=self.context_genus)


def gysin_assemble(page: GysinPage) -> GradedTable:
    """Sum the E_1 page by total degree after removing both ends of each forced d_1."""
    remaining = page.cells()

    for differential in page.forced_differentials:
        for cell in (differential.source, differential.target):
            entry = remaining.get(cell, IrrepSum.zero())
            try:
                remaining[cell] = sum_subtract(entry, differential.cancelled)
            except NegativeMultiplicity:
                raise MismatchedDifferential(
                    f"differential {differential.label} needs {differential.cancelled} at {cell}, found {entry}"
                )
        logger.debug(f"Applied forced differential {differential.label}")

    totals: dict[int, IrrepSum] = {}
    for (p, q), value in remaining.items():
        totals[p + q] = sum_add(totals.get(p + q, IrrepSum.zero()), value)

    return GradedTable(entries=totals, context_genus=page.context_genus)
