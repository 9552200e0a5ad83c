from pydantic import BaseModel, ConfigDict

from src.shared.errors import OutOfRange
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum, sum_add, sum_min, sum_subtract
from src.features.rep_algebra.exterior import exterior_power_decomposition
from src.features.spectral_sequences.graded_table import GradedTable

logger = setup_logger(__name__)

Cell = tuple[int, int]


def invariant_kummer_row(g: int, through: int | None = None) -> GradedTable:
    """Invariant cohomology of the universal Kummer family of dimension g-1.

    Even degrees carry the exterior powers of V_1; the involution kills odd
    degrees. The row stops at g-1 unless `through` extends it (at most to
    2(g-1), the real dimension of the fiber).
    """
    if g < 1:
        raise OutOfRange(f"genus must be at least 1, got {g}")
    rank = g - 1
    last = rank if through is None else min(through, 2 * rank)
    entries = {p: exterior_power_decomposition(rank, p) for p in range(0, last + 1, 2)}
    return GradedTable(entries=entries, context_genus=rank, top_degree=last)


class LerayPage(BaseModel):
    """Two-row Leray page of the circle bundle over the Kummer family."""
    model_config = ConfigDict(frozen=True)

    genus: int
    e2: dict[Cell, IrrepSum]
    d2_ranks: dict[Cell, IrrepSum]
    e3: dict[Cell, IrrepSum]

    def cell(self, page: int, p: int, q: int) -> IrrepSum:
        source = self.e2 if page == 2 else self.e3
        return source.get((p, q), IrrepSum.zero())

    @property
    def width(self) -> int:
        return max((p for p, _ in self.e2), default=0)


def circle_leray_page(g: int) -> LerayPage:
    row = invariant_kummer_row(g, through=2 * (g - 1))
    width = row.max_degree

    e2: dict[Cell, IrrepSum] = {}
    for p in range(width + 1):
        for q in (0, 1):
            if not row.at(p).is_zero:
                e2[(p, q)] = row.at(p)

    e3 = dict(e2)
    ranks: dict[Cell, IrrepSum] = {}
    for p in range(width + 1):
        source = e2.get((p, 1), IrrepSum.zero())
        target = e2.get((p + 2, 0), IrrepSum.zero())
        # d_2 has maximal rank: cancel termwise
        rank = sum_min(source, target)
        if rank.is_zero:
            continue
        ranks[(p, 1)] = rank
        e3[(p, 1)] = sum_subtract(e3[(p, 1)], rank)
        e3[(p + 2, 0)] = sum_subtract(e3[(p + 2, 0)], rank)

    e3 = {cell: value for cell, value in e3.items() if not value.is_zero}
    logger.debug(f"Leray page for N_{{{g - 1},{g}}}: {len(ranks)} nonzero d_2")
    return LerayPage(genus=g, e2=e2, d2_ranks=ranks, e3=e3)


def circle_link_ih(g: int) -> GradedTable:
    """IH^q of the link N_{g-1,g} for q <= g-1, read off the E_3 page."""
    page = circle_leray_page(g)
    entries = {}
    for q in range(g):
        value = sum_add(page.cell(3, q, 0), page.cell(3, q - 1, 1))
        entries[q] = value
    return GradedTable(entries=entries, context_genus=g - 1, top_degree=g - 1)


def circle_link_closed_form(g: int) -> GradedTable:
    """V_{1^q} in even degrees q <= g-1, zero in odd degrees."""
    if g < 1:
        raise OutOfRange(f"genus must be at least 1, got {g}")
    entries = {q: IrrepSum.of((1,) * q) for q in range(0, g, 2)}
    return GradedTable(entries=entries, context_genus=g - 1, top_degree=g - 1)
