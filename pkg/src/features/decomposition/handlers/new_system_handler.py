from src.shared.errors import BoundViolation, IHCalcError, NegativeMultiplicity
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum, sum_max, sum_subtract
from src.features.spectral_sequences.graded_table import GradedTable
from src.features.decomposition.models import (
    Constraint,
    InferenceResult,
    LedgerEntry,
    Prediction,
    Stratification,
)

logger = setup_logger(__name__)


class NewSystemHandler:
    """Finds the local systems on A_k that the strata above do not account for.

    MINIMAL-NEW: a new system exists only where a degree free of unknowns
    leaves a residual, plus its mirror image about the codimension of A_k
    (relative hard Lefschetz). Whatever remains in degrees with unknowns is
    charged to the link symbols as a constraint.
    """

    def __init__(self, strat: Stratification):
        self.strat = strat

    def infer_new_systems(self, k: int, fiber: GradedTable, predicted: Prediction) -> InferenceResult:
        axis = self.strat.codim(k)
        top = max(fiber.max_degree, predicted.max_degree)

        # Stage 1: residuals in degrees without unknowns
        found: dict[int, IrrepSum] = {}
        for d in range(top + 1):
            row = predicted.row(d)
            if row.has_unknowns:
                continue
            residual = self._subtract(fiber.at(d).strip_twists(), row.known, k, d)
            if not residual.is_zero:
                found[d] = residual

        # Stage 2: symmetric closure
        closure = dict(found)
        for d, system in found.items():
            mirror = 2 * axis - d
            if mirror < 0:
                raise BoundViolation(
                    f"new system {system} in degree {d} has no mirror degree about {axis}",
                    stratum=k, degree=d,
                )
            closure[mirror] = sum_max(closure.get(mirror, IrrepSum.zero()), system)

        for d, system in closure.items():
            if predicted.row(d).has_unknowns:
                continue
            if system != found.get(d, IrrepSum.zero()):
                raise NegativeMultiplicity(
                    f"mirror image {system} of a new system is not present in the fiber",
                    stratum=k, degree=d,
                )

        entries = []
        for d in sorted(closure):
            if d > 2 * self.strat.fiber_dim(k):
                raise BoundViolation(
                    f"new system in degree {d} beyond the fiber's top degree {2 * self.strat.fiber_dim(k)}",
                    stratum=k, degree=d,
                )
            entries.append(LedgerEntry(
                stratum=k,
                fiber_degree=d,
                system=closure[d],
                shift_label=self.strat.shift_label(k, d),
            ))

        # Stage 3: constraints in degrees with unknowns
        constraints = []
        for d in range(top + 1):
            row = predicted.row(d)
            if not row.has_unknowns:
                continue
            remaining = self._subtract(fiber.at(d).strip_twists(), row.known, k, d)
            remaining = self._subtract(remaining, closure.get(d, IrrepSum.zero()), k, d)
            constraints.append(Constraint(stratum=k, degree=d, left=row.unknowns, right=remaining))

        logger.info(
            f"A_{k}: {len(entries)} new systems "
            f"{[(e.fiber_degree, str(e.system)) for e in entries]}, {len(constraints)} constraints"
        )
        return InferenceResult(stratum=k, entries=tuple(entries), constraints=tuple(constraints))

    @staticmethod
    def _subtract(a: IrrepSum, b: IrrepSum, k: int, d: int) -> IrrepSum:
        try:
            return sum_subtract(a, b)
        except IHCalcError as e:
            raise e.with_context(stratum=k, degree=d)
