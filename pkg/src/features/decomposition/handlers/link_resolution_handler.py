from pydantic import BaseModel, ConfigDict

from src.shared.errors import Contradiction, IHCalcError
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum, sum_subtract
from src.features.decomposition.link_store import LinkStore
from src.features.decomposition.models import Constraint, LinkSymbol

logger = setup_logger(__name__)


class Resolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    links: LinkStore
    retained: tuple[Constraint, ...]
    zero_forced: tuple[LinkSymbol, ...] = ()


def _divide(value: IrrepSum, factor: int, constraint: Constraint) -> IrrepSum:
    if factor == 1:
        return value
    counts = value.counts()
    if any(m % factor for m in counts.values()):
        raise Contradiction(f"{constraint.label}: {value} is not divisible by {factor}", stratum=constraint.stratum)
    return IrrepSum.from_counts({key: m // factor for key, m in counts.items()})


class LinkResolutionHandler:
    """Turns constraints into link values until nothing more can be learned.

    A constraint with one unknown fixes it. A constraint whose right side is
    zero fixes every unknown in it to zero and reports them as zero_forced.
    Anything else is kept verbatim.
    """

    def resolve_links(self, constraints: list[Constraint], links: LinkStore) -> Resolution:
        store = links.copy()
        pending = list(constraints)
        forced: list[LinkSymbol] = []

        changed = True
        while changed:
            changed = False
            remaining = []
            for constraint in pending:
                try:
                    learned, settled = self._apply(constraint, store, forced)
                except IHCalcError as e:
                    raise e.with_context(stratum=constraint.stratum, degree=constraint.degree)
                changed = changed or learned
                if not settled:
                    remaining.append(constraint)
            pending = remaining

        for constraint in pending:
            logger.info(f"Retained constraint: {constraint.label}")
        return Resolution(links=store, retained=tuple(pending), zero_forced=tuple(forced))

    def _apply(self, constraint: Constraint, store: LinkStore, forced: list[LinkSymbol]) -> tuple[bool, bool]:
        """Returns (learned something, constraint fully used)."""
        right = constraint.right
        unknown = []
        for term in constraint.left:
            value = store.value_of(term.symbol)
            if value is None:
                unknown.append(term)
                continue
            try:
                right = sum_subtract(right, value * term.multiplicity)
            except IHCalcError:
                raise Contradiction(f"{constraint.label} cannot hold with {term.symbol.label} = {value}")

        if not unknown:
            if not right.is_zero:
                raise Contradiction(f"{constraint.label} leaves {right} unaccounted for")
            return False, True

        if len(unknown) == 1:
            term = unknown[0]
            store.assign(term.symbol, _divide(right, term.multiplicity, constraint), constraint.label)
            return True, True

        if right.is_zero:
            for term in unknown:
                store.assign(term.symbol, IrrepSum.zero(), constraint.label)
                forced.append(term.symbol)
            logger.info(
                f"Forced to 0 by {constraint.label}: " + ", ".join(term.symbol.label for term in unknown)
            )
            return True, True

        return False, False
