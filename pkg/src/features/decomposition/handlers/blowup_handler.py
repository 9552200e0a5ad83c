from pydantic import BaseModel, ConfigDict

from src.shared.errors import BadDims, NegativeMultiplicity
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum
from src.features.spectral_sequences.graded_table import GradedTable
from src.features.decomposition.link_store import LinkStore
from src.features.decomposition.models import BettiValue, BettiWithUnknowns, LedgerEntry, Stratification
from src.features.decomposition.handlers.contribution_handler import ContributionHandler
from src.features.decomposition.handlers.new_system_handler import NewSystemHandler

logger = setup_logger(__name__)


class PointStratumCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    ledger: tuple[tuple[int, int], ...]
    expected: tuple[tuple[int, int], ...]

    @property
    def detail(self) -> str:
        if self.passed:
            return "new systems on A_0 are exactly the exceptional-divisor part"
        return f"A_0 ledger {list(self.ledger)} differs from exceptional-divisor part {list(self.expected)}"


class BlowupHandler:
    """Blow-up of an isolated singular point with exceptional divisor E of dimension n - 1.

    Only the new systems on the point matter: H^j(E) for n <= j <= 2n - 2 and
    its mirror H^{2n-j}(E) for 2 <= j <= n - 1.
    """

    def _exceptional_part(self, exceptional: GradedTable, n: int, j: int) -> int:
        if n <= j <= 2 * n - 2:
            return exceptional.at(j).rank
        if 2 <= j <= n - 1:
            return exceptional.at(2 * n - j).rank
        return 0

    def _check_exceptional(self, exceptional: GradedTable, n: int) -> None:
        if exceptional.max_degree > 2 * (n - 1):
            raise BadDims(f"exceptional divisor has degree {exceptional.max_degree} above {2 * (n - 1)}")

    def blowup_split(
        self,
        vor: BettiWithUnknowns,
        exceptional: GradedTable,
        n: int = 10,
        label: str = "Perf_4"
    ) -> BettiWithUnknowns:
        self._check_exceptional(exceptional, n)
        values = []
        for j, value in enumerate(vor.values):
            e = self._exceptional_part(exceptional, n, j)
            if value.is_known:
                if value.exact < e:
                    raise NegativeMultiplicity(f"{vor.symbol(j)} = {value.exact} is smaller than {e} from E", degree=j)
                values.append(BettiValue.known(value.exact - e))
            else:
                if value.upper is not None and value.upper < e:
                    raise NegativeMultiplicity(f"{vor.symbol(j)} <= {value.upper} is smaller than {e} from E", degree=j)
                upper = None if value.upper is None else value.upper - e
                values.append(BettiValue.unknown(lower=max(0, value.lower - e), upper=upper))
        result = BettiWithUnknowns(label=label, values=tuple(values), prefix="IH")
        logger.info(f"IH({label}) = {result.render()}")
        return result

    def blowup_restore(
        self,
        perf: BettiWithUnknowns,
        exceptional: GradedTable,
        n: int,
        label: str,
        prefix: str = "h"
    ) -> BettiWithUnknowns:
        self._check_exceptional(exceptional, n)
        values = []
        for j, value in enumerate(perf.values):
            e = self._exceptional_part(exceptional, n, j)
            if value.is_known:
                values.append(BettiValue.known(value.exact + e))
            else:
                # h = IH + e, so e is itself a lower bound
                upper = None if value.upper is None else value.upper + e
                values.append(BettiValue.unknown(lower=value.lower + e, upper=upper))
        return BettiWithUnknowns(label=label, values=tuple(values), prefix=prefix)

    def exceptional_new_systems(self, exceptional: GradedTable, n: int = 10) -> list[LedgerEntry]:
        """Run the point-blow-up as a two-stratum decomposition through the ledger handlers."""
        self._check_exceptional(exceptional, n)
        strat = Stratification(genus=1, stratum_dims=(0, n), fiber_dims=(n - 1,), space="Bl")
        links = LinkStore(stratum_dims=strat.stratum_dims)
        prediction = ContributionHandler(strat).predicted_contributions(0, [], links)
        fiber = GradedTable(
            entries={d: IrrepSum.trivial(v.rank) for d, v in exceptional.entries.items()},
            context_genus=0,
        )
        return list(NewSystemHandler(strat).infer_new_systems(0, fiber, prediction).entries)

    def point_stratum_check(self, ledger: list[LedgerEntry], exceptional: GradedTable, n: int = 10) -> PointStratumCheck:
        found = tuple((e.fiber_degree, e.system.rank) for e in ledger if e.stratum == 0)
        expected = tuple((e.fiber_degree, e.system.rank) for e in self.exceptional_new_systems(exceptional, n))
        return PointStratumCheck(passed=found == expected, ledger=found, expected=expected)
