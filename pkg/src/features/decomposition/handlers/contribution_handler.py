from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum, sum_add
from src.features.decomposition.link_store import LinkStore
from src.features.decomposition.models import (
    Contribution,
    LedgerEntry,
    PredictedRow,
    Prediction,
    Stratification,
    SymbolTerm,
)

logger = setup_logger(__name__)


class ContributionHandler:
    """Predicts H^*(F_k) from the strata above A_k, before any new system on A_k.

    The open stratum contributes IH^d(N_{k,g}) in degrees d <= n - s_k - 1, and a
    ledger entry (r, j, G) contributes IH^{d-j}(N_{k,r}, G) in degrees
    0 <= d - j <= s_r - s_k - 1.
    """

    def __init__(self, strat: Stratification):
        self.strat = strat

    def predicted_contributions(self, k: int, ledger: list[LedgerEntry], links: LinkStore) -> Prediction:
        g = self.strat.genus
        contributions: list[Contribution] = []

        for q in range(links.middle(k, g) + 1):
            contributions.append(self._contribution(links, k, g, None, (), 1, q, q))

        for entry in ledger:
            if entry.stratum <= k:
                continue
            r = entry.stratum
            for term in entry.system.strip_twists().terms:
                for q in range(links.middle(k, r) + 1):
                    contributions.append(
                        self._contribution(links, k, r, entry.fiber_degree, term.parts, term.multiplicity, q, entry.fiber_degree + q)
                    )

        rows = {}
        for degree in sorted({c.degree for c in contributions}):
            rows[degree] = self._row([c for c in contributions if c.degree == degree])

        unknown_degrees = [d for d, row in rows.items() if row.has_unknowns]
        logger.info(f"A_{k}: {len(contributions)} contributions, unknowns in degrees {unknown_degrees}")
        return Prediction(stratum=k, rows=rows)

    def _contribution(self, links, k, r, j, coefficient, multiplicity, q, degree) -> Contribution:
        return Contribution(
            degree=degree,
            source_stratum=r,
            source_degree=j,
            coefficient=coefficient,
            multiplicity=multiplicity,
            symbol=links.symbol(k, r, coefficient, q),
            value=links.value(k, r, coefficient, q),
        )

    def _row(self, contributions: list[Contribution]) -> PredictedRow:
        known = IrrepSum.zero()
        unknown: dict = {}
        for c in contributions:
            if c.value is not None:
                known = sum_add(known, c.value * c.multiplicity)
            else:
                unknown[c.symbol] = unknown.get(c.symbol, 0) + c.multiplicity
        terms = tuple(
            SymbolTerm(symbol=symbol, multiplicity=m)
            for symbol, m in sorted(unknown.items(), key=lambda item: item[0].sort_key())
        )
        return PredictedRow(known=known, unknowns=terms, contributions=tuple(contributions))
