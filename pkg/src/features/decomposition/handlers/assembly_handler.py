from src.shared.errors import BoundViolation, NegativeMultiplicity
from src.shared.logger import setup_logger
from src.features.rep_algebra.partition import format_parts
from src.features.taut_ring.tautological import taut_graded_dims
from src.features.decomposition.models import (
    AssemblyResult,
    BettiValue,
    BettiWithUnknowns,
    Bound,
    LedgerEntry,
    LinearRelation,
    Summand,
    SummandRow,
)

logger = setup_logger(__name__)

# (symbol or None when known, multiplicity, value)
Piece = tuple[str | None, int, BettiValue]


class AssemblyHandler:
    """Splits H^*(toroidal) into IH^*(Sat_g) plus the global summands of the ledger.

    H^m = IH^m(Sat_g) + sum over (k, j, G) of mult * IH^{m-j}(Sat_k, G). Summands
    with Q coefficients use the lower-genus results; other coefficients stay
    symbolic. The tautological ring bounds IH^m(Sat_g) from below, which is
    what forces symbols to zero when a degree has no slack.
    """

    def assemble_global(
        self,
        g: int,
        toroidal: BettiWithUnknowns,
        ledger: list[LedgerEntry],
        recursive_ih: dict[int, BettiWithUnknowns]
    ) -> AssemblyResult:
        top = g * (g + 1)
        taut = taut_graded_dims(g).dims

        summands: list[Summand] = []
        rows: list[tuple[str, dict[int, Piece]]] = []
        series: dict[str, BettiWithUnknowns] = {}
        point_new: dict[int, int] = {}

        for entry in sorted(ledger, key=lambda e: (-e.stratum, e.fiber_degree)):
            k, j = entry.stratum, entry.fiber_degree
            for term in entry.system.strip_twists().terms:
                summand = Summand(
                    stratum=k,
                    fiber_degree=j,
                    coefficient=term.parts,
                    multiplicity=term.multiplicity,
                    shift_label=entry.shift_label,
                )
                summands.append(summand)
                if k == 0:
                    point_new[j] = point_new.get(j, 0) + term.multiplicity
                    continue

                if term.parts:
                    family = f"Sat_{k},{format_parts(term.parts)}"
                    if family not in series:
                        series[family] = BettiWithUnknowns.from_ints(family, [None] * (k * (k + 1) + 1), prefix="IH")
                    source = series[family]
                else:
                    source = recursive_ih[k]

                cells = {}
                for q, value in enumerate(source.values):
                    name = None if value.is_known else source.symbol(q)
                    cells[j + q] = (name, term.multiplicity, value)
                rows.append((summand.label, cells))

        if point_new:
            rows.append((
                f"new part of H*(F_{{0,{g}}})",
                {j: (None, 1, BettiValue.known(m)) for j, m in sorted(point_new.items())},
            ))

        pieces: dict[int, list[Piece]] = {m: [] for m in range(top + 1)}
        for _, cells in rows:
            for m, piece in cells.items():
                if m > top:
                    raise BoundViolation(f"summand reaches degree {m} beyond {top}", degree=m)
                pieces[m].append(piece)

        forced = self._force_symbols(toroidal, taut, pieces)

        ih_values: list[BettiValue] = []
        relations: list[LinearRelation] = []
        bounds: list[Bound] = []
        bounded_toroidal = toroidal
        ih_label = f"Sat_{g}"

        for m in range(top + 1):
            known_sum, free = self._split(pieces[m], forced)
            free_floor = sum(c * lower for _, c, lower in free)
            h = toroidal[m]
            ih_symbol = f"IH{m}({ih_label})"

            if h.is_known:
                residual = h.exact - known_sum
                if not free:
                    ih_values.append(BettiValue.known(residual))
                else:
                    ih_values.append(BettiValue.unknown(lower=taut[m], upper=residual - free_floor))
                    relations.append(LinearRelation(
                        degree=m,
                        lhs=str(residual),
                        terms=((ih_symbol, 1),) + tuple((name, c) for name, c, _ in free),
                    ))
                continue

            ih_values.append(BettiValue.unknown(lower=taut[m]))
            floor = taut[m] + known_sum + free_floor
            relations.append(LinearRelation(
                degree=m,
                lhs=toroidal.symbol(m),
                terms=((ih_symbol, 1),) + tuple((name, c) for name, c, _ in free),
                constant=known_sum,
            ))
            bounds.append(Bound(symbol=toroidal.symbol(m), lower=max(floor, h.lower)))
            bounds.append(Bound(symbol=ih_symbol, lower=taut[m]))
            bounded_toroidal = bounded_toroidal.with_value(m, BettiValue.unknown(lower=max(floor, h.lower)))
            logger.info(f"Degree {m}: {relations[-1].label}; {bounds[-2].label}")

        ih = BettiWithUnknowns(label=ih_label, values=tuple(ih_values), prefix="IH")

        summand_rows = []
        sum_row = list(taut)
        for label, cells in rows:
            resolved = {m: self._resolved(piece, forced) for m, piece in cells.items()}
            summand_rows.append(SummandRow(label=label, cells=resolved))
            for m, value in resolved.items():
                if value.is_known:
                    sum_row[m] += value.exact

        coefficient_series = {
            family: BettiWithUnknowns(
                label=family,
                prefix="IH",
                values=tuple(
                    BettiValue.known(forced[s.symbol(q)]) if s.symbol(q) in forced else v
                    for q, v in enumerate(s.values)
                ),
            )
            for family, s in series.items()
        }

        return AssemblyResult(
            genus=g,
            ih=ih,
            toroidal=bounded_toroidal,
            taut=taut,
            summands=tuple(summands),
            rows=tuple(summand_rows),
            sum_row=tuple(sum_row),
            coefficient_series=coefficient_series,
            relations=tuple(relations),
            bounds=tuple(bounds),
        )

    def _force_symbols(self, toroidal: BettiWithUnknowns, taut, pieces: dict[int, list[Piece]]) -> dict[str, int]:
        """Known degrees with zero slack pin every free symbol at its lower bound."""
        forced: dict[str, int] = {}
        changed = True
        while changed:
            changed = False
            for m, degree_pieces in pieces.items():
                h = toroidal[m]
                if not h.is_known:
                    continue
                known_sum, free = self._split(degree_pieces, forced)
                residual = h.exact - known_sum
                if residual < 0:
                    raise NegativeMultiplicity(
                        f"summands exceed {toroidal.symbol(m)} = {h.exact} by {-residual}", degree=m
                    )
                slack = residual - taut[m] - sum(c * lower for _, c, lower in free)
                if slack < 0:
                    raise BoundViolation(
                        f"{toroidal.symbol(m)} = {h.exact} leaves no room for the tautological classes", degree=m
                    )
                if free and slack == 0:
                    for name, _, lower in free:
                        forced[name] = lower
                    changed = True
        return forced

    @staticmethod
    def _split(degree_pieces: list[Piece], forced: dict[str, int]) -> tuple[int, list[tuple[str, int, int]]]:
        known_sum = 0
        free: dict[str, list[int]] = {}
        for name, multiplicity, value in degree_pieces:
            if name is None:
                known_sum += multiplicity * value.exact
            elif name in forced:
                known_sum += multiplicity * forced[name]
            else:
                entry = free.setdefault(name, [0, value.lower])
                entry[0] += multiplicity
        return known_sum, [(name, c, lower) for name, (c, lower) in free.items()]

    @staticmethod
    def _resolved(piece: Piece, forced: dict[str, int]) -> BettiValue:
        name, multiplicity, value = piece
        if name is None:
            return BettiValue.known(multiplicity * value.exact)
        if name in forced:
            return BettiValue.known(multiplicity * forced[name])
        return BettiValue.unknown(lower=multiplicity * value.lower)
