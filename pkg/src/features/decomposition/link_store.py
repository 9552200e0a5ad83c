from typing import Iterable

from src.shared.errors import Contradiction
from src.shared.logger import setup_logger
from src.features.rep_algebra.irrep_sum import IrrepSum
from src.features.rep_algebra.partition import format_parts
from src.features.spectral_sequences.graded_table import GradedTable
from src.features.spectral_sequences.leray import circle_link_ih
from src.features.decomposition.models import LinkSymbol, satake_stratum_dim

logger = setup_logger(__name__)

Family = tuple[int, int, tuple[int, ...]]


class LinkStore:
    """Known values of IH^q(N_{k,r}, G), keyed by family (k, r, G) and degree.

    Only degrees up to the middle s_r - s_k - 1 are stored; higher degrees are
    read through Poincare duality q -> d - q. Absent entries are unknown. IH^0
    with Q coefficients is always Q (links are unibranched).

    Stores are treated as values: every operation that learns something works
    on a copy.
    """

    def __init__(
        self,
        stratum_dims: tuple[int, ...] | None = None,
        values: dict[tuple[Family, int], IrrepSum] | None = None,
        families: Iterable[Family] = ()
    ):
        self.stratum_dims = stratum_dims
        self._values: dict[tuple[Family, int], IrrepSum] = dict(values or {})
        self._families: set[Family] = set(families)

    def copy(self) -> "LinkStore":
        return LinkStore(self.stratum_dims, self._values, self._families)

    # ------------------------------------------------------------------
    # Geometry of the links
    # ------------------------------------------------------------------

    def _stratum_dim(self, k: int) -> int:
        if self.stratum_dims is None:
            return satake_stratum_dim(k)
        return self.stratum_dims[k]

    def link_dim(self, k: int, r: int) -> int:
        """Real dimension of N_{k,r}."""
        return 2 * (self._stratum_dim(r) - self._stratum_dim(k)) - 1

    def middle(self, k: int, r: int) -> int:
        return self._stratum_dim(r) - self._stratum_dim(k) - 1

    def canonical_degree(self, k: int, r: int, q: int) -> int:
        if q > self.middle(k, r):
            return self.link_dim(k, r) - q
        return q

    def symbol(self, k: int, r: int, coefficient: tuple[int, ...], q: int) -> LinkSymbol:
        return LinkSymbol(lower=k, upper=r, coefficient=coefficient, degree=self.canonical_degree(k, r, q))

    # ------------------------------------------------------------------
    # Values
    # ------------------------------------------------------------------

    def value(self, k: int, r: int, coefficient: tuple[int, ...], q: int) -> IrrepSum | None:
        if q < 0 or q > self.link_dim(k, r):
            return IrrepSum.zero()
        q = self.canonical_degree(k, r, q)
        if q == 0 and coefficient == ():
            return IrrepSum.trivial()
        return self._values.get(((k, r, coefficient), q))

    def value_of(self, symbol: LinkSymbol) -> IrrepSum | None:
        return self.value(symbol.lower, symbol.upper, symbol.coefficient, symbol.degree)

    def is_known(self, symbol: LinkSymbol) -> bool:
        return self.value_of(symbol) is not None

    def assign(self, symbol: LinkSymbol, value: IrrepSum, reason: str = "") -> bool:
        """Record a value; returns True when it is new information."""
        value = value.strip_twists()
        current = self.value_of(symbol)
        if current is not None:
            if current != value:
                raise Contradiction(f"{symbol.label} is {current} but {reason or 'a constraint'} requires {value}")
            return False
        self._values[(symbol.family, symbol.degree)] = value
        self._families.add(symbol.family)
        logger.debug(f"{symbol.label} = {value} ({reason})")
        return True

    def seed_table(self, k: int, r: int, coefficient: tuple[int, ...], table: GradedTable, reason: str = "seed") -> None:
        last = min(table.max_degree, self.middle(k, r))
        for q in range(last + 1):
            self.assign(self.symbol(k, r, coefficient, q), table.at(q), reason)
        self._families.add((k, r, coefficient))

    def seed_circle_link(self, g: int) -> None:
        """IH^*(N_{g-1,g}) from the circle-bundle Leray sequence."""
        self.seed_table(g - 1, g, (), circle_link_ih(g), reason=f"circle link of genus {g}")

    def with_families(self, families: Iterable[Family]) -> "LinkStore":
        store = self.copy()
        store._families.update(families)
        return store

    # ------------------------------------------------------------------
    # Reporting
    # ------------------------------------------------------------------

    def families(self) -> list[Family]:
        return sorted(self._families, key=lambda f: (sum(f[2]), f[2], f[1], f[0]))

    def row(self, family: Family) -> list[IrrepSum | None]:
        k, r, coefficient = family
        return [self.value(k, r, coefficient, q) for q in range(self.middle(k, r) + 1)]

    def unknown_symbols(self, family: Family) -> list[LinkSymbol]:
        k, r, coefficient = family
        return [
            self.symbol(k, r, coefficient, q)
            for q in range(self.middle(k, r) + 1)
            if self.value(k, r, coefficient, q) is None
        ]

    @staticmethod
    def family_label(family: Family) -> str:
        k, r, coefficient = family
        return f"IH^q(N_{{{k},{r}}},{format_parts(coefficient)})"

    def __len__(self) -> int:
        return len(self._values)
