from pydantic import BaseModel, ConfigDict, model_validator

from src.shared.errors import BadDims
from src.features.rep_algebra.irrep_sum import IrrepSum
from src.features.rep_algebra.partition import format_parts

MINIMAL_NEW = "MINIMAL-NEW"


def satake_stratum_dim(k: int) -> int:
    """Complex dimension of A_k."""
    return k * (k + 1) // 2


class Stratification(BaseModel):
    """Strata A_0 < A_1 < ... < A_g of the target, with fiber dimensions over each."""
    model_config = ConfigDict(frozen=True)

    genus: int
    stratum_dims: tuple[int, ...]
    fiber_dims: tuple[int, ...]
    space: str = "Sat"

    @model_validator(mode="after")
    def _check(self) -> "Stratification":
        if len(self.stratum_dims) != self.genus + 1:
            raise BadDims(f"expected {self.genus + 1} stratum dimensions, got {len(self.stratum_dims)}")
        if any(a >= b for a, b in zip(self.stratum_dims, self.stratum_dims[1:])):
            raise BadDims(f"stratum dimensions {self.stratum_dims} are not strictly increasing")
        if len(self.fiber_dims) != self.genus:
            raise BadDims(f"expected {self.genus} fiber dimensions, got {len(self.fiber_dims)}")
        if any(f < 0 for f in self.fiber_dims):
            raise BadDims(f"negative fiber dimension in {self.fiber_dims}")
        return self

    @property
    def total_dim(self) -> int:
        return self.stratum_dims[-1]

    def codim(self, k: int) -> int:
        return self.total_dim - self.stratum_dims[k]

    def link_dim(self, k: int, r: int) -> int:
        return 2 * (self.stratum_dims[r] - self.stratum_dims[k]) - 1

    def fiber_dim(self, k: int) -> int:
        return self.fiber_dims[k]

    def shift_label(self, k: int, j: int) -> int:
        return j - self.codim(k)

    def max_shift(self, k: int) -> int:
        return 2 * self.fiber_dims[k] + self.stratum_dims[k] - self.total_dim

    @property
    def name(self) -> str:
        return f"{self.space}_{self.genus}"


class LedgerEntry(BaseModel):
    """A new local system G on A_k, found in fiber degree j."""
    model_config = ConfigDict(frozen=True)

    stratum: int
    fiber_degree: int
    system: IrrepSum
    shift_label: int

    @property
    def label(self) -> str:
        return f"A_{self.stratum} j={self.fiber_degree}: {self.system} [{self.shift_label}]"


class LinkSymbol(BaseModel):
    """The unknown IH^degree(N_{lower,upper}, coefficient)."""
    model_config = ConfigDict(frozen=True)

    lower: int
    upper: int
    coefficient: tuple[int, ...] = ()
    degree: int

    @property
    def family(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.lower, self.upper, self.coefficient)

    @property
    def label(self) -> str:
        return f"IH{self.degree}(N_{{{self.lower},{self.upper}}},{format_parts(self.coefficient)})"

    def sort_key(self):
        return (-self.upper, sum(self.coefficient), self.coefficient, self.lower, self.degree)


class SymbolTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    symbol: LinkSymbol
    multiplicity: int = 1

    @property
    def label(self) -> str:
        if self.multiplicity == 1:
            return self.symbol.label
        return f"{self.multiplicity} {self.symbol.label}"


class Constraint(BaseModel):
    """sum of link unknowns = right, found in one fiber degree of one stratum."""
    model_config = ConfigDict(frozen=True)

    stratum: int
    degree: int
    left: tuple[SymbolTerm, ...]
    right: IrrepSum

    @model_validator(mode="after")
    def _unique(self) -> "Constraint":
        symbols = [term.symbol for term in self.left]
        if len(set(symbols)) != len(symbols):
            raise ValueError("each symbol may appear once in a constraint")
        return self

    @property
    def symbols(self) -> list[LinkSymbol]:
        return [term.symbol for term in self.left]

    @property
    def label(self) -> str:
        return " + ".join(term.label for term in self.left) + f" = {self.right}"


class Contribution(BaseModel):
    """One source feeding degree `degree` of H^*(F_k): the open stratum or a ledger entry."""
    model_config = ConfigDict(frozen=True)

    degree: int
    source_stratum: int
    source_degree: int | None = None
    coefficient: tuple[int, ...] = ()
    multiplicity: int = 1
    symbol: LinkSymbol
    value: IrrepSum | None = None

    @property
    def is_known(self) -> bool:
        return self.value is not None

    @property
    def source_label(self) -> str:
        if self.source_degree is None:
            return f"A_{self.source_stratum}"
        return f"A_{self.source_stratum} j={self.source_degree} {format_parts(self.coefficient)}"

    @property
    def label(self) -> str:
        if self.value is not None:
            return str(self.value * self.multiplicity)
        prefix = "" if self.multiplicity == 1 else f"{self.multiplicity} "
        return prefix + self.symbol.label


class PredictedRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    known: IrrepSum = IrrepSum()
    unknowns: tuple[SymbolTerm, ...] = ()
    contributions: tuple[Contribution, ...] = ()

    @property
    def has_unknowns(self) -> bool:
        return bool(self.unknowns)


class Prediction(BaseModel):
    """Contributions to H^*(F_k) from the strata above, degree by degree."""
    model_config = ConfigDict(frozen=True)

    stratum: int
    rows: dict[int, PredictedRow]

    def row(self, degree: int) -> PredictedRow:
        return self.rows.get(degree, PredictedRow())

    @property
    def max_degree(self) -> int:
        return max(self.rows, default=0)

    def families(self) -> set[tuple[int, int, tuple[int, ...]]]:
        return {c.symbol.family for row in self.rows.values() for c in row.contributions}

    def sources(self) -> list[tuple[int, int | None, tuple[int, ...]]]:
        found = {
            (c.source_stratum, c.source_degree, c.coefficient)
            for row in self.rows.values() for c in row.contributions
        }
        return sorted(found, key=lambda s: (-s[0], -1 if s[1] is None else s[1], s[2]))


class InferenceResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    stratum: int
    entries: tuple[LedgerEntry, ...] = ()
    constraints: tuple[Constraint, ...] = ()

    def new_at(self, degree: int) -> IrrepSum:
        for entry in self.entries:
            if entry.fiber_degree == degree:
                return entry.system
        return IrrepSum.zero()


class BettiValue(BaseModel):
    """A Betti number that is either known, or unknown with bounds."""
    model_config = ConfigDict(frozen=True)

    exact: int | None = None
    lower: int = 0
    upper: int | None = None

    @model_validator(mode="after")
    def _check(self) -> "BettiValue":
        if self.exact is not None and self.exact < 0:
            raise ValueError(f"Betti number {self.exact} is negative")
        if self.upper is not None and self.upper < self.lower:
            raise ValueError(f"upper bound {self.upper} below lower bound {self.lower}")
        return self

    @classmethod
    def known(cls, value: int) -> "BettiValue":
        return cls(exact=value, lower=value, upper=value)

    @classmethod
    def unknown(cls, lower: int = 0, upper: int | None = None) -> "BettiValue":
        return cls(lower=lower, upper=upper)

    @property
    def is_known(self) -> bool:
        return self.exact is not None

    @property
    def floor(self) -> int:
        return self.exact if self.exact is not None else self.lower

    def render(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        if self.lower > 0:
            return f"?>={self.lower}"
        return "?"


class BettiWithUnknowns(BaseModel):
    """Betti numbers of `label` by degree; unknown degrees are named prefix+degree(label)."""
    model_config = ConfigDict(frozen=True)

    label: str
    values: tuple[BettiValue, ...]
    prefix: str = "h"

    @classmethod
    def from_ints(cls, label: str, values, prefix: str = "h") -> "BettiWithUnknowns":
        return cls(
            label=label,
            prefix=prefix,
            values=tuple(BettiValue.unknown() if v is None else BettiValue.known(v) for v in values),
        )

    def __getitem__(self, degree: int) -> BettiValue:
        if 0 <= degree < len(self.values):
            return self.values[degree]
        return BettiValue.known(0)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def top_degree(self) -> int:
        return len(self.values) - 1

    def symbol(self, degree: int) -> str:
        return f"{self.prefix}{degree}({self.label})"

    def unknown_degrees(self) -> list[int]:
        return [d for d, v in enumerate(self.values) if not v.is_known]

    def floors(self) -> list[int]:
        return [v.floor for v in self.values]

    def render(self) -> str:
        return " ".join(v.render() for v in self.values)

    def even_row(self) -> list[str]:
        return [v.render() for v in self.values[::2]]

    def with_value(self, degree: int, value: BettiValue) -> "BettiWithUnknowns":
        values = list(self.values)
        values[degree] = value
        return self.model_copy(update={"values": tuple(values)})


class Summand(BaseModel):
    """One global summand IH^*(Sat_k, G)[shift] entering the decomposition of H^*(toroidal)."""
    model_config = ConfigDict(frozen=True)

    stratum: int
    fiber_degree: int
    coefficient: tuple[int, ...] = ()
    multiplicity: int = 1
    shift_label: int

    @property
    def label(self) -> str:
        coefficient = "" if not self.coefficient else f",{format_parts(self.coefficient)}"
        prefix = "" if self.multiplicity == 1 else f"{self.multiplicity} "
        return f"{prefix}IH*(Sat_{self.stratum}{coefficient})[{self.shift_label}]{{j={self.fiber_degree}}}"


class LinearRelation(BaseModel):
    model_config = ConfigDict(frozen=True)

    degree: int
    lhs: str
    terms: tuple[tuple[str, int], ...]
    constant: int = 0

    @property
    def label(self) -> str:
        parts = [name if coefficient == 1 else f"{coefficient} {name}" for name, coefficient in self.terms]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return f"{self.lhs} = " + " + ".join(parts)


class Bound(BaseModel):
    model_config = ConfigDict(frozen=True)

    symbol: str
    lower: int

    @property
    def label(self) -> str:
        return f"{self.symbol} >= {self.lower}"


class SummandRow(BaseModel):
    """A row of the genus table: one summand's Betti numbers placed at their total degrees."""
    model_config = ConfigDict(frozen=True)

    label: str
    cells: dict[int, BettiValue]


class AssemblyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    genus: int
    ih: BettiWithUnknowns
    toroidal: BettiWithUnknowns
    taut: tuple[int, ...]
    summands: tuple[Summand, ...]
    rows: tuple[SummandRow, ...]
    sum_row: tuple[int, ...]
    coefficient_series: dict[str, BettiWithUnknowns] = {}
    relations: tuple[LinearRelation, ...] = ()
    bounds: tuple[Bound, ...] = ()

    @property
    def decomposition_label(self) -> str:
        pieces = [f"IH*(Sat_{self.genus})[0]"]
        pieces.extend(s.label for s in self.summands if s.stratum > 0)
        if any(s.stratum == 0 for s in self.summands):
            pieces.append(f"(new part of H*(F_{{0,{self.genus}}}))[0]")
        return f"H*({self.toroidal.label}) = " + " + ".join(pieces)

    def matches_taut(self) -> list[int]:
        """Degrees where the IH value is known and differs from the tautological ring."""
        return [d for d, v in enumerate(self.ih.values) if v.is_known and v.exact != self.taut[d]]
