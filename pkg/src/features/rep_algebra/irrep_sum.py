from typing import Any, Iterable, Mapping

from pydantic import BaseModel, ConfigDict, model_validator

from src.shared.errors import NegativeMultiplicity, NonMonotone
from src.features.rep_algebra.partition import Partition, format_parts, weyl_dimension

# (parts, twist); twist None means "not tracked"
TermKey = tuple[tuple[int, ...], int | None]


def _sort_key(key: TermKey):
    parts, twist = key
    # Heaviest partitions first and Q last, the order tables are written in
    return (-sum(parts), tuple(-p for p in parts), twist is not None, twist or 0)


class Term(BaseModel):
    model_config = ConfigDict(frozen=True)

    parts: tuple[int, ...] = ()
    multiplicity: int = 1
    twist: int | None = None

    @model_validator(mode="after")
    def _check(self) -> "Term":
        if self.multiplicity <= 0:
            raise NegativeMultiplicity(f"stored multiplicity must be positive, got {self.multiplicity}")
        if any(p <= 0 for p in self.parts) or any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise NonMonotone(f"parts {list(self.parts)} are not a normalized partition")
        return self

    @property
    def key(self) -> TermKey:
        return (self.parts, self.twist)

    @property
    def label(self) -> str:
        text = format_parts(self.parts)
        if self.twist is not None:
            text += f"({self.twist})"
        if self.multiplicity != 1:
            text = f"{self.multiplicity} {text}"
        return text


class IrrepSum(BaseModel):
    """Formal sum of irreducible local systems with non-negative multiplicities.

    Terms are merged and kept in canonical order, so model equality is the
    twist-sensitive equality of sums. `matches` is the comparison that drops
    twists when only one side tracks them.
    """
    model_config = ConfigDict(frozen=True)

    terms: tuple[Term, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _canonical(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "terms" not in data:
            return data
        merged: dict[TermKey, int] = {}
        for raw in data["terms"]:
            term = raw if isinstance(raw, Term) else Term.model_validate(raw)
            merged[term.key] = merged.get(term.key, 0) + term.multiplicity
        ordered = sorted(merged.items(), key=lambda item: _sort_key(item[0]))
        return {"terms": tuple(Term(parts=parts, multiplicity=m, twist=twist) for (parts, twist), m in ordered)}

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_counts(cls, counts: Mapping[TermKey, int]) -> "IrrepSum":
        merged: dict[TermKey, int] = {}
        for (parts, twist), multiplicity in counts.items():
            key = (tuple(parts), twist)
            merged[key] = merged.get(key, 0) + multiplicity
        for (parts, twist), multiplicity in merged.items():
            if multiplicity < 0:
                label = format_parts(parts) + ("" if twist is None else f"({twist})")
                raise NegativeMultiplicity(f"{label} would get multiplicity {multiplicity}")
        return cls(terms=[
            Term(parts=parts, multiplicity=m, twist=twist)
            for (parts, twist), m in merged.items() if m > 0
        ])

    @classmethod
    def zero(cls) -> "IrrepSum":
        return cls()

    @classmethod
    def of(cls, parts: Iterable[int] = (), multiplicity: int = 1, twist: int | None = None) -> "IrrepSum":
        return cls.from_counts({(tuple(parts), twist): multiplicity})

    @classmethod
    def trivial(cls, multiplicity: int = 1, twist: int | None = None) -> "IrrepSum":
        return cls.of((), multiplicity, twist)

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    def counts(self) -> dict[TermKey, int]:
        return {term.key: term.multiplicity for term in self.terms}

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def has_twists(self) -> bool:
        return any(term.twist is not None for term in self.terms)

    @property
    def has_untwisted(self) -> bool:
        return any(term.twist is None for term in self.terms)

    @property
    def rank(self) -> int:
        """Total multiplicity; the Betti number when every term is Q."""
        return sum(term.multiplicity for term in self.terms)

    def multiplicity(self, parts: Iterable[int] = (), twist: int | None = None) -> int:
        return self.counts().get((tuple(parts), twist), 0)

    def partitions(self) -> list[tuple[int, ...]]:
        return sorted({term.parts for term in self.terms}, key=lambda p: _sort_key((p, None)))

    def strip_twists(self) -> "IrrepSum":
        if not self.has_twists:
            return self
        counts: dict[TermKey, int] = {}
        for term in self.terms:
            counts[(term.parts, None)] = counts.get((term.parts, None), 0) + term.multiplicity
        return IrrepSum.from_counts(counts)

    def dimension(self, genus: int) -> int:
        return irrep_dimension(self, genus)

    def matches(self, other: "IrrepSum") -> bool:
        a, b = align_twists(self, other)
        return a == b

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return " + ".join(term.label for term in self.terms)

    def __add__(self, other: "IrrepSum") -> "IrrepSum":
        return sum_add(self, other)

    def __sub__(self, other: "IrrepSum") -> "IrrepSum":
        return sum_subtract(self, other)

    def __mul__(self, factor: int) -> "IrrepSum":
        if factor < 0:
            raise NegativeMultiplicity(f"cannot scale by {factor}")
        return IrrepSum.from_counts({key: m * factor for key, m in self.counts().items()})

    __rmul__ = __mul__


def align_twists(a: IrrepSum, b: IrrepSum) -> tuple[IrrepSum, IrrepSum]:
    """Drop twists from both operands when one side tracks them and the other does not."""
    if a.is_zero or b.is_zero:
        return a, b
    if (a.has_twists and b.has_untwisted) or (b.has_twists and a.has_untwisted):
        return a.strip_twists(), b.strip_twists()
    return a, b


def sum_add(a: IrrepSum, b: IrrepSum) -> IrrepSum:
    a, b = align_twists(a, b)
    counts = a.counts()
    for key, multiplicity in b.counts().items():
        counts[key] = counts.get(key, 0) + multiplicity
    return IrrepSum.from_counts(counts)


def sum_subtract(a: IrrepSum, b: IrrepSum) -> IrrepSum:
    """Termwise difference; the residual 'not accounted for' by b."""
    a, b = align_twists(a, b)
    counts = a.counts()
    for key, multiplicity in b.counts().items():
        remaining = counts.get(key, 0) - multiplicity
        if remaining < 0:
            raise NegativeMultiplicity(f"cannot subtract {b} from {a}")
        counts[key] = remaining
    return IrrepSum.from_counts(counts)


def sum_min(a: IrrepSum, b: IrrepSum) -> IrrepSum:
    a, b = align_twists(a, b)
    other = b.counts()
    return IrrepSum.from_counts({key: min(m, other.get(key, 0)) for key, m in a.counts().items()})


def sum_max(a: IrrepSum, b: IrrepSum) -> IrrepSum:
    a, b = align_twists(a, b)
    counts = a.counts()
    for key, multiplicity in b.counts().items():
        counts[key] = max(counts.get(key, 0), multiplicity)
    return IrrepSum.from_counts(counts)


def dual(a: IrrepSum, weight: int = 0) -> IrrepSum:
    """Symplectic local systems are self-dual; only twists move, t -> -weight - t."""
    return IrrepSum.from_counts({
        (parts, None if twist is None else -weight - twist): m
        for (parts, twist), m in a.counts().items()
    })


def irrep_dimension(a: IrrepSum, genus: int) -> int:
    return sum(
        term.multiplicity * weyl_dimension(Partition(parts=term.parts, ambient_genus=genus))
        for term in a.terms
    )
