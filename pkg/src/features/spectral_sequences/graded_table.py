from typing import Any

from pydantic import BaseModel, ConfigDict, model_validator

from src.shared.errors import OutOfRange
from src.features.rep_algebra.irrep_sum import IrrepSum, sum_add


class GradedTable(BaseModel):
    """Degree -> IrrepSum. Missing degrees are zero; zero entries are never stored."""
    model_config = ConfigDict(frozen=True)

    entries: dict[int, IrrepSum] = {}
    context_genus: int
    top_degree: int | None = None

    @model_validator(mode="before")
    @classmethod
    def _drop_zeros(cls, data: Any) -> Any:
        if isinstance(data, dict) and "entries" in data:
            data = dict(data)
            data["entries"] = {
                int(d): value for d, value in sorted(data["entries"].items())
                if not (isinstance(value, IrrepSum) and value.is_zero)
            }
        return data

    @model_validator(mode="after")
    def _check_degrees(self) -> "GradedTable":
        for degree in self.entries:
            if degree < 0:
                raise OutOfRange(f"negative degree {degree}")
            if self.top_degree is not None and degree > self.top_degree:
                raise OutOfRange(f"degree {degree} exceeds top degree {self.top_degree}")
        return self

    def at(self, degree: int) -> IrrepSum:
        return self.entries.get(degree, IrrepSum.zero())

    def degrees(self) -> list[int]:
        return sorted(self.entries)

    @property
    def max_degree(self) -> int:
        if self.top_degree is not None:
            return self.top_degree
        return max(self.entries, default=0)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def dimension_row(self) -> list[int]:
        return [self.at(d).dimension(self.context_genus) for d in range(self.max_degree + 1)]

    def rank_row(self) -> list[int]:
        return [self.at(d).rank for d in range(self.max_degree + 1)]

    def strip_twists(self) -> "GradedTable":
        return GradedTable(
            entries={d: v.strip_twists() for d, v in self.entries.items()},
            context_genus=self.context_genus,
            top_degree=self.top_degree,
        )

    def matches(self, other: "GradedTable") -> bool:
        degrees = set(self.entries) | set(other.entries)
        return all(self.at(d).matches(other.at(d)) for d in degrees)

    def total(self) -> IrrepSum:
        result = IrrepSum.zero()
        for value in self.entries.values():
            result = sum_add(result, value)
        return result

    def row_labels(self) -> list[str]:
        return [str(self.at(d)) for d in range(self.max_degree + 1)]
