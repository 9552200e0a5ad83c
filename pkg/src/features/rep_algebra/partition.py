from fractions import Fraction
from typing import Any, Iterable

from pydantic import BaseModel, ConfigDict, model_validator

from src.shared.errors import NonMonotone, TooManyRows, OutOfRange


def normalize_parts(raw: Iterable[int], ambient_genus: int) -> tuple[int, ...]:
    """Strip zeros and validate a highest weight against Sp(2g)."""
    if ambient_genus < 0:
        raise OutOfRange(f"ambient genus must be non-negative, got {ambient_genus}")

    raw = tuple(int(part) for part in raw)
    if any(part < 0 for part in raw):
        raise NonMonotone(f"negative part in {list(raw)}")

    parts = tuple(part for part in raw if part != 0)
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise NonMonotone(f"parts {list(raw)} are not weakly decreasing")
    if len(parts) > ambient_genus:
        raise TooManyRows(
            f"partition {list(parts)} has {len(parts)} rows but Sp({2 * ambient_genus}) allows {ambient_genus}"
        )
    return parts


def format_parts(parts: tuple[int, ...]) -> str:
    if not parts:
        return "Q"
    return "V[" + ",".join(str(part) for part in parts) + "]"


class Partition(BaseModel):
    """Highest weight of an irreducible Sp(2g)-representation."""
    model_config = ConfigDict(frozen=True)

    parts: tuple[int, ...] = ()
    ambient_genus: int

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        if isinstance(data, dict) and "ambient_genus" in data:
            data = dict(data)
            data["parts"] = normalize_parts(data.get("parts", ()), data["ambient_genus"])
        return data

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def is_trivial(self) -> bool:
        return not self.parts

    @property
    def label(self) -> str:
        return format_parts(self.parts)

    def __str__(self) -> str:
        return self.label


def partition_normalize(raw: Iterable[int], ambient_genus: int) -> Partition:
    return Partition(parts=tuple(raw), ambient_genus=ambient_genus)


def partition_weight(partition: Partition) -> int:
    """Hodge weight of V_mu."""
    return partition.weight


def weyl_dimension(partition: Partition) -> int:
    """Dimension of V_mu by the Weyl formula for type C_g.

    With l = mu + rho and rho = (g, g-1, ..., 1):
        prod_{i<j} (l_i - l_j)(l_i + l_j) / ((rho_i - rho_j)(rho_i + rho_j)) * prod_i l_i / rho_i
    """
    g = partition.ambient_genus
    highest = list(partition.parts) + [0] * (g - len(partition.parts))
    rho = [g - i for i in range(g)]
    shifted = [m + r for m, r in zip(highest, rho)]

    dim = Fraction(1)
    for i in range(g):
        dim *= Fraction(shifted[i], rho[i])
        for j in range(i + 1, g):
            dim *= Fraction(
                (shifted[i] - shifted[j]) * (shifted[i] + shifted[j]),
                (rho[i] - rho[j]) * (rho[i] + rho[j]),
            )

    assert dim.denominator == 1, f"non-integral Weyl dimension for {partition}"
    return int(dim)
