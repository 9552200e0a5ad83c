from itertools import combinations

from pydantic import BaseModel, ConfigDict, model_validator

from src.shared.errors import OutOfRange
from src.shared.logger import setup_logger

logger = setup_logger(__name__)


def socle_degree(g: int) -> int:
    return g * (g + 1)


def _check_genus(g: int) -> None:
    if g < 1:
        raise OutOfRange(f"genus must be at least 1, got {g}")


class TautBasisElement(BaseModel):
    """The monomial prod_{i in subset} lambda_i, of cohomological degree 2 * sum(subset)."""
    model_config = ConfigDict(frozen=True)

    subset: tuple[int, ...]
    degree: int

    @model_validator(mode="after")
    def _check(self) -> "TautBasisElement":
        if self.degree != 2 * sum(self.subset):
            raise ValueError(f"degree {self.degree} does not match subset {self.subset}")
        return self

    def complement(self, g: int) -> "TautBasisElement":
        rest = tuple(i for i in range(1, g + 1) if i not in self.subset)
        return TautBasisElement(subset=rest, degree=2 * sum(rest))

    @property
    def label(self) -> str:
        if not self.subset:
            return "1"
        return "".join(f"l{i}" for i in self.subset)


class GradedDims(BaseModel):
    model_config = ConfigDict(frozen=True)

    genus: int
    dims: tuple[int, ...]

    @model_validator(mode="after")
    def _check(self) -> "GradedDims":
        top = socle_degree(self.genus)
        if len(self.dims) != top + 1:
            raise ValueError(f"expected {top + 1} degrees, got {len(self.dims)}")
        if self.dims[0] != 1 or self.dims[top] != 1:
            raise ValueError("R_g must be one-dimensional in degrees 0 and g(g+1)")
        if any(self.dims[j] != self.dims[top - j] for j in range(top + 1)):
            raise ValueError("graded dimensions are not Poincare symmetric")
        return self

    @property
    def socle(self) -> int:
        return socle_degree(self.genus)

    def __getitem__(self, degree: int) -> int:
        if 0 <= degree < len(self.dims):
            return self.dims[degree]
        return 0

    def even_row(self) -> tuple[int, ...]:
        return self.dims[::2]

    @property
    def total(self) -> int:
        return sum(self.dims)


def taut_basis(g: int) -> list[TautBasisElement]:
    """All 2^g square-free monomials in lambda_1..lambda_g, ordered by degree."""
    _check_genus(g)
    basis = [
        TautBasisElement(subset=subset, degree=2 * sum(subset))
        for size in range(g + 1)
        for subset in combinations(range(1, g + 1), size)
    ]
    return sorted(basis, key=lambda e: (e.degree, e.subset))


def taut_graded_dims(g: int) -> GradedDims:
    _check_genus(g)
    top = socle_degree(g)
    # counts[s] = number of subsets of {1..i} with sum s
    counts = [1] + [0] * (top // 2)
    for i in range(1, g + 1):
        for s in range(top // 2, i - 1, -1):
            counts[s] += counts[s - i]

    dims = [0] * (top + 1)
    for s, count in enumerate(counts):
        dims[2 * s] = count
    return GradedDims(genus=g, dims=tuple(dims))


class DegreePairing(BaseModel):
    degree: int
    dim: int
    dual_dim: int
    match: bool


class PairingReport(BaseModel):
    genus: int
    passed: bool
    degrees: list[DegreePairing]
    failures: list[str] = []


def pairing_check(g: int) -> PairingReport:
    """Check that complementing subsets is a degree-complementing involution of the basis.

    Works on bitmasks so that g = 16 stays fast. Failures are reported, not raised.
    """
    _check_genus(g)
    top = socle_degree(g)
    full = (1 << g) - 1

    # mask_degree[mask] = 2 * sum of the set bits' positions (1-based)
    mask_degree = [0] * (1 << g)
    for mask in range(1, 1 << g):
        low = mask & -mask
        mask_degree[mask] = mask_degree[mask ^ low] + 2 * low.bit_length()

    failures: list[str] = []
    per_degree = [0] * (top + 1)
    seen_images = set()
    for mask in range(1 << g):
        degree = mask_degree[mask]
        complement = full ^ mask
        complement_degree = mask_degree[complement]
        per_degree[degree] += 1
        if degree + complement_degree != top:
            failures.append(f"subset mask {mask:b} pairs into degree {degree + complement_degree}")
        if full ^ complement != mask:
            failures.append(f"complement of mask {mask:b} is not an involution")
        seen_images.add(complement)

    if len(seen_images) != 1 << g:
        failures.append("complement map is not a bijection")

    degrees = [
        DegreePairing(degree=j, dim=per_degree[j], dual_dim=per_degree[top - j], match=per_degree[j] == per_degree[top - j])
        for j in range(top + 1)
    ]
    failures.extend(f"degree {d.degree}: {d.dim} != {d.dual_dim}" for d in degrees if not d.match)

    passed = not failures
    if not passed:
        logger.error(f"Pairing check failed for genus {g}: {failures[:3]}")
    return PairingReport(genus=g, passed=passed, degrees=degrees, failures=failures)
