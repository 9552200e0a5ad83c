from src.shared.errors import BadDims, OutOfRange
from src.shared.logger import setup_logger
from src.features.decomposition.models import Stratification, satake_stratum_dim

logger = setup_logger(__name__)


class StratificationHandler:

    def make_stratification(self, g: int, fiber_dims: tuple[int, ...] | list[int]) -> Stratification:
        """Sat_g = A_g + A_{g-1} + ... + A_0 with dim A_k = k(k+1)/2."""
        if g < 1:
            raise OutOfRange(f"genus must be at least 1, got {g}")
        fiber_dims = tuple(fiber_dims)
        if len(fiber_dims) != g:
            raise BadDims(f"genus {g} needs {g} fiber dimensions, got {len(fiber_dims)}")
        return Stratification(
            genus=g,
            stratum_dims=tuple(satake_stratum_dim(k) for k in range(g + 1)),
            fiber_dims=fiber_dims,
        )

    def defect(self, strat: Stratification) -> int:
        """max over strata of 2 f_k + s_k - n; the open stratum contributes 0."""
        value = max(
            [0] + [strat.max_shift(k) for k in range(strat.genus)]
        )
        logger.debug(f"Defect of {strat.name}: {value}")
        return value
