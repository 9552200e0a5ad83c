import pytest

from src.features.datasets.registry import builtin_registry
from src.features.decomposition.decomposition_engine import DecompositionEngine


@pytest.fixture(scope="session")
def registry():
    return builtin_registry()


@pytest.fixture(scope="session")
def reports(registry):
    """run_genus for g = 1..4 on the builtin datasets, computed once."""
    engine = DecompositionEngine(registry)
    return {g: engine.run_genus(g) for g in range(1, 5)}
