"""Decomposition-theorem ledger over the strata of Sat_g"""
from .models import (
    MINIMAL_NEW,
    AssemblyResult,
    BettiValue,
    BettiWithUnknowns,
    Constraint,
    LedgerEntry,
    LinkSymbol,
    Prediction,
    Stratification,
)
from .link_store import LinkStore
from .decomposition_engine import DecompositionEngine, GenusReport, StratumStep, point_ih, run_genus

__all__ = [
    'MINIMAL_NEW',
    'AssemblyResult',
    'BettiValue',
    'BettiWithUnknowns',
    'Constraint',
    'LedgerEntry',
    'LinkSymbol',
    'Prediction',
    'Stratification',
    'LinkStore',
    'DecompositionEngine',
    'GenusReport',
    'StratumStep',
    'point_ih',
    'run_genus',
]
