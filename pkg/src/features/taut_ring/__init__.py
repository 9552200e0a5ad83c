"""Tautological ring of A_g: basis, graded dimensions, pairing"""
from .tautological import (
    TautBasisElement,
    GradedDims,
    PairingReport,
    DegreePairing,
    taut_basis,
    taut_graded_dims,
    pairing_check,
    socle_degree,
)

__all__ = [
    'TautBasisElement',
    'GradedDims',
    'PairingReport',
    'DegreePairing',
    'taut_basis',
    'taut_graded_dims',
    'pairing_check',
    'socle_degree',
]
