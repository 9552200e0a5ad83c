"""Graded tables and the two spectral sequences: circle-bundle Leray and Gysin"""
from .graded_table import GradedTable
from .leray import (
    LerayPage,
    invariant_kummer_row,
    circle_leray_page,
    circle_link_ih,
    circle_link_closed_form,
)
from .gysin import ForcedDifferential, GysinPage, gysin_assemble

__all__ = [
    'GradedTable',
    'LerayPage',
    'invariant_kummer_row',
    'circle_leray_page',
    'circle_link_ih',
    'circle_link_closed_form',
    'ForcedDifferential',
    'GysinPage',
    'gysin_assemble',
]
