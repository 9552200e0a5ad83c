"""Partitions, formal sums of symplectic local systems, exterior powers"""
from .partition import Partition, partition_normalize, partition_weight, weyl_dimension, format_parts
from .irrep_sum import (
    Term,
    IrrepSum,
    align_twists,
    sum_add,
    sum_subtract,
    sum_min,
    sum_max,
    dual,
    irrep_dimension,
)
from .exterior import exterior_power_decomposition

__all__ = [
    'Partition',
    'partition_normalize',
    'partition_weight',
    'weyl_dimension',
    'format_parts',
    'Term',
    'IrrepSum',
    'align_twists',
    'sum_add',
    'sum_subtract',
    'sum_min',
    'sum_max',
    'dual',
    'irrep_dimension',
    'exterior_power_decomposition',
]
