"""Shipped input tables: the .ihdat grammar, the builtin registry and report rendering"""
from .dataset_parser import DatasetFile, DatasetSection, parse_dataset, parse_expression, serialize_dataset
from .registry import DatasetRegistry, builtin_registry, load_registry, validate_section

__all__ = [
    'DatasetFile',
    'DatasetSection',
    'parse_dataset',
    'parse_expression',
    'serialize_dataset',
    'DatasetRegistry',
    'builtin_registry',
    'load_registry',
    'validate_section',
]
