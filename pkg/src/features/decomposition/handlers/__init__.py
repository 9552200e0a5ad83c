"""Decomposition ledger handlers"""
from .stratification_handler import StratificationHandler
from .contribution_handler import ContributionHandler
from .new_system_handler import NewSystemHandler
from .link_resolution_handler import LinkResolutionHandler, Resolution
from .assembly_handler import AssemblyHandler
from .blowup_handler import BlowupHandler, PointStratumCheck

__all__ = [
    'StratificationHandler',
    'ContributionHandler',
    'NewSystemHandler',
    'LinkResolutionHandler',
    'Resolution',
    'AssemblyHandler',
    'BlowupHandler',
    'PointStratumCheck',
]
