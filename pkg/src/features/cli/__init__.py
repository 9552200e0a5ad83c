"""Command-line surface and the acceptance suite"""
from .ihcalc_cli import CliConfig, IHCalcCli, main

__all__ = ['CliConfig', 'IHCalcCli', 'main']
