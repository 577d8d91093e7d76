"""Dispersion analysis and real-wave conditions for generalized continua."""

from .params import CauchyParams, CosseratParams, DerivedModuli, MaterialParams, derive

__version__ = "0.1.0"

__all__ = ["MaterialParams", "CosseratParams", "CauchyParams", "DerivedModuli", "derive"]
