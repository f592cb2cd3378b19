"""Fuel consumption panels, from-scratch regressors and fuel-tax revenue gaps."""

from fueltax.errors import ConfigError, DataError, FuelTaxError, LayoutMismatch, ModelError, ParseError
from fueltax.panel import FuelPanel, FuelRecord, MonthKey, PopulationSeries, TaxSchedule

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "FuelPanel",
    "FuelRecord",
    "FuelTaxError",
    "LayoutMismatch",
    "ModelError",
    "MonthKey",
    "ParseError",
    "PopulationSeries",
    "TaxSchedule",
]
