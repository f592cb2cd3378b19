"""Deterministic synthetic fuel panels: seasonality, trend and a pandemic dip.

For state ``s`` and month ``t``::

    value = base_s * (1 + A sin(2 pi (month - 3) / 12)) * (1 + g) ** years(t)
                   * shock(t) * (1 + eps)

    shock(t) = 1                                  t <  onset
             = 1 - d * 2 ** (-(t - onset) / h)    t >= onset

``years(t)`` counts (fractional) years since the span start and ``eps`` is
Gaussian noise. The seasonal peak falls in June. Special fuel follows the
same law at 30% of the base level and half the seasonal amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from fueltax._tables import POPULATION_2019
from fueltax.errors import DataError
from fueltax.panel import (
    ALL_STATES,
    MODELING_STATES,
    FuelPanel,
    FuelRecord,
    MonthKey,
    PopulationSeries,
    TaxSchedule,
    month_range,
)

GALLONS_PER_PERSON_MONTH = 35.0
SPECIAL_FUEL_SHARE = 0.3


def _state_factor(state: str) -> float:
    # fixed per-state spread of per-capita consumption, 0.8 to 1.2
    return 1.0 + 0.2 * math.sin(1.7 * ALL_STATES.index(state))


def default_base_level(state: str) -> float:
    """Monthly gasoline in kgal at the span start, scaled from population."""
    return POPULATION_2019[state] * GALLONS_PER_PERSON_MONTH * _state_factor(state) / 1000.0


def default_population_growth(state: str) -> float:
    return 0.002 + 0.001 * ((ALL_STATES.index(state) * 7) % 13)


@dataclass(frozen=True)
class SynthConfig:
    states: tuple[str, ...] = MODELING_STATES
    start: MonthKey = MonthKey(2012, 1)
    end: MonthKey = MonthKey(2021, 8)
    base_level: Mapping[str, float] | None = None
    seasonal_amplitude: float = 0.1
    annual_growth: float = 0.01
    dip_depth: float = 0.12
    recovery_halflife: float = 6.0
    dip_onset: MonthKey = MonthKey(2020, 4)
    noise_sigma: float = 0.03
    seed: int = 2021
    population_growth: Mapping[str, float] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(self.states)))
        for s in self.states:
            if s not in ALL_STATES:
                raise DataError(f"unknown state code {s!r}")
        if self.end < self.start:
            raise DataError("synth span ends before it starts")
        checks = {
            "seasonal_amplitude": 0 <= self.seasonal_amplitude < 1,
            "dip_depth": 0 <= self.dip_depth < 1,
            "recovery_halflife": self.recovery_halflife > 0,
            "noise_sigma": self.noise_sigma >= 0,
            "annual_growth": self.annual_growth > -1,
        }
        for name, ok in checks.items():
            value = getattr(self, name)
            if not (math.isfinite(value) and ok):
                raise DataError(f"invalid {name}: {value!r}")
        if self.dip_onset < self.start:
            raise DataError("dip onset precedes the span")
        for s in self.states:
            b = self.base(s)
            if not (math.isfinite(b) and b >= 0):
                raise DataError(f"invalid base level for {s}: {b!r}")

    def base(self, state: str) -> float:
        if self.base_level is not None and state in self.base_level:
            return float(self.base_level[state])
        return default_base_level(state)


def shock(when: MonthKey, onset: MonthKey, depth: float, halflife: float) -> float:
    if when < onset:
        return 1.0
    return 1.0 - depth * 2.0 ** (-(when - onset) / halflife)


def state_series(config: SynthConfig, state: str, amplitude: float, base: float, noise: np.ndarray) -> np.ndarray:
    months = month_range(config.start, config.end)
    out = np.empty(len(months))
    for i, when in enumerate(months):
        seasonal = 1.0 + amplitude * math.sin(2.0 * math.pi * (when.month - 3) / 12.0)
        trend = (1.0 + config.annual_growth) ** ((when - config.start) / 12.0)
        dip = shock(when, config.dip_onset, config.dip_depth, config.recovery_halflife)
        out[i] = base * seasonal * trend * dip * (1.0 + noise[i])
    return np.maximum(out, 0.0)


def generate(config: SynthConfig | None = None) -> FuelPanel:
    """Build a panel from ``config``; identical configs give identical panels."""
    config = config or SynthConfig()
    months = month_range(config.start, config.end)
    records = []
    for state in config.states:
        # per-state stream: independent of which other states are generated
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, ALL_STATES.index(state)]))
        noise = rng.normal(0.0, 1.0, size=(2, len(months))) * config.noise_sigma
        base = config.base(state)
        gas = state_series(config, state, config.seasonal_amplitude, base, noise[0])
        special = state_series(config, state, config.seasonal_amplitude / 2, SPECIAL_FUEL_SHARE * base, noise[1])
        for when, g, s in zip(months, gas, special):
            records.append(FuelRecord(state, when, float(g), float(s)))
    return FuelPanel(records)


def seasonal_profile(config: SynthConfig, amplitude: float | None = None) -> np.ndarray:
    """The generator's 12-month multiplicative seasonal factor, January first."""
    a = config.seasonal_amplitude if amplitude is None else amplitude
    return np.array([1.0 + a * math.sin(2.0 * math.pi * (m - 3) / 12.0) for m in range(1, 13)])


def population(config: SynthConfig, last_year: int | None = None) -> PopulationSeries:
    """Annual populations for every generated state, span start year to ``last_year``."""
    last_year = config.end.year if last_year is None else last_year
    growth = config.population_growth or {}
    values = {}
    for state in config.states:
        r = growth.get(state, default_population_growth(state))
        values[state] = {
            y: max(1, int(round(POPULATION_2019[state] * (1.0 + r) ** (y - 2019))))
            for y in range(config.start.year, last_year + 1)
        }
    return PopulationSeries(values)


def tax_schedule() -> TaxSchedule:
    return TaxSchedule.table_2020()
