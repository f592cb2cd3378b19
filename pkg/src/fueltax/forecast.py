"""Scenario covariates beyond the data and per-state consumption projections.

Predictions never feed back as inputs; every future row is built from the
calendar, the tax schedule, population and the pandemic clock alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from fueltax.errors import DataError, ParseError
from fueltax.features import DesignMatrix, FeatureSpec, covariates, pandemic_clock
from fueltax.learn.io import check_layout, predict
from fueltax.panel import (
    GASOLINE,
    FuelPanel,
    MonthKey,
    PopulationSeries,
    TaxSchedule,
    _number,
    _rows,
    _state,
    _month_key,
    check_kind,
    fmt_number,
    month_range,
)

CLOCK_POLICIES = ("cap", "continue", "zero_after")
POPULATION_RULES = ("hold", "linear")
ACTUAL, PREDICTED = "actual", "predicted"
PROJECTION_HEADER = ("state", "year", "month", "source", "million_gallons")


@dataclass(frozen=True)
class Scenario:
    """How covariates evolve after the last observed month.

    ``clock_policy``:

    * ``"cap"`` -- the clock stops at ``clock_cap`` (default: its value at
      the panel's last month),
    * ``"continue"`` -- the clock keeps counting,
    * ``"zero_after"`` -- the clock counts until ``zero_after`` and is 0 after.

    ``tax_overrides`` maps state -> {fuel kind: cents/gal} and applies to
    future months only.
    """

    horizon_end: MonthKey = MonthKey(2024, 12)
    clock_policy: str = "cap"
    clock_cap: int | None = None
    zero_after: MonthKey | None = None
    tax_overrides: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    population_rule: str = "hold"

    def __post_init__(self):
        if self.clock_policy not in CLOCK_POLICIES:
            raise DataError(f"unknown clock policy {self.clock_policy!r}")
        if self.clock_cap is not None and self.clock_cap < 0:
            raise DataError("clock cap must be >= 0")
        if self.clock_policy == "zero_after" and self.zero_after is None:
            raise DataError("zero_after policy needs a month")
        if self.population_rule not in POPULATION_RULES:
            raise DataError(f"unknown population rule {self.population_rule!r}")
        overrides = {s: MappingProxyType(dict(v)) for s, v in self.tax_overrides.items()}
        object.__setattr__(self, "tax_overrides", MappingProxyType(overrides))

    def clock(self, panel_end: MonthKey):
        """Clock function for months after ``panel_end``."""
        if self.clock_policy == "continue":
            return pandemic_clock
        if self.clock_policy == "cap":
            cap = pandemic_clock(panel_end) if self.clock_cap is None else self.clock_cap
            return lambda when: min(pandemic_clock(when), cap)
        stop = self.zero_after
        return lambda when: pandemic_clock(when) if when <= stop else 0

    def future_tax(self, tax: TaxSchedule) -> TaxSchedule:
        return tax.with_overrides(self.tax_overrides) if self.tax_overrides else tax


def population_rule(pop: PopulationSeries, rule: str = "hold"):
    """``population(state, year)`` that extends each state's series past its last year.

    ``"hold"`` repeats the last known value, ``"linear"`` follows a least
    squares line through all known years (rounded, at least 1 person).
    """
    slopes = {}

    def lookup(state, year):
        try:
            series = pop.values[state]
        except KeyError:
            raise DataError(f"missing population for ({state}, {year})") from None
        if year in series:
            return series[year]
        first, last = min(series), max(series)
        if year < first:
            raise DataError(f"missing population for ({state}, {year})")
        if rule == "hold" or len(series) < 2:
            return series[last]
        if state not in slopes:
            years = np.array(sorted(series), dtype=float)
            values = np.array([series[int(y)] for y in years], dtype=float)
            slopes[state] = np.polyfit(years, values, 1)
        slope, intercept = slopes[state]
        return max(1, int(round(slope * year + intercept)))

    return lookup


def _layout_states(panel: FuelPanel, spec: FeatureSpec):
    present = set(panel.states)
    return [s for s in spec.states if s in present]


def make_future_rows(
    panel: FuelPanel,
    tax: TaxSchedule,
    pop: PopulationSeries,
    scenario: Scenario,
    spec: FeatureSpec | None = None,
) -> DesignMatrix:
    """Covariate rows, no targets, for every state and month after the panel ends."""
    spec = spec or FeatureSpec()
    end = panel.last_month
    if not scenario.horizon_end > end:
        raise DataError(f"horizon {scenario.horizon_end} is not after the panel end {end}")
    months = month_range(end.next(), scenario.horizon_end)
    keys = tuple((s, m) for s in _layout_states(panel, spec) for m in months)
    X = covariates(
        keys,
        scenario.future_tax(tax),
        population_rule(pop, scenario.population_rule),
        spec,
        clock=scenario.clock(end),
    )
    return DesignMatrix(X, None, keys, spec)


@dataclass(frozen=True)
class ProjectionEntry:
    state: str
    when: MonthKey
    source: str
    value: float  # million gallons


class Projection:
    """Actual and predicted consumption per state and month, million gallons.

    The predicted series covers every month from the panel start to the
    horizon; the actual series holds exactly the months present in the
    panel.
    """

    def __init__(self, entries: Iterable[ProjectionEntry], kind: str = GASOLINE, last_actual: MonthKey | None = None):
        self.kind = check_kind(kind)
        by_key = {}
        for e in entries:
            if e.source not in (ACTUAL, PREDICTED):
                raise DataError(f"unknown source {e.source!r}")
            key = (e.state, e.when, e.source)
            if key in by_key:
                raise DataError(f"duplicate projection entry {e.state} {e.when} {e.source}")
            by_key[key] = e
        self.entries = tuple(by_key[k] for k in sorted(by_key))
        self._by_key = MappingProxyType(by_key)
        actual_months = [e.when for e in self.entries if e.source == ACTUAL]
        if last_actual is None and actual_months:
            last_actual = max(actual_months)
        self.last_actual = last_actual

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, Projection):
            return NotImplemented
        return self.entries == other.entries and self.kind == other.kind

    @property
    def states(self) -> tuple[str, ...]:
        return tuple(sorted({e.state for e in self.entries}))

    @property
    def months(self) -> tuple[MonthKey, ...]:
        return tuple(sorted({e.when for e in self.entries}))

    def count(self, source: str) -> int:
        return sum(1 for e in self.entries if e.source == source)

    def get(self, state: str, when: MonthKey, source: str) -> float | None:
        e = self._by_key.get((state, when, source))
        return None if e is None else e.value

    def best(self, state: str, when: MonthKey) -> float | None:
        """Actual value where one exists, otherwise the prediction."""
        v = self.get(state, when, ACTUAL)
        return self.get(state, when, PREDICTED) if v is None else v

    def series(self, state: str, source: str) -> tuple[list[MonthKey], np.ndarray]:
        picked = [e for e in self.entries if e.state == state and e.source == source]
        return [e.when for e in picked], np.array([e.value for e in picked])

    def to_csv(self) -> str:
        lines = [",".join(PROJECTION_HEADER)]
        for e in self.entries:
            lines.append(f"{e.state},{e.when.year},{e.when.month},{e.source},{fmt_number(e.value)}")
        return "\n".join(lines) + "\n"


def parse_projection_csv(text, kind: str = GASOLINE) -> Projection:
    entries = []
    for line, (st, yr, mo, source, value) in _rows(text, PROJECTION_HEADER):
        if source not in (ACTUAL, PREDICTED):
            raise ParseError(f"unknown source {source!r}", line)
        entries.append(ProjectionEntry(_state(st, line), _month_key(yr, mo, line), source, _number(value, "million_gallons", line)))
    try:
        return Projection(entries, kind)
    except DataError as exc:
        raise ParseError(str(exc)) from None


def historical_rows(panel: FuelPanel, tax: TaxSchedule, pop: PopulationSeries, spec: FeatureSpec) -> DesignMatrix:
    """Covariates for every state and month of the panel span, gaps included."""
    months = month_range(panel.first_month, panel.last_month)
    keys = tuple((s, m) for s in _layout_states(panel, spec) for m in months)
    X = covariates(keys, tax, population_rule(pop, "hold"), spec)
    return DesignMatrix(X, None, keys, spec)


def project(
    model,
    panel: FuelPanel,
    tax: TaxSchedule,
    pop: PopulationSeries,
    scenario: Scenario,
    spec: FeatureSpec | None = None,
) -> Projection:
    """Actual series from the panel plus model predictions through the horizon."""
    spec = spec or FeatureSpec()
    check_layout(model, spec)
    hist = historical_rows(panel, tax, pop, spec)
    future = make_future_rows(panel, tax, pop, scenario, spec)
    keys = hist.row_keys + future.row_keys
    values = predict(model, np.vstack([hist.X, future.X]), spec)
    entries = [ProjectionEntry(s, m, PREDICTED, float(v)) for (s, m), v in zip(keys, values)]
    layout = set(spec.states)
    entries += [
        ProjectionEntry(r.state, r.when, ACTUAL, r.value(spec.target) / 1000.0)
        for r in panel
        if r.state in layout
    ]
    return Projection(entries, spec.target, panel.last_month)


def seasonal_profile(
    projection: Projection,
    state: str,
    source: str = PREDICTED,
    first: MonthKey | None = None,
    last: MonthKey | None = None,
) -> np.ndarray:
    """Mean value per calendar month (January first) of one state's series.

    ``first`` and ``last`` restrict the months averaged, e.g. to whole years.
    """
    months, values = projection.series(state, source)
    out = np.zeros(12)
    counts = np.zeros(12)
    for m, v in zip(months, values):
        if (first is not None and m < first) or (last is not None and m > last):
            continue
        out[m.month - 1] += v
        counts[m.month - 1] += 1
    return out / np.where(counts > 0, counts, 1)
