"""State-month fuel consumption panel, tax schedule and population series.

Files carry consumption in thousand gallons (kgal). Change reports are in
million gallons. All containers here are immutable once built.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from fueltax._tables import FEDERAL_RATES_2020, TAX_RATES_2020
from fueltax.errors import DataError, ParseError

ALL_STATES = tuple(sorted(TAX_RATES_2020))
MODELING_STATES = tuple(s for s in ALL_STATES if s != "DC")

GASOLINE = "gasoline"
SPECIAL_FUEL = "special_fuel"
FUEL_KINDS = (GASOLINE, SPECIAL_FUEL)

PANEL_HEADER = ("state", "year", "month", "gasoline_kgal", "special_fuel_kgal")
TAX_HEADER = ("state", "gasoline_cents", "diesel_cents")
POPULATION_HEADER = ("state", "year", "population")
CHANGES_HEADER = ("state", "fuel_kind", "from", "to", "from_kgal", "to_kgal", "delta_mgal", "pct")


def check_state(code: str) -> str:
    if code not in TAX_RATES_2020:
        raise DataError(f"unknown state code {code!r}")
    return code


def check_kind(kind: str) -> str:
    if kind not in FUEL_KINDS:
        raise DataError(f"unknown fuel kind {kind!r}; expected one of {FUEL_KINDS}")
    return kind


def modeling_set(states: Iterable[str], include_dc: bool = False) -> tuple[str, ...]:
    return tuple(sorted(s for s in set(states) if include_dc or s != "DC"))


def fmt_number(value) -> str:
    """Shortest plain-decimal text that parses back to exactly ``value``."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return np.format_float_positional(float(value), unique=True, trim="-")


@dataclass(frozen=True, order=True)
class MonthKey:
    year: int
    month: int

    def __post_init__(self):
        if not (2000 <= self.year <= 2100):
            raise DataError(f"year {self.year} outside 2000-2100")
        if not (1 <= self.month <= 12):
            raise DataError(f"month {self.month} outside 1-12")

    @property
    def index(self) -> int:
        """Months since January of year 0; differences give month counts."""
        return self.year * 12 + self.month - 1

    @classmethod
    def from_index(cls, index: int) -> "MonthKey":
        return cls(index // 12, index % 12 + 1)

    @classmethod
    def parse(cls, text: str) -> "MonthKey":
        """Parse ``YYYY-MM``."""
        try:
            year, month = text.strip().split("-")
            if len(year) != 4 or len(month) != 2:
                raise ValueError
            return cls(int(year), int(month))
        except ValueError:
            raise DataError(f"bad month {text!r}; expected YYYY-MM") from None

    def shift(self, months: int) -> "MonthKey":
        return MonthKey.from_index(self.index + months)

    def next(self) -> "MonthKey":
        return self.shift(1)

    def prev(self) -> "MonthKey":
        return self.shift(-1)

    def __sub__(self, other: "MonthKey") -> int:
        return self.index - other.index

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def month_range(first: MonthKey, last: MonthKey) -> list[MonthKey]:
    """Inclusive list of months from ``first`` to ``last``."""
    return [MonthKey.from_index(i) for i in range(first.index, last.index + 1)]


@dataclass(frozen=True)
class FuelRecord:
    state: str
    when: MonthKey
    gasoline: float
    special_fuel: float

    def __post_init__(self):
        check_state(self.state)
        for name in FUEL_KINDS:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise DataError(f"{name} must be finite and >= 0, got {v!r}")

    def value(self, kind: str) -> float:
        return getattr(self, check_kind(kind))


class FuelPanel:
    """Immutable set of :class:`FuelRecord` keyed by ``(state, month)``.

    Records are kept in canonical ``(state, month)`` order, so two panels
    built from the same records in any order compare equal and iterate
    identically.
    """

    def __init__(self, records: Iterable[FuelRecord]):
        by_key = {}
        for rec in records:
            key = (rec.state, rec.when)
            if key in by_key:
                raise DataError(f"duplicate record for {rec.state} {rec.when}")
            by_key[key] = rec
        self._records = tuple(by_key[k] for k in sorted(by_key))
        self._by_key = MappingProxyType(by_key)
        coverage = {}
        for rec in self._records:
            lo, hi = coverage.get(rec.state, (rec.when, rec.when))
            coverage[rec.state] = (min(lo, rec.when), max(hi, rec.when))
        self._coverage = MappingProxyType(coverage)

    @property
    def records(self) -> tuple[FuelRecord, ...]:
        return self._records

    @property
    def coverage(self) -> Mapping[str, tuple[MonthKey, MonthKey]]:
        """Per-state ``(first, last)`` month actually present."""
        return self._coverage

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __eq__(self, other):
        if not isinstance(other, FuelPanel):
            return NotImplemented
        return self._records == other._records

    def __hash__(self):
        return hash(self._records)

    def __repr__(self):
        return f"FuelPanel({len(self)} records, {len(self._coverage)} states)"

    @property
    def states(self) -> tuple[str, ...]:
        return tuple(sorted(self._coverage))

    def modeling_states(self, include_dc: bool = False) -> tuple[str, ...]:
        return modeling_set(self._coverage, include_dc)

    @property
    def first_month(self) -> MonthKey:
        return min(lo for lo, _ in self._coverage.values())

    @property
    def last_month(self) -> MonthKey:
        return max(hi for _, hi in self._coverage.values())

    def get(self, state: str, when: MonthKey) -> FuelRecord | None:
        return self._by_key.get((state, when))

    def value(self, state: str, when: MonthKey, kind: str) -> float:
        rec = self.get(state, when)
        if rec is None:
            raise DataError(f"no record for {state} {when}")
        return rec.value(kind)

    def select(self, states: Iterable[str]) -> "FuelPanel":
        keep = set(states)
        return FuelPanel(r for r in self._records if r.state in keep)

    def national_total(self, when: MonthKey, kind: str, states: Iterable[str] | None = None) -> float:
        states = self.modeling_states() if states is None else states
        return math.fsum(self.value(s, when, kind) for s in states)

    def to_csv(self) -> str:
        lines = [",".join(PANEL_HEADER)]
        for r in self._records:
            lines.append(
                f"{r.state},{r.when.year},{r.when.month},"
                f"{fmt_number(r.gasoline)},{fmt_number(r.special_fuel)}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TaxSchedule:
    """Per-state gasoline/diesel rates plus federal rates, cents per gallon."""

    rates: Mapping[str, tuple[float, float]]
    federal_gasoline: float
    federal_diesel: float

    def __post_init__(self):
        object.__setattr__(self, "rates", MappingProxyType(dict(self.rates)))
        for state, pair in self.rates.items():
            check_state(state)
            for r in pair:
                _check_rate(r, state)
        _check_rate(self.federal_gasoline, "FED")
        _check_rate(self.federal_diesel, "FED")

    @classmethod
    def table_2020(cls) -> "TaxSchedule":
        """Rates in effect July 2020, including DC."""
        return cls(TAX_RATES_2020, *FEDERAL_RATES_2020)

    def rate(self, state: str, kind: str) -> float:
        try:
            gas, diesel = self.rates[state]
        except KeyError:
            raise DataError(f"no tax rate for {state}") from None
        return gas if check_kind(kind) == GASOLINE else diesel

    def federal_rate(self, kind: str) -> float:
        return self.federal_gasoline if check_kind(kind) == GASOLINE else self.federal_diesel

    def with_overrides(self, overrides: Mapping[str, Mapping[str, float]]) -> "TaxSchedule":
        """Replace selected rates; ``overrides`` maps state -> {kind: cents}."""
        rates = dict(self.rates)
        for state, by_kind in overrides.items():
            gas, diesel = rates.get(state, (None, None))
            for kind, value in by_kind.items():
                if check_kind(kind) == GASOLINE:
                    gas = value
                else:
                    diesel = value
            if gas is None or diesel is None:
                raise DataError(f"override for {state} leaves a rate undefined")
            rates[state] = (float(gas), float(diesel))
        return TaxSchedule(rates, self.federal_gasoline, self.federal_diesel)

    def to_csv(self) -> str:
        lines = [",".join(TAX_HEADER)]
        for state in sorted(self.rates):
            gas, diesel = self.rates[state]
            lines.append(f"{state},{fmt_number(gas)},{fmt_number(diesel)}")
        lines.append(f"FED,{fmt_number(self.federal_gasoline)},{fmt_number(self.federal_diesel)}")
        return "\n".join(lines) + "\n"


def _check_rate(rate, who):
    if not (math.isfinite(rate) and 0 < rate < 200):
        raise DataError(f"rate {rate!r} for {who} outside (0, 200) cents/gal")


@dataclass(frozen=True)
class PopulationSeries:
    """Annual population per state; each state's years are contiguous."""

    values: Mapping[str, Mapping[int, int]]

    def __post_init__(self):
        frozen = {}
        for state, by_year in self.values.items():
            check_state(state)
            years = sorted(by_year)
            for y in years:
                if by_year[y] <= 0:
                    raise DataError(f"non-positive population for {state} {y}")
            gaps = sorted(set(range(years[0], years[-1] + 1)) - set(years)) if years else []
            if gaps:
                raise DataError(f"population for {state} has a gap at year {gaps[0]}")
            frozen[state] = MappingProxyType({y: int(by_year[y]) for y in years})
        object.__setattr__(self, "values", MappingProxyType(frozen))

    def lookup(self, state: str, year: int) -> int:
        try:
            return self.values[state][year]
        except KeyError:
            raise DataError(f"no population for ({state}, {year})") from None

    def years(self, state: str) -> tuple[int, int]:
        ys = self.values[state]
        return min(ys), max(ys)

    def to_csv(self) -> str:
        lines = [",".join(POPULATION_HEADER)]
        for state in sorted(self.values):
            for year, pop in sorted(self.values[state].items()):
                lines.append(f"{state},{year},{pop}")
        return "\n".join(lines) + "\n"


# -- parsing -----------------------------------------------------------------


def _rows(text, header):
    """Yield ``(line_number, fields)`` for each non-blank data row."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    first = next(reader, None)
    if first is None:
        raise ParseError("missing header", line=1)
    got = tuple(f.strip() for f in first)
    if got and got[0].startswith("﻿"):
        got = (got[0][1:],) + got[1:]
    if got != header:
        raise ParseError(f"bad header {','.join(got)!r}; expected {','.join(header)!r}", line=1)
    for fields in reader:
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(fields)}", line=reader.line_num)
        yield reader.line_num, [f.strip() for f in fields]


def _number(text, what, line):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric {what} {text!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {what} {text!r}", line)
    return value


def _integer(text, what, line):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"non-integer {what} {text!r}", line) from None


def _state(text, line):
    if text not in TAX_RATES_2020:
        raise ParseError(f"unknown state code {text!r}", line)
    return text


def _month_key(year_text, month_text, line):
    year = _integer(year_text, "year", line)
    month = _integer(month_text, "month", line)
    if not 1 <= month <= 12:
        raise ParseError(f"month {month} outside 1-12", line)
    if not 2000 <= year <= 2100:
        raise ParseError(f"year {year} outside 2000-2100", line)
    return MonthKey(year, month)


def parse_fuel_csv(text) -> FuelPanel:
    """Parse ``state,year,month,gasoline_kgal,special_fuel_kgal`` rows."""
    records = []
    seen = {}
    for line, (st, yr, mo, gas, special) in _rows(text, PANEL_HEADER):
        state = _state(st, line)
        when = _month_key(yr, mo, line)
        values = []
        for raw, name in ((gas, "gasoline_kgal"), (special, "special_fuel_kgal")):
            v = _number(raw, name, line)
            if v < 0:
                raise ParseError(f"negative {name} {raw!r}", line)
            values.append(v)
        key = (state, when)
        if key in seen:
            raise ParseError(f"duplicate key {state} {when} (first seen on line {seen[key]})", line)
        seen[key] = line
        records.append(FuelRecord(state, when, *values))
    return FuelPanel(records)


def parse_tax_csv(text, required: Iterable[str] = MODELING_STATES) -> TaxSchedule:
    """Parse ``state,gasoline_cents,diesel_cents`` rows plus one ``FED`` row."""
    rates = {}
    federal = None
    for line, (st, gas, diesel) in _rows(text, TAX_HEADER):
        pair = (_number(gas, "gasoline_cents", line), _number(diesel, "diesel_cents", line))
        for r in pair:
            if not 0 < r < 200:
                raise ParseError(f"rate {r!r} outside (0, 200) cents/gal", line)
        if st == "FED":
            if federal is not None:
                raise ParseError("duplicate FED row", line)
            federal = pair
            continue
        state = _state(st, line)
        if state in rates:
            raise ParseError(f"duplicate state {state}", line)
        rates[state] = pair
    if federal is None:
        raise ParseError("missing FED row with federal rates")
    missing = sorted(set(required) - set(rates))
    if missing:
        raise ParseError(f"missing tax rates for {', '.join(missing)}")
    return TaxSchedule(rates, *federal)


def parse_population_csv(text) -> PopulationSeries:
    """Parse ``state,year,population`` rows."""
    values: dict[str, dict[int, int]] = {}
    for line, (st, yr, pop) in _rows(text, POPULATION_HEADER):
        state = _state(st, line)
        year = _integer(yr, "year", line)
        population = _integer(pop, "population", line)
        if population <= 0:
            raise ParseError(f"non-positive population {population}", line)
        by_year = values.setdefault(state, {})
        if year in by_year:
            raise ParseError(f"duplicate key {state} {year}", line)
        by_year[year] = population
    for state, by_year in values.items():
        years = set(by_year)
        for y in range(min(years), max(years) + 1):
            if y not in years:
                raise ParseError(f"population for {state} has a gap at year {y}")
    return PopulationSeries(values)


# -- validation and change statistics ----------------------------------------


@dataclass(frozen=True)
class Issue:
    state: str
    when: MonthKey
    kind: str  # "missing" or "zero"
    severity: str  # "error" or "warning"
    detail: str = ""

    def __str__(self):
        return f"{self.severity}: {self.state} {self.when} {self.kind}{': ' + self.detail if self.detail else ''}"


@dataclass(frozen=True)
class ValidationReport:
    expected_range: tuple[MonthKey, MonthKey]
    issues: tuple[Issue, ...] = field(default_factory=tuple)

    @property
    def missing(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.kind == "missing")

    @property
    def warnings(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.missing


def validate_panel(
    panel: FuelPanel,
    expected_range: tuple[MonthKey, MonthKey],
    states: Iterable[str] | None = None,
) -> ValidationReport:
    """List missing months and zero-consumption months per state.

    Missing months are errors; zero values are warnings only. Nothing is
    raised.
    """
    first, last = expected_range
    states = panel.modeling_states() if states is None else sorted(states)
    issues = []
    for state in states:
        for when in month_range(first, last):
            rec = panel.get(state, when)
            if rec is None:
                issues.append(Issue(state, when, "missing", "error"))
                continue
            zeros = [k for k in FUEL_KINDS if rec.value(k) == 0]
            if zeros:
                issues.append(Issue(state, when, "zero", "warning", "zero " + " and ".join(zeros)))
    return ValidationReport((first, last), tuple(issues))


@dataclass(frozen=True)
class ChangeEntry:
    state: str
    delta: float  # million gallons
    pct: float | None  # None when the starting value is zero
    fuel_kind: str
    from_kgal: float = 0.0
    to_kgal: float = 0.0


def change_report(
    panel: FuelPanel,
    start: MonthKey,
    end: MonthKey,
    kind: str = GASOLINE,
    states: Iterable[str] | None = None,
) -> list[ChangeEntry]:
    """Per-state change in consumption between two months, sorted by delta.

    Raises DataError naming the first state/month that lacks a record.
    """
    check_kind(kind)
    states = panel.modeling_states() if states is None else sorted(states)
    entries = []
    for state in states:
        values = []
        for when in (start, end):
            rec = panel.get(state, when)
            if rec is None:
                raise DataError(f"{state} has no record for {when}")
            values.append(rec.value(kind))
        a, b = values
        diff = b - a
        pct = 100.0 * diff / a if a > 0 else None
        entries.append(ChangeEntry(state, diff / 1000.0, pct, kind, a, b))
    entries.sort(key=lambda e: (e.delta, e.state))
    return entries


def changes_to_csv(entries: Iterable[ChangeEntry], start: MonthKey, end: MonthKey) -> str:
    lines = [",".join(CHANGES_HEADER)]
    for e in entries:
        pct = "" if e.pct is None else fmt_number(e.pct)
        lines.append(
            f"{e.state},{e.fuel_kind},{start},{end},{fmt_number(e.from_kgal)},"
            f"{fmt_number(e.to_kgal)},{fmt_number(e.delta)},{pct}"
        )
    return "\n".join(lines) + "\n"


def parse_changes_csv(text) -> list[ChangeEntry]:
    entries = []
    for line, (st, kind, _start, _end, a, b, delta, pct) in _rows(text, CHANGES_HEADER):
        if kind not in FUEL_KINDS:
            raise ParseError(f"unknown fuel kind {kind!r}", line)
        entries.append(
            ChangeEntry(
                _state(st, line),
                _number(delta, "delta_mgal", line),
                None if pct == "" else _number(pct, "pct", line),
                kind,
                _number(a, "from_kgal", line),
                _number(b, "to_kgal", line),
            )
        )
    return entries
