"""Fuel-tax revenue and shortfall against a pre-pandemic baseline year.

Revenue in dollars is ``gallons * cents_per_gallon / 100``. A month's gap
compares revenue on projected gallons with revenue on the same calendar
month of the baseline year. Trailing twelve-month gaps sum revenue over the
window before taking the ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from fueltax.errors import DataError, ParseError
from fueltax.forecast import ACTUAL, PREDICTED, Projection
from fueltax.panel import (
    GASOLINE,
    FuelPanel,
    MonthKey,
    TaxSchedule,
    _month_key,
    _number,
    _rows,
    _state,
    check_kind,
    fmt_number,
    month_range,
)

BAND = (-15.0, -10.0)
# gaps within this many percentage points of a band edge count as on it
BAND_TOL = 1e-9
GAP_HEADER = ("state", "year", "month", "pct_gap")
SUMMARY_HEADER = ("state", "trailing12_gap_pct", "flagged")
SOURCES = ("blend", ACTUAL, PREDICTED)


def monthly_revenue(gallons: float, rate: float) -> float:
    """Dollars raised by ``gallons`` at ``rate`` cents per gallon."""
    if not gallons >= 0:
        raise DataError(f"gallons must be >= 0, got {gallons!r}")
    if not 0 < rate < 200:
        raise DataError(f"rate {rate!r} outside (0, 200) cents/gal")
    return gallons * rate / 100.0


def pct_gap(value: float, base: float) -> float:
    return 100.0 * (value / base - 1.0)


def in_band(gap: float, band=BAND) -> bool:
    lo, hi = band
    return lo - BAND_TOL <= gap <= hi + BAND_TOL


@dataclass(frozen=True)
class RevenueEntry:
    state: str
    when: MonthKey
    state_revenue: float
    federal_revenue: float
    fuel_kind: str


def baseline(panel: FuelPanel, state: str, kind: str = GASOLINE, reference_year: int = 2019) -> np.ndarray:
    """The state's 12 monthly values of ``reference_year`` in gallons, January first."""
    check_kind(kind)
    months = month_range(MonthKey(reference_year, 1), MonthKey(reference_year, 12))
    missing = [m for m in months if panel.get(state, m) is None]
    if missing:
        raise DataError(f"baseline year incomplete: missing {', '.join(f'({state}, {m})' for m in missing)}")
    return np.array([panel.value(state, m, kind) * 1000.0 for m in months])


def _source_value(projection: Projection, state, when, source):
    if source == "blend":
        return projection.best(state, when)
    return projection.get(state, when, source)


def revenue_entries(
    projection: Projection,
    tax: TaxSchedule,
    projected_tax: TaxSchedule | None = None,
    source: str = "blend",
) -> list[RevenueEntry]:
    """Monthly state and federal revenue for every state and month of a projection.

    ``projected_tax`` applies to months after the last actual month.
    """
    projected_tax = projected_tax or tax
    kind = projection.kind
    out = []
    for state in projection.states:
        for when in projection.months:
            v = _source_value(projection, state, when, source)
            if v is None:
                continue
            schedule = projected_tax if projection.last_actual is None or when > projection.last_actual else tax
            gallons = max(v, 0.0) * 1e6
            out.append(
                RevenueEntry(
                    state,
                    when,
                    monthly_revenue(gallons, schedule.rate(state, kind)),
                    monthly_revenue(gallons, schedule.federal_rate(kind)),
                    kind,
                )
            )
    return out


def national_revenue(entries: Iterable[RevenueEntry], when: MonthKey) -> float:
    return math.fsum(e.state_revenue for e in entries if e.when == when)


@dataclass(frozen=True)
class GapReport:
    """Per-month and trailing twelve-month revenue gaps, percent vs baseline.

    ``None`` marks an undefined gap (a zero baseline month for that state).
    ``flagged`` maps state to True/False, or None when undefined.
    """

    monthly: dict  # (state, MonthKey) -> pct or None
    trailing: dict  # (state, MonthKey) -> pct or None, windows ending at that month
    summary: dict  # state -> trailing gap at as_of, or None
    flagged: dict  # state -> bool or None
    as_of: MonthKey
    baseline_year: int

    @property
    def flagged_states(self) -> tuple[str, ...]:
        return tuple(s for s, f in sorted(self.flagged.items()) if f)

    @property
    def undefined_states(self) -> tuple[str, ...]:
        return tuple(s for s, f in sorted(self.flagged.items()) if f is None)

    def to_csv(self) -> str:
        lines = [",".join(GAP_HEADER)]
        for (state, when), gap in sorted(self.monthly.items()):
            lines.append(f"{state},{when.year},{when.month},{'' if gap is None else fmt_number(gap)}")
        return "\n".join(lines) + "\n"

    def summary_csv(self) -> str:
        lines = [",".join(SUMMARY_HEADER)]
        for state in sorted(self.summary):
            gap = self.summary[state]
            flag = self.flagged[state]
            flag_text = "undefined" if flag is None else ("true" if flag else "false")
            lines.append(f"{state},{'' if gap is None else fmt_number(gap)},{flag_text}")
        return "\n".join(lines) + "\n"


def gap_report(
    projection: Projection | Sequence[Projection],
    panel: FuelPanel,
    tax: TaxSchedule,
    baseline_year: int = 2019,
    projected_tax: TaxSchedule | None = None,
    source: str = "blend",
    start: MonthKey | None = None,
    as_of: MonthKey | None = None,
    band=BAND,
) -> GapReport:
    """Revenue gaps of a projection against the baseline year.

    Passing one projection per fuel kind gives a combined report: revenue
    from gasoline and special fuel is summed before comparing. Months run
    from ``start`` (default: January after the baseline year) to the end of
    the projection. ``source="blend"`` uses actual values where the panel
    has them and predictions elsewhere. Tax overrides in ``projected_tax``
    apply only after the last actual month, so a rate rise shows up as
    narrowing the gap.
    """
    projections = [projection] if isinstance(projection, Projection) else list(projection)
    if not projections:
        raise DataError("no projection given")
    if len({p.kind for p in projections}) != len(projections):
        raise DataError("at most one projection per fuel kind")
    if source not in SOURCES:
        raise DataError(f"unknown source {source!r}; expected one of {SOURCES}")
    projected_tax = projected_tax or tax
    start = start or MonthKey(baseline_year + 1, 1)
    end = max(m for p in projections for m in p.months)
    as_of = as_of or end
    months = month_range(start, end)
    if as_of not in months or months.index(as_of) < 11:
        raise DataError(f"as_of {as_of} needs twelve report months ending there (report starts {start})")
    states = sorted(set.intersection(*(set(p.states) for p in projections)))

    monthly, trailing, summary, flagged = {}, {}, {}, {}
    for state in states:
        base_rev = np.zeros(12)
        for p in projections:
            base_rev += baseline(panel, state, p.kind, baseline_year) * tax.rate(state, p.kind) / 100.0
        if np.any(base_rev <= 0):
            for when in months:
                monthly[(state, when)] = None
            summary[state] = flagged[state] = None
            continue
        revenue = []
        for when in months:
            total = 0.0
            for p in projections:
                v = _source_value(p, state, when, source)
                if v is None:
                    raise DataError(f"projection has no {source} value for ({state}, {when})")
                schedule = projected_tax if p.last_actual is None or when > p.last_actual else tax
                total += monthly_revenue(max(v, 0.0) * 1e6, schedule.rate(state, p.kind))
            revenue.append(total)
            monthly[(state, when)] = pct_gap(total, base_rev[when.month - 1])
        for i in range(11, len(months)):
            window = range(i - 11, i + 1)
            got = math.fsum(revenue[j] for j in window)
            ref = math.fsum(base_rev[months[j].month - 1] for j in window)
            trailing[(state, months[i])] = pct_gap(got, ref)
        summary[state] = trailing.get((state, as_of))
        flagged[state] = None if summary[state] is None else in_band(summary[state], band)
    return GapReport(monthly, trailing, summary, flagged, as_of, baseline_year)


def parse_gap_csv(text) -> dict:
    out = {}
    for line, (st, yr, mo, gap) in _rows(text, GAP_HEADER):
        out[(_state(st, line), _month_key(yr, mo, line))] = None if gap == "" else _number(gap, "pct_gap", line)
    return out


def parse_summary_csv(text) -> dict:
    """``state -> (trailing gap or None, flagged True/False/None)``."""
    out = {}
    flags = {"true": True, "false": False, "undefined": None}
    for line, (st, gap, flag) in _rows(text, SUMMARY_HEADER):
        if flag not in flags:
            raise ParseError(f"bad flag {flag!r}", line)
        out[_state(st, line)] = (None if gap == "" else _number(gap, "trailing12_gap_pct", line), flags[flag])
    return out
