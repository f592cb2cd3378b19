"""Design matrix construction and train/test splitting.

Column layout (fixed): 12 month indicators, one indicator per state in
alphabetical order of postal code, then population (persons), gasoline rate
and diesel rate (cents/gal) and the pandemic clock (months). The target is
consumption in million gallons.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from fueltax.errors import DataError
from fueltax.panel import (
    GASOLINE,
    MODELING_STATES,
    FuelPanel,
    FuelRecord,
    MonthKey,
    PopulationSeries,
    TaxSchedule,
    check_kind,
    fmt_number,
)

LOCKDOWN_ONSET = MonthKey(2020, 4)
SCALAR_COLUMNS = ("population", "gasoline_rate", "diesel_rate", "pandemic_clock")


def pandemic_clock(when: MonthKey, onset: MonthKey = LOCKDOWN_ONSET) -> int:
    """Months since lockdown onset, counting the onset month as 1; 0 before it."""
    return max(0, when - onset + 1)


@dataclass(frozen=True)
class FeatureSpec:
    target: str = GASOLINE
    states: tuple[str, ...] = MODELING_STATES

    def __post_init__(self):
        check_kind(self.target)
        object.__setattr__(self, "states", tuple(sorted(self.states)))
        if len(set(self.states)) != len(self.states) or not self.states:
            raise DataError("feature spec needs a non-empty set of distinct states")

    @property
    def columns(self) -> tuple[str, ...]:
        months = tuple(f"month_{m:02d}" for m in range(1, 13))
        states = tuple(f"state_{s}" for s in self.states)
        return months + states + SCALAR_COLUMNS

    @property
    def n_columns(self) -> int:
        return 12 + len(self.states) + len(SCALAR_COLUMNS)

    def column_index(self, name: str) -> int:
        return self.columns.index(name)

    @property
    def fingerprint(self) -> str:
        """Digest of target and column layout; models refuse other layouts."""
        text = "target=" + self.target + "\n" + "\n".join(self.columns)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def header(self) -> str:
        return ",".join(("state", "year", "month") + self.columns + ("target_mgal",))


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray | None
    row_keys: tuple[tuple[str, MonthKey], ...]
    spec: FeatureSpec = field(default_factory=FeatureSpec)

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.spec.n_columns:
            raise DataError(f"X must be n x {self.spec.n_columns}, got shape {X.shape}")
        if X.shape[0] != len(self.row_keys):
            raise DataError("row_keys do not align with X")
        if len(set(self.row_keys)) != len(self.row_keys):
            raise DataError("duplicate row key in design")
        if not np.all(np.isfinite(X)):
            raise DataError("design contains non-finite values")
        X.flags.writeable = False
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.array(self.y, dtype=float)
            if y.shape != (X.shape[0],) or not np.all(np.isfinite(y)):
                raise DataError("target must be a finite vector aligned with X")
            y.flags.writeable = False
            object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def rows(self, index) -> "DesignMatrix":
        index = np.asarray(index, dtype=int)
        return DesignMatrix(
            self.X[index],
            None if self.y is None else self.y[index],
            tuple(self.row_keys[i] for i in index),
            self.spec,
        )

    def to_csv(self) -> str:
        lines = [self.spec.header()]
        for i, (state, when) in enumerate(self.row_keys):
            cells = [state, str(when.year), str(when.month)]
            cells += [fmt_number(v) for v in self.X[i]]
            cells.append("" if self.y is None else fmt_number(self.y[i]))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def covariates(
    keys: Sequence[tuple[str, MonthKey]],
    tax: TaxSchedule,
    population: Callable[[str, int], float],
    spec: FeatureSpec,
    clock: Callable[[MonthKey], int] = pandemic_clock,
) -> np.ndarray:
    """Covariate rows for arbitrary ``(state, month)`` keys.

    ``population`` is called as ``population(state, year)``; it lets the
    forecaster supply extrapolated values for years beyond the data.
    """
    state_col = {s: 12 + i for i, s in enumerate(spec.states)}
    base = 12 + len(spec.states)
    X = np.zeros((len(keys), spec.n_columns))
    for i, (state, when) in enumerate(keys):
        if state not in state_col:
            raise DataError(f"state {state} is not in the feature layout")
        X[i, when.month - 1] = 1.0
        X[i, state_col[state]] = 1.0
        try:
            gas, diesel = tax.rates[state]
        except KeyError:
            raise DataError(f"missing tax rate for ({state}, {when.year})") from None
        X[i, base] = population(state, when.year)
        X[i, base + 1] = gas
        X[i, base + 2] = diesel
        X[i, base + 3] = clock(when)
    return X


def _population_lookup(pop: PopulationSeries):
    def lookup(state, year):
        try:
            return pop.values[state][year]
        except KeyError:
            raise DataError(f"missing population for ({state}, {year})") from None

    return lookup


def build_design(
    panel: FuelPanel | Iterable[FuelRecord],
    tax: TaxSchedule,
    pop: PopulationSeries,
    spec: FeatureSpec | None = None,
) -> DesignMatrix:
    """One design row per record whose state is in the layout, in input order.

    Records for states outside ``spec.states`` (DC by default) are skipped.
    """
    spec = spec or FeatureSpec()
    keep = set(spec.states)
    records = [r for r in panel if r.state in keep]
    keys = tuple((r.state, r.when) for r in records)
    X = covariates(keys, tax, _population_lookup(pop), spec)
    y = np.array([r.value(spec.target) / 1000.0 for r in records], dtype=float)
    return DesignMatrix(X, y, keys, spec)


@dataclass(frozen=True)
class SplitIndex:
    train_rows: np.ndarray
    test_rows: np.ndarray
    seed: int
    fraction: float

    def __eq__(self, other):
        if not isinstance(other, SplitIndex):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.fraction == other.fraction
            and np.array_equal(self.train_rows, other.train_rows)
            and np.array_equal(self.test_rows, other.test_rows)
        )


def n_train_rows(n: int, fraction: float) -> int:
    # half-up rounding; Python's round() is half-to-even
    return int(math.floor(fraction * n + 0.5))


def split(design: DesignMatrix | int, fraction: float = 0.7, seed: int = 0, method: str = "random") -> SplitIndex:
    """Seeded train/test split.

    ``method="random"`` takes the first ``round(fraction * n)`` positions of
    a seeded permutation as training rows. ``method="time"`` trains on the
    earliest months instead (ties broken by state), which is the honest
    setting for judging forecasts.
    """
    n = design if isinstance(design, int) else design.n
    if not 0 < fraction < 1:
        raise DataError(f"split fraction must be in (0, 1), got {fraction}")
    if n < 2:
        raise DataError("need at least two rows to split")
    k = n_train_rows(n, fraction)
    if k == 0 or k == n:
        raise DataError(f"split of {n} rows at {fraction} leaves an empty side")
    if method == "random":
        order = np.random.default_rng(seed).permutation(n)
    elif method == "time":
        if isinstance(design, int):
            raise DataError("time split needs a design matrix")
        order = np.array(sorted(range(n), key=lambda i: (design.row_keys[i][1], design.row_keys[i][0])))
    else:
        raise DataError(f"unknown split method {method!r}")
    return SplitIndex(order[:k].copy(), order[k:].copy(), seed, fraction)
