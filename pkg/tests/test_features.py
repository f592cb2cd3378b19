import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fueltax.errors import DataError
from fueltax.features import FeatureSpec, build_design, n_train_rows, pandemic_clock, split
from fueltax.panel import (
    MODELING_STATES,
    SPECIAL_FUEL,
    FuelPanel,
    FuelRecord,
    MonthKey,
    PopulationSeries,
    TaxSchedule,
    month_range,
)

TAX = TaxSchedule.table_2020()
POP = PopulationSeries({s: {y: 1_000_000 + i for y in range(2012, 2022)} for i, s in enumerate(MODELING_STATES)})


@pytest.mark.parametrize(
    "when, clock",
    [(MonthKey(2015, 6), 0), (MonthKey(2020, 3), 0), (MonthKey(2020, 4), 1), (MonthKey(2021, 8), 17)],
)
def test_pandemic_clock(when, clock):
    assert pandemic_clock(when) == clock


def test_clock_monotone_and_unit_steps():
    months = month_range(MonthKey(2012, 1), MonthKey(2024, 12))
    clocks = [pandemic_clock(m) for m in months]
    assert all(b >= a for a, b in zip(clocks, clocks[1:]))
    start = months.index(MonthKey(2020, 4))
    assert all(b - a == 1 for a, b in zip(clocks[start:], clocks[start + 1 :]))


def test_layout():
    spec = FeatureSpec()
    cols = spec.columns
    assert spec.n_columns == len(cols) == 66
    assert cols[:12] == tuple(f"month_{m:02d}" for m in range(1, 13))
    assert cols[12:62] == tuple(f"state_{s}" for s in sorted(MODELING_STATES))
    assert cols[62:] == ("population", "gasoline_rate", "diesel_rate", "pandemic_clock")


def test_fingerprint_tracks_layout():
    base = FeatureSpec()
    assert base.fingerprint == FeatureSpec().fingerprint
    assert base.fingerprint != FeatureSpec(target=SPECIAL_FUEL).fingerprint
    assert base.fingerprint != FeatureSpec(states=MODELING_STATES[:-1]).fingerprint


def test_single_record_row():
    panel = FuelPanel([FuelRecord("TX", MonthKey(2021, 8), 1_000_000, 300_000)])
    d = build_design(panel, TAX, POP)
    row = d.X[0]
    spec = d.spec
    assert row[spec.column_index("month_08")] == 1
    assert row[spec.column_index("state_TX")] == 1
    assert np.count_nonzero(row[:62]) == 2
    assert row[spec.column_index("pandemic_clock")] == 17
    assert row[spec.column_index("gasoline_rate")] == 20.0
    assert row[spec.column_index("population")] == POP.lookup("TX", 2021)
    assert d.y[0] == 1000.0  # million gallons


def test_full_panel_shape(design):
    assert design.X.shape == (5800, 66)
    assert np.all(design.X[:, :62].sum(axis=1) == 2)


def test_pre_pandemic_clock_column(design):
    col = design.spec.column_index("pandemic_clock")
    for (state, when), row in zip(design.row_keys, design.X):
        if when.year == 2015:
            assert row[col] == 0


def test_design_is_read_only(design):
    with pytest.raises(ValueError):
        design.X[0, 0] = 5


def test_dc_skipped_unless_in_layout():
    records = [FuelRecord("DC", MonthKey(2020, 1), 1, 1), FuelRecord("TX", MonthKey(2020, 1), 1, 1)]
    pop = PopulationSeries({"DC": {2020: 700_000}, "TX": {2020: 29_000_000}})
    assert build_design(records, TAX, pop).n == 1
    with_dc = build_design(records, TAX, pop, FeatureSpec(states=("DC", "TX")))
    assert with_dc.n == 2 and with_dc.X.shape[1] == 12 + 2 + 4


def test_missing_population_is_named():
    panel = FuelPanel([FuelRecord("TX", MonthKey(2023, 1), 1, 1)])
    with pytest.raises(DataError, match=r"\(TX, 2023\)"):
        build_design(panel, TAX, POP)


@given(st.permutations(range(12)))
@settings(max_examples=30)
def test_permutation_equivariance(perm):
    records = [FuelRecord(s, MonthKey(2020, m), m * 10.0 + i, 1.0) for i, s in enumerate(("AL", "TX")) for m in (1, 5, 9, 12, 3, 7)]
    shuffled = [records[i] for i in perm]
    a = build_design(records, TAX, POP)
    b = build_design(shuffled, TAX, POP)
    rows_a = {k: (tuple(x), y) for k, x, y in zip(a.row_keys, a.X, a.y)}
    rows_b = {k: (tuple(x), y) for k, x, y in zip(b.row_keys, b.X, b.y)}
    assert rows_a == rows_b
    assert b.row_keys == tuple((r.state, r.when) for r in shuffled)


class TestSplit:
    def test_small(self):
        s = split(10, 0.7, seed=3)
        assert (len(s.train_rows), len(s.test_rows)) == (7, 3)

    def test_paper_size(self):
        s = split(5800, 0.7, seed=0)
        assert (len(s.train_rows), len(s.test_rows)) == (4060, 1740)

    def test_deterministic(self):
        assert split(5800, 0.7, seed=11) == split(5800, 0.7, seed=11)
        assert split(5800, 0.7, seed=11) != split(5800, 0.7, seed=12)

    def test_half_up_rounding(self):
        assert n_train_rows(5, 0.5) == 3
        assert n_train_rows(15, 0.7) == 11  # 10.5 rounds up

    @pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5])
    def test_bad_fraction(self, fraction):
        with pytest.raises(DataError):
            split(10, fraction)

    def test_time_split_trains_on_earliest(self, design):
        s = split(design, 0.7, method="time")
        latest_train = max(design.row_keys[i][1] for i in s.train_rows)
        earliest_test = min(design.row_keys[i][1] for i in s.test_rows)
        assert latest_train <= earliest_test

    @given(st.integers(2, 3000), st.floats(0.05, 0.95), st.integers(0, 2**31))
    def test_partition_property(self, n, f, seed):
        if n_train_rows(n, f) in (0, n):
            return
        s = split(n, f, seed)
        assert abs(len(s.train_rows) - f * n) <= 0.5
        both = np.concatenate([s.train_rows, s.test_rows])
        assert np.array_equal(np.sort(both), np.arange(n))
