import numpy as np
import pytest

from fueltax import synth
from fueltax.errors import DataError, LayoutMismatch
from fueltax.features import FeatureSpec, build_design
from fueltax.forecast import (
    ACTUAL,
    PREDICTED,
    Projection,
    ProjectionEntry,
    Scenario,
    make_future_rows,
    parse_projection_csv,
    population_rule,
    project,
    seasonal_profile,
)
from fueltax.learn import fit_forest, with_layout
from fueltax.learn.forest import ForestParams
from fueltax.learn.tree import TreeModel
from fueltax.panel import GASOLINE, SPECIAL_FUEL, MonthKey, PopulationSeries, month_range

SPEC = FeatureSpec()
CLOCK = SPEC.column_index("pandemic_clock")


def leaf_tree(value, spec=SPEC):
    tree = TreeModel(
        np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]), np.array([value]), np.array([1]), spec.n_columns
    )
    return with_layout(tree, spec)


def month_tree(spec=SPEC):
    """Splits on the June indicator only: 2.0 in June, 1.0 otherwise."""
    tree = TreeModel(
        np.array([spec.column_index("month_06"), -1, -1]),
        np.array([0.5, 0.0, 0.0]),
        np.array([1, -1, -1]),
        np.array([2, -1, -1]),
        np.array([1.5, 1.0, 2.0]),
        np.array([2, 1, 1]),
        spec.n_columns,
    )
    return with_layout(tree, spec)


def test_future_rows(synth_panel, tax, population):
    rows = make_future_rows(synth_panel, tax, population, Scenario())
    assert rows.n == 40 * 50 == 2000
    assert rows.row_keys[0] == ("AK", MonthKey(2021, 9)) and rows.row_keys[-1] == ("WY", MonthKey(2024, 12))
    assert rows.y is None


def test_cap_holds_last_clock(synth_panel, tax, population):
    rows = make_future_rows(synth_panel, tax, population, Scenario(clock_policy="cap"))
    assert np.all(rows.X[:, CLOCK] == 17)
    capped = make_future_rows(synth_panel, tax, population, Scenario(clock_cap=6))
    assert np.all(capped.X[:, CLOCK] == 6)


def test_continue_clock_increases(synth_panel, tax, population):
    rows = make_future_rows(synth_panel, tax, population, Scenario(clock_policy="continue"))
    for state in ("AK", "TX"):
        clocks = [x[CLOCK] for (s, _), x in zip(rows.row_keys, rows.X) if s == state]
        assert all(b > a for a, b in zip(clocks, clocks[1:]))
        assert clocks[0] == 18


def test_zero_after(synth_panel, tax, population):
    rows = make_future_rows(
        synth_panel, tax, population, Scenario(clock_policy="zero_after", zero_after=MonthKey(2022, 3))
    )
    for (_, when), x in zip(rows.row_keys, rows.X):
        assert x[CLOCK] == (0 if when > MonthKey(2022, 3) else when - MonthKey(2020, 4) + 1)


def test_tax_override_applies_to_one_state(synth_panel, tax, population):
    raised = Scenario(tax_overrides={"NJ": {GASOLINE: tax.rate("NJ", GASOLINE) + 9.3}})
    base = make_future_rows(synth_panel, tax, population, Scenario())
    new = make_future_rows(synth_panel, tax, population, raised)
    gas = SPEC.column_index("gasoline_rate")
    nj = np.array([s == "NJ" for s, _ in base.row_keys])
    assert np.all(new.X[nj, gas] == 37.1 + 9.3)
    assert np.array_equal(new.X[~nj], base.X[~nj])
    assert np.array_equal(np.delete(new.X, gas, axis=1), np.delete(base.X, gas, axis=1))


def test_horizon_must_follow_data(synth_panel, tax, population):
    with pytest.raises(DataError):
        make_future_rows(synth_panel, tax, population, Scenario(horizon_end=MonthKey(2021, 8)))


def test_population_rules():
    pop = PopulationSeries({"TX": {2019: 100, 2020: 110, 2021: 120}})
    hold = population_rule(pop, "hold")
    linear = population_rule(pop, "linear")
    assert hold("TX", 2024) == 120
    assert linear("TX", 2024) == 150
    assert linear("TX", 2020) == 110
    with pytest.raises(DataError):
        hold("TX", 2018)


@pytest.fixture(scope="module")
def constant_projection(synth_panel, tax, population):
    return project(leaf_tree(3.25), synth_panel, tax, population, Scenario())


def test_coverage(constant_projection):
    p = constant_projection
    assert p.count(PREDICTED) == 156 * 50 == 7800
    assert p.count(ACTUAL) == 5800
    assert len(p.months) == 156 and p.months[0] == MonthKey(2012, 1) and p.months[-1] == MonthKey(2024, 12)
    for state in p.states:
        months, _ = p.series(state, PREDICTED)
        assert months == month_range(MonthKey(2012, 1), MonthKey(2024, 12))
    assert p.last_actual == MonthKey(2021, 8)


def test_constant_model_propagates(constant_projection):
    assert {e.value for e in constant_projection.entries if e.source == PREDICTED} == {3.25}


def test_actual_series_is_the_panel(constant_projection, synth_panel):
    for r in list(synth_panel)[:200]:
        assert constant_projection.get(r.state, r.when, ACTUAL) == r.gasoline / 1000


def test_csv_round_trip(constant_projection):
    back = parse_projection_csv(constant_projection.to_csv())
    assert back == constant_projection
    assert back.last_actual == constant_projection.last_actual


def test_duplicate_entries_rejected():
    e = ProjectionEntry("TX", MonthKey(2020, 1), PREDICTED, 1.0)
    with pytest.raises(DataError):
        Projection([e, e])


def test_unused_tax_feature_leaves_projection_alone(synth_panel, tax, population):
    raised = Scenario(tax_overrides={"CA": {GASOLINE: 80.0}})
    a = project(month_tree(), synth_panel, tax, population, Scenario())
    b = project(month_tree(), synth_panel, tax, population, raised)
    assert a == b


def test_layout_mismatch(synth_panel, tax, population):
    with pytest.raises(LayoutMismatch):
        project(leaf_tree(1.0), synth_panel, tax, population, Scenario(), FeatureSpec(target=SPECIAL_FUEL))


def test_dc_rows_follow_the_layout(tax):
    config = synth.SynthConfig(states=("DC", "TX"), end=MonthKey(2012, 6))
    panel = synth.generate(config)
    pop = synth.population(config)
    projection = project(leaf_tree(1.0), panel, tax, pop, Scenario(horizon_end=MonthKey(2012, 8)))
    assert projection.states == ("TX",)


@pytest.mark.slow
def test_seasonality_fidelity(tax):
    config = synth.SynthConfig(noise_sigma=0.0)
    panel = synth.generate(config)
    pop = synth.population(config)
    design = build_design(panel, tax, pop)
    model = with_layout(fit_forest(design.X, design.y, ForestParams(n_trees=40), master_seed=1), design.spec)
    projection = project(model, panel, tax, pop, Scenario(), design.spec)
    truth = synth.seasonal_profile(config)
    worst = 1.0
    for state in projection.states:
        profile = seasonal_profile(projection, state, PREDICTED, MonthKey(2012, 1), MonthKey(2019, 12))
        worst = min(worst, np.corrcoef(profile, truth)[0, 1])
    assert worst >= 0.9
