import sys

import pytest

from fueltax import synth
from fueltax.features import build_design, split
from fueltax.panel import FuelPanel, FuelRecord, MonthKey, month_range


@pytest.fixture(scope="session")
def synth_config():
    return synth.SynthConfig()


@pytest.fixture(scope="session")
def synth_panel(synth_config):
    return synth.generate(synth_config)


@pytest.fixture(scope="session")
def tax():
    return synth.tax_schedule()


@pytest.fixture(scope="session")
def population(synth_config):
    return synth.population(synth_config)


@pytest.fixture(scope="session")
def design(synth_panel, tax, population):
    return build_design(synth_panel, tax, population)


@pytest.fixture(scope="session")
def split_index(design):
    return split(design, 0.7, seed=0)


def make_panel(states, first, last, gasoline=1000.0, special_fuel=300.0):
    """Flat panel; either value may be a callable ``(state, month) -> kgal``."""
    records = []
    for s in states:
        for m in month_range(MonthKey.parse(first), MonthKey.parse(last)):
            g = gasoline(s, m) if callable(gasoline) else gasoline
            sf = special_fuel(s, m) if callable(special_fuel) else special_fuel
            records.append(FuelRecord(s, m, g, sf))
    return FuelPanel(records)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
