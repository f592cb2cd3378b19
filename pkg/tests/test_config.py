from pathlib import Path

import pytest

from fueltax.config import OPTIONS, RunConfig, parse_config, parse_override, resolve_overrides
from fueltax.errors import ConfigError
from fueltax.panel import GASOLINE, SPECIAL_FUEL, MonthKey, TaxSchedule

TAX = TaxSchedule.table_2020()


def test_parse_values_and_comments():
    text = """
    # pipeline settings
    seed = 7
    forest_trees=50   # fewer trees
    horizon=2023-06
    mlp_hidden=32x16
    include_dc=yes
    tree_max_depth=none
    states=ca, tx
    """
    values = parse_config(text)
    assert values == {
        "seed": 7,
        "forest_trees": 50,
        "horizon": MonthKey(2023, 6),
        "mlp_hidden": (32, 16),
        "include_dc": True,
        "tree_max_depth": None,
        "states": ("CA", "TX"),
    }


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("colour=blue", "unknown key"),
        ("seed", "key=value"),
        ("seed=abc", "bad value for seed"),
        ("horizon=2024-13", "bad value for horizon"),
        ("learner=svm", "bad value for learner"),
        ("workers=0", "bad value for workers"),
        ("states=TX,QQ", "bad value for states"),
        ("tax_override=TX=abc", "bad value for tax_override"),
    ],
)
def test_rejects(text, fragment):
    with pytest.raises(ConfigError, match=fragment) as err:
        parse_config("seed=1\n" + text, "run.cfg")
    assert "run.cfg:2" in str(err.value)


def test_flags_override_file():
    cfg = RunConfig.build({"seed": 3, "fraction": 0.8}, {"seed": 9})
    assert cfg.seed == 9 and cfg.fraction == 0.8 and cfg.learner == "forest"


def test_default_paths():
    cfg = RunConfig.build({"out": "runs/a"}, {"tax": "rates.csv"})
    assert cfg.path("panel") == Path("runs/a/data/panel.csv")
    assert cfg.path("model") == Path("runs/a/models/model.json")
    assert cfg.path("tax") == Path("rates.csv")


def test_repeated_overrides_accumulate():
    values = parse_config("tax_override=NJ:gasoline=+9.3\ntax_override=TX=25")
    assert values["tax_override"] == ("NJ:gasoline=+9.3", "TX=25")


def test_override_syntax():
    assert parse_override("NJ:gasoline=+9.3") == ("NJ", (GASOLINE,), "+", 9.3)
    assert parse_override("tx=25") == ("TX", (GASOLINE, SPECIAL_FUEL), "", 25.0)
    assert parse_override("CA:special_fuel=-1.5") == ("CA", (SPECIAL_FUEL,), "-", 1.5)


def test_resolve_overrides():
    rates = resolve_overrides(["NJ:gasoline=+9.3", "TX=25", "TX:special_fuel=+1"], TAX)
    assert rates == {"NJ": {GASOLINE: 37.1 + 9.3}, "TX": {GASOLINE: 25.0, SPECIAL_FUEL: 26.0}}


def test_every_option_is_documented():
    for o in OPTIONS:
        assert o.help
        assert o.groups
