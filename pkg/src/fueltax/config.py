"""Run configuration shared by the command-line subcommands.

A config file holds ``key=value`` lines; ``#`` starts a comment. Every key
is also a flag (``forest_trees`` is ``--forest-trees``) and flags win over
the file. Values are parsed by the same converter either way.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from fueltax.errors import ConfigError, FuelTaxError
from fueltax.panel import FUEL_KINDS, GASOLINE, MonthKey, TaxSchedule, check_kind, check_state


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _optional(convert):
    def parse(text):
        return None if text.strip().lower() in ("", "none") else convert(text)

    parse.metavar = getattr(convert, "metavar", None)
    return parse


def _month(text: str) -> MonthKey:
    return MonthKey.parse(text.strip())


_month.metavar = "YYYY-MM"


def _hidden(text: str) -> tuple[int, ...]:
    sizes = tuple(int(part) for part in text.replace(",", "x").split("x") if part.strip())
    if not sizes or min(sizes) < 1:
        raise ValueError("hidden layer sizes must be positive, e.g. 64 or 32x16")
    return sizes


def _states(text: str) -> tuple[str, ...]:
    return tuple(check_state(s.strip().upper()) for s in text.split(",") if s.strip())


def _overrides(text: str) -> tuple[str, ...]:
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    for item in items:
        parse_override(item)
    return items


def _choice(*allowed):
    def parse(text):
        t = text.strip()
        if t not in allowed:
            raise ValueError(f"expected one of {', '.join(allowed)}")
        return t

    return parse


def _positive(convert):
    def parse(text):
        v = convert(text)
        if not v > 0:
            raise ValueError("must be > 0")
        return v

    return parse


def _text(text: str) -> str:
    return text.strip()


@dataclass(frozen=True)
class Option:
    key: str
    convert: Callable
    default: object
    help: str
    groups: tuple[str, ...]
    repeat: bool = False

    @property
    def flag(self) -> str:
        return "--" + self.key.replace("_", "-")


_IO = ("synth", "validate", "changes", "train", "evaluate", "forecast", "revenue", "report")
_FIT = ("train", "evaluate")
_SCENARIO = ("forecast", "revenue")

OPTIONS = (
    Option("out", _text, "out", "output directory", _IO),
    Option("panel", _optional(_text), None, "panel CSV (default OUT/data/panel.csv)", _IO),
    Option("tax", _optional(_text), None, "tax-rate CSV (default OUT/data/tax.csv)", _IO),
    Option("population", _optional(_text), None, "population CSV (default OUT/data/population.csv)", _IO),
    Option("model", _optional(_text), None, "model JSON (default OUT/models/model.json)", ("train", "forecast")),
    Option("projection", _optional(_text), None, "projection CSV (default OUT/reports/projection.csv)",
           ("forecast", "revenue", "report")),
    Option("seed", int, 0, "master seed for the split and the learners", ("synth",) + _FIT),
    Option("target", check_kind, GASOLINE, f"fuel kind to model ({', '.join(FUEL_KINDS)})",
           ("validate", "changes") + _FIT + ("forecast", "revenue", "report")),
    Option("include_dc", _bool, False, "keep DC in the modelling set", ("validate", "changes") + _FIT + ("forecast",)),
    Option("fraction", float, 0.7, "training fraction of the split", _FIT),
    Option("split_method", _choice("random", "time"), "random", "random or time-ordered split", _FIT),
    Option("learner", _choice("linear", "tree", "forest", "mlp"), "forest", "learner trained by 'train'", ("train",)),
    Option("ridge_lambda", float, 1e-6, "ridge penalty for the linear learner", _FIT),
    Option("tree_max_depth", _optional(int), 12, "tree depth limit, none for unlimited", _FIT),
    Option("tree_min_leaf", int, 5, "minimum rows per tree leaf", _FIT),
    Option("tree_min_split", int, 10, "minimum rows to split a tree node", _FIT),
    Option("forest_trees", int, 200, "number of forest trees", _FIT),
    Option("forest_m_features", _optional(int), None, "features tried per split (default ceil(p/3))", _FIT),
    Option("forest_min_leaf", int, 2, "minimum rows per forest leaf", _FIT),
    Option("forest_max_depth", _optional(int), None, "forest tree depth limit", _FIT),
    Option("forest_bootstrap", _bool, True, "resample rows for each forest tree", _FIT),
    Option("workers", _positive(int), 1, "processes used to fit forest trees", _FIT),
    Option("mlp_hidden", _hidden, (64,), "hidden layer sizes, e.g. 64 or 32x16", _FIT),
    Option("mlp_epochs", int, 200, "training epochs for the network", _FIT),
    Option("mlp_learning_rate", _positive(float), 1e-3, "SGD learning rate", _FIT),
    Option("mlp_batch_size", _positive(int), 64, "SGD mini-batch size", _FIT),
    Option("horizon", _month, MonthKey(2024, 12), "last projected month, YYYY-MM", ("forecast",)),
    Option("clock_policy", _choice("cap", "continue", "zero_after"), "cap", "pandemic clock after the data ends",
           ("forecast",)),
    Option("clock_cap", _optional(int), None, "clock value for the cap policy (default: value at data end)",
           ("forecast",)),
    Option("zero_after", _optional(_month), None, "last month with a running clock, zero_after policy",
           ("forecast",)),
    Option("population_rule", _choice("hold", "linear"), "hold", "population beyond the data", ("forecast",)),
    Option("tax_override", _overrides, (), "future rate change STATE[:KIND]=CENTS, +N/-N for relative; repeatable",
           _SCENARIO, repeat=True),
    Option("baseline_year", int, 2019, "pre-pandemic reference year", ("revenue",)),
    Option("as_of", _optional(_month), None, "month closing the trailing 12-month window (default: last)",
           ("revenue",)),
    Option("gap_source", _choice("blend", "actual", "predicted"), "blend",
           "series used for revenue: actual where known (blend), or one source", ("revenue",)),
    Option("states", _optional(_states), None, "comma-separated state codes", ("changes", "report")),
    Option("change_from", _optional(_month), None, "first month of the comparison, YYYY-MM", ("changes",)),
    Option("change_to", _optional(_month), None, "second month of the comparison, YYYY-MM", ("changes",)),
    Option("first", _optional(_month), None, "first expected month (default: panel start)", ("validate",)),
    Option("last", _optional(_month), None, "last expected month (default: panel end)", ("validate",)),
    Option("synth_start", _month, MonthKey(2012, 1), "first generated month", ("synth",)),
    Option("synth_end", _month, MonthKey(2021, 8), "last generated month", ("synth",)),
    Option("amplitude", float, 0.1, "seasonal amplitude", ("synth",)),
    Option("growth", float, 0.01, "annual growth fraction", ("synth",)),
    Option("dip_depth", float, 0.12, "depth of the pandemic dip", ("synth",)),
    Option("halflife", float, 6.0, "recovery half-life in months", ("synth",)),
    Option("dip_onset", _month, MonthKey(2020, 4), "first dip month", ("synth",)),
    Option("noise", float, 0.03, "relative noise sigma", ("synth",)),
)
BY_KEY = {o.key: o for o in OPTIONS}
# flags whose names differ from their keys
FLAG_NAMES = {"change_from": "--from", "change_to": "--to"}


def flag_for(option: Option) -> str:
    return FLAG_NAMES.get(option.key, option.flag)


def options_for(command: str) -> list[Option]:
    return [o for o in OPTIONS if command in o.groups]


def convert(key: str, text: str, where: str = ""):
    option = BY_KEY.get(key)
    if option is None:
        raise ConfigError(f"{where}unknown key {key!r}")
    try:
        return option.convert(text)
    except (ValueError, FuelTaxError) as exc:
        raise ConfigError(f"{where}bad value for {key}: {text!r} ({exc})") from None


def parse_config(text: str, source: str = "config") -> dict:
    """Parse ``key=value`` lines into converted values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        where = f"{source}:{lineno}: "
        if not sep:
            raise ConfigError(f"{where}expected key=value, got {raw.strip()!r}")
        v = convert(key, value, where)
        if BY_KEY[key].repeat and key in values:
            v = values[key] + v
        values[key] = v
    return values


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    @classmethod
    def build(cls, file_values: dict | None = None, flag_values: dict | None = None) -> "RunConfig":
        merged = {o.key: o.default for o in OPTIONS}
        merged.update(file_values or {})
        merged.update(flag_values or {})
        return cls(merged)

    def path(self, key: str) -> Path:
        if self.values.get(key):
            return Path(self.values[key])
        return Path(self.out) / DEFAULT_PATHS[key]


DEFAULT_PATHS = {
    "panel": "data/panel.csv",
    "tax": "data/tax.csv",
    "population": "data/population.csv",
    "model": "models/model.json",
    "projection": "reports/projection.csv",
}


def parse_override(item: str) -> tuple[str, tuple[str, ...], str, float]:
    """``"CA:gasoline=+5"`` -> ``("CA", ("gasoline",), "+", 5.0)``.

    Without a kind the change applies to both fuels; the sign is ``""`` for
    an absolute rate.
    """
    target, sep, value = item.partition("=")
    if not sep:
        raise ValueError(f"tax override {item!r} is not STATE[:KIND]=CENTS")
    state, _, kind = target.strip().partition(":")
    state = check_state(state.strip().upper())
    kinds = (check_kind(kind.strip()),) if kind.strip() else FUEL_KINDS
    value = value.strip()
    sign = value[0] if value[:1] in "+-" and value else ""
    cents = float(value[1:] if sign else value)
    return state, kinds, sign, cents


def resolve_overrides(items, tax: TaxSchedule) -> dict:
    """Turn override strings into absolute ``{state: {kind: cents}}``, applied in order."""
    out: dict = {}
    for item in items:
        state, kinds, sign, cents = parse_override(item)
        for kind in kinds:
            current = out.get(state, {}).get(kind, tax.rate(state, kind))
            rate = current + cents if sign == "+" else current - cents if sign == "-" else cents
            out.setdefault(state, {})[kind] = rate
    return out


def replace(config: RunConfig, **changes) -> RunConfig:
    return dataclasses.replace(config, values={**config.values, **changes})
