"""Command-line pipeline: synth, validate, changes, train, evaluate, forecast, revenue, report.

Exit codes: 0 success, 1 usage error, 2 data or file error, 3 model error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from fueltax.config import OPTIONS, RunConfig, convert, flag_for, options_for, parse_config, resolve_overrides
from fueltax.errors import ConfigError, DataError, ModelError
from fueltax.features import FeatureSpec, build_design, split
from fueltax.forecast import PREDICTED, Scenario, parse_projection_csv, project
from fueltax.learn import dumps, loads
from fueltax.learn.evaluate import LearnConfig, comparison_table, evaluate_model, fit_all, reports_to_csv
from fueltax.learn.forest import ForestParams
from fueltax.learn.tree import TreeParams
from fueltax.panel import (
    change_report,
    changes_to_csv,
    modeling_set,
    parse_fuel_csv,
    parse_population_csv,
    parse_tax_csv,
    validate_panel,
)
from fueltax.revenue import gap_report
from fueltax.svg import projection_chart
from fueltax import synth

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 1, 2, 3

COMMANDS = {
    "synth": "generate a synthetic panel with matching tax and population files",
    "validate": "report missing and zero months in a panel",
    "changes": "per-state consumption change between two months",
    "train": "fit one learner and save it",
    "evaluate": "fit all four learners and compare held-out R^2",
    "forecast": "project consumption through the horizon",
    "revenue": "revenue gaps against the baseline year",
    "report": "SVG charts of actual vs predicted consumption",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fueltax", description="State fuel consumption models and fuel-tax revenue gaps.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", metavar="FILE", help="key=value config file; flags override it")
        for o in options_for(name):
            kwargs = dict(dest=o.key, default=argparse.SUPPRESS, help=f"{o.help} [{o.key}]")
            if o.repeat:
                kwargs.update(action="append", metavar="SPEC")
            elif o.convert.__name__ == "_bool":
                kwargs.update(nargs="?", const="true", metavar="BOOL")
            else:
                kwargs.update(metavar=getattr(o.convert, "metavar", None) or o.key.split("_")[-1].upper())
            p.add_argument(flag_for(o), **kwargs)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    file_values = {}
    if args.config:
        file_values = parse_config(Path(args.config).read_text(encoding="utf-8"), args.config)
    flags = {}
    for o in OPTIONS:
        if o.key not in vars(args):
            continue
        raw = getattr(args, o.key)
        if o.repeat:
            flags[o.key] = tuple(v for item in raw for v in convert(o.key, item, flag_for(o) + ": "))
        else:
            flags[o.key] = convert(o.key, raw, flag_for(o) + ": ")
    if "tax_override" in file_values and "tax_override" in flags:
        flags["tax_override"] = file_values["tax_override"] + flags["tax_override"]
    return RunConfig.build(file_values, flags)


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}")
    return path


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _inputs(cfg: RunConfig, need_tax=True, need_pop=True):
    panel = parse_fuel_csv(_read(cfg.path("panel")))
    required = modeling_set(panel.states, cfg.values.get("include_dc", False))
    tax = parse_tax_csv(_read(cfg.path("tax")), required) if need_tax else None
    pop = parse_population_csv(_read(cfg.path("population"))) if need_pop else None
    return panel, tax, pop


def _spec(cfg: RunConfig, panel) -> FeatureSpec:
    return FeatureSpec(cfg.target, modeling_set(panel.states, cfg.include_dc))


def _learn_config(cfg: RunConfig) -> LearnConfig:
    return LearnConfig(
        seed=cfg.seed,
        linear_lambda=cfg.ridge_lambda,
        tree=TreeParams(cfg.tree_max_depth, cfg.tree_min_leaf, cfg.tree_min_split),
        forest=ForestParams(
            n_trees=cfg.forest_trees,
            m_features=cfg.forest_m_features,
            bootstrap=cfg.forest_bootstrap,
            min_leaf=cfg.forest_min_leaf,
            max_depth=cfg.forest_max_depth,
        ),
        mlp_hidden=cfg.mlp_hidden,
        mlp_epochs=cfg.mlp_epochs,
        mlp_learning_rate=cfg.mlp_learning_rate,
        mlp_batch_size=cfg.mlp_batch_size,
        workers=cfg.workers,
    )


def cmd_synth(cfg: RunConfig) -> int:
    config = synth.SynthConfig(
        start=cfg.synth_start,
        end=cfg.synth_end,
        seasonal_amplitude=cfg.amplitude,
        annual_growth=cfg.growth,
        dip_depth=cfg.dip_depth,
        recovery_halflife=cfg.halflife,
        dip_onset=cfg.dip_onset,
        noise_sigma=cfg.noise,
        seed=cfg.seed,
    )
    panel = synth.generate(config)
    _write(cfg.path("panel"), panel.to_csv())
    _write(cfg.path("tax"), synth.tax_schedule().to_csv())
    _write(cfg.path("population"), synth.population(config).to_csv())
    print(f"{len(panel)} records, {len(panel.states)} states, {panel.first_month} to {panel.last_month}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    panel = parse_fuel_csv(_read(cfg.path("panel")))
    first = cfg.first or panel.first_month
    last = cfg.last or panel.last_month
    report = validate_panel(panel, (first, last), modeling_set(panel.states, cfg.include_dc))
    for issue in report.issues:
        detail = f" ({issue.detail})" if issue.detail else ""
        print(f"{issue.severity}: {issue.state} {issue.when} {issue.kind}{detail}")
    print(f"{len(report.missing)} missing, {len(report.warnings)} warnings, {first} to {last}")
    return EXIT_OK if report.ok else EXIT_DATA


def cmd_changes(cfg: RunConfig) -> int:
    if cfg.change_from is None or cfg.change_to is None:
        raise ConfigError("changes needs --from and --to (YYYY-MM)")
    panel = parse_fuel_csv(_read(cfg.path("panel")))
    states = cfg.states or modeling_set(panel.states, cfg.include_dc)
    entries = change_report(panel, cfg.change_from, cfg.change_to, cfg.target, states)
    _write(Path(cfg.out) / "reports" / "changes.csv", changes_to_csv(entries, cfg.change_from, cfg.change_to))
    return EXIT_OK


def _design_and_split(cfg: RunConfig):
    panel, tax, pop = _inputs(cfg)
    design = build_design(panel, tax, pop, _spec(cfg, panel))
    return design, split(design, cfg.fraction, cfg.seed, cfg.split_method)


def cmd_train(cfg: RunConfig) -> int:
    design, index = _design_and_split(cfg)
    report = evaluate_model(cfg.learner, design, index, _learn_config(cfg))
    _write(cfg.path("model"), dumps(report.model, design.spec.columns))
    _write(Path(cfg.out) / "reports" / "fit.csv", reports_to_csv([report]))
    print(f"{report.kind}: r2_train={report.r2_train:.4f} r2_test={report.r2_test:.4f}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    design, index = _design_and_split(cfg)
    reports = fit_all(design, index, _learn_config(cfg))
    _write(Path(cfg.out) / "reports" / "fit.csv", reports_to_csv(reports))
    print(comparison_table(reports))
    return EXIT_OK


def cmd_forecast(cfg: RunConfig) -> int:
    panel, tax, pop = _inputs(cfg)
    model = loads(_read(cfg.path("model")))
    scenario = Scenario(
        horizon_end=cfg.horizon,
        clock_policy=cfg.clock_policy,
        clock_cap=cfg.clock_cap,
        zero_after=cfg.zero_after,
        tax_overrides=resolve_overrides(cfg.tax_override, tax),
        population_rule=cfg.population_rule,
    )
    projection = project(model, panel, tax, pop, scenario, _spec(cfg, panel))
    _write(cfg.path("projection"), projection.to_csv())
    print(f"{projection.count(PREDICTED)} predicted rows, {len(projection.states)} states, "
          f"{projection.months[0]} to {projection.months[-1]}")
    return EXIT_OK


def cmd_revenue(cfg: RunConfig) -> int:
    panel, tax, _ = _inputs(cfg, need_pop=False)
    projection = parse_projection_csv(_read(cfg.path("projection")), cfg.target)
    projected_tax = tax.with_overrides(resolve_overrides(cfg.tax_override, tax)) if cfg.tax_override else tax
    report = gap_report(
        projection,
        panel,
        tax,
        baseline_year=cfg.baseline_year,
        projected_tax=projected_tax,
        source=cfg.gap_source,
        as_of=cfg.as_of,
    )
    reports = Path(cfg.out) / "reports"
    _write(reports / "gap.csv", report.to_csv())
    _write(reports / "gap_summary.csv", report.summary_csv())
    flagged = ", ".join(report.flagged_states) or "none"
    print(f"trailing 12 months to {report.as_of}: {len(report.flagged_states)} states in the band: {flagged}")
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    projection = parse_projection_csv(_read(cfg.path("projection")), cfg.target)
    states = cfg.states or projection.states
    missing = [s for s in states if s not in projection.states]
    if missing:
        raise DataError(f"projection has no rows for {', '.join(missing)}")
    for state in states:
        _write(Path(cfg.out) / "charts" / f"{state}.svg", projection_chart(projection, state))
    return EXIT_OK


HANDLERS = {
    "synth": cmd_synth,
    "validate": cmd_validate,
    "changes": cmd_changes,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "forecast": cmd_forecast,
    "revenue": cmd_revenue,
    "report": cmd_report,
}


def run_command(argv) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load_config(args)
        return HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"fueltax {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"fueltax {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelError as exc:
        print(f"fueltax {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_MODEL


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
