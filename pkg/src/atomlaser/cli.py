"""Command-line front end: simulate, verify, sweep, converge.

Exit codes: 0 success, 1 unusable configuration, 2 truncation-insufficient
(or a convergence run that did not converge), 3 invariant violation during a
run, 4 unresolved formula verdicts from verify.

All numeric output is written with 17 significant digits, '.' decimal
separator and '\n' line endings, so identical configurations produce
byte-identical files.  Undefined values (vacuum Mandel Q, closed forms
outside their domain) are written as the token ``NA``.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from .fock import SqueezedInput, Truncation, TruncationError
from .observables import (
    CSV_COLUMNS,
    SOURCE_LITERAL,
    SOURCE_MOMENT_MAP,
    SOURCE_ORACLE,
    SOURCES,
    InvariantViolationError,
    ObservableRecord,
    ScenarioConfig,
    check_record,
    input_moments,
    literal_record,
    moment_map_record,
)
from .oracle import build_hamiltonian, convergence_sweep, evolve, scenario_initial_state
from .propagator import ModelParams, ResonanceError
from .verify import discrepancy_report

DEFAULT_N_MAX_FLOOR = 64

SWEEP_AXES = ("r", "phi", "m_re", "m_im", "theta", "omega0", "omega_a", "omega_r")

_DEFAULTS = {
    "r": 1.0,
    "phi": 0.0,
    "m_re": 0.0,
    "m_im": 0.0,
    "theta": 0.0,
    "omega0": 4.0,
    "omega_a": 4.0,
    "omega_r": 1.0,
    "t_max": 2.0 * math.pi,
    "steps": 200,
    "n_max": None,  # auto: max(heuristic, DEFAULT_N_MAX_FLOOR)
    "sources": ",".join(SOURCES),
    "out": None,
    "tol_algebraic": 1e-8,
    "tol_oracle": 1e-6,
}

_FLOAT_KEYS = (
    "r",
    "phi",
    "m_re",
    "m_im",
    "theta",
    "omega0",
    "omega_a",
    "omega_r",
    "t_max",
    "tol_algebraic",
    "tol_oracle",
)
_INT_KEYS = ("steps", "n_max")
_STR_KEYS = ("sources", "out")


class UsageError(Exception):
    """Unusable configuration; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run: scenario, time grid, sources, output, tolerances."""

    scenario: ScenarioConfig
    t_max: float
    steps: int
    sources: tuple[str, ...]
    out: str | None
    tol_algebraic: float
    tol_oracle: float

    def time_grid(self) -> np.ndarray:
        """steps points covering [0, t_max): t_i = i * t_max / steps.

        The left-closed grid puts the default scenario's conversion times and
        aligned rotation phases (multiples of pi/4) exactly on grid points;
        verify unions in any anchors that fall between points.
        """
        return np.arange(self.steps) * (self.t_max / self.steps)


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; unknown keys are errors."""
    settings: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _FLOAT_KEYS:
            try:
                settings[key] = float(value)
            except ValueError as exc:
                raise UsageError(f"{path}:{line_no}: bad float for {key}: {value!r}") from exc
        elif key in _INT_KEYS:
            try:
                settings[key] = int(value)
            except ValueError as exc:
                raise UsageError(f"{path}:{line_no}: bad integer for {key}: {value!r}") from exc
        elif key in _STR_KEYS:
            settings[key] = value
        else:
            raise UsageError(f"{path}:{line_no}: unknown key {key!r}")
    return settings


def _resolve_settings(args: argparse.Namespace) -> dict:
    settings = dict(_DEFAULTS)
    if getattr(args, "config", None):
        settings.update(parse_config_file(args.config))
    for key in (*_FLOAT_KEYS, *_INT_KEYS, *_STR_KEYS):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def build_run_config(settings: dict) -> RunConfig:
    try:
        inp = SqueezedInput(
            r=settings["r"],
            phi=settings["phi"],
            m=complex(settings["m_re"], settings["m_im"]),
        )
        params = ModelParams(
            omega0=settings["omega0"],
            omega_a=settings["omega_a"],
            omega_r=settings["omega_r"],
            theta=settings["theta"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    n_max = settings["n_max"]
    if n_max is None:
        n_max = max(Truncation.suggest(inp).n_max, DEFAULT_N_MAX_FLOOR)
    try:
        truncation = Truncation(int(n_max))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    steps = int(settings["steps"])
    if steps < 2:
        raise UsageError(f"steps must be >= 2, got {steps}")
    t_max = float(settings["t_max"])
    if t_max <= 0:
        raise UsageError(f"t_max must be > 0, got {t_max}")
    sources = tuple(s.strip() for s in str(settings["sources"]).split(",") if s.strip())
    if not sources:
        raise UsageError("at least one source must be selected")
    for source in sources:
        if source not in SOURCES:
            raise UsageError(f"unknown source {source!r}; choose from {', '.join(SOURCES)}")
    # canonical source order regardless of how the list was written
    sources = tuple(s for s in SOURCES if s in sources)
    return RunConfig(
        scenario=ScenarioConfig(params, inp, truncation),
        t_max=t_max,
        steps=steps,
        sources=sources,
        out=settings["out"],
        tol_algebraic=float(settings["tol_algebraic"]),
        tol_oracle=float(settings["tol_oracle"]),
    )


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return "NA"
    if x == 0.0:
        x = 0.0  # canonicalize -0.0
    return format(x, ".17g")


def _record_row(rec: ObservableRecord) -> list[str]:
    return [_fmt(getattr(rec, column)) for column in CSV_COLUMNS]


def simulate_records(run: RunConfig) -> list[ObservableRecord]:
    """All records for one scenario, ordered by (time, source)."""
    scenario = run.scenario
    grid = run.time_grid()
    by_source: dict[str, list[ObservableRecord]] = {}

    # building the input up front surfaces truncation-insufficient
    # configurations early and supplies the per-row tail diagnostic
    state0 = scenario_initial_state(scenario)
    tail_mass = state0.tail_mass

    if SOURCE_LITERAL in run.sources:
        by_source[SOURCE_LITERAL] = [
            literal_record(scenario, t, tail_mass) for t in grid
        ]
    if SOURCE_MOMENT_MAP in run.sources:
        a0 = input_moments(scenario.input, scenario.truncation)
        by_source[SOURCE_MOMENT_MAP] = [
            moment_map_record(scenario, t, a0, tail_mass) for t in grid
        ]
    if SOURCE_ORACLE in run.sources:
        result = evolve(state0, build_hamiltonian(scenario.params, scenario.truncation), grid)
        if result.norm_drift > 1e-9:
            raise InvariantViolationError(
                f"oracle norm drift {result.norm_drift:.3e} exceeds 1e-9"
            )
        if result.ntotal_drift > 1e-9:
            raise InvariantViolationError(
                f"oracle total-occupation drift {result.ntotal_drift:.3e} exceeds 1e-9"
            )
        by_source[SOURCE_ORACLE] = result.records

    records: list[ObservableRecord] = []
    for i, _ in enumerate(grid):
        for source in run.sources:
            rec = by_source[source][i]
            check_record(rec)
            records.append(rec)
    return records


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line + "\n")


def cmd_simulate(args: argparse.Namespace) -> int:
    run = build_run_config(_resolve_settings(args))
    records = simulate_records(run)
    out = run.out or "simulate.csv"
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(_record_row(rec)) for rec in records]
    _write_lines(out, lines)
    print(f"wrote {len(records)} rows to {out}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    run = build_run_config(_resolve_settings(args))
    if set(run.sources) != set(SOURCES):
        raise UsageError(
            "verify needs all three sources (literal-paper, moment-map, oracle)"
        )
    report = discrepancy_report(
        run.scenario,
        run.time_grid(),
        tol_algebraic=run.tol_algebraic,
        tol_oracle=run.tol_oracle,
    )
    out = run.out or "verify.txt"
    _write_lines(out, report.render().splitlines())
    print(f"wrote verdicts for {len(report.checks)} formulas to {out}")
    if report.unresolved:
        print(f"{report.unresolved} unresolved verdicts", file=sys.stderr)
        return 4
    return 0


def _parse_values(raw: str, cast) -> list:
    try:
        values = [cast(part.strip()) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad values list {raw!r}: {exc}") from exc
    if not values:
        raise UsageError("values list is empty")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.axis not in SWEEP_AXES:
        raise UsageError(
            f"unknown sweep axis {args.axis!r}; choose from {', '.join(SWEEP_AXES)}"
        )
    values = _parse_values(args.values, float)
    settings = _resolve_settings(args)
    out = settings["out"] or "sweep.csv"
    lines = [",".join(("axis", "value") + CSV_COLUMNS)]
    total = 0
    for value in values:
        per_value = dict(settings)
        per_value[args.axis] = value
        run = build_run_config(per_value)
        for rec in simulate_records(run):
            lines.append(",".join([args.axis, _fmt(value)] + _record_row(rec)))
            total += 1
    _write_lines(out, lines)
    print(f"wrote {total} rows to {out}")
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    n_max_list = _parse_values(args.values, int)
    if any(b <= a for a, b in zip(n_max_list, n_max_list[1:])):
        raise UsageError("n_max values must be strictly increasing")
    settings = _resolve_settings(args)
    settings["n_max"] = n_max_list[-1]
    run = build_run_config(settings)
    table = convergence_sweep(run.scenario, run.time_grid(), n_max_list)
    out = settings["out"] or "converge.csv"
    lines = [
        ",".join(
            ("kind", "n_max", "status", "t")
            + CSV_COLUMNS[2:13]
            + ("max_delta",)
        )
    ]
    for entry in table.entries:
        if entry.records is None:
            lines.append(
                ",".join(
                    ["value", str(entry.n_max), entry.status, "NA"]
                    + ["NA"] * 11
                    + ["NA"]
                )
            )
            continue
        for rec in entry.records:
            values = [
                _fmt(getattr(rec, column)) for column in CSV_COLUMNS[2:13]
            ]
            lines.append(
                ",".join(
                    ["value", str(entry.n_max), entry.status, _fmt(rec.t)]
                    + values
                    + ["NA"]
                )
            )
    for (prev, curr), delta in zip(
        zip(table.entries, table.entries[1:]), table.deltas
    ):
        delta_txt = "inf" if math.isinf(delta) else _fmt(delta)
        lines.append(
            ",".join(
                ["delta", f"{prev.n_max}->{curr.n_max}", "", "NA"]
                + ["NA"] * 11
                + [delta_txt]
            )
        )
    lines.append(
        ",".join(
            [
                "result",
                str(table.entries[-1].n_max),
                "converged" if table.converged else "not-converged",
                "NA",
            ]
            + ["NA"] * 11
            + [_fmt(table.delta_tol)]
        )
    )
    _write_lines(out, lines)
    print(f"wrote convergence table to {out}")
    return 0 if table.converged else 2


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file; flags win")
    parser.add_argument("--r", type=float, help="squeeze magnitude r >= 0")
    parser.add_argument("--phi", type=float, help="squeeze angle (rad)")
    parser.add_argument("--m-re", type=float, dest="m_re", help="Re of coherent amplitude")
    parser.add_argument("--m-im", type=float, dest="m_im", help="Im of coherent amplitude")
    parser.add_argument("--theta", type=float, help="condensate phase (rad)")
    parser.add_argument("--omega0", type=float, help="level splitting (rad/time)")
    parser.add_argument("--omega-a", type=float, dest="omega_a", help="optical frequency (rad/time)")
    parser.add_argument("--omega-r", type=float, dest="omega_r", help="collective coupling (rad/time)")
    parser.add_argument("--t-max", type=float, dest="t_max", help="time grid upper edge (exclusive)")
    parser.add_argument("--steps", type=int, help="number of grid points (>= 2)")
    parser.add_argument(
        "--n-max",
        type=int,
        dest="n_max",
        help="Fock cutoff per mode (default: max of the input heuristic and 64)",
    )
    parser.add_argument(
        "--sources",
        help="comma list from: literal-paper, moment-map, oracle (default all)",
    )
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--tol-algebraic", type=float, dest="tol_algebraic",
                        help="closed-form vs moment-map tolerance (default 1e-8)")
    parser.add_argument("--tol-oracle", type=float, dest="tol_oracle",
                        help="base oracle tolerance, scaled by tail mass (default 1e-6)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomlaser",
        description="Squeezing transfer between an optical field and an "
        "outcoupled atom beam: time series, formula adjudication, sweeps, "
        "convergence studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write the observable time series as CSV")
    _add_scenario_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="adjudicate the closed forms against the oracle")
    _add_scenario_flags(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_swp = sub.add_parser("sweep", help="repeat simulate over one parameter axis")
    _add_scenario_flags(p_swp)
    p_swp.add_argument("--axis", required=True, help=f"one of: {', '.join(SWEEP_AXES)}")
    p_swp.add_argument("--values", required=True, help="comma list of axis values")
    p_swp.set_defaults(func=cmd_sweep)

    p_cnv = sub.add_parser("converge", help="truncation convergence study")
    _add_scenario_flags(p_cnv)
    p_cnv.add_argument("--values", required=True, help="comma list of increasing n_max values")
    p_cnv.set_defaults(func=cmd_converge)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ResonanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TruncationError as exc:
        print(f"truncation-insufficient: {exc}", file=sys.stderr)
        return 2
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
