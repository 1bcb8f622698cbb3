"""Command-line entry point: ``qgem <command> [options]``.

Config files are flat ``key = value`` text in SI units::

    # desk-scale setup
    m = 1e-14
    M = 1e-8
    d = 1e-4
    D = 1e-3
    omega_l = 1e8
    omega_h = 1e8
    grid.num = 50

Required keys are ``m, M, d, D, omega_l, omega_h``.  Optional: ``G, hbar, c``
(CODATA defaults), ``n_max`` (oracle truncation, default 3) and the sweep keys
``grid.D_min, grid.D_max, grid.M_min, grid.M_max, grid.num, grid.spacing,
grid.omega_h`` (comma-separated list).
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import experiments as ex
from .couplings import coupling_ratios, coupling_set
from .entanglement import (HL_VARIANTS, concurrence_hl2_dominant, concurrence_hl2_exact,
                           concurrence_hl2_small, concurrence_hl_approx, concurrence_hl_exact,
                           concurrence_hl_small, concurrence_ll)
from .model import DESK, PhysicalConstants, SystemParams, require_valid
from .oracle import (OracleReport, TruncationSpec, diag_oracle_report,
                     finite_difference_couplings, pt_oracle_report)

PARAM_KEYS = ("m", "M", "d", "D", "omega_l", "omega_h")
CONST_KEYS = ("G", "hbar", "c")
GRID_KEYS = ("grid.D_min", "grid.D_max", "grid.M_min", "grid.M_max", "grid.num",
             "grid.spacing", "grid.omega_h")
ALL_KEYS = PARAM_KEYS + CONST_KEYS + ("n_max",) + GRID_KEYS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = DESK
    consts: PhysicalConstants = PhysicalConstants()
    truncation: TruncationSpec = TruncationSpec()
    grid: dict = field(default_factory=dict)

    def render(self) -> list[str]:
        """Effective configuration as ``key = value`` lines; parses back to an equal config."""
        lines = [f"{k} = {getattr(self.params, k)!r}" for k in PARAM_KEYS]
        lines += [f"{k} = {getattr(self.consts, k)!r}" for k in CONST_KEYS]
        lines.append(f"n_max = {self.truncation.n_max}")
        for k in GRID_KEYS:
            if k in self.grid:
                v = self.grid[k]
                if k == "grid.omega_h":
                    v = ", ".join(repr(x) for x in v)
                elif isinstance(v, float):
                    v = repr(v)
                lines.append(f"{k} = {v}")
        return lines


def _parse_value(key: str, raw: str, lineno: int):
    try:
        if key == "n_max" or key == "grid.num":
            return int(raw)
        if key == "grid.spacing":
            if raw not in ("log", "linear"):
                raise ValueError(raw)
            return raw
        if key == "grid.omega_h":
            vals = tuple(float(x) for x in raw.split(","))
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(raw)
            return vals
        value = float(raw)
        if not math.isfinite(value):
            raise ValueError(raw)
        return value
    except ValueError:
        raise ConfigError(f"line {lineno}: invalid value {raw!r} for key {key!r}") from None


def parse_config(text: str) -> RunConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, lineno)
    missing = [k for k in PARAM_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key {missing[0]!r}")
    params = SystemParams(**{k: values[k] for k in PARAM_KEYS})
    try:
        require_valid(params)
        consts = PhysicalConstants(**{k: values[k] for k in CONST_KEYS if k in values})
        truncation = TruncationSpec(n_max=values.get("n_max", 3))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    grid = {k: values[k] for k in GRID_KEYS if k in values}
    return RunConfig(params, consts, truncation, grid)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# output

@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    value = float(value)
    if not math.isfinite(value):
        return ""
    return f"{value:.16e}"


def render_csv(table: Table, config: RunConfig) -> str:
    buf = io.StringIO()
    for line in config.render():
        buf.write(f"# {line}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(table: Table, config: RunConfig) -> str:
    def cell(v):
        if isinstance(v, (str, bool)):
            return v
        v = float(v)
        return {"text": _fmt(v), "value": v if math.isfinite(v) else None}

    doc = {
        "config": config.render(),
        "columns": list(table.columns),
        "rows": [{c: cell(v) for c, v in zip(table.columns, row)} for row in table.rows],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit(table: Table, config: RunConfig, fmt: str, out: str | None) -> None:
    text = render_csv(table, config) if fmt == "csv" else render_json(table, config)
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# commands

def cmd_couplings(config: RunConfig) -> Table:
    g = coupling_set(config.params, config.consts).as_dict()
    ratios = coupling_ratios(config.params, config.consts)
    cols = tuple(g) + tuple(f"{k}_over_w" for k in ratios)
    return Table(cols, [tuple(g.values()) + tuple(ratios.values())])


CONCURRENCE_CHOICES = ("hl1", "hl1_variants", "hl2", "ll", "mixed")


def cmd_concurrence(config: RunConfig, which: str) -> Table:
    p, c = config.params, config.consts
    g = coupling_set(p, c)
    if which == "hl1":
        return Table(("C_hl_exact", "C_hl_small"), [(concurrence_hl_exact(g, p), concurrence_hl_small(g, p))])
    if which == "hl1_variants":
        names = ("C_Dggd", "C_Dggd_2nd", "C_D2d", "C_dom")
        return Table(names, [tuple(concurrence_hl_approx(p, c, v) for v in HL_VARIANTS)])
    if which == "hl2":
        return Table(("C_hl2_exact", "C_hl2_small", "C_hl2_dom"),
                     [(concurrence_hl2_exact(g, p), concurrence_hl2_small(g, p),
                       concurrence_hl2_dominant(p, c))])
    if which == "ll":
        return Table(("C_ll_static", "C_ll"), [(concurrence_ll(p, c, "static"), concurrence_ll(p, c))])
    if which == "mixed":
        value, lam = ex.mixed_light_concurrence(p, c, return_eigenvalues=True)
        return Table(("C_mixed", "lambda_1", "lambda_2", "lambda_3", "lambda_4"),
                     [(value, *map(float, lam))])
    raise ConfigError(f"unknown concurrence {which!r}")


def _grid(config: RunConfig, variable: str, default: ex.Grid) -> ex.Grid:
    g = config.grid
    lo, hi = (g.get(f"grid.{variable}_min", default.start), g.get(f"grid.{variable}_max", default.stop))
    extra = default.extra if variable == "D" and "grid.D_min" not in g and "grid.D_max" not in g else ()
    return ex.Grid(lo, hi, g.get("grid.num", default.num), g.get("grid.spacing", default.spacing), extra)


def _spec(config: RunConfig, default: ex.SweepSpec) -> ex.SweepSpec:
    omega_h = config.grid.get("grid.omega_h", default.omega_h_values)
    try:
        return ex.SweepSpec(_grid(config, default.variable, default.grid), default.variable,
                            config.params, config.consts, tuple(omega_h))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


FIGURE_DEFAULTS = {
    "fig2": ex.default_fig2_spec,
    "fig3": ex.default_fig3_spec,
    "fig4": ex.default_boundary_spec,
    "fig5": lambda p: replace(ex.default_fig5_spec(p), params=p),
}


def cmd_figure(config: RunConfig, figure_id: str) -> Table:
    spec = _spec(config, FIGURE_DEFAULTS[figure_id](config.params))
    result = ex.FIGURES[figure_id](spec)
    return Table(result.columns, result.rows)


def cmd_boundary(config: RunConfig, variant: str = "static") -> Table:
    spec = _spec(config, ex.default_boundary_spec(config.params))
    result = ex.boundary_D_of_M(spec, variant)
    return Table(result.columns, result.rows)


SUITES = ("fd", "pt", "diag")


def run_oracle(config: RunConfig, suites: Sequence[str], inject: float = 1.0) -> OracleReport:
    if not suites:
        raise ConfigError("no checks selected")
    report = OracleReport()
    if "fd" in suites:
        report.extend(finite_difference_couplings(config.params, config.consts, perturb=inject))
    if "pt" in suites:
        report.extend(pt_oracle_report(config.params, config.consts, config.truncation))
    if "diag" in suites:
        report.extend(diag_oracle_report())
    return report


def cmd_oracle(config: RunConfig, suites: Sequence[str], inject: float = 1.0) -> tuple[Table, bool]:
    report = run_oracle(config, suites, inject)
    rows = [(r.suite, r.name, r.measured, r.expected, r.error, r.tol,
             "info" if r.informational else ("pass" if r.passed else "FAIL")) for r in report.rows]
    return Table(("suite", "check", "measured", "expected", "error", "tol", "status"), rows), report.passed


def _parse_suites(raw: str) -> list[str]:
    chosen = [s.strip() for s in raw.split(",") if s.strip()]
    bad = [s for s in chosen if s not in SUITES]
    if bad:
        raise ConfigError(f"unknown suite {bad[0]!r}; choose from {', '.join(SUITES)}")
    return chosen


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgem", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat key = value parameter file (SI units)")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seedless", action="store_true",
                        help="reserved; nothing in this tool draws random numbers")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("couplings", help="the eight coupling constants and coupling/gap ratios")
    conc = sub.add_parser("concurrence", help="closed-form and mixed-state concurrences")
    conc.add_argument("--which", choices=CONCURRENCE_CHOICES, required=True)
    fig = sub.add_parser("figure", help="sweep table behind a figure")
    fig.add_argument("--id", dest="figure_id", choices=tuple(ex.FIGURES), required=True)
    bnd = sub.add_parser("boundary", help="threshold separation D as a function of M")
    bnd.add_argument("--variant", choices=("static", "momentum"), default="static")
    orc = sub.add_parser("oracle", help="run the validation suites")
    orc.add_argument("--suites", default=",".join(SUITES), help="comma list from fd,pt,diag")
    orc.add_argument("--inject", type=float, default=1.0,
                     help="scale expected coupling strengths in the fd suite (1.01 = 1%% error)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        ok = True
        if args.command == "couplings":
            table = cmd_couplings(config)
        elif args.command == "concurrence":
            table = cmd_concurrence(config, args.which)
        elif args.command == "figure":
            table = cmd_figure(config, args.figure_id)
        elif args.command == "boundary":
            table = cmd_boundary(config, args.variant)
        else:
            table, ok = cmd_oracle(config, _parse_suites(args.suites), args.inject)
        emit(table, config, args.format, args.out)
    except ConfigError as exc:
        print(f"qgem: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
