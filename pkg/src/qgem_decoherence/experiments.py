"""Parameter sweeps behind the figures and the parameter-space boundary."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .couplings import coupling_set
from .entanglement import (DensityMatrix, concurrence_hl2_dominant, concurrence_hl_approx,
                           concurrence_hl_small, concurrence_ll, partial_trace,
                           wootters_concurrence)
from .model import DESK, ParameterError, PhysicalConstants, SystemParams, require_valid
from .perturbation import PerturbationSettings, first_order_state


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    num: int = 200
    spacing: str = "log"
    extra: tuple[float, ...] = ()

    def __post_init__(self):
        if self.num < 1:
            raise ValueError("grid needs at least one point")
        if self.spacing not in ("log", "linear"):
            raise ValueError("spacing must be 'log' or 'linear'")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ValueError("log grid needs positive endpoints")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            pts = np.geomspace(self.start, self.stop, self.num)
        else:
            pts = np.linspace(self.start, self.stop, self.num)
        if self.extra:
            pts = np.unique(np.concatenate([pts, np.asarray(self.extra, dtype=float)]))
        return pts


@dataclass(frozen=True)
class SweepSpec:
    grid: Grid
    variable: str = "D"
    params: SystemParams = DESK
    consts: PhysicalConstants = PhysicalConstants()
    omega_h_values: tuple[float, ...] = ()
    workers: int | None = None

    def __post_init__(self):
        vals = self.grid.values()
        if self.variable == "D" and np.any(vals <= self.params.d):
            raise ParameterError("D grid must stay strictly above d")
        if self.variable == "M" and np.any(vals < 0):
            raise ParameterError("M grid must be non-negative")


@dataclass
class SweepResult:
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width does not match columns")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def where(self, **equals) -> "SweepResult":
        idx = {self.columns.index(k): v for k, v in equals.items()}
        rows = [r for r in self.rows if all(r[i] == v for i, v in idx.items())]
        return SweepResult(self.columns, rows, dict(self.metadata))

    def all_finite(self) -> bool:
        return all(math.isfinite(v) for r in self.rows for v in r)


def _metadata(spec: SweepSpec, **extra) -> dict:
    p, c = spec.params, spec.consts
    return {
        "params": {"m": p.m, "M": p.M, "d": p.d, "D": p.D, "omega_l": p.omega_l, "omega_h": p.omega_h},
        "constants": {"G": c.G, "hbar": c.hbar, "c": c.c},
        "constant_overrides": c.overrides(),
        "version": __version__,
        "numpy": np.__version__,
        **extra,
    }


def _map(fn: Callable, items: Sequence, workers: int | None) -> list:
    # rows come back in grid order regardless of completion order
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def default_fig2_spec(params: SystemParams = DESK) -> SweepSpec:
    return SweepSpec(Grid(params.d * (1 + 1e-3), 1e-2, 200, extra=(2 * params.d,)), "D", params)


FIG2_COLUMNS = ("D", "C_small", "C_Dggd", "C_D2d", "C_dom", "err_Dggd", "err_D2d", "err_dom")


def fig2_approximation_errors(spec: SweepSpec | None = None) -> SweepResult:
    """Small-coupling concurrence against three geometric approximations across ``D``."""
    spec = default_fig2_spec() if spec is None else spec

    def row(D):
        p = spec.params.with_(D=float(D))
        small = concurrence_hl_small(coupling_set(p, spec.consts), p)
        approx = [concurrence_hl_approx(p, spec.consts, v) for v in ("D_gg_d", "D_eq_2d", "dominant")]
        return (float(D), small, *approx, *(abs(small - a) for a in approx))

    return SweepResult(FIG2_COLUMNS, _map(row, spec.grid.values(), spec.workers), _metadata(spec))


def best_variant_table(result: SweepResult, D_min: float, D_max: float) -> dict[str, float]:
    """Fraction of grid points in ``[D_min, D_max]`` on which each variant has the smallest error."""
    D = result.column("D")
    mask = (D >= D_min) & (D <= D_max)
    errs = np.vstack([result.column(c)[mask] for c in ("err_Dggd", "err_D2d", "err_dom")])
    best = np.argmin(errs, axis=0)
    n = max(int(mask.sum()), 1)
    return {name: float(np.sum(best == i)) / n for i, name in enumerate(("D_gg_d", "D_eq_2d", "dominant"))}


FIG3_COLUMNS = ("D", "omega_h", "C_order1", "C_order2")
FIG_OMEGA_H = (1e7, 1e8, 1e9)


def default_fig3_spec(params: SystemParams = DESK) -> SweepSpec:
    return SweepSpec(Grid(params.d * (1 + 1e-3), 1e-2, 200), "D", params, omega_h_values=FIG_OMEGA_H)


def fig3_order_comparison(spec: SweepSpec | None = None) -> SweepResult:
    """Leading bilinear vs three-operator concurrence across ``D`` for several heavy trap frequencies."""
    spec = default_fig3_spec() if spec is None else spec
    items = [(wh, D) for wh in (spec.omega_h_values or (spec.params.omega_h,)) for D in spec.grid.values()]

    def row(item):
        wh, D = item
        p = spec.params.with_(D=float(D), omega_h=float(wh))
        return (float(D), float(wh), concurrence_hl_approx(p, spec.consts, "dominant"),
                concurrence_hl2_dominant(p, spec.consts))

    return SweepResult(FIG3_COLUMNS, _map(row, items, spec.workers), _metadata(spec))


def _boundary_base(p: SystemParams) -> float:
    return 16 * math.sqrt(2 * p.M) * p.omega_l ** 2 / (math.sqrt(p.m * p.omega_l * p.omega_h)
                                                     * (p.omega_l + p.omega_h))


def threshold_static(params: SystemParams) -> float:
    """Printed static boundary: smallest ``D`` at which light-light beats heavy-light entanglement."""
    return _boundary_base(params) ** (1 / 3) * params.d + params.d


def threshold_with_momentum(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                            momentum_scale: float = 1.0) -> float:
    """Printed boundary including the light-pair momentum term; ``momentum_scale=0`` removes it.

    ``1/(1/(d^3 w_l^2) + 2/(d c^2))`` is rewritten as ``d^3 w_l^2 / (1 + 2 d^2 w_l^2/c^2)``
    so that the zeroed case reproduces :func:`threshold_static` bit for bit.
    """
    p = params
    k = momentum_scale * 2 * (p.d * p.omega_l / consts.c) ** 2
    return (_boundary_base(p) / (1 + k)) ** (1 / 3) * p.d + p.d


class BracketError(RuntimeError):
    pass


def threshold_numeric(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                      order: str = "static", upper: float = 1.0, rtol: float = 1e-12) -> float:
    """Root of ``C_hl_small(D) = C_ll`` on ``(d(1+1e-9), upper)``.

    Raises :class:`BracketError` if the bracket does not enclose a sign change.
    """
    if params.M == 0:
        return params.d
    target = math.log(concurrence_ll(params, consts, order))

    def f(D):
        p = params.with_(D=D)
        return math.log(concurrence_hl_small(coupling_set(p, consts), p)) - target

    lo = params.d * (1 + 1e-9)
    f_lo, f_hi = f(lo), f(upper)
    if f_lo * f_hi > 0:
        raise BracketError(f"no sign change on ({lo:.6g}, {upper:.6g}) for M={params.M:.6g}")
    return brentq(f, lo, upper, rtol=rtol, xtol=1e-300)


def default_boundary_spec(params: SystemParams = DESK) -> SweepSpec:
    return SweepSpec(Grid(1e-12, 1e2, 200), "M", params, omega_h_values=FIG_OMEGA_H)


BOUNDARY_COLUMNS = ("M", "omega_h", "D_threshold", "D_numeric", "ratio")


def boundary_D_of_M(spec: SweepSpec | None = None, variant: str = "static") -> SweepResult:
    """Per ``(M, omega_h)``: printed threshold, numeric threshold and their ratio.

    A failed bracket is listed in ``metadata["bracket_failures"]`` and leaves
    ``D_numeric`` and ``ratio`` as NaN for that row.
    """
    if variant not in ("static", "momentum"):
        raise ValueError("variant must be 'static' or 'momentum'")
    spec = default_boundary_spec() if spec is None else spec
    order = "static" if variant == "static" else "with_momentum"  # concurrence_ll order name
    items = [(wh, M) for wh in (spec.omega_h_values or (spec.params.omega_h,)) for M in spec.grid.values()]
    failures: list[tuple[float, float]] = []

    def row(item):
        wh, M = item
        p = spec.params.with_(M=float(M), omega_h=float(wh))
        printed = threshold_static(p) if order == "static" else threshold_with_momentum(p, spec.consts)
        try:
            numeric = threshold_numeric(p, spec.consts, order)
        except BracketError:
            failures.append((float(M), float(wh)))
            numeric = math.nan
        return (float(M), float(wh), printed, numeric, numeric / printed)

    rows = _map(row, items, spec.workers)
    return SweepResult(BOUNDARY_COLUMNS, rows,
                       _metadata(spec, variant=variant, bracket_failures=sorted(failures)))


FIG4_COLUMNS = ("M", "omega_h", "D_static", "D_momentum", "D_numeric")


def fig4_boundary(spec: SweepSpec | None = None) -> SweepResult:
    spec = default_boundary_spec() if spec is None else spec
    static = boundary_D_of_M(spec, "static")
    mom = boundary_D_of_M(spec, "momentum")
    rows = [(s[0], s[1], s[2], m[2], s[3]) for s, m in zip(static.rows, mom.rows)]
    return SweepResult(FIG4_COLUMNS, rows, {**static.metadata, "variant": "both"})


FIG5_COLUMNS = ("M", "omega_h", "C_mixed")


def default_fig5_spec(params: SystemParams = DESK) -> SweepSpec:
    return SweepSpec(Grid(1e-12, 1e-6, 200), "M", params.with_(D=1e-3), omega_h_values=(1e8, 1e9))


FIG5_SETTINGS = PerturbationSettings(include_light_light=True, light_light_order="with_momentum")


def light_reduced_state(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                        ) -> DensityMatrix:
    """Two-qubit light state after tracing out both heavy modes of the first-order state."""
    state = first_order_state(require_valid(params), consts, FIG5_SETTINGS)
    rho = DensityMatrix.pure(state.to_vector(n_max=1), (2, 2, 2, 2))
    return partial_trace(rho, keep=(0, 1))


def mixed_light_concurrence(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                            return_eigenvalues: bool = False):
    return wootters_concurrence(light_reduced_state(params, consts), return_eigenvalues)


def fig5_mixed_concurrence(spec: SweepSpec | None = None) -> SweepResult:
    """Light-light concurrence in the presence of the heavy masses, across ``M``."""
    spec = default_fig5_spec() if spec is None else spec
    items = [(wh, M) for wh in (spec.omega_h_values or (spec.params.omega_h,)) for M in spec.grid.values()]

    def row(item):
        wh, M = item
        p = spec.params.with_(M=float(M), omega_h=float(wh))
        return (float(M), float(wh), mixed_light_concurrence(p, spec.consts))

    return SweepResult(FIG5_COLUMNS, _map(row, items, spec.workers), _metadata(spec))


def find_crossing(x: np.ndarray, y: np.ndarray, level: float) -> float | None:
    """First ``x`` where ``y`` falls to ``level`` (log-linear interpolation), or None."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    below = np.flatnonzero(y <= level)
    if below.size == 0:
        return None
    i = int(below[0])
    if i == 0:
        return float(x[0])
    x0, x1, y0, y1 = x[i - 1], x[i], y[i - 1], y[i]
    t = (y0 - level) / (y0 - y1)
    return float(math.exp(math.log(x0) + t * (math.log(x1) - math.log(x0))))


FIGURES = {
    "fig2": fig2_approximation_errors,
    "fig3": fig3_order_comparison,
    "fig4": fig4_boundary,
    "fig5": fig5_mixed_concurrence,
}


def with_grid(spec: SweepSpec, **grid_changes) -> SweepSpec:
    return replace(spec, grid=replace(spec.grid, **grid_changes))
