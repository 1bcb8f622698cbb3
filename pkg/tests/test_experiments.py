import math

import numpy as np
import pytest

from qgem_decoherence import experiments as ex
from qgem_decoherence.entanglement import concurrence_ll
from qgem_decoherence.model import DESK, ParameterError, PhysicalConstants

from reference_values import D_THRESHOLD_STATIC, ORDER_RATIO

CONSTS = PhysicalConstants()


@pytest.fixture(scope="module")
def fig2():
    return ex.fig2_approximation_errors()


def test_grid_values_and_extra_points():
    g = ex.Grid(1.0, 100.0, 3, extra=(5.0,))
    assert list(g.values()) == [1.0, 5.0, 10.0, 100.0]
    assert list(ex.Grid(0.0, 1.0, 3, "linear").values()) == [0.0, 0.5, 1.0]


@pytest.mark.parametrize("kwargs", [dict(num=0), dict(spacing="cubic"), dict(start=0.0)])
def test_grid_validation(kwargs):
    base = dict(start=1.0, stop=2.0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ex.Grid(**base)


def test_sweep_rejects_D_at_or_below_d():
    with pytest.raises(ParameterError):
        ex.SweepSpec(ex.Grid(DESK.d, 1e-2, 5), "D", DESK)
    with pytest.raises(ParameterError):
        ex.SweepSpec(ex.Grid(-1.0, 1.0, 3, "linear"), "M", DESK)


def test_fig2_shape_and_finiteness(fig2):
    assert fig2.columns == ex.FIG2_COLUMNS
    assert len(fig2.rows) == 201
    assert fig2.all_finite()


def test_fig2_equal_spacing_variant_exact(fig2):
    row = fig2.where(D=2 * DESK.d)
    assert row.column("err_D2d")[0] <= 1e-14 * row.column("C_small")[0]


def test_fig2_far_variant_improves_toward_millimetre(fig2):
    D = fig2.column("D")
    err = fig2.column("err_Dggd") / fig2.column("C_small")
    at = lambda x: err[np.argmin(np.abs(D - x))]  # noqa: E731
    assert at(1e-3) < at(2e-4)


def test_best_variant_table_sums_to_one(fig2):
    table = ex.best_variant_table(fig2, 1.5e-4, 1e-3)
    assert set(table) == {"D_gg_d", "D_eq_2d", "dominant"}
    assert sum(table.values()) == pytest.approx(1.0)


def test_fig3_ratio_at_desk():
    spec = ex.SweepSpec(ex.Grid(1e-3, 1e-3, 1), "D", DESK, omega_h_values=(1e8,))
    row = ex.fig3_order_comparison(spec)
    ratio = row.column("C_order1")[0] / row.column("C_order2")[0]
    assert ratio == pytest.approx(ORDER_RATIO, rel=1e-12)
    assert 1e8 <= ratio <= 1e12


def test_fig3_orderings():
    res = ex.fig3_order_comparison()
    assert res.columns == ex.FIG3_COLUMNS
    assert np.all(res.column("C_order1") > res.column("C_order2"))
    for wh in ex.FIG_OMEGA_H:
        c = res.where(omega_h=wh).column("C_order1")
        assert np.all(np.diff(c) < 0)
    # a stiffer apparatus trap entangles less
    lo = res.where(omega_h=1e7).column("C_order1")
    hi = res.where(omega_h=1e9).column("C_order1")
    assert np.all(lo > hi)


def test_static_threshold_value():
    assert ex.threshold_static(DESK) == pytest.approx(D_THRESHOLD_STATIC, rel=1e-14)


def test_threshold_no_apparatus():
    p = DESK.with_(M=0.0)
    assert ex.threshold_static(p) == p.d
    assert ex.threshold_numeric(p) == p.d


def test_momentum_threshold_zeroed_is_static():
    for M in (1e-12, 1e-8, 1.0):
        p = DESK.with_(M=M)
        assert ex.threshold_with_momentum(p, CONSTS, momentum_scale=0.0) == ex.threshold_static(p)
    assert ex.threshold_with_momentum(DESK) < ex.threshold_static(DESK)


def test_numeric_threshold_is_crossing():
    D = ex.threshold_numeric(DESK)
    from qgem_decoherence.couplings import coupling_set
    from qgem_decoherence.entanglement import concurrence_hl_small
    p = DESK.with_(D=D)
    assert concurrence_hl_small(coupling_set(p), p) == pytest.approx(concurrence_ll(DESK, order="static"), rel=1e-9)
    assert 1 / math.sqrt(2) <= D / ex.threshold_static(DESK) <= math.sqrt(2)


def test_bracket_failure_raises():
    with pytest.raises(ex.BracketError):
        ex.threshold_numeric(DESK, upper=DESK.d * 1.5)


def test_boundary_sweep():
    spec = ex.with_grid(ex.default_boundary_spec(), num=12)
    res = ex.boundary_D_of_M(spec)
    assert res.columns == ex.BOUNDARY_COLUMNS
    assert len(res.rows) == 12 * len(ex.FIG_OMEGA_H)
    assert res.metadata["bracket_failures"] == []
    assert np.all((res.column("ratio") > 1 / math.sqrt(2)) & (res.column("ratio") < math.sqrt(2)))
    for wh in ex.FIG_OMEGA_H:
        assert np.all(np.diff(res.where(omega_h=wh).column("D_threshold")) > 0)
    with pytest.raises(ValueError):
        ex.boundary_D_of_M(spec, "other")


def test_boundary_bracket_failure_recorded():
    spec = ex.SweepSpec(ex.Grid(1e-8, 1e-8, 1), "M", DESK, omega_h_values=(1e8,))
    original = ex.threshold_numeric

    def failing(*args, **kwargs):
        raise ex.BracketError("forced")

    ex.threshold_numeric = failing
    try:
        res = ex.boundary_D_of_M(spec)
    finally:
        ex.threshold_numeric = original
    assert res.metadata["bracket_failures"] == [(1e-8, 1e8)]
    assert math.isnan(res.column("D_numeric")[0])


def test_fig4_columns():
    res = ex.fig4_boundary(ex.with_grid(ex.default_boundary_spec(), num=5))
    assert res.columns == ("M", "omega_h", "D_static", "D_momentum", "D_numeric")
    assert np.all(res.column("D_momentum") <= res.column("D_static"))


def test_fig5_endpoint_and_flatness():
    res = ex.fig5_mixed_concurrence(ex.with_grid(ex.default_fig5_spec(), num=20))
    static = concurrence_ll(DESK, order="static")
    for wh in (1e8, 1e9):
        c = res.where(omega_h=wh).column("C_mixed")
        assert c[0] == pytest.approx(static, rel=1e-3)
        assert np.all(c > 0)


def test_mixed_concurrence_eigenvalues():
    value, lam = ex.mixed_light_concurrence(DESK, return_eigenvalues=True)
    assert len(lam) == 4 and value == pytest.approx(lam[0] - lam[1] - lam[2] - lam[3])


def test_find_crossing():
    x = np.array([1.0, 10.0, 100.0])
    y = np.array([1.0, 0.5, 0.0])
    assert ex.find_crossing(x, y, 0.75) == pytest.approx(math.sqrt(10))
    assert ex.find_crossing(x, y, -1.0) is None
    assert ex.find_crossing(x, y, 2.0) == 1.0


def test_sweeps_deterministic_and_worker_independent():
    spec = ex.with_grid(ex.default_fig2_spec(), num=30)
    serial = ex.fig2_approximation_errors(spec)
    again = ex.fig2_approximation_errors(spec)
    threaded = ex.fig2_approximation_errors(ex.SweepSpec(spec.grid, "D", spec.params, workers=4))
    assert serial.rows == again.rows == threaded.rows
    assert serial.metadata == again.metadata


def test_sweep_result_width_checked():
    with pytest.raises(ValueError):
        ex.SweepResult(("a", "b"), [(1.0,)])
