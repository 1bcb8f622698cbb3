import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgem_decoherence.couplings import CouplingSet, coupling_set
from qgem_decoherence.model import DESK, PhysicalConstants
from qgem_decoherence.perturbation import (GROUND, BasisState, DegenerateSpectrumError,
                                           PerturbationSettings, PerturbedState,
                                           coefficient_light_light, coefficients_cubic,
                                           coefficients_quadratic, first_order_state,
                                           general_first_order, light_light_form)

from reference_values import C_1010, C_LL_STATIC

CONSTS = PhysicalConstants()


def test_ground_amplitude_enforced():
    with pytest.raises(ValueError):
        PerturbedState({GROUND: 0.5})
    assert PerturbedState().norm == 1.0


def test_basis_label_parsing():
    assert BasisState.parse("0102") == BasisState(0, 1, 0, 2)
    state = PerturbedState({GROUND: 1.0, (1, 0, 1, 0): 0.25})
    assert state["1010"] == 0.25 and state[(0, 1, 0, 1)] == 0.0


def test_zero_couplings_leave_ground_state():
    state = coefficients_quadratic(CouplingSet(), DESK)
    assert all(v == 0 for v in state.excited().values())
    assert state.norm == 1.0


def test_desk_quadratic_coefficient():
    state = coefficients_quadratic(coupling_set(DESK), DESK)
    assert state["1010"] == pytest.approx(C_1010, rel=1e-14)
    assert state["1010"] == state["0101"]
    assert state["0110"] == state["1001"]


@settings(max_examples=50, deadline=None)
@given(gm=st.floats(0, 10), gp=st.floats(0, 10), w=st.floats(0.1, 10))
def test_quadratic_norm_identity(gm, gp, w):
    params = DESK.with_(omega_l=w / 2, omega_h=w / 2)
    state = coefficients_quadratic(CouplingSet(gm, gp), params)
    want = 1 + 2 * (gm ** 2 + gp ** 2) / w ** 2
    assert state.norm == pytest.approx(want, rel=1e-14)
    assert state.norm >= 1 and math.isfinite(state.norm)


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(0.01, 1.0))
def test_coefficients_linear_in_bookkeeping_scale(lam):
    g = coupling_set(DESK)
    full = coefficients_quadratic(g, DESK).merged(coefficients_cubic(g, DESK))
    part = coefficients_quadratic(g, DESK, lam).merged(coefficients_cubic(g, DESK, lam))
    for key, value in full.excited().items():
        assert part[key] == pytest.approx(lam * value, rel=1e-14)


def test_bookkeeping_scale_range():
    with pytest.raises(ValueError):
        PerturbationSettings(lam=0.0)
    with pytest.raises(ValueError):
        PerturbationSettings(lam=1.5)


def test_cubic_zero_couplings():
    state = coefficients_cubic(CouplingSet(), DESK)
    assert all(v == 0 for v in state.excited().values())


def test_cubic_difference_cancels():
    g = CouplingSet(g2_minus=3.0, g3_minus=3.0, g2_plus=1.0, g3_plus=0.5)
    state = coefficients_cubic(g, DESK)
    assert state["0201"] == 0.0 and state["2010"] == 0.0
    assert state["0210"] != 0.0


def test_cubic_printed_equalities():
    state = coefficients_cubic(coupling_set(DESK), DESK)
    assert state["0102"] == state["1020"]
    assert state["0120"] == state["1002"]
    assert state["0201"] == state["2010"]
    assert state["0210"] == state["2001"]


def test_cubic_far_below_quadratic():
    g = coupling_set(DESK)
    ratio = abs(coefficients_cubic(g, DESK)["0201"]) / abs(coefficients_quadratic(g, DESK)["1010"])
    assert 1e-12 < ratio < 1e-8


def test_fock_convention_relation():
    g = coupling_set(DESK)
    printed = coefficients_cubic(g, DESK, convention="printed")
    fock = coefficients_cubic(g, DESK, convention="fock")
    for key, value in printed.excited().items():
        sign = -1 if key.n_a else 1
        assert fock[key] == pytest.approx(sign * math.sqrt(2) * value, rel=1e-15)


def test_omission_rule():
    g = coupling_set(DESK)
    for state in (coefficients_quadratic(g, DESK), coefficients_cubic(g, DESK)):
        for key in state.excited():
            assert key.light != (0, 0) and key.heavy != (0, 0)
    with_ll = first_order_state(DESK, settings=PerturbationSettings(include_light_light=True))
    self_terms = [k for k in with_ll.excited() if k.heavy == (0, 0) or k.light == (0, 0)]
    assert self_terms == [BasisState(1, 1, 0, 0)]


def test_occupation_support():
    g = coupling_set(DESK)
    assert coefficients_quadratic(g, DESK).max_occupation == 1
    for key in coefficients_cubic(g, DESK).excited():
        assert (max(key.light) == 2) != (max(key.heavy) == 2)


def test_light_light_static_value():
    c = coefficient_light_light(DESK, CONSTS, "static")
    assert 2 * abs(c) == pytest.approx(C_LL_STATIC, rel=1e-14)
    assert c < 0


def test_light_light_momentum_ratio():
    static = coefficient_light_light(DESK, CONSTS, "static")
    full = coefficient_light_light(DESK, CONSTS, "with_momentum")
    ratio = abs(full - static) / abs(static)
    expected = 2 * DESK.d ** 2 * DESK.omega_l ** 2 / CONSTS.c ** 2
    assert ratio == pytest.approx(expected, rel=1e-6)
    assert ratio == pytest.approx(2.2e-9, rel=0.02)
    # the momentum term enters with the opposite sign to the static one
    assert abs(full) < abs(static)


def test_light_light_vanishes_linearly_with_probe_mass():
    small = coefficient_light_light(DESK.with_(m=1e-30), CONSTS)
    assert small == pytest.approx(coefficient_light_light(DESK, CONSTS) * 1e-16, rel=1e-9)


def test_light_light_form_terms():
    form = light_light_form(DESK)
    assert form[("x_a", "x_b")] == pytest.approx(2 * CONSTS.G * DESK.m ** 2 / DESK.d ** 3)
    assert form[("p_a", "p_b")] == pytest.approx(4 * CONSTS.G / (CONSTS.c ** 2 * DESK.d))


def test_general_first_order_matches_closed_form():
    g = coupling_set(DESK)
    w = DESK.omega_h + DESK.omega_l
    elements = {(1, 0, 1, 0): g.g_minus, (0, 1, 0, 1): g.g_minus,
                (0, 1, 1, 0): g.g_plus, (1, 0, 0, 1): g.g_plus}
    energies = (DESK.omega_l, DESK.omega_l, DESK.omega_h, DESK.omega_h)
    state = general_first_order(elements, energies)
    closed = coefficients_quadratic(g, DESK)
    for key in elements:
        assert state[key] == pytest.approx(closed[key], rel=1e-12)
    assert w > 0


def test_general_first_order_diagonal_perturbation():
    state = general_first_order({(0, 0, 0, 0): 5.0}, (1, 1, 1, 1))
    assert state.excited() == {}


def test_number_valued_interaction_leaves_ground_state():
    # a classical interaction is proportional to the identity: no off-diagonal elements
    h = 3.7 * np.eye(16)
    column = h[:, 0]
    elements = {tuple(int(i) for i in np.unravel_index(k, (2, 2, 2, 2))): column[k]
                for k in range(16) if column[k] != 0}
    assert general_first_order(elements, (1, 1, 1, 1)).excited() == {}


def test_degenerate_gap_raises():
    with pytest.raises(DegenerateSpectrumError):
        general_first_order({(1, 0, 0, 0): 1.0}, (0.0, 1.0, 1.0, 1.0))


def test_dense_vector_normalized():
    state = coefficients_quadratic(CouplingSet(0.3, 0.1), DESK.with_(omega_l=0.5, omega_h=0.5))
    psi = state.to_vector(n_max=1)
    assert psi.shape == (16,)
    assert np.linalg.norm(psi) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        coefficients_cubic(CouplingSet(1, 1, 1, 1, 1, 1, 1, 1), DESK).to_vector(n_max=1)
