import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgem_decoherence.couplings import (CouplingSet, amplitude, coupling_ratios, coupling_set,
                                        cubic_couplings, cubic_form, form_couplings,
                                        quadratic_couplings, quadratic_form)
from qgem_decoherence.model import DESK, ParameterError, PhysicalConstants

from reference_values import CUBIC_MOM_NEAR, CUBIC_POS_NEAR, G2_OVER_G3, G_MINUS, G_PLUS, NN_STRENGTH

HBAR = PhysicalConstants().hbar


def test_desk_quadratic_couplings():
    gm, gp = quadratic_couplings(DESK)
    assert gm == pytest.approx(G_MINUS, rel=1e-14)
    assert gp == pytest.approx(G_PLUS, rel=1e-14)


def test_no_apparatus_no_quadratic_coupling():
    assert quadratic_couplings(DESK.with_(M=0.0)) == (0.0, 0.0)


def test_small_light_separation_equalizes():
    gm, gp = quadratic_couplings(DESK.with_(d=1e-12))
    assert gm == pytest.approx(gp, rel=1e-8)


def test_singular_separation_rejected():
    with pytest.raises(ParameterError):
        quadratic_couplings(DESK.with_(D=DESK.d))


def test_exact_ratio_identities():
    g = coupling_set(DESK)
    q = (DESK.D + DESK.d) / (DESK.D - DESK.d)
    assert g.g_minus / g.g_plus == pytest.approx(q ** 3, rel=1e-14)
    assert g.g1_minus / g.g1_plus == pytest.approx(q ** 4, rel=1e-14)
    assert g.g2_minus / g.g2_plus == pytest.approx(q ** 4, rel=1e-14)
    assert g.g3_minus / g.g3_plus == pytest.approx(q ** 2, rel=1e-14)


def test_cubic_mass_dependence():
    base = coupling_set(DESK)
    none = coupling_set(DESK.with_(M=0.0))
    assert (none.g2_minus, none.g2_plus, none.g3_minus, none.g3_plus) == (0.0, 0.0, 0.0, 0.0)
    assert (none.g1_minus, none.g1_plus) == (base.g1_minus, base.g1_plus)
    heavier = coupling_set(DESK.with_(M=4 * DESK.M))
    for name in ("g2_minus", "g2_plus", "g3_minus", "g3_plus"):
        assert getattr(heavier, name) == pytest.approx(2 * getattr(base, name), rel=1e-14)
    assert heavier.g1_minus == base.g1_minus


def test_momentum_coupling_suppression():
    g1m, g1p, g2m, g2p, g3m, g3p = cubic_couplings(DESK)
    c = PhysicalConstants().c
    algebraic = 8 * c ** 2 / (DESK.omega_l ** 2 * (DESK.D - DESK.d) ** 2)
    assert g2m / g3m == pytest.approx(G2_OVER_G3, rel=1e-13)
    assert g2m / g3m == pytest.approx(algebraic, rel=1e-13)


def test_ordering_and_sign():
    g = coupling_set(DESK)
    assert all(v >= 0 for v in g.as_dict().values())
    assert g.g_minus >= g.g_plus and g.g1_minus >= g.g1_plus
    assert g.g2_minus >= g.g2_plus and g.g3_minus >= g.g3_plus


@settings(max_examples=50, deadline=None)
@given(D1=st.floats(1.01e-4, 1e-1), factor=st.floats(1.001, 10))
def test_couplings_decrease_with_separation(D1, factor):
    near = coupling_set(DESK.with_(D=D1)).as_dict()
    far = coupling_set(DESK.with_(D=D1 * factor)).as_dict()
    assert all(far[k] < near[k] for k in near)


def test_scaled_coupling_set():
    g = CouplingSet(1.0, 2.0).scaled(3.0)
    assert (g.g_minus, g.g_plus, g.g3_plus) == (3.0, 6.0, 0.0)


def test_fused_ratios_match_raw():
    g = coupling_set(DESK)
    r = coupling_ratios(DESK)
    w1 = DESK.omega_h + DESK.omega_l
    w2 = 2 * DESK.omega_h + DESK.omega_l
    w3 = DESK.omega_h + 2 * DESK.omega_l
    assert r["g_minus"] == pytest.approx(g.g_minus / w1, rel=1e-13)
    assert r["g_plus"] == pytest.approx(g.g_plus / w1, rel=1e-13)
    assert r["g1_minus"] == pytest.approx(g.g1_minus / w2, rel=1e-13)
    assert r["g2_plus"] == pytest.approx(g.g2_plus / w3, rel=1e-13)
    assert r["g3_minus"] == pytest.approx(g.g3_minus / w3, rel=1e-13)


def test_quadratic_form_strengths():
    form = quadratic_form(DESK)
    assert form[("x_a", "x_A")] == pytest.approx(NN_STRENGTH, rel=1e-14)
    assert form[("x_a", "x_A")] == form[("x_b", "x_B")]
    q = (DESK.D + DESK.d) / (DESK.D - DESK.d)
    assert form[("x_a", "x_A")] / form[("x_a", "x_B")] == pytest.approx(q ** 3, rel=1e-14)
    assert all(v == 0 for v in quadratic_form(DESK.with_(M=0.0)).terms.values())


def test_quadratic_form_reproduces_couplings():
    g = coupling_set(DESK)
    hopped = form_couplings(quadratic_form(DESK), DESK)
    assert hopped[("x_a", "x_A")] == pytest.approx(g.g_minus, rel=1e-14)
    assert hopped[("x_b", "x_A")] == pytest.approx(g.g_plus, rel=1e-14)


def test_cubic_form_strength_and_ratio():
    form = cubic_form(DESK)
    assert form[("x_a", "x_A", "x_A")] == pytest.approx(CUBIC_POS_NEAR, rel=1e-14)
    assert abs(form[("p_a", "p_a", "x_A")]) == pytest.approx(CUBIC_MOM_NEAR, rel=1e-14)
    q = (DESK.D + DESK.d) / (DESK.D - DESK.d)
    assert abs(form[("x_a", "x_A", "x_A")] / form[("x_a", "x_B", "x_B")]) == pytest.approx(q ** 4, rel=1e-14)


def test_cubic_momentum_terms_need_apparatus():
    form = cubic_form(DESK.with_(M=0.0))
    assert all(v == 0 for k, v in form.terms.items() if k[0].startswith("p_"))


def test_cubic_form_reproduces_couplings():
    g = coupling_set(DESK)
    hop = form_couplings(cubic_form(DESK), DESK)
    assert abs(hop[("x_a", "x_A", "x_A")]) == pytest.approx(g.g1_minus, rel=1e-14)
    assert abs(hop[("x_a", "x_a", "x_A")]) == pytest.approx(g.g2_minus, rel=1e-14)
    assert abs(hop[("p_a", "p_a", "x_A")]) == pytest.approx(g.g3_minus, rel=1e-14)
    assert abs(hop[("x_b", "x_A", "x_A")]) == pytest.approx(g.g1_plus, rel=1e-14)
    assert abs(hop[("p_b", "p_b", "x_A")]) == pytest.approx(g.g3_plus, rel=1e-14)


def test_sign_conventions_share_magnitudes():
    derived = cubic_form(DESK, signs="derived").terms
    printed = cubic_form(DESK, signs="printed").terms
    assert derived.keys() == printed.keys()
    assert all(abs(derived[k]) == abs(printed[k]) for k in derived)
    differing = {k for k in derived if derived[k] != printed[k]}
    assert differing == {("x_a", "x_B", "x_B"), ("x_a", "x_a", "x_B"), ("x_b", "x_A", "x_A"),
                         ("x_b", "x_b", "x_A"), ("x_b", "x_B", "x_B"), ("x_b", "x_b", "x_B"),
                         ("p_b", "p_b", "x_B"), ("p_b", "p_b", "x_A")}


def test_zero_point_amplitudes():
    assert amplitude("x_a", DESK, HBAR) == pytest.approx(math.sqrt(HBAR / (2 * DESK.m * DESK.omega_l)))
    assert amplitude("p_b", DESK, HBAR) == pytest.approx(math.sqrt(HBAR * DESK.m * DESK.omega_l / 2))
    with pytest.raises(ValueError):
        amplitude("q_a", DESK, HBAR)
