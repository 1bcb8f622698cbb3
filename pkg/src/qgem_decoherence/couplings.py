"""Heavy-light coupling constants and the Taylor-expanded interaction Hamiltonians.

Couplings are matrix elements divided by hbar, i.e. frequencies in s^-1.  The
``-`` couplings connect neighbouring light/heavy bodies (distance ``(D-d)/2``),
the ``+`` couplings the maximally separated ones (``(D+d)/2``).
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

from .model import PhysicalConstants, SystemParams, require_valid

MODES = ("a", "b", "A", "B")


@dataclass(frozen=True)
class CouplingSet:
    g_minus: float = 0.0
    g_plus: float = 0.0
    g1_minus: float = 0.0
    g1_plus: float = 0.0
    g2_minus: float = 0.0
    g2_plus: float = 0.0
    g3_minus: float = 0.0
    g3_plus: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def scaled(self, factor: float) -> "CouplingSet":
        return CouplingSet(*(factor * v for v in astuple(self)))


def quadratic_couplings(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                        ) -> tuple[float, float]:
    """``(g_minus, g_plus) = 8 G sqrt(mM) / ((D -/+ d)^3 sqrt(omega_h omega_l))``."""
    require_valid(params)
    p = params
    prefactor = 8 * consts.G * math.sqrt(p.m * p.M) / math.sqrt(p.omega_h * p.omega_l)
    return prefactor / (p.D - p.d) ** 3, prefactor / (p.D + p.d) ** 3


def cubic_couplings(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                    ) -> tuple[float, float, float, float, float, float]:
    """``(g1-, g1+, g2-, g2+, g3-, g3+)`` of the three-operator couplings.

    ``g1`` (one light, two heavy displacements) is independent of ``M``;
    ``g2`` (two light, one heavy) and the momentum coupling ``g3`` scale as ``sqrt(M)``.
    """
    require_valid(params)
    p = params
    G, hbar, c = consts.G, consts.hbar, consts.c
    s2 = math.sqrt(2.0)
    light = math.sqrt(p.m * hbar / p.omega_l)
    heavy = math.sqrt(p.M * hbar / p.omega_h)
    out = []
    for r in (p.D - p.d, p.D + p.d):
        out.append((12 * s2 * G / (p.omega_h * r ** 4) * light,
                    12 * s2 * G / (p.omega_l * r ** 4) * heavy,
                    3 * G * p.omega_l / (s2 * c ** 2 * r ** 2) * heavy))
    (g1m, g2m, g3m), (g1p, g2p, g3p) = out
    return g1m, g1p, g2m, g2p, g3m, g3p


def coupling_set(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                 ) -> CouplingSet:
    return CouplingSet(*quadratic_couplings(params, consts), *cubic_couplings(params, consts))


def coupling_ratios(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                    ) -> dict[str, float]:
    """Each coupling divided by the frequency sum of its perturbative denominator.

    Evaluated from grouped factors so no intermediate is formed at raw SI scale
    (``hbar``-sized or ``G``-sized numbers are always paired before multiplying).
    """
    require_valid(params)
    p = params
    G, c = consts.G, consts.c
    w1 = p.omega_h + p.omega_l
    w_heavy2 = 2 * p.omega_h + p.omega_l
    w_light2 = p.omega_h + 2 * p.omega_l
    sqrt_m = math.sqrt(p.m / p.omega_l)
    sqrt_M = math.sqrt(p.M / p.omega_h)
    sqrt_hbar = math.sqrt(consts.hbar)
    out = {}
    for tag, r in (("minus", p.D - p.d), ("plus", p.D + p.d)):
        g_over_r3 = G / r ** 3
        out[f"g_{tag}"] = 8 * g_over_r3 * sqrt_m * sqrt_M / w1
        out[f"g1_{tag}"] = 12 * math.sqrt(2) * (g_over_r3 / r) * (sqrt_hbar * sqrt_m) / p.omega_h / w_heavy2
        out[f"g2_{tag}"] = 12 * math.sqrt(2) * (g_over_r3 / r) * (sqrt_hbar * sqrt_M) / p.omega_l / w_light2
        out[f"g3_{tag}"] = (3 / math.sqrt(2)) * (G / r ** 2) * (p.omega_l / c ** 2) * (sqrt_hbar * sqrt_M) / w_light2
    return out


@dataclass(frozen=True)
class InteractionForm:
    """Polynomial interaction in displacements ``x_j`` and light momenta ``p_j``.

    ``terms`` maps a monomial, written as a tuple of factor labels such as
    ``("x_a", "x_A", "x_A")`` for ``dx_a dx_A^2``, to its SI coefficient.
    """

    terms: dict[tuple[str, ...], float]
    degree: int

    def __getitem__(self, label: tuple[str, ...]) -> float:
        return self.terms[label]

    def scaled(self, factor: float) -> "InteractionForm":
        return InteractionForm({k: factor * v for k, v in self.terms.items()}, self.degree)


def _nonzero_separation(params: SystemParams):
    require_valid(params)
    return params.D - params.d, params.D + params.d


def quadratic_form(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                   ) -> InteractionForm:
    """Bilinear heavy-light terms ``16 G m M dx_i dx_J / r^3`` [J m^-2]."""
    near, far = _nonzero_separation(params)
    k = 16 * consts.G * params.m * params.M
    return InteractionForm({
        ("x_a", "x_A"): k / near ** 3,
        ("x_b", "x_B"): k / near ** 3,
        ("x_a", "x_B"): k / far ** 3,
        ("x_b", "x_A"): k / far ** 3,
    }, degree=2)


def cubic_form(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
               signs: str = "derived") -> InteractionForm:
    """Three-operator heavy-light terms.

    ``signs="derived"`` gives the coefficients that follow from Taylor expanding
    :func:`~qgem_decoherence.model.potential_nonrel` (checked by the
    finite-difference oracle).  ``signs="printed"`` reproduces the closed form as
    typeset, which uses one sign pattern for all four pairs; that disagrees with
    the expansion for the ``aB``, ``Ab`` and ``bB`` position triples and for the
    ``p_b^2`` momentum triples.  Magnitudes are identical in both.
    """
    if signs not in ("derived", "printed"):
        raise ValueError("signs must be 'derived' or 'printed'")
    near, far = _nonzero_separation(params)
    G, m, M = consts.G, params.m, params.M
    pos_near = 48 * G * m * M / near ** 4
    pos_far = 48 * G * m * M / far ** 4
    mom_near = 6 * G * M / (consts.c ** 2 * m * near ** 2)
    mom_far = 6 * G * M / (consts.c ** 2 * m * far ** 2)

    if signs == "derived":
        # cubic monomials are odd under the mirror a<->b, A<->B, x->-x
        s_aB, s_Ab, s_bB = -1, 1, -1
        t_aA, t_bB, t_aB, t_bA = -1, 1, 1, -1
    else:
        s_aB, s_Ab, s_bB = 1, -1, 1
        t_aA, t_bB, t_aB, t_bA = -1, -1, 1, 1
    return InteractionForm({
        ("x_a", "x_A", "x_A"): pos_near,
        ("x_a", "x_a", "x_A"): -pos_near,
        ("x_a", "x_B", "x_B"): s_aB * pos_far,
        ("x_a", "x_a", "x_B"): -s_aB * pos_far,
        ("x_b", "x_A", "x_A"): s_Ab * pos_far,
        ("x_b", "x_b", "x_A"): -s_Ab * pos_far,
        ("x_b", "x_B", "x_B"): s_bB * pos_near,
        ("x_b", "x_b", "x_B"): -s_bB * pos_near,
        ("p_a", "p_a", "x_A"): t_aA * mom_near,
        ("p_b", "p_b", "x_B"): t_bB * mom_near,
        ("p_a", "p_a", "x_B"): t_aB * mom_far,
        ("p_b", "p_b", "x_A"): t_bA * mom_far,
    }, degree=3)


def mode_masses_frequencies(params: SystemParams) -> dict[str, tuple[float, float]]:
    return {"a": (params.m, params.omega_l), "b": (params.m, params.omega_l),
            "A": (params.M, params.omega_h), "B": (params.M, params.omega_h)}


def amplitude(label: str, params: SystemParams, hbar: float) -> float:
    """Zero-point amplitude multiplying the ladder combination for factor ``label``.

    ``x_j -> sqrt(hbar / 2 m_j w_j) (j + j^dag)`` and
    ``p_j -> sqrt(hbar m_j w_j / 2) i (j^dag - j)``.
    """
    kind, mode = label.split("_")
    mass, omega = mode_masses_frequencies(params)[mode]
    if kind == "x":
        return math.sqrt(hbar / (2 * mass * omega)) if mass > 0 else math.inf
    if kind == "p":
        return math.sqrt(hbar * mass * omega / 2)
    raise ValueError(f"unknown factor {label!r}")


def form_couplings(form: InteractionForm, params: SystemParams,
                   consts: PhysicalConstants = PhysicalConstants()) -> dict[tuple[str, ...], float]:
    """Coefficient times zero-point amplitudes over hbar, per monomial [s^-1]."""
    out = {}
    for label, strength in form.terms.items():
        if strength == 0:
            out[label] = 0.0
            continue
        value = strength / consts.hbar
        for factor in label:
            value *= amplitude(factor, params, consts.hbar)
        out[label] = value
    return out
