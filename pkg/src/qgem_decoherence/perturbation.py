"""First-order perturbed states of the four-oscillator system.

States are sparse: a map from occupation tuples ``(n_a, n_b, n_A, n_B)`` to real
coefficients, with ``C_0000 = 1`` for the unperturbed component and the overall
normalization left implicit (``norm`` holds the sum of squares).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .couplings import CouplingSet, InteractionForm, amplitude
from .model import PhysicalConstants, SystemParams, require_valid


class BasisState(NamedTuple):
    n_a: int
    n_b: int
    n_A: int
    n_B: int

    @property
    def light(self) -> tuple[int, int]:
        return self.n_a, self.n_b

    @property
    def heavy(self) -> tuple[int, int]:
        return self.n_A, self.n_B

    @classmethod
    def parse(cls, label: str) -> "BasisState":
        """``"1010"`` -> ``BasisState(1, 0, 1, 0)``."""
        return cls(*(int(ch) for ch in label))


GROUND = BasisState(0, 0, 0, 0)


class DegenerateSpectrumError(ValueError):
    """An excited state reachable from the ground state has zero energy gap."""


@dataclass
class PerturbedState:
    coeffs: dict[BasisState, float] = field(default_factory=lambda: {GROUND: 1.0})

    def __post_init__(self):
        self.coeffs = {BasisState(*k): v for k, v in self.coeffs.items()}
        self.coeffs.setdefault(GROUND, 1.0)
        if self.coeffs[GROUND] != 1.0:
            raise ValueError("the unperturbed amplitude C_0000 must be 1")

    def __getitem__(self, key) -> float:
        if isinstance(key, str):
            key = BasisState.parse(key)
        return self.coeffs.get(BasisState(*key), 0.0)

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def norm(self) -> float:
        """``N = sum |C|^2`` including the ground component."""
        return math.fsum(abs(c) ** 2 for c in self.coeffs.values())

    @property
    def max_occupation(self) -> int:
        return max(max(k) for k in self.coeffs)

    def excited(self) -> dict[BasisState, float]:
        return {k: v for k, v in self.coeffs.items() if k != GROUND}

    def merged(self, other: "PerturbedState") -> "PerturbedState":
        out = dict(self.coeffs)
        for k, v in other.excited().items():
            out[k] = out.get(k, 0.0) + v
        return PerturbedState(out)

    def to_vector(self, n_max: int | None = None) -> np.ndarray:
        """Normalized dense amplitudes over ``(n_max+1)^4`` in ``a, b, A, B`` order."""
        n_max = self.max_occupation if n_max is None else n_max
        if self.max_occupation > n_max:
            raise ValueError(f"state needs n_max >= {self.max_occupation}")
        dim = n_max + 1
        psi = np.zeros((dim,) * 4, dtype=complex)
        for k, v in self.coeffs.items():
            psi[k] = v
        return psi.reshape(-1) / math.sqrt(self.norm)


@dataclass(frozen=True)
class PerturbationSettings:
    lam: float = 1.0
    include_light_light: bool = False
    include_cubic: bool = False
    light_light_order: str = "with_momentum"
    cubic_convention: str = "printed"

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise ValueError("bookkeeping scale lam must lie in (0, 1]")


def coefficients_quadratic(couplings: CouplingSet, params: SystemParams,
                           lam: float = 1.0) -> PerturbedState:
    """Four nonzero amplitudes from the bilinear heavy-light coupling."""
    w = params.omega_h + params.omega_l
    near = -lam * couplings.g_minus / w
    far = -lam * couplings.g_plus / w
    return PerturbedState({
        GROUND: 1.0,
        BasisState(1, 0, 1, 0): near,
        BasisState(0, 1, 0, 1): near,
        BasisState(0, 1, 1, 0): far,
        BasisState(1, 0, 0, 1): far,
    })


def coefficients_cubic(couplings: CouplingSet, params: SystemParams, lam: float = 1.0,
                       convention: str = "printed") -> PerturbedState:
    """Amplitudes with one quantum in a light (heavy) mode and two in a heavy (light) one.

    ``convention="printed"`` returns the closed-form coefficients as published.
    ``convention="fock"`` returns what first-order theory gives for the
    Taylor-expanded Hamiltonian with exact ladder matrix elements: every amplitude
    picks up ``sqrt(2)`` from ``<2|(j^dag)^2|0>``, and those with the ``a`` mode
    excited flip sign (the cubic terms are odd under the mirror ``a<->b, A<->B``).  Both conventions give the same concurrence up to the overall
    ``sqrt(2)`` scaling of all couplings.
    """
    if convention not in ("printed", "fock"):
        raise ValueError("convention must be 'printed' or 'fock'")
    g = couplings
    w_heavy2 = 2 * params.omega_h + params.omega_l
    w_light2 = params.omega_h + 2 * params.omega_l
    c1m = lam * g.g1_minus / w_heavy2
    c1p = -lam * g.g1_plus / w_heavy2
    c2m = lam * (g.g3_minus - g.g2_minus) / w_light2
    c2p = lam * (g.g2_plus - g.g3_plus) / w_light2
    printed = {
        BasisState(0, 1, 0, 2): c1m, BasisState(1, 0, 2, 0): c1m,
        BasisState(0, 1, 2, 0): c1p, BasisState(1, 0, 0, 2): c1p,
        BasisState(0, 2, 0, 1): c2m, BasisState(2, 0, 1, 0): c2m,
        BasisState(0, 2, 1, 0): c2p, BasisState(2, 0, 0, 1): c2p,
    }
    if convention == "fock":
        printed = {k: (-1 if k.n_a else 1) * math.sqrt(2) * v for k, v in printed.items()}
    return PerturbedState({GROUND: 1.0, **printed})


def light_light_form(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                     ) -> InteractionForm:
    """Bilinear light-light terms of the expanded potential.

    Newtonian ``+2 G m^2 dx_a dx_b / d^3`` and post-Newtonian ``+4 G p_a p_b / (c^2 d)``.
    """
    require_valid(params)
    G, d = consts.G, params.d
    return InteractionForm({
        ("x_a", "x_b"): 2 * G * params.m ** 2 / d ** 3,
        ("p_a", "p_b"): 4 * G / (consts.c ** 2 * d),
    }, degree=2)


def _single_quantum_element(label: str, params: SystemParams, hbar: float) -> complex:
    # <1|x|0> = amp, <1|p|0> = i amp with p = i amp (j^dag - j)
    return amplitude(label, params, hbar) * (1j if label.startswith("p_") else 1.0)


def coefficient_light_light(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                            order: str = "with_momentum", lam: float = 1.0) -> float:
    """``C_1100`` from first-order theory applied to :func:`light_light_form`.

    Static part ``-G m / (2 d^3 w_l^2)``.  The momentum part evaluates to
    ``+G m / (c^2 d)``, i.e. opposite in sign to the static one, so
    ``2|C_1100| = G m/(d^3 w_l^2) - 2 G m/(c^2 d)``; the closed-form light-light
    concurrence adds the two instead (see :func:`~qgem_decoherence.entanglement.concurrence_ll`).
    """
    if order not in ("static", "with_momentum"):
        raise ValueError("order must be 'static' or 'with_momentum'")
    form = light_light_form(params, consts)
    element = 0j
    for label, strength in form.terms.items():
        if order == "static" and label[0].startswith("p_"):
            continue
        term = strength / consts.hbar
        for factor in label:
            term *= _single_quantum_element(factor, params, consts.hbar)
        element += term
    return float(-lam * element.real / (2 * params.omega_l))


def general_first_order(matrix_elements: Mapping[Sequence[int], complex],
                        mode_energies: Sequence[float], lam: float = 1.0,
                        omit_self: bool = False, atol: float = 0.0) -> PerturbedState:
    """Amplitudes ``C_n = lam <n|H|0> / sum_i (E_0i - E_ni)`` from explicit matrix elements.

    Args:
        matrix_elements: ``<n|H|0>`` keyed by occupation tuple.  Entries with
            ``|value| <= atol`` and the ground-state entry are ignored.
        mode_energies: single-quantum energy of each mode, in the same units as
            the matrix elements (``E_ni = n_i * mode_energies[i]``).
        omit_self: drop states with no excitation in one of the two subsystems,
            i.e. ``|00 n_A n_B>`` and ``|n_a n_b 00>``.

    Raises:
        DegenerateSpectrumError: a reachable excited state has zero gap.
    """
    coeffs: dict[BasisState, float] = {GROUND: 1.0}
    for key, element in matrix_elements.items():
        key = BasisState(*key)
        if key == GROUND or abs(element) <= atol:
            continue
        if omit_self and (key.light == (0, 0) or key.heavy == (0, 0)):
            continue
        gap = -math.fsum(n * e for n, e in zip(key, mode_energies))
        if gap == 0:
            raise DegenerateSpectrumError(f"zero energy gap for state {tuple(key)}")
        value = lam * element / gap
        if isinstance(value, complex):
            if abs(value.imag) > 1e-12 * abs(value):
                raise ValueError(f"complex amplitude for state {tuple(key)}: {value}")
            value = value.real
        coeffs[key] = float(value)
    return PerturbedState(coeffs)


def first_order_state(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                      settings: PerturbationSettings = PerturbationSettings(),
                      couplings: CouplingSet | None = None) -> PerturbedState:
    """Assemble the heavy-light state, optionally with cubic and ``|1100>`` terms."""
    from .couplings import coupling_set

    g = coupling_set(params, consts) if couplings is None else couplings
    state = coefficients_quadratic(g, params, settings.lam)
    if settings.include_cubic:
        state = state.merged(coefficients_cubic(g, params, settings.lam, settings.cubic_convention))
    if settings.include_light_light:
        c = coefficient_light_light(params, consts, settings.light_light_order, settings.lam)
        state = state.merged(PerturbedState({BasisState(1, 1, 0, 0): c}))
    return state
