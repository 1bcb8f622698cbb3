"""Gravitational decoherence of two light oscillators by two heavy ones.

Couplings, first-order perturbed states, concurrences, figure sweeps and a
truncated-Fock-space oracle for validating the closed forms.
"""
__version__ = "0.1.0"

from .model import (DESK, CoincidentPositionError, ParameterError, PhaseSpacePoint,
                    PhysicalConstants, SystemParams, Units, footnote_discrepancy,
                    potential_classical_footnote, potential_nonrel, require_valid, validate)
from .couplings import (CouplingSet, InteractionForm, coupling_ratios, coupling_set,
                        cubic_couplings, cubic_form, quadratic_couplings, quadratic_form)
from .perturbation import (BasisState, DegenerateSpectrumError, PerturbationSettings,
                           PerturbedState, coefficient_light_light, coefficients_cubic,
                           coefficients_quadratic, first_order_state, general_first_order)
from .entanglement import (CoefficientMatrix, DensityMatrix, concurrence_hl2_dominant,
                           concurrence_hl2_exact, concurrence_hl2_small, concurrence_hl_approx,
                           concurrence_hl_exact, concurrence_hl_small, concurrence_ll,
                           concurrence_pure, concurrence_pure_subtraction, partial_trace,
                           wootters_concurrence)

__all__ = [name for name in dir() if not name.startswith("_")]
