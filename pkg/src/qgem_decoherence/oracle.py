"""Independent checks of the closed forms on a truncated Fock space.

All operators are dimensionless: energies in units of ``hbar * omega_ref`` and
each quadrature written through the unit ladder combinations
``X = j + j^dag`` and ``P = i (j^dag - j)``.  SI couplings enter only as the
ratio ``coupling / omega_ref``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np

from .couplings import (MODES, CouplingSet, InteractionForm, cubic_form, form_couplings,
                        quadratic_form)
from .entanglement import CoefficientMatrix, concurrence_hl_exact, concurrence_pure
from .model import PhaseSpacePoint, PhysicalConstants, SystemParams, Units, potential_nonrel, require_valid
from .perturbation import (BasisState, PerturbedState, coefficients_cubic, coefficients_quadratic,
                           general_first_order, light_light_form)


class DimensionCapError(ValueError):
    """Requested truncation exceeds the configured Hilbert-space cap."""


class StepUnderflowError(ArithmeticError):
    """Finite-difference step too small for the working precision."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncationSpec:
    n_max: int = 3
    cap: int = 1296
    modes: tuple[str, ...] = MODES

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2 to hold two-quantum states")
        if self.dim > self.cap:
            raise DimensionCapError(f"dimension {self.dim} exceeds cap {self.cap}")

    @property
    def local_dim(self) -> int:
        return self.n_max + 1

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.local_dim,) * len(self.modes)

    @property
    def dim(self) -> int:
        return self.local_dim ** len(self.modes)

    def occupation(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.dims))

    def index(self, occupation: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(occupation), self.dims))

    def untruncated_mask(self) -> np.ndarray:
        """Basis states with every occupation below ``n_max``."""
        occ = np.array(np.unravel_index(np.arange(self.dim), self.dims))
        return np.all(occ < self.n_max, axis=0)


@dataclass(frozen=True)
class FockOperator:
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        if self.hermitian:
            m = self.matrix
            scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
            if np.max(np.abs(m - m.conj().T)) > 1e-12 * scale:
                raise ValueError("operator flagged Hermitian is not")

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix @ other.matrix)

    def element(self, spec: TruncationSpec, bra: Sequence[int], ket: Sequence[int]) -> complex:
        return complex(self.matrix[spec.index(bra), spec.index(ket)])


@dataclass(frozen=True)
class ModeOperators:
    annihilate: FockOperator
    create: FockOperator
    x: FockOperator
    p: FockOperator
    number: FockOperator


def _embed(local: np.ndarray, slot: int, spec: TruncationSpec) -> np.ndarray:
    eye = np.eye(spec.local_dim)
    factors = [local if i == slot else eye for i in range(len(spec.modes))]
    return reduce(np.kron, factors)


def ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def build_mode_operators(spec: TruncationSpec = TruncationSpec(),
                         masses: Mapping[str, float] | None = None,
                         omegas: Mapping[str, float] | None = None,
                         hbar: float = 1.0) -> dict[str, ModeOperators]:
    """Ladder, displacement and momentum operators of each mode on the tensor space.

    ``x = sqrt(hbar/2 m w) (j + j^dag)`` and ``p = i sqrt(hbar m w/2) (j^dag - j)``,
    which gives ``[x, p] = i hbar`` on the untruncated block.  Unit masses and
    frequencies by default.
    """
    a = ladder(spec.n_max)
    ops = {}
    for slot, mode in enumerate(spec.modes):
        mass = 1.0 if masses is None else masses[mode]
        omega = 1.0 if omegas is None else omegas[mode]
        low = _embed(a, slot, spec)
        up = low.T.copy()
        x_amp = math.sqrt(hbar / (2 * mass * omega))
        p_amp = math.sqrt(hbar * mass * omega / 2)
        ops[mode] = ModeOperators(
            annihilate=FockOperator(low),
            create=FockOperator(up),
            x=FockOperator(x_amp * (low + up), hermitian=True),
            p=FockOperator(1j * p_amp * (up - low), hermitian=True),
            number=FockOperator(up @ low, hermitian=True),
        )
    return ops


def _unit_quadrature(label: str, unit_ops: Mapping[str, ModeOperators]) -> np.ndarray:
    kind, mode = label.split("_")
    ops = unit_ops[mode]
    low, up = ops.annihilate.matrix, ops.create.matrix
    if kind == "x":
        return low + up
    if kind == "p":
        return 1j * (up - low)
    raise ValueError(f"unknown factor {label!r}")


def free_hamiltonian(spec: TruncationSpec, mode_energies: Sequence[float]) -> FockOperator:
    ops = build_mode_operators(spec)
    h = sum(e * ops[m].number.matrix for m, e in zip(spec.modes, mode_energies))
    return FockOperator(np.asarray(h, dtype=complex), hermitian=True)


def coupling_operator(coefficients: Mapping[tuple[str, ...], float],
                      spec: TruncationSpec) -> FockOperator:
    """``sum_k c_k prod_f Q_f`` with ``Q`` the unit quadratures of each factor."""
    ops = build_mode_operators(spec)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for label, coeff in coefficients.items():
        if coeff == 0:
            continue
        term = reduce(np.matmul, (_unit_quadrature(f, ops) for f in label))
        h += coeff * term
    return FockOperator(h, hermitian=True)


def mode_energies_for(params: SystemParams, units: Units) -> tuple[float, ...]:
    wl = units.frequency(params.omega_l)
    wh = units.frequency(params.omega_h)
    return wl, wl, wh, wh


def build_hamiltonian(forms: Iterable[InteractionForm], spec: TruncationSpec,
                      params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                      units: Units | None = None, include_free: bool = True) -> FockOperator:
    """Dimensionless ``H / (hbar w_ref)``: number operators plus the given interaction forms."""
    units = Units.for_params(params) if units is None else units
    coeffs: dict[tuple[str, ...], float] = {}
    for form in forms:
        for label, value in form_couplings(form, params, consts).items():
            coeffs[label] = coeffs.get(label, 0.0) + units.frequency(value)
    h = coupling_operator(coeffs, spec).matrix
    if include_free:
        h = h + free_hamiltonian(spec, mode_energies_for(params, units)).matrix
    return FockOperator(h, hermitian=True)


def toy_hamiltonian(g_minus: float, g_plus: float = 0.0, spec: TruncationSpec = TruncationSpec(),
                    omega_l: float = 1.0, omega_h: float = 1.0) -> FockOperator:
    """Bilinear four-mode model in natural units with couplings injected directly."""
    coeffs = {("x_a", "x_A"): g_minus, ("x_b", "x_B"): g_minus,
              ("x_a", "x_B"): g_plus, ("x_b", "x_A"): g_plus}
    h = coupling_operator(coeffs, spec).matrix
    h = h + free_hamiltonian(spec, (omega_l, omega_l, omega_h, omega_h)).matrix
    return FockOperator(h, hermitian=True)


def numeric_pt(h: FockOperator, spec: TruncationSpec, mode_energies: Sequence[float],
               omit_self: bool = True, lam: float = 1.0) -> PerturbedState:
    """First-order amplitudes from the ground-state column of ``h``.

    Diagonal (free) parts of ``h`` do not contribute; only ``<n|h|0>`` with
    ``n != 0`` is read.
    """
    column = h.matrix[:, 0]
    elements = {spec.occupation(i): column[i] for i in np.flatnonzero(column) if i != 0}
    return general_first_order(elements, mode_energies, lam=lam, omit_self=omit_self)


def exact_ground_state(h: FockOperator) -> tuple[np.ndarray, float]:
    """Lowest eigenpair of a Hermitian operator, with the ``|0000>`` amplitude made positive."""
    try:
        energies, vectors = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceError(str(exc)) from exc
    psi = vectors[:, 0]
    phase = psi[0] / abs(psi[0]) if abs(psi[0]) > 0 else 1.0
    return psi / phase, float(energies[0])


def ground_concurrence(h: FockOperator, spec: TruncationSpec) -> float:
    psi, _ = exact_ground_state(h)
    return concurrence_pure(CoefficientMatrix.from_vector(psi, spec.dims))


@dataclass
class ValidityStudy:
    ratios: np.ndarray
    exact: np.ndarray
    first_order: np.ndarray
    rel_error: np.ndarray
    slope: float


TOY_RATIOS = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)


def pt_validity_study(ratios: Sequence[float] = TOY_RATIOS, plus_fraction: float = 0.5,
                      spec: TruncationSpec = TruncationSpec()) -> ValidityStudy:
    """Exact ground-state concurrence vs the first-order closed form across coupling strength.

    ``ratios`` are ``g_-/w`` with ``w = w_l + w_h = 2``; ``g_+ = plus_fraction * g_-``.
    """
    ratios = np.asarray(ratios, dtype=float)
    exact, first = [], []
    for r in ratios:
        g = 2.0 * r
        exact.append(ground_concurrence(toy_hamiltonian(g, plus_fraction * g, spec), spec))
        cs = CouplingSet(g_minus=g, g_plus=plus_fraction * g)
        first.append(concurrence_hl_exact(cs, SystemParams(1, 1, 1, 2, 1.0, 1.0)))
    exact, first = np.array(exact), np.array(first)
    err = np.abs(exact - first) / first
    slope = float(np.polyfit(np.log(ratios), np.log(err), 1)[0])
    return ValidityStudy(ratios, exact, first, err, slope)


def truncation_change(ratio: float, plus_fraction: float = 0.5, n_low: int = 3,
                      n_high: int = 4) -> float:
    """Relative change of the exact ground-state concurrence between two truncations."""
    vals = []
    for n in (n_low, n_high):
        spec = TruncationSpec(n_max=n)
        g = 2.0 * ratio
        vals.append(ground_concurrence(toy_hamiltonian(g, plus_fraction * g, spec), spec))
    return abs(vals[1] - vals[0]) / abs(vals[0])


# ---------------------------------------------------------------------------
# finite differences on the number-valued potential

@dataclass(frozen=True)
class CheckRow:
    suite: str
    name: str
    measured: float
    expected: float
    error: float
    tol: float
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.informational or (math.isfinite(self.error) and self.error <= self.tol)


@dataclass
class OracleReport:
    rows: list[CheckRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.passed]

    def extend(self, other: "OracleReport") -> "OracleReport":
        self.rows.extend(other.rows)
        return self


_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
}


def _partial(fun, variables: dict[str, int], steps: dict[str, mpmath.mpf]):
    """Tensor-product central difference of ``fun`` at the origin."""
    names = list(variables)
    stencils = [_STENCILS[variables[n]] for n in names]
    total = mpmath.mpf(0)

    def walk(i, shift, weight):
        nonlocal total
        if i == len(names):
            total += weight * fun(shift)
            return
        for k, w in stencils[i]:
            walk(i + 1, {**shift, names[i]: k * steps[names[i]]}, weight * w)

    walk(0, {}, mpmath.mpf(1))
    scale = mpmath.mpf(1)
    for n in names:
        scale *= steps[n] ** variables[n]
    return total / scale


def finite_difference_couplings(params: SystemParams,
                                consts: PhysicalConstants = PhysicalConstants(),
                                step_rel: float = 1e-4, dps: int = 50,
                                perturb: float = 1.0, signs: str = "derived",
                                tol: float = 1e-6) -> OracleReport:
    """Compare Taylor-coefficient strengths with Richardson-extrapolated partials of the potential.

    Covers the four bilinear heavy-light monomials, all cubic monomials (position
    and momentum) and the two light-light bilinears.  ``perturb`` multiplies the
    expected strengths, which lets callers confirm the check detects a mismatch.
    """
    require_valid(params)
    if not step_rel > 0 or step_rel < mpmath.mpf(10) ** (-dps // 3):
        raise StepUnderflowError(f"relative step {step_rel} too small at {dps} digits")
    expected: dict[tuple[str, ...], float] = {}
    for form in (quadratic_form(params, consts), cubic_form(params, consts, signs),
                 light_light_form(params, consts)):
        expected.update(form.terms)

    report = OracleReport()
    with mpmath.workdps(dps):
        base = {k: mpmath.mpf(v) for k, v in
                {"x_a": -params.d / 2, "x_b": params.d / 2,
                 "x_A": -params.D / 2, "x_B": params.D / 2}.items()}
        h_x = mpmath.mpf(step_rel) * (mpmath.mpf(params.D) - mpmath.mpf(params.d))
        h_p = h_x * mpmath.mpf(params.m) * mpmath.mpf(params.omega_l)
        if h_x == 0 or h_p == 0:
            raise StepUnderflowError("finite-difference step underflowed to zero")

        def potential(shift):
            pos = {k: base[k] + shift.get(k, 0) for k in base}
            point = PhaseSpacePoint(pos["x_a"], pos["x_b"], pos["x_A"], pos["x_B"],
                                    shift.get("p_a", mpmath.mpf(0)), shift.get("p_b", mpmath.mpf(0)))
            return potential_nonrel(point, params, consts, "c4")

        for label, strength in expected.items():
            counts: dict[str, int] = {}
            for f in label:
                counts[f] = counts.get(f, 0) + 1
            steps = {n: (h_p if n.startswith("p_") else h_x) for n in counts}
            coarse = _partial(potential, counts, steps)
            fine = _partial(potential, counts, {n: s / 2 for n, s in steps.items()})
            deriv = (4 * fine - coarse) / 3
            for k in counts.values():
                deriv /= math.factorial(k)
            want = perturb * strength
            measured = float(deriv)
            err = abs(measured - want) / abs(want) if want != 0 else abs(measured)
            report.rows.append(CheckRow("fd", "*".join(label), measured, want, err, tol))
    return report


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def pt_oracle_report(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                     spec: TruncationSpec = TruncationSpec(), tol: float = 1e-12) -> OracleReport:
    """Numeric first-order amplitudes from the Fock-built Hamiltonian vs the closed forms.

    Quadratic amplitudes are compared with :func:`coefficients_quadratic` and the
    cubic ones with ``coefficients_cubic(convention="fock")``.  The ratio to the
    printed-convention cubic amplitudes is listed as informational rows.
    """
    from .couplings import coupling_set

    units = Units.for_params(params)
    h = build_hamiltonian([quadratic_form(params, consts), cubic_form(params, consts)],
                          spec, params, consts, units)
    numeric = numeric_pt(h, spec, mode_energies_for(params, units))
    g = coupling_set(params, consts)
    report = OracleReport()
    quad = coefficients_quadratic(g, params)
    for key, want in quad.excited().items():
        label = "C_" + "".join(map(str, key))
        report.rows.append(CheckRow("pt", label, numeric[key], want, _relative(numeric[key], want), tol))
    fock = coefficients_cubic(g, params, convention="fock")
    printed = coefficients_cubic(g, params, convention="printed")
    for key, want in fock.excited().items():
        label = "C_" + "".join(map(str, key))
        report.rows.append(CheckRow("pt", label, numeric[key], want, _relative(numeric[key], want), tol))
        report.rows.append(CheckRow("pt", label + "/printed", numeric[key] / printed[key], 1.0,
                                    _relative(numeric[key], printed[key]), tol, informational=True))
    extra = set(numeric.excited()) - set(quad.excited()) - set(fock.excited())
    report.rows.append(CheckRow("pt", "unexpected_states", float(len(extra)), 0.0,
                                float(len(extra)), 0.0))
    return report


def diag_oracle_report(ratios: Sequence[float] = TOY_RATIOS) -> OracleReport:
    study = pt_validity_study(ratios)
    report = OracleReport()
    report.rows.append(CheckRow("diag", "error_slope", study.slope, 2.0, abs(study.slope - 2.0), 0.2))
    change = truncation_change(max(ratios))
    report.rows.append(CheckRow("diag", "truncation_3_to_4", change, 0.0, change, 1e-3))
    return report
