"""Physical constants, experiment geometry and the number-valued gravitational potential.

The four oscillators sit on a line: light probes ``a``, ``b`` at ``-d/2``, ``+d/2``
and heavy apparatus masses ``A``, ``B`` at ``-D/2``, ``+D/2``.  Everything here is
plain arithmetic on the inputs, so the potential functions also accept
``mpmath.mpf`` values (the finite-difference oracle relies on that).
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

CODATA_G = 6.67430e-11
CODATA_HBAR = 1.054571817e-34
CODATA_C = 299792458.0

ORDERS = ("c0", "c2", "c4")


class ParameterError(ValueError):
    """Raised when parameters violate a precondition of an operation."""


class CoincidentPositionError(ValueError):
    """Two bodies share a position, so a ``1/|x_i - x_j|`` term diverges."""

    def __init__(self, pair: str):
        super().__init__(f"coincident positions for pair {pair}")
        self.pair = pair


@dataclass(frozen=True)
class PhysicalConstants:
    """G [m^3 kg^-1 s^-2], hbar [J s], c [m s^-1]; CODATA SI by default."""

    G: float = CODATA_G
    hbar: float = CODATA_HBAR
    c: float = CODATA_C

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ParameterError(f"constant {f.name} must be strictly positive")

    def overrides(self) -> dict[str, float]:
        """Constants that differ from the CODATA defaults."""
        defaults = PhysicalConstants()
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if getattr(self, f.name) != getattr(defaults, f.name)
        }


@dataclass(frozen=True)
class SystemParams:
    """Masses [kg], separations [m] and trap frequencies [s^-1].

    Construction does not validate; use :func:`validate` for a report or
    :func:`require_valid` to raise.
    """

    m: float
    M: float
    d: float
    D: float
    omega_l: float
    omega_h: float

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def omega(self):
        """Sum ``omega_h + omega_l`` appearing in the quadratic-coupling denominators."""
        return self.omega_h + self.omega_l


# Desk-scale values used throughout the analysis (probe mass 1e-14 kg, 0.1 mm apart).
DESK = SystemParams(m=1e-14, M=1e-8, d=1e-4, D=1e-3, omega_l=1e8, omega_h=1e8)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "pass" if self.ok else "fail: " + "; ".join(self.violations)


def validate(params: SystemParams) -> ValidationReport:
    report = ValidationReport()
    if not params.m > 0:
        report.violations.append("requires m > 0")
    if not params.M >= 0:
        report.violations.append("requires M >= 0")
    if not params.omega_l > 0:
        report.violations.append("requires omega_l > 0")
    if not params.omega_h > 0:
        report.violations.append("requires omega_h > 0")
    if not params.d > 0:
        report.violations.append("requires d > 0")
    if not params.D > params.d:
        report.violations.append("requires D > d")
    return report


def require_valid(params: SystemParams) -> SystemParams:
    report = validate(params)
    if not report.ok:
        raise ParameterError(str(report))
    return params


@dataclass(frozen=True)
class Units:
    """Nondimensionalization: frequencies in units of ``omega_ref``, lengths in ``length_ref``."""

    omega_ref: float
    length_ref: float

    @classmethod
    def for_params(cls, params: SystemParams) -> "Units":
        return cls(omega_ref=params.omega_l, length_ref=params.d)

    def frequency(self, value):
        return value / self.omega_ref

    def length(self, value):
        return value / self.length_ref

    def energy(self, value, hbar):
        """Energy in units of ``hbar * omega_ref``."""
        return value / (hbar * self.omega_ref)

    def scale_params(self, params: SystemParams) -> dict[str, float]:
        return {
            "d": self.length(params.d),
            "D": self.length(params.D),
            "omega_l": self.frequency(params.omega_l),
            "omega_h": self.frequency(params.omega_h),
        }


@dataclass(frozen=True)
class PhaseSpacePoint:
    """Number-valued positions [m] of all four bodies and light momenta [kg m s^-1]."""

    x_a: float
    x_b: float
    x_A: float
    x_B: float
    p_a: float = 0.0
    p_b: float = 0.0

    @classmethod
    def equilibrium(cls, params: SystemParams, dx_a=0.0, dx_b=0.0, dx_A=0.0, dx_B=0.0,
                    p_a=0.0, p_b=0.0) -> "PhaseSpacePoint":
        """Point displaced by ``dx_*`` from the trap centres ``-d/2, d/2, -D/2, D/2``."""
        half_d = params.d / 2
        half_D = params.D / 2
        return cls(-half_d + dx_a, half_d + dx_b, -half_D + dx_A, half_D + dx_B, p_a, p_b)


def _distances(point: PhaseSpacePoint) -> dict[str, float]:
    r = {
        "aA": abs(point.x_a - point.x_A),
        "aB": abs(point.x_a - point.x_B),
        "Ab": abs(point.x_A - point.x_b),
        "bB": abs(point.x_b - point.x_B),
        "ab": abs(point.x_a - point.x_b),
        "AB": abs(point.x_A - point.x_B),
    }
    for pair, value in r.items():
        if value == 0:
            raise CoincidentPositionError(pair)
    return r


def potential_nonrel(point: PhaseSpacePoint, params: SystemParams,
                     consts: PhysicalConstants = PhysicalConstants(), order: str = "c4"):
    """Post-Newtonian four-body potential [J] truncated at ``order`` in ``1/c^2``.

    ``c0`` is the Newtonian sum over the six pairs, ``c2`` adds the quadratic
    momentum bracket and ``c4`` the quartic one.  Only the light bodies move, so
    only ``p_a`` and ``p_b`` appear.
    """
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    G, c = consts.G, consts.c
    m, M = params.m, params.M
    r = _distances(point)
    pa, pb = point.p_a, point.p_b

    energy = -G * (m * M / r["aA"] + m * M / r["aB"] + m * M / r["Ab"] + m * M / r["bB"]
                   + m ** 2 / r["ab"] + M ** 2 / r["AB"])
    if order == "c0":
        return energy

    heavy_light = (pa ** 2 / r["aA"] + pa ** 2 / r["aB"]
                   + pb ** 2 / r["Ab"] + pb ** 2 / r["bB"])
    energy -= G / c ** 2 * (3 * M / (2 * m) * heavy_light
                            + (3 * pa ** 2 - 8 * pa * pb + 3 * pb ** 2) / (2 * r["ab"]))
    if order == "c2":
        return energy

    heavy_light = (pa ** 4 / r["aA"] + pa ** 4 / r["aB"]
                   + pb ** 4 / r["Ab"] + pb ** 4 / r["bB"])
    energy -= G / c ** 4 * (5 * M / (8 * m ** 3) * heavy_light
                            + (5 * pa ** 4 - 18 * pa ** 2 * pb ** 2 + 5 * pb ** 4)
                            / (8 * m ** 2 * r["ab"]))
    return energy


def potential_classical_footnote(params: SystemParams, p_a=0.0, p_b=0.0,
                                 consts: PhysicalConstants = PhysicalConstants(),
                                 order: str = "c4"):
    """Point-particle potential at the trap centres, exactly as printed in closed form.

    Kept verbatim, including its static heavy-light term ``-8mM/(d^2 - D^2)``,
    which lacks the factor ``D`` that direct evaluation of
    :func:`potential_nonrel` at equilibrium produces (``8mMD/(D^2 - d^2)``).
    See :func:`footnote_discrepancy`.
    """
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    G, c = consts.G, consts.c
    m, M, d, D = params.m, params.M, params.d, params.D
    if not (d > 0 and D > 0):
        raise ParameterError("requires d > 0 and D > 0")
    if d == D:
        raise ParameterError("singular at d = D")
    pa, pb = p_a, p_b
    energy = -G * (m ** 2 / d + M ** 2 / D - 8 * m * M / (d ** 2 - D ** 2))
    if order == "c0":
        return energy
    energy -= G / c ** 2 * ((3 * pa ** 2 - 8 * pa * pb + 3 * pb ** 2) / (2 * d)
                            - 6 * D * M * (pa ** 2 + pb ** 2) / ((d ** 2 - D ** 2) * m))
    if order == "c2":
        return energy
    energy -= G / c ** 4 * ((5 * pa ** 4 - 18 * pa ** 2 * pb ** 2 + 5 * pb ** 4) / (8 * d * m ** 2)
                            - 20 * D * M * (pa ** 4 + pb ** 4) / (8 * (d ** 2 - D ** 2) * m ** 3))
    return energy


def footnote_discrepancy(params: SystemParams, consts: PhysicalConstants = PhysicalConstants()
                         ) -> dict[str, float]:
    """Static energies from both routes at rest, and their difference [J]."""
    direct = potential_nonrel(PhaseSpacePoint.equilibrium(params), params, consts, "c0")
    printed = potential_classical_footnote(params, consts=consts, order="c0")
    return {"direct": direct, "footnote": printed, "difference": printed - direct}
