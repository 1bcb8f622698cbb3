"""Concurrence measures for the four-oscillator states.

The closed-form heavy-light expressions are all of the type ``sqrt(2 - 2 P/N^2)``
with ``P/N^2 = 1 - O(g^2/w^2)``; at laboratory scale ``g/w ~ 1e-28`` so the literal
subtraction returns exactly zero in double precision.  Every function here
therefore evaluates an algebraically rearranged form in which the small
quantities appear multiplied, never subtracted from 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .couplings import CouplingSet
from .model import PhysicalConstants, SystemParams, require_valid
from .perturbation import PerturbedState

# Y (x) Y with Y = [[0, -i], [i, 0]]; the product is real.
SPIN_FLIP = np.array([[0, 0, 0, -1],
                      [0, 0, 1, 0],
                      [0, 1, 0, 0],
                      [-1, 0, 0, 0]], dtype=float)

HL_VARIANTS = ("D_gg_d", "D_gg_d_2nd", "D_eq_2d", "dominant")

_TOL = 1e-12
_UNDERFLOW = 1e-150


@dataclass(frozen=True)
class CoefficientMatrix:
    """Amplitudes ``C[i, j]`` of ``sum_ij C_ij |i>_1 |j>_2``.

    ``rows`` and ``cols`` label the occupation tuples of the two subsystems.
    The matrix is stored unnormalized; ``frobenius`` equals ``sqrt(N)``.
    """

    matrix: np.ndarray
    bipartition: str
    rows: tuple = ()
    cols: tuple = ()

    @classmethod
    def from_state(cls, state: PerturbedState, bipartition: str = "hl") -> "CoefficientMatrix":
        """Reshape a sparse state.

        ``"hl"`` splits ``(a, b | A, B)``.  ``"ll"`` splits ``(a | b)`` and only
        accepts states with both heavy modes in their ground state.
        """
        if bipartition == "hl":
            split = lambda k: (k.light, k.heavy)  # noqa: E731
        elif bipartition == "ll":
            if any(k.heavy != (0, 0) for k in state.coeffs):
                raise ValueError("light-light reshaping needs heavy modes in |00>")
            split = lambda k: ((k.n_a,), (k.n_b,))  # noqa: E731
        else:
            raise ValueError("bipartition must be 'hl' or 'll'")
        pairs = [split(k) for k in state.coeffs]
        rows = tuple(sorted({r for r, _ in pairs}))
        cols = tuple(sorted({c for _, c in pairs}))
        r_idx = {r: i for i, r in enumerate(rows)}
        c_idx = {c: j for j, c in enumerate(cols)}
        mat = np.zeros((len(rows), len(cols)))
        for (r, c), v in zip(pairs, state.coeffs.values()):
            mat[r_idx[r], c_idx[c]] += v
        return cls(mat, bipartition, rows, cols)

    @classmethod
    def from_vector(cls, psi: np.ndarray, dims: Sequence[int], split: int = 2,
                    bipartition: str = "hl") -> "CoefficientMatrix":
        """Dense state over ``dims``; the first ``split`` factors form subsystem 1."""
        dims = tuple(dims)
        n1 = int(np.prod(dims[:split]))
        psi = np.asarray(psi)
        if psi.size != int(np.prod(dims)):
            raise ValueError("vector length does not match dims")
        return cls(psi.reshape(n1, -1), bipartition)

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def normalized(self) -> np.ndarray:
        mat = np.asarray(self.matrix)
        scale = np.max(np.abs(mat)) if mat.size else 0.0
        if scale == 0:
            raise ValueError("zero coefficient matrix")
        mat = mat / scale
        return mat / np.linalg.norm(mat)


def _as_matrix(matrix) -> np.ndarray:
    if isinstance(matrix, CoefficientMatrix):
        return matrix.normalized()
    return CoefficientMatrix(np.asarray(matrix), "hl").normalized()


def minor_weight(matrix) -> float:
    """``sum |minor|^2`` over all 2x2 minors of the normalized matrix."""
    m = _as_matrix(matrix)
    # wedge[i, k, j, l] = m_ij m_kl - m_il m_kj; every minor appears four times
    wedge = (np.einsum("ij,kl->ikjl", m, m) - np.einsum("il,kj->ikjl", m, m))
    return float(np.sum(np.abs(wedge) ** 2) / 4.0)


def concurrence_pure(matrix) -> float:
    """Pure-state concurrence ``sqrt(2 - 2 Tr rho_1^2)`` from 2x2 minors.

    Uses ``2 - 2 Tr rho_1^2 = 4 sum |minor|^2`` (Cauchy-Binet), which keeps full
    relative precision for coefficients many orders below unity.
    """
    return 2.0 * math.sqrt(minor_weight(matrix))


def concurrence_pure_subtraction(matrix) -> float:
    """Literal ``sqrt(2 - 2 Tr rho_1^2)``.

    Reference only: total cancellation once the concurrence drops below roughly
    ``1e-8`` in double precision.
    """
    m = _as_matrix(matrix)
    rho1 = m @ m.conj().T
    purity = float(np.real(np.trace(rho1 @ rho1)))
    return math.sqrt(max(0.0, 2.0 - 2.0 * purity))


@dataclass
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        self.dims = tuple(int(d) for d in self.dims)
        n = int(np.prod(self.dims))
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} inconsistent with dims {self.dims}")

    @classmethod
    def pure(cls, psi: np.ndarray, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()), tuple(dims))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def check(self, tol: float = _TOL) -> None:
        """Raise unless Hermitian, unit trace and PSD to ``tol`` relative to the trace."""
        rho = self.matrix
        scale = abs(self.trace)
        if scale == 0:
            raise ValueError("density matrix has zero trace")
        if np.max(np.abs(rho - rho.conj().T)) > tol * scale:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace - 1) > tol:
            raise ValueError(f"density matrix trace {self.trace} != 1")
        low = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)))
        if low < -tol * scale:
            raise ValueError(f"density matrix not positive semidefinite (eigenvalue {low:.3e})")


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every tensor factor not listed in ``keep``."""
    keep = sorted(set(keep))
    dims = rho.dims
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"factor indices {keep} out of range for dims {dims}")
    tensor = rho.matrix.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket = [letters[i] for i in range(n)]
    bra = [letters[n + i] for i in range(n)]
    for i in drop:
        bra[i] = ket[i]
    out = "".join(ket[i] for i in keep) + "".join(bra[i] for i in keep)
    reduced = np.einsum("".join(ket) + "".join(bra) + "->" + out, tensor)
    kept = tuple(dims[i] for i in keep)
    size = int(np.prod(kept)) if kept else 1
    return DensityMatrix(reduced.reshape(size, size), kept)


def _ratios_quadratic(couplings: CouplingSet, params: SystemParams) -> tuple[float, float]:
    w = params.omega_h + params.omega_l
    return couplings.g_minus / w, couplings.g_plus / w


def _ratios_cubic(couplings: CouplingSet, params: SystemParams):
    w1 = 2 * params.omega_h + params.omega_l
    w2 = params.omega_h + 2 * params.omega_l
    g = couplings
    return (g.g1_minus / w1, g.g1_plus / w1,
            (g.g3_minus - g.g2_minus) / w2, (g.g2_plus - g.g3_plus) / w2)


def concurrence_hl_exact(couplings: CouplingSet, params: SystemParams) -> float:
    """Closed-form heavy-light concurrence of the bilinear-coupling state.

    With ``x = g_-/w``, ``y = g_+/w``:
    ``C = 2 sqrt(2(x^2+y^2) + (x^2-y^2)^2) / (1 + 2(x^2+y^2))``.
    """
    x, y = _ratios_quadratic(couplings, params)
    s = x * x + y * y
    return 2.0 * math.sqrt(2 * s + (x * x - y * y) ** 2) / (1 + 2 * s)


def concurrence_hl_exact_subtraction(couplings: CouplingSet, params: SystemParams) -> float:
    """The same closed form evaluated as typeset, ``sqrt(2 - 2 P / N^2)``."""
    x, y = _ratios_quadratic(couplings, params)
    s = x * x + y * y
    num = 1 + 2 * s * s + 8 * x * x * y * y
    return math.sqrt(max(0.0, 2 - 2 * num / (1 + 2 * s) ** 2))


def concurrence_hl_small(couplings: CouplingSet, params: SystemParams) -> float:
    """Leading small-coupling limit ``2 sqrt(2) sqrt(g_-^2 + g_+^2) / w``."""
    x, y = _ratios_quadratic(couplings, params)
    return 2 * math.sqrt(2) * math.hypot(x, y)


def concurrence_hl_approx(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                          variant: str = "dominant") -> float:
    """Geometric approximations to :func:`concurrence_hl_small`, evaluated as printed.

    ``D_gg_d``      leading order in ``d/D``
    ``D_gg_d_2nd``  keeps the ``(d/D)^2`` correction
    ``D_eq_2d``     equally spaced chain; depends on ``d`` only, whatever ``D`` is
    ``dominant``    drops ``g_+``; note its prefactor is ``4 g_-/w``, a factor
                    ``sqrt(2)`` above ``2 sqrt(2) g_-/w``
    """
    require_valid(params)
    p = params
    G = consts.G
    w = p.omega_h + p.omega_l
    root = math.sqrt(p.M * p.m / (p.omega_h * p.omega_l))
    if variant == "D_gg_d":
        return 32 * G / (w * p.D ** 3) * root
    if variant == "D_gg_d_2nd":
        g = 8 * G / p.D ** 3 * root
        return 2 * math.sqrt(2) * g / w * math.sqrt(2 + 42 * p.d ** 2 / p.D ** 2)
    if variant == "D_eq_2d":
        return 32 * math.sqrt(365) * G / (27 * w * p.d ** 3) * root
    if variant == "dominant":
        return 16 * math.sqrt(2) * G / ((p.D - p.d) ** 3 * w) * math.sqrt(2) * root
    raise ValueError(f"variant must be one of {HL_VARIANTS}")


def concurrence_ll(params: SystemParams, consts: PhysicalConstants = PhysicalConstants(),
                   order: str = "with_momentum") -> float:
    """Light-light concurrence ``G m/(d^3 w_l^2) + 2 G m/(c^2 d)``; ``order="static"`` drops the second term."""
    require_valid(params)
    G, m, d = consts.G, params.m, params.d
    static = G * m / (d ** 3 * params.omega_l ** 2)
    if order == "static":
        return static
    if order != "with_momentum":
        raise ValueError("order must be 'static' or 'with_momentum'")
    return static + 2 * G * m / (consts.c ** 2 * d)


def concurrence_hl2_exact(couplings: CouplingSet, params: SystemParams) -> float:
    """Closed-form heavy-light concurrence including the three-operator couplings.

    With ``(x1, y1)`` and ``(x2, y2)`` the two coupling-over-gap pairs,
    ``s_i = x_i^2 + y_i^2`` and ``S = s_1 + s_2``::

        C = 2 sqrt(2S + (x1^2-y1^2)^2 + (x2^2-y2^2)^2 + 4 s1 s2) / (1 + 2S)
    """
    x1, y1, x2, y2 = _ratios_cubic(couplings, params)
    s1 = x1 * x1 + y1 * y1
    s2 = x2 * x2 + y2 * y2
    total = s1 + s2
    inner = 2 * total + (x1 * x1 - y1 * y1) ** 2 + (x2 * x2 - y2 * y2) ** 2 + 4 * s1 * s2
    return 2.0 * math.sqrt(inner) / (1 + 2 * total)


def concurrence_hl2_small(couplings: CouplingSet, params: SystemParams) -> float:
    """Published small-coupling form ``2 sqrt(S)``.

    The small-coupling limit of :func:`concurrence_hl2_exact` is ``2 sqrt(2 S)``,
    so this is lower by exactly ``sqrt(2)``.
    """
    x1, y1, x2, y2 = _ratios_cubic(couplings, params)
    return 2.0 * math.sqrt(x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2)


def concurrence_hl2_dominant(params: SystemParams,
                             consts: PhysicalConstants = PhysicalConstants()) -> float:
    """Three-operator concurrence keeping only the near-pair position couplings."""
    require_valid(params)
    p = params
    G, hbar = consts.G, consts.hbar
    pref = 24 * G * math.sqrt(2 * hbar) / ((p.D - p.d) ** 4 * p.omega_h * p.omega_l)
    return pref * math.sqrt(p.m * p.omega_l / (p.omega_l + 2 * p.omega_h) ** 2
                            + p.M * p.omega_h / (2 * p.omega_l + p.omega_h) ** 2)


def wootters_concurrence(rho, return_eigenvalues: bool = False, tol: float = _TOL):
    """Two-qubit mixed-state concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the singular values of ``X^T (Y x Y) X`` for any factor
    ``rho = X X^dag``; they equal the square roots of the eigenvalues of
    ``rho rho~``.  Working with singular values avoids square-rooting roundoff
    in the vanishing eigenvalues of a nearly pure state.  The factor comes from
    ``rho = T S T`` with ``T = diag(sqrt(rho_ii))``, so entries of wildly
    different size (populations near 1 beside coherences near 1e-29) keep their
    relative accuracy.

    Returns the concurrence, or ``(concurrence, eigenvalues)`` with the four
    ``l_i`` in descending order.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(np.asarray(rho), (2, 2))
    if rho.matrix.shape != (4, 4):
        raise ValueError("Wootters concurrence needs a 4x4 two-qubit density matrix")
    rho.check(tol)
    r = rho.matrix
    t = np.sqrt(np.clip(np.real(np.diag(r)), 0.0, None))
    # below this a factor's contribution to tau underflows anyway
    t[t < _UNDERFLOW] = 0.0
    safe = np.where(t == 0, 1.0, t)
    scaled = r / np.outer(safe, safe)
    scaled = 0.5 * (scaled + scaled.conj().T)
    w, v = np.linalg.eigh(scaled)
    factor = t[:, None] * (v * np.sqrt(np.clip(w, 0.0, None)))
    tau = factor.T @ SPIN_FLIP @ factor
    lam = np.linalg.svd(tau, compute_uv=False)
    value = float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
    return (value, lam) if return_eigenvalues else value
