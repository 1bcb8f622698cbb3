# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Checking the closed forms
#
# Three independent routes to the same numbers: finite differences of the
# number-valued potential, first-order amplitudes read off a truncated Fock
# Hamiltonian, and exact diagonalization of a strongly coupled toy model.

# %%
from qgem_decoherence.couplings import coupling_set
from qgem_decoherence.entanglement import CoefficientMatrix, concurrence_pure, concurrence_pure_subtraction
from qgem_decoherence.model import DESK
from qgem_decoherence.oracle import (diag_oracle_report, finite_difference_couplings,
                                     pt_oracle_report, pt_validity_study)
from qgem_decoherence.perturbation import coefficients_quadratic

# %% [markdown]
# ## Finite differences
#
# Richardson-extrapolated partial derivatives at 50 digits.

# %%
fd = finite_difference_couplings(DESK)
print("all within 1e-6:", fd.passed, "worst", max(r.error for r in fd.rows))
print("printed cubic signs:", [r.name for r in finite_difference_couplings(DESK, signs="printed").failures()])

# %% [markdown]
# ## Fock-space amplitudes

# %%
pt = pt_oracle_report(DESK)
for r in pt.rows:
    flag = "info" if r.informational else ("ok" if r.passed else "FAIL")
    print(f"{r.name:16s} {r.measured: .6e}  {flag}")

# %% [markdown]
# ## Why the Gram-minor form matters
#
# The textbook purity subtraction returns exactly zero at laboratory scale.

# %%
m = CoefficientMatrix.from_state(coefficients_quadratic(coupling_set(DESK), DESK))
print("subtraction:", concurrence_pure_subtraction(m), " minors:", concurrence_pure(m))

# %% [markdown]
# ## Exact diagonalization

# %%
study = pt_validity_study()
for r, e in zip(study.ratios, study.rel_error):
    print(f"g/w={r:.0e}  relative error {e:.3e}")
print("slope", study.slope)
print(diag_oracle_report().passed)
