# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Sweeps behind the figures
#
# Each section computes one table with the library and prints a few rows.
# Plotting is optional: uncomment the matplotlib lines if it is installed.

# %%
import numpy as np

from qgem_decoherence import experiments as ex
from qgem_decoherence.entanglement import concurrence_ll
from qgem_decoherence.model import DESK

# %% [markdown]
# ## Approximations of the heavy-light concurrence
#
# The small-coupling concurrence against three geometric approximations.

# %%
fig2 = ex.fig2_approximation_errors()
print(fig2.columns)
print("best variant shares on [1.5e-4, 1e-3] m:", ex.best_variant_table(fig2, 1.5e-4, 1e-3))
row = fig2.where(D=2 * DESK.d)
print("relative error of the equal-spacing form at D = 2d:",
      row.column("err_D2d")[0] / row.column("C_small")[0])

# %% [markdown]
# ## Bilinear versus three-operator coupling

# %%
fig3 = ex.fig3_order_comparison()
for wh in ex.FIG_OMEGA_H:
    curve = fig3.where(omega_h=wh)
    ratio = curve.column("C_order1") / curve.column("C_order2")
    print(f"omega_h={wh:.0e}: ratio spans {ratio.min():.3e} .. {ratio.max():.3e}")

# %% [markdown]
# ## Threshold separation as a function of the apparatus mass

# %%
fig4 = ex.fig4_boundary()
desk = ex.threshold_static(DESK)
print(f"static threshold at desk scale: {desk:.4e} m, numeric root {ex.threshold_numeric(DESK):.4e} m")
ratios = fig4.column("D_numeric") / fig4.column("D_static")
print(f"numeric/closed-form ratio over the grid: {ratios.min():.4f} .. {ratios.max():.4f}")

# %% [markdown]
# ## Mixed-state light-light concurrence

# %%
fig5 = ex.fig5_mixed_concurrence()
static = concurrence_ll(DESK, order="static")
for wh in (1e8, 1e9):
    c = fig5.where(omega_h=wh).column("C_mixed") / static
    print(f"omega_h={wh:.0e}: C/C_ll from {c[0]:.13f} to {c[-1]:.13f}")

# %%
# import matplotlib.pyplot as plt
# curve = fig4.where(omega_h=1e8)
# plt.loglog(curve.column("M"), curve.column("D_static"), label="closed form")
# plt.loglog(curve.column("M"), curve.column("D_numeric"), "--", label="numeric")
# plt.legend(); plt.xlabel("M [kg]"); plt.ylabel("D [m]"); plt.show()
