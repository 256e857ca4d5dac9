# %% [markdown]
# # Robust concentrations and gluing equilibria
#
# Two small systems. The first has an inflow/outflow structure that pins
# X1 at every positive equilibrium. The second has two linkage classes
# whose equilibria can be stitched into a global one.

# %%
import numpy as np

from plkcrn.dsl import load_example
from plkcrn.equilibria import find_equilibria
from plkcrn.kinetics import kinetic_order_subspace
from plkcrn.theorems import acr_general, acr_poly_plp, t_hat_existence_verdict

net, kin = load_example("acr_plp")
S_t, _ = kinetic_order_subspace(net, kin)
print("S~ perp:", S_t.perp())

# %% [markdown]
# Equilibria from several stoichiometric classes.

# %%
pts = []
for anchor in ([1, 1, 1], [2, 3, 1], [0.5, 0.2, 4]):
    pts += find_equilibria(net, kin, anchor, budget=32).equilibria
for x in pts:
    print(np.round(x, 6))

# %%
print("hyperplane test:", acr_poly_plp(S_t, pts, net.species).acr_species)
print("difference span:", acr_general(pts, "log", net.species).acr_species)

# %% [markdown]
# ## Per-class equilibria to a global equilibrium

# %%
net, kin = load_example("composite")
v = t_hat_existence_verdict(net, kin, anchor=[1.0, 2.0, 3.0, 4.0], budget=16)
print(v.conclusion.value)
print("x =", np.round(v.payload["equilibrium"], 6))
print("relative residual:", v.payload["f_residual"], "per class:", v.payload["per_linkage"])
