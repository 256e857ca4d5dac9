# %% [markdown]
# # Equilibria, Birch points and log-parametrized sets
#
# Positive equilibria are searched class by class with multistart Newton.
# Each start is placed inside the class by a Birch point.

# %%
import numpy as np

from plkcrn.dsl import load_example
from plkcrn.equilibria import birch_point, find_equilibria, rate_scale, sample_lp_set, sfrf
from plkcrn.kinetics import kinetic_order_subspace
from plkcrn.linalg import Subspace
from plkcrn.network import stoichiometric_subspace

# %% [markdown]
# ## Birch points
#
# The unique point of `p + V` whose log-difference from `x*` is orthogonal
# to `V`.

# %%
V = Subspace.span([(1, -1, 0), (0, 1, -1)], 3)
x = birch_point([1.0, 2.0, 3.0], [1.0, 1.0, 1.0], V)
print(x, x.sum())

# %% [markdown]
# ## Two equilibria in one class
#
# In the class through (4, 1, 2) the search finds two equilibria, neither
# complex balanced. That certifies multistationarity.

# %%
net, kin = load_example("jose")
atlas = find_equilibria(net, kin, [4.0, 1.0, 2.0], budget=64)
for x, r, cb in zip(atlas.equilibria, atlas.residuals, atlas.complex_balanced):
    print(np.round(x, 6), f"residual {r:.1e}", "complex balanced" if cb else "")
print(atlas.notes[0])

# %% [markdown]
# ## Moving along an LP set
#
# For the reversible pair the orthogonal complement of the kinetic-order
# subspace is spanned by (1, 1). Shifting log x* along it stays at
# equilibrium.

# %%
net, kin = load_example("log_pair")
S_t, _ = kinetic_order_subspace(net, kin)
print("S~ perp:", S_t.perp())
x_star = find_equilibria(net, kin, [1.0, 1.0], budget=16).equilibria[0]
rng = np.random.default_rng(0)
for x in sample_lp_set(x_star, S_t, 5, rng, spread=2.0):
    print(np.round(x, 4), np.linalg.norm(sfrf(net, kin, x)) / rate_scale(net, kin, x))

# %%
print("stoichiometric subspace:", stoichiometric_subspace(net))
