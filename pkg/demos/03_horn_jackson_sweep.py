# %% [markdown]
# # A mass-action cycle with a 3-to-1 transition
#
# Four complexes 3A, A+2B, 3B, 2A+B in a cycle, with rate `eps` on two of
# the reactions. Within the class A + B = 2 the number of equilibria drops
# from three to one as `eps` crosses 1/6.

# %%
from fractions import Fraction

import numpy as np

from plkcrn.dsl import load_example
from plkcrn.equilibria import find_equilibria
from plkcrn.network import deficiency
from plkcrn.theorems import acr_verdict

net, _ = load_example("horn_jackson")
print(deficiency(net))

# %%
for eps in (Fraction(1, 20), Fraction(1, 10), Fraction(3, 20), Fraction(1, 5), Fraction(1, 4)):
    net, kin = load_example("horn_jackson", {"eps": eps})
    atlas = find_equilibria(net, kin, [1.0, 1.0], budget=300)
    print(f"eps = {float(eps):.3f}: {atlas.count} equilibria", [np.round(x, 4).tolist() for x in atlas.equilibria])

# %% [markdown]
# ## No robust species
#
# (1, 1) is orthogonal to the kinetic-order subspace and strictly
# positive. Any such vector rules out robustness in every species.

# %%
net, kin = load_example("horn_jackson")
atlas = find_equilibria(net, kin, [1.0, 1.0], budget=300)
verdict, report = acr_verdict(net, kin, atlas)
print(verdict.conclusion.value, verdict.payload["screen_witness"], report.acr_species)
