# %% [markdown]
# # Structure and kinetics of a power-law network
#
# A three-species network with five reactions and negative kinetic orders.
# We load it from the bundled `.crn` file and read off its graph
# invariants, deficiency and kinetics classes.

# %%
from plkcrn.dsl import example_text, load_example
from plkcrn.kinetics import check_digraph_isomorphism, classify, kinetic_order_subspace, t_hat
from plkcrn.network import deficiency, has_ILC, linkage_classes

print(example_text("jose"))
net, kin = load_example("jose")

# %% [markdown]
# ## Graph and stoichiometry
#
# One linkage class, strongly connected, every complex a reactant.

# %%
d = linkage_classes(net)
print("n, l, sl, t, n_r =", net.n, d.l, d.sl, d.t, d.n_r)
print("deficiency:", deficiency(net))
print("ILC:", has_ILC(net).conclusion.value)

# %% [markdown]
# ## Kinetic orders
#
# The kinetic-order subspace is spanned by differences of kinetic
# complexes. Here it is all of R^3, so the kinetic deficiency is zero even
# though the ordinary deficiency is two.

# %%
S_t, delta_t = kinetic_order_subspace(net, kin)
print("dim S~ =", S_t.dim, " kinetic deficiency =", delta_t)
for row in t_hat(net, kin):
    print(" ".join(f"{str(v):>3}" for v in row))

# %%
cls = classify(net, kin)
print(cls.flags())
print("why not RLK:", cls.witnesses.get("rlk"))

# %% [markdown]
# Distinct reactant complexes carry distinct kinetic rows, so replacing
# each complex by its row gives an isomorphic graph.

# %%
print(check_digraph_isomorphism(net, kin).payload)
