# %% [markdown]
# # Composing certificates
#
# A controllable module plus another controllable module plus one tunable
# two-qubit link is again controllable. Certificates record this without
# ever closing the joint algebra, and can be checked later.

# %%
from modctrl import (EntanglingCoupling, assemble, certify_direct, compose, dumps_certificate, lie_closure,
                     loads_certificate, resource_count, verify)
from modctrl.catalog import CATALOG

qubit = certify_direct(CATALOG["qubit_z_x"])
pair = certify_direct(CATALOG["pair_xxyy_two_controls"])
print(qubit.verdict, pair.verdict)

# %%
joined = compose(pair, qubit, EntanglingCoupling.single(1, 2, 3, 3))
print(joined.verdict, joined.n, resource_count(joined))

# %% [markdown]
# At this size the claim can be checked directly: close the assembled
# three-qubit system.

# %%
print(lie_closure(assemble(joined))[1].dimension)  # 63

# %%
print(verify(joined, "exhaustive").as_record())
text = dumps_certificate(joined)
assert dumps_certificate(loads_certificate(text)) == text
print(text[:300], "...")
