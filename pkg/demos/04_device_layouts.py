# %% [markdown]
# # Device layouts, up to 127 qubits
#
# Layout files list modules (from the T5, L5 and L4 templates or custom) and
# the links between them. Certifying a layout closes each distinct module
# once and composes along the links. The joint space is never touched, so
# the 127-qubit device costs three five-qubit-sized closures.
# Note that the bundled 127-qubit file matches the resource counts of the
# target device but not its physical placement.

# %%
import time

from modctrl import bundled_layout, certify_layout, emit_layout, resource_count

double = bundled_layout("double_t10")
print(emit_layout(double))

# %%
eagle = bundled_layout("eagle127")
print(resource_count(eagle))

t0 = time.perf_counter()
run = certify_layout(eagle, seed=0)
print(run.verdict, "leaf closures:", run.leaf_closures)
print(f"leaf work {run.leaf_seconds:.1f}s, composition {run.compose_seconds * 1000:.1f}ms")
print(f"total {time.perf_counter() - t0:.1f}s")

# %% [markdown]
# The same checks from a shell:
#
#     modctrl check src/modctrl/data/eagle127.layout --mode compose
#     modctrl check src/modctrl/data/eagle127.layout --mode direct   # refused, exit 2
#     modctrl audit src/modctrl/data/double_t10.layout --samples 100
