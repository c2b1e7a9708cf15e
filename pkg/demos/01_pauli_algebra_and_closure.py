# %% [markdown]
# # Pauli algebra and Lie closure
#
# Operators are sums of Pauli words with exact rational coefficients, always
# read as `sum c_w (i w)` so every element is skew-Hermitian. The closure
# brackets generators depth by depth until nothing new appears.

# %%
from fractions import Fraction

from modctrl import ControlSystem, PauliWord, SkewOperator, commutator, lie_closure
from modctrl.oracle import dense_closure_oracle

x = SkewOperator.from_word("X")
y = SkewOperator.from_word("Y")
print(commutator(x, y).to_text())  # [iX, iY] = -2 iZ

# %% [markdown]
# A qubit with a Z drift and one X control is fully controllable: the
# algebra is su(2), dimension 3.

# %%
qubit = ControlSystem(1, SkewOperator.from_word("Z", Fraction(-1, 2)), (x,))
basis, report = lie_closure(qubit)
print(report.dimension, report.depth_profile, report.controllable)

# %% [markdown]
# Two qubits with an XX+YY coupling and a single control stay short of
# su(4). The dense-matrix oracle reaches the same number by a different route.

# %%
drift = SkewOperator(2, {PauliWord.from_string("ZI"): -1, PauliWord.from_string("IZ"): Fraction(-3, 2),
                         PauliWord.from_string("XX"): 1, PauliWord.from_string("YY"): 1})
pair = ControlSystem(2, drift, (SkewOperator.single(2, 0, "X"),))
print(lie_closure(pair)[1].dimension, dense_closure_oracle(pair))

pair_two = ControlSystem(2, drift, (SkewOperator.single(2, 0, "X"), SkewOperator.single(2, 1, "X")))
print(lie_closure(pair_two)[1].dimension)  # 15 = 4**2 - 1
