# %% [markdown]
# # From one coupling term to every cross-partition word
#
# Local brackets isolate a single term of a two-qubit coupling, and three
# small gadgets (cycle a letter, create one, remove one) then walk that term
# to any word acting on both partitions. Each step is an actual commutator
# with a local operator, so the whole path stays inside the Lie algebra.

# %%
from fractions import Fraction

from modctrl import PauliWord, SkewOperator, isolate_coupling_term, plan_derivation, sample_basis_audit
from modctrl.constructive import f_cyc, f_gen, f_rem

zz = SkewOperator(2, {PauliWord.from_string("ZZ"): Fraction(5)})
print(isolate_coupling_term(zz, 0, 1).to_text())  # 80 * i·XX

# %%
s = SkewOperator.from_word("XY")
print(f_cyc(s, 1).to_text(), "|", f_gen(SkewOperator.from_word("IX"), 0, 1, 1).to_text(),
      "|", f_rem(s, 0, 1).to_text())

# %% [markdown]
# A planned derivation is a list of moves that can be written out,
# read back and replayed.

# %%
seed = SkewOperator.from_word("IXXI", 16)
path = plan_derivation(seed, PauliWord.from_string("ZYXZ"), partition_a=[0, 1])
print(path.to_text())
print("replay ends on:", path.replay().to_text())

# %%
audit = sample_basis_audit(seed, [0, 1], None)
print(audit.as_record())  # all 225 words for a 2+2 split
