"""
Checking Duplicator strategies
==============================

A Duplicator strategy is a family of partial assignments.  It must be closed
under taking subsets, never falsify a clause, and extend to every variable,
except at designated critical positions that another family takes over.  This
script checks a few families on a single Switch gadget.
"""

# %%
# The output family of a Switch presents a position on its output side.
from narrow.gadgets import build_gadget, compile_gadget
from narrow.strategies import (Factor, StrategyFamily, check_crit_inclusions, check_critical,
                               make_strategy)

cf = compile_gadget(build_gadget("switch", 2, 2, gadget_id="M"))
out = make_strategy("switch_output", cf, p=(1, 2))
print(check_critical(cf.formula, out))

# %%
# The input family has critical positions: two pebbles in one partition plus
# one in the other.  A sample is enough to see them.
inp = make_strategy("switch_input", cf, p=(1, 2))
rep = check_critical(cf.formula, inp, mode="sampled", trials=5000, seed=1)
print(rep)

# %%
# Every critical position of the input family is an ordinary member of the
# output family, so Duplicator can switch over there.
for res in check_crit_inclusions([("input", inp, [out])]):
    print(res.line(cf.names))

# %%
# Removing half of the input family's blocks breaks the extension property,
# and the checker names a witness.
factor = inp.factors[0]
broken = Factor("broken", factor.blocks[: len(factor.blocks) // 2], factor.variables,
                factor.boundary, factor.crit)
rep = check_critical(cf.formula, StrategyFamily([[broken]], 2, "broken"), mode="sampled", trials=3000,
                     seed=1)
print(rep)
