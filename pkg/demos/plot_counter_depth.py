"""
Depth of the counter formulas
=============================

The counter formulas encode a base-``n`` counter with ``k`` digits.  They are
refutable at width ``k + 1``, but only after a number of rounds that grows
with ``n``; one extra unit of width collapses the depth.  Sizes grow
linearly in ``n`` for variables and quadratically for clauses.
"""

# %%
# Sizes for a range of ``n`` at two digits.
from narrow.gadgets import compile_counter, size_report
from narrow.harness import counter_cell
from narrow.strategies import counter_last_index

for n in range(2, 7):
    rep = size_report(compile_counter(n, 2))
    print(f"n={n}: {rep.total_variables:5d} variables {rep.total_clauses:6d} clauses")

# %%
# Index of the last counter value that Duplicator can still defend.
print([counter_last_index(n, 2) for n in range(2, 6)])

# %%
# Widths 2 and 3 for ``n = 2`` and ``n = 3``: unrefutable at width 2, and
# the width-3 depth grows with ``n``.  The width-4 runs are much slower; use
# ``narrow counter-sweep --n 2,3`` (or the acceptance suite) for those.
for n in (2, 3):
    row = counter_cell(n, 2, budget=900, plus_two=False)
    print(f"n={n}: min width {row.min_width}, rounds at width 3: {row.rounds_at_k_plus_1}")
