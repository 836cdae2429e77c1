"""
From a pebble game to a formula
===============================

A KAI instance is a two-player game where Player 1 moves pebbles by rules and
tries to cover a goal element.  Compiling the instance into gadgets gives a
3-CNF whose width-3 refutability matches the winner.  This script solves two
small instances and checks the compiled formulas.
"""

# %%
# One rule lets Player 1 move pebble 1 from element 1 to the goal 3 while
# pebble 2 sits on 2.  Without rules Player 1 is stuck and loses.
import time

from narrow.gadgets import compile_gamma, size_report
from narrow.kai import KaiInstance, KaiRule, format_kai, solve_kai
from narrow.resolution import extract_proof, saturate, verify_proof

win = KaiInstance(3, 2, (KaiRule(1, 2, 3, 1, 2),), (1, 2), 3)
stuck = KaiInstance(3, 2, (), (1, 2), 3)
print(format_kai(win))
for G in (win, stuck):
    sol = solve_kai(G)
    print("player 1 wins" if sol.player1_wins else "player 2 wins", sol.strategy)

# %%
# The compiled formula names every variable after its gadget and block.
cf = compile_gamma(stuck, prime=True)
rep = size_report(cf)
print(rep.total_variables, "variables,", rep.total_clauses, "clauses")
for gadget, nvars, nclauses in rep.rows():
    print(f"  {gadget:8s} {nvars:5d} {nclauses:6d}")
print(cf.sidecar().decode().splitlines()[:5])

# %%
# Player 2 wins, so saturation at width 3 reaches a fixpoint without the
# empty clause.
res = saturate(cf.formula, 3)
print("refuted:", res.refuted, "fixpoint after", res.fixpoint_rounds, "rounds")

# %%
# Player 1 wins the first instance, so its formula has a width-3
# refutation.  This takes a minute or two.
t0 = time.monotonic()
cf = compile_gamma(win, prime=True)
res = saturate(cf.formula, 3)
print("refuted:", res.refuted, "rounds:", res.rounds_to_empty,
      f"({time.monotonic() - t0:.0f}s)")
check = verify_proof(cf.formula, extract_proof(res))
print("proof valid:", check.valid, "width:", check.width, "depth:", check.depth)
