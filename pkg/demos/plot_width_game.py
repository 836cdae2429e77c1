"""
Width-bounded resolution and the pebble game
============================================

Saturating a formula at width ``k`` and playing the width game with ``k + 1``
pebbles give the same verdict and the same round count.  This script shows
both views on a tiny contradiction, extracts a refutation, and replays the
optimal Spoiler strategy against two Duplicators.
"""

# %%
# A formula with every sign pattern over two variables is unsatisfiable, but
# every clause has width two.
import random

from narrow.cnf import CnfFormula
from narrow.game import (adversarial_duplicator, random_duplicator, replay, solve_width_game,
                         spoiler_strategy)
from narrow.resolution import extract_proof, min_width, saturate, verify_proof, write_trace

formula = CnfFormula.from_lists([[1, 2], [1, -2], [-1, 2], [-1, -2]])
print("smallest refuting width:", min_width(formula))

# %%
# Saturation records the round in which each clause first appears.
for width in (1, 2):
    res = saturate(formula, width)
    print(f"width {width}: refuted={res.refuted} rounds={res.rounds_to_empty}")

# %%
# The game solver sees the same thing from the other side.
for width in (1, 2):
    verdict = solve_width_game(formula, width, method="explicit")
    print(f"width {width}: spoiler wins={verdict.spoiler_wins} rounds={verdict.rounds}")

# %%
# The refutation is a small DAG whose depth equals the round count.
proof = extract_proof(saturate(formula, 2))
print(write_trace(proof))
rep = verify_proof(formula, proof)
print(f"valid={rep.valid} width={rep.width} depth={rep.depth} regular={rep.regular}")

# %%
# Spoiler's strategy wins in exactly the optimal number of queries against
# the slowest Duplicator and never takes longer against a random one.
verdict = solve_width_game(formula, 2, method="explicit")
strategy = spoiler_strategy(formula, 2, verdict)
queries, transcript = replay(formula, 2, strategy, verdict.win_rounds,
                             adversarial_duplicator(verdict.win_rounds))
for keep, var, bit, _ in transcript:
    print(f"keep {sorted(keep)} ask x{var} -> {bit}")
worst = max(replay(formula, 2, strategy, verdict.win_rounds,
                   random_duplicator(random.Random(seed)))[0] for seed in range(20))
print("adversarial:", queries, "random worst case:", worst)
