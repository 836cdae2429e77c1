"""Independent reference implementations used by the tests.

Each oracle is deliberately naive: no pruning, no clever indexing, nothing
shared with the library beyond the basic data types.
"""

from __future__ import annotations

import itertools
import random

from narrow.cnf import CnfFormula
from narrow.kai import KaiInstance, all_rules


# ----------------------------------------------------------------- formulas

def reference_saturation(formula: CnfFormula, k: int, max_rounds: int = 10_000):
    """Round-synchronous saturation without subsumption.

    Returns ``(refuted, rounds_to_empty, fixpoint_rounds)``.
    """
    have = {frozenset(c.lits) for c in formula.clauses if len(c.lits) <= k
            and not any(-x in c.lits for x in c.lits)}
    if frozenset() in have:
        return True, 0, 0
    r = 0
    while r < max_rounds:
        new = set()
        items = list(have)
        for a, b in itertools.combinations(items, 2):
            for x in a:
                if -x in b:
                    res = (a - {x}) | (b - {-x})
                    if len(res) <= k and not any(-y in res for y in res) and res not in have:
                        new.add(res)
        r += 1
        if not new:
            return False, None, r - 1
        have |= new
        if frozenset() in have:
            return True, r, r
    raise RuntimeError("reference saturation did not converge")


def satisfiable(formula: CnfFormula) -> bool:
    """Truth-table search."""
    n = formula.variable_count
    clauses = [c.lits for c in formula.clauses]
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(x) - 1] == (x > 0) for x in c) for c in clauses):
            return True
    return False


def random_cnf(rng: random.Random, max_vars: int = 6, max_clauses: int = 8,
               max_width: int = 3) -> CnfFormula:
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        w = rng.randint(1, min(max_width, n))
        vs = rng.sample(range(1, n + 1), w)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfFormula.from_lists(clauses, n)


def full_contradiction(n: int) -> CnfFormula:
    """All 2^n sign patterns over ``n`` variables."""
    return CnfFormula.from_lists(
        [[v if s else -v for v, s in zip(range(1, n + 1), signs)]
         for signs in itertools.product((True, False), repeat=n)], n)


def pigeonhole(holes: int) -> CnfFormula:
    """``holes + 1`` pigeons into ``holes`` holes."""
    pigeons = holes + 1
    var = lambda p, h: p * holes + h + 1
    cls = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            cls.append([-var(p, h), -var(q, h)])
    return CnfFormula.from_lists(cls, pigeons * holes)


def chain(n: int) -> CnfFormula:
    """x1, x1 -> x2, ..., x_{n-1} -> x_n, not x_n."""
    cls = [[1]] + [[-i, i + 1] for i in range(1, n)] + [[-n]]
    return CnfFormula.from_lists(cls, n)


def structured_suite() -> list:
    return ([full_contradiction(n) for n in (1, 2, 3)] + [pigeonhole(2)]
            + [chain(n) for n in (2, 4, 6)]
            + [CnfFormula.from_lists([[1, 2]], 2), CnfFormula.from_lists([], 0),
               CnfFormula.from_lists([[1, 2, 3], [-1], [-2], [-3]], 3)])


def small_suite(count: int = 500, seed: int = 2024) -> list:
    rng = random.Random(seed)
    return [random_cnf(rng) for _ in range(count)] + structured_suite()


# ---------------------------------------------------------------------- KAI

def minimax_player1_wins(G: KaiInstance) -> bool:
    """Depth-bounded evaluation of the game tree, horizon twice the state count.

    ``ahead[d][(p, pl)]`` says whether Player 1 wins from that state within
    ``d`` plies; the recursion is computed bottom-up over ``d``.
    """
    positions = list(itertools.permutations(range(1, G.n + 1), G.k))
    horizon = 2 * 2 * len(positions)

    def moves(p):
        out = []
        for r in G.rules:
            if p[r.c - 1] == r.u and p[r.d - 1] == r.v and r.w not in p:
                q = list(p)
                q[r.c - 1] = r.w
                out.append(tuple(q))
        return out

    succ = {p: moves(p) for p in positions}
    # the goal only counts once Player 1 has moved onto it
    won = {(p, pl): pl == 2 and G.theta in p for p in positions for pl in (1, 2)}
    for _ in range(horizon):
        nxt = {}
        for (p, pl), v in won.items():
            if v:
                nxt[(p, pl)] = True
            elif pl == 1:
                nxt[(p, pl)] = any(won[(q, 2)] for q in succ[p])
            else:
                nxt[(p, pl)] = all(won[(q, 1)] for q in succ[p])
        won = nxt
    return won[(G.start, 1)]


def kai_family(n_max: int = 4, m_max: int = 3):
    """Every instance with k = 2 up to relabelling of the universe.

    Any injective start can be renamed to ``(1, 2)`` and the rule list is a
    set as far as the winner is concerned, so the family fixes the start and
    runs over rule combinations and goals.
    """
    for n in range(2, n_max + 1):
        rules = list(all_rules(n, 2))
        for m in range(0, m_max + 1):
            for combo in itertools.combinations(rules, m):
                for theta in range(1, n + 1):
                    yield KaiInstance(n, 2, combo, (1, 2), theta)
