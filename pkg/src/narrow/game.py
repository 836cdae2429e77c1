"""The Boolean existential pebble game that characterizes resolution width.

Positions are partial assignments with at most ``k + 1`` variables.  In one
round Spoiler keeps a restriction of size at most ``k`` and asks for a fresh
variable; Duplicator answers.  Spoiler wins once the position falsifies a
clause of width at most ``k``.  Only queries count as rounds.

Two solvers are provided.  The explicit one materializes every position and
is meant for small formulas.  The antichain one keeps only minimal winning
positions; a minimal winning position is exactly the assignment falsifying a
stored width-``k`` clause, so it runs on the saturation engine.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .cnf import CnfFormula, PartialAssignment, clause_of
from .resolution import BudgetExceeded, _subsets, saturate

EXPLICIT_MAX_VARIABLES = 12
DEFAULT_MAX_POSITIONS = 2 * 10**7
DEFAULT_MAX_MEMO = 10**7


@dataclass
class GameVerdict:
    spoiler_wins: bool
    rounds: int | None
    # explicit solver only: position (frozenset of true literals) -> first round
    win_rounds: dict | None = field(default=None, repr=False)


def _as_lits(p) -> frozenset:
    if p is None:
        return frozenset()
    if isinstance(p, PartialAssignment):
        return p.true_lits
    return frozenset(p)


def _falsifying_clauses(formula: CnfFormula, k: int) -> list:
    """Clauses of width at most ``k``, as the literal sets a position must contain."""
    return [frozenset(-x for x in c.lits) for c in formula.clauses
            if c.width <= k and not c.is_tautology]


def count_positions(nvars: int, size: int) -> int:
    from math import comb
    return sum(comb(nvars, s) * 2**s for s in range(size + 1))


def all_positions(variables: Sequence[int], size: int):
    """Every partial assignment over ``variables`` with at most ``size`` entries."""
    for s in range(size + 1):
        for dom in itertools.combinations(variables, s):
            for signs in itertools.product((1, -1), repeat=s):
                yield frozenset(v * g for v, g in zip(dom, signs))


def _supersets(p: frozenset, variables: Sequence[int], size: int):
    free = [v for v in variables if v not in p and -v not in p]
    for extra in range(size - len(p) + 1):
        for dom in itertools.combinations(free, extra):
            for signs in itertools.product((1, -1), repeat=extra):
                yield p | {v * g for v, g in zip(dom, signs)}


def explicit_win_rounds(formula: CnfFormula, k: int, targets: Iterable = (),
                        max_positions: int = DEFAULT_MAX_POSITIONS,
                        stop_at: frozenset | None = None) -> dict:
    """First round of every winning position, straight from the definition.

    ``targets`` are extra positions counted as won at round 0 together with
    all their supersets.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    variables = range(1, formula.variable_count + 1)
    size = k + 1
    if count_positions(formula.variable_count, size) > max_positions:
        raise BudgetExceeded("position", max_positions)
    seeds = _falsifying_clauses(formula, k) + [_as_lits(t) for t in targets]
    win: dict = {}
    for p in all_positions(variables, size):
        if any(s <= p for s in seeds):
            win[p] = 0
    r = 0
    small = [p for p in all_positions(variables, k)]
    while True:
        if stop_at is not None and stop_at in win:
            break
        fresh = []
        for p in small:
            if p in win:
                continue
            for x in variables:
                if x in p or -x in p:
                    continue
                if (p | {x}) in win and (p | {-x}) in win:
                    fresh.append(p)
                    break
        if not fresh:
            break
        r += 1
        for p in fresh:
            for q in _supersets(p, variables, size):
                win.setdefault(q, r)
    return win


def _first_round_antichain(formula: CnfFormula, k: int, start: frozenset,
                           targets: Iterable, **budget) -> int | None:
    goal_subsets = list(_subsets(clause_of(PartialAssignment.from_literals(start)).literal_set))
    extra = [clause_of(PartialAssignment.from_literals(_as_lits(t))) for t in targets]

    def reached(rounds):
        return any(s in rounds for s in goal_subsets)

    res = saturate(formula, k, extra_clauses=extra, stop_when=reached, **budget)
    rounds = [res.rounds[s] for s in goal_subsets if s in res.rounds]
    return min(rounds) if rounds else None


def solve_width_game(formula: CnfFormula, k: int, *, method: str = "auto",
                     max_positions: int = DEFAULT_MAX_POSITIONS, **budget) -> GameVerdict:
    """Does Spoiler win the width-``k`` game, and in how many queries?

    ``method`` is ``"explicit"``, ``"antichain"`` or ``"auto"`` (explicit up to
    twelve variables).
    """
    if method == "auto":
        method = "explicit" if formula.variable_count <= EXPLICIT_MAX_VARIABLES else "antichain"
    if method == "explicit":
        win = explicit_win_rounds(formula, k, max_positions=max_positions,
                                  stop_at=frozenset())
        r = win.get(frozenset())
        return GameVerdict(r is not None, r, win)
    if method == "antichain":
        r = _first_round_antichain(formula, k, frozenset(), (), **budget)
        return GameVerdict(r is not None, r)
    raise ValueError(f"unknown method {method!r}")


# ------------------------------------------------------------------- regular

def solve_regular_width_game(formula: CnfFormula, k: int, *, targets: Iterable = (),
                             start=None, max_memo: int = DEFAULT_MAX_MEMO) -> GameVerdict:
    """The variant where no variable may be asked twice along a play.

    AND-OR search over ``(position, asked set)``.  Keeping as much of the
    position as the pebble bound allows never hurts Spoiler, so a move only
    ever drops a single variable and only when the position is full.
    """
    clauses = _falsifying_clauses(formula, k) + [_as_lits(t) for t in targets]
    variables = range(1, formula.variable_count + 1)
    memo: dict = {}

    def value(p: frozenset, asked: int) -> int | None:
        if any(c <= p for c in clauses):
            return 0
        key = (p, asked)
        if key in memo:
            return memo[key]
        if len(memo) >= max_memo:
            raise BudgetExceeded("memo", max_memo)
        best = None
        keeps = [p] if len(p) <= k else [p - {x} for x in p]
        for q in keeps:
            for x in variables:
                bit = 1 << x
                if asked & bit:
                    continue
                a = value(q | {x}, asked | bit)
                if a is None or (best is not None and a + 1 >= best):
                    continue
                b = value(q | {-x}, asked | bit)
                if b is None:
                    continue
                cand = 1 + max(a, b)
                if best is None or cand < best:
                    best = cand
        memo[key] = best
        return best

    p0 = _as_lits(start)
    asked0 = 0
    for x in p0:
        asked0 |= 1 << abs(x)
    r = value(p0, asked0)
    return GameVerdict(r is not None, r)


# --------------------------------------------------------------- reachability

def can_reach(formula: CnfFormula, k: int, source, target, regular: bool = False,
              *, method: str = "auto", **budget) -> bool:
    """Can Spoiler, starting at ``source``, win or reach a position containing ``target``?

    ``target`` may be a single position or a list of alternatives (any one
    suffices).
    """
    targets = _target_list(target)
    src = _as_lits(source)
    for t in targets + [src]:
        if len(t) > k + 1:
            raise ValueError(f"position of size {len(t)} exceeds the pebble bound {k + 1}")
    if regular:
        return solve_regular_width_game(formula, k, targets=targets, start=src,
                                        **budget).spoiler_wins
    if method == "auto":
        method = "explicit" if formula.variable_count <= EXPLICIT_MAX_VARIABLES else "antichain"
    if method == "explicit":
        win = explicit_win_rounds(formula, k, targets, stop_at=src)
        return src in win
    return _first_round_antichain(formula, k, src, targets, **budget) is not None


def _target_list(target) -> list:
    if isinstance(target, (PartialAssignment, frozenset)):
        return [_as_lits(target)]
    return [_as_lits(t) for t in target]


# ----------------------------------------------------------------- strategies

@dataclass(frozen=True)
class SpoilerMove:
    keep: frozenset
    ask: int


def spoiler_strategy(formula: CnfFormula, k: int, verdict: GameVerdict | None = None) -> dict:
    """``position -> SpoilerMove`` for every winning position off round 0.

    Each move leads to positions of strictly smaller first round, so a replay
    needs exactly as many queries as the position's round against the best
    Duplicator.
    """
    if verdict is None or verdict.win_rounds is None:
        verdict = GameVerdict(False, None, explicit_win_rounds(formula, k))
    win = verdict.win_rounds
    if frozenset() not in win:
        raise ValueError("Duplicator wins; Spoiler has no winning strategy")
    variables = range(1, formula.variable_count + 1)
    strategy = {}
    for p, r in win.items():
        if r == 0:
            continue
        keeps = [p] if len(p) <= k else [p - {x} for x in p]
        move = None
        for q in keeps:
            for x in variables:
                if x in q or -x in q:
                    continue
                a, b = win.get(q | {x}), win.get(q | {-x})
                if a is not None and b is not None and max(a, b) == r - 1:
                    move = SpoilerMove(q, x)
                    break
            if move:
                break
        if move is None:  # pragma: no cover - excluded by the fixpoint construction
            raise AssertionError(f"no strategy move at {sorted(p)}")
        strategy[p] = move
    return strategy


def replay(formula: CnfFormula, k: int, strategy: dict, win_rounds: dict,
           duplicator: Callable[[frozenset, int], int], max_queries: int = 10_000):
    """Run the strategy from the empty position; returns ``(queries, transcript)``.

    ``duplicator(position, variable)`` answers 0 or 1.  The play ends once the
    position falsifies a clause of width at most ``k``.
    """
    clauses = _falsifying_clauses(formula, k)
    p = frozenset()
    transcript = []
    queries = 0
    while not any(c <= p for c in clauses):
        if queries >= max_queries:
            raise RuntimeError("replay did not terminate")
        move = strategy[p]
        bit = duplicator(move.keep, move.ask)
        p = move.keep | {move.ask if bit else -move.ask}
        queries += 1
        transcript.append((move.keep, move.ask, bit, p))
    return queries, transcript


def adversarial_duplicator(win_rounds: dict):
    """Answer with the value whose position survives longest."""
    def answer(keep, x):
        a, b = win_rounds.get(keep | {x}, -1), win_rounds.get(keep | {-x}, -1)
        return 1 if a >= b else 0
    return answer


def random_duplicator(rng: random.Random):
    return lambda keep, x: rng.randint(0, 1)
