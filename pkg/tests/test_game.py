import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from narrow.cnf import CnfFormula, PartialAssignment
from narrow.game import (SpoilerMove, adversarial_duplicator, all_positions, can_reach,
                         explicit_win_rounds, random_duplicator, replay, solve_regular_width_game,
                         solve_width_game, spoiler_strategy)
from narrow.resolution import BudgetExceeded, saturate

from oracles import full_contradiction, random_cnf, small_suite

UNIT = CnfFormula.from_lists([[1], [-1]])
XOR2 = full_contradiction(2)


def test_unit_contradiction():
    v = solve_width_game(UNIT, 1)
    assert v.spoiler_wins and v.rounds == 1


def test_two_variable_contradiction():
    assert solve_width_game(XOR2, 2).rounds == 2
    v = solve_width_game(XOR2, 1)
    assert not v.spoiler_wins and v.rounds is None


def test_regular_examples():
    assert solve_regular_width_game(UNIT, 1).rounds == 1
    assert solve_regular_width_game(XOR2, 2).spoiler_wins


def test_methods_agree():
    for f in small_suite(80, seed=21):
        for k in (1, 2, 3):
            a = solve_width_game(f, k, method="explicit")
            b = solve_width_game(f, k, method="antichain")
            assert (a.spoiler_wins, a.rounds) == (b.spoiler_wins, b.rounds)


def test_game_matches_saturation_on_sample():
    for f in small_suite(100, seed=22):
        for k in range(1, 5):
            v, r = solve_width_game(f, k), saturate(f, k)
            assert (v.spoiler_wins, v.rounds) == (r.refuted, r.rounds_to_empty)


def test_regular_win_implies_general_win():
    for f in small_suite(120, seed=23):
        for k in (1, 2, 3):
            reg = solve_regular_width_game(f, k)
            gen = solve_width_game(f, k)
            if reg.spoiler_wins:
                assert gen.spoiler_wins and gen.rounds <= reg.rounds


def test_win_sets_are_upward_closed():
    rng = random.Random(24)
    for _ in range(30):
        f = random_cnf(rng, max_vars=5)
        for k in (1, 2):
            win = explicit_win_rounds(f, k)
            variables = range(1, f.variable_count + 1)
            for p, r in win.items():
                for q in all_positions(variables, k + 1):
                    if p <= q:
                        assert win.get(q, r + 1) <= r


def test_monotone_in_k():
    for f in small_suite(100, seed=25):
        prev = None
        for k in range(1, 5):
            v = solve_width_game(f, k)
            if prev is not None and prev.spoiler_wins:
                assert v.spoiler_wins and v.rounds <= prev.rounds
            prev = v


def test_position_budget():
    with pytest.raises(BudgetExceeded):
        explicit_win_rounds(full_contradiction(6), 4, max_positions=10)


def test_regular_memo_budget():
    with pytest.raises(BudgetExceeded):
        solve_regular_width_game(full_contradiction(4), 3, max_memo=2)


# ------------------------------------------------------------ reachability

def _block_pair(k=2, n=2):
    x = {(i, j): (i - 1) * n + j for i in range(1, k + 1) for j in range(1, n + 1)}
    y = {key: v + k * n for key, v in x.items()}
    cls = [c for key in x for c in ([-x[key], y[key]], [x[key], -y[key]])]
    return CnfFormula.from_lists(cls, 2 * k * n), x, y


def test_reach_self():
    f, x, _ = _block_pair()
    p = PartialAssignment({x[(1, 1)]: 1})
    assert can_reach(f, 3, p, p)


@pytest.mark.parametrize("regular", [False, True])
def test_reach_across_connected_blocks(regular):
    f, x, y = _block_pair()
    for pos in itertools.product((1, 2), repeat=2):
        src = PartialAssignment({x[(i, j)]: 1 for i, j in enumerate(pos, 1)})
        dst = PartialAssignment({y[(i, j)]: 1 for i, j in enumerate(pos, 1)})
        assert can_reach(f, 3, src, dst, regular=regular)


def test_reach_does_not_invent_values():
    f, x, y = _block_pair()
    src = PartialAssignment({x[(1, 1)]: 1})
    assert not can_reach(f, 3, src, PartialAssignment({y[(1, 1)]: 0}))


def test_reach_is_transitive_on_samples():
    rng = random.Random(26)
    for _ in range(40):
        f = random_cnf(rng, max_vars=4, max_clauses=5)
        lits = [v * s for v in range(1, f.variable_count + 1) for s in (1, -1)]

        def pos():
            chosen = {}
            for lit in rng.sample(lits, min(len(lits), rng.randint(0, 2))):
                chosen.setdefault(abs(lit), lit)
            return frozenset(chosen.values())

        a, b, c = pos(), pos(), pos()
        if can_reach(f, 2, a, b) and can_reach(f, 2, b, c):
            assert can_reach(f, 2, a, c)


def test_reach_rejects_oversized_positions():
    f, x, y = _block_pair()
    with pytest.raises(ValueError):
        can_reach(f, 1, frozenset(), frozenset(list(x.values())[:3]))


# --------------------------------------------------------------- strategies

def test_unit_strategy():
    s = spoiler_strategy(UNIT, 1)
    assert s[frozenset()] == SpoilerMove(frozenset(), 1)


def test_strategy_refused_when_duplicator_wins():
    with pytest.raises(ValueError):
        spoiler_strategy(XOR2, 1)


def test_replay_against_adversary_takes_exactly_rounds():
    for f in small_suite(150, seed=27):
        for k in (2, 3):
            v = solve_width_game(f, k, method="explicit")
            if not v.spoiler_wins:
                continue
            strat = spoiler_strategy(f, k, v)
            q, transcript = replay(f, k, strat, v.win_rounds, adversarial_duplicator(v.win_rounds))
            assert q == v.rounds == len(transcript)


def test_replay_against_random_duplicators():
    f = full_contradiction(3)
    v = solve_width_game(f, 3, method="explicit")
    strat = spoiler_strategy(f, 3, v)
    for seed in range(100):
        q, _ = replay(f, 3, strat, v.win_rounds, random_duplicator(random.Random(seed)))
        assert q <= v.rounds


@given(st.integers(0, 10_000), st.integers(1, 4))
@settings(max_examples=150, deadline=None)
def test_game_equals_saturation(seed, k):
    f = random_cnf(random.Random(seed))
    v, r = solve_width_game(f, k), saturate(f, k)
    assert (v.spoiler_wins, v.rounds) == (r.refuted, r.rounds_to_empty)
