import itertools
import random

import pytest

from narrow.kai import (PLAYER1, KaiError, KaiInstance, KaiRule, Player2Strategy, all_rules,
                        applicable, apply_rule, blockers, format_kai, is_acyclic, parse_kai,
                        random_instance, replay, solve_kai, verify_player2_strategy)

from oracles import kai_family, minimax_player1_wins

R = KaiRule(1, 2, 3, 1, 2)
PINGPONG = KaiInstance(4, 2, (KaiRule(1, 2, 3, 1, 2), KaiRule(3, 2, 1, 1, 2)), (1, 2), 4)


def test_applicable_examples():
    assert applicable(R, (1, 2))
    assert not applicable(R, (1, 3))


def test_apply_example():
    assert apply_rule(R, (1, 2)) == (3, 2)
    with pytest.raises(KaiError):
        apply_rule(R, (2, 1))


def test_blockers_examples():
    assert blockers(R, (1, 2)) == frozenset()
    assert blockers(R, (2, 2)) == {1}
    assert blockers(R, (1, 3)) == {2}


def test_applicable_iff_no_blockers_and_frame_condition():
    for n in (3, 4):
        for r in all_rules(n, 2):
            for p in itertools.permutations(range(1, n + 1), 2):
                assert applicable(r, p) == (not blockers(r, p))
                if applicable(r, p):
                    q = apply_rule(r, p)
                    assert len(set(q)) == 2
                    assert [i for i in range(2) if p[i] != q[i]] == [r.c - 1]


def test_rule_well_formedness():
    with pytest.raises(KaiError):
        KaiInstance(3, 2, (KaiRule(1, 1, 3, 1, 2),), (1, 2), 3)
    with pytest.raises(KaiError):
        KaiInstance(3, 2, (KaiRule(1, 2, 3, 1, 1),), (1, 2), 3)
    with pytest.raises(KaiError):
        KaiInstance(3, 2, (), (1, 1), 3)
    with pytest.raises(KaiError):
        KaiInstance(3, 2, (), (1, 2), 4)


def test_solver_examples():
    win = KaiInstance(3, 2, (R,), (1, 2), 3)
    sol = solve_kai(win)
    assert sol.player1_wins and sol.strategy[(1, 2)] == 1
    assert not solve_kai(KaiInstance(3, 2, (), (1, 2), 3)).player1_wins
    assert not solve_kai(PINGPONG).player1_wins


def test_goal_counts_only_after_a_player1_move():
    # start on the goal without a move: Player 1 is stuck
    stuck = KaiInstance(3, 2, (), (1, 2), 2)
    assert not solve_kai(stuck).player1_wins
    assert verify_player2_strategy(stuck, Player2Strategy(frozenset({(1, 2)}), frozenset(), {}))
    # a move that keeps the goal pebble in place wins
    keep = KaiInstance(3, 2, (KaiRule(1, 2, 3, 1, 2),), (1, 2), 2)
    assert solve_kai(keep).player1_wins
    # lifting the pebble off the goal does not, once Player 2 can answer
    lift = KaiInstance(3, 2, (KaiRule(2, 1, 3, 2, 1), KaiRule(3, 1, 2, 2, 1)), (1, 2), 2)
    assert not solve_kai(lift).player1_wins
    # Player 2 may move onto the goal
    onto = KaiInstance(4, 2, (KaiRule(1, 2, 3, 1, 2), KaiRule(2, 3, 4, 2, 1),
                              KaiRule(4, 3, 2, 2, 1)), (1, 2), 4)
    sol = solve_kai(onto)
    assert not sol.player1_wins
    assert verify_player2_strategy(onto, sol.strategy)


def test_acyclicity_examples():
    assert is_acyclic(KaiInstance(3, 2, (R,), (1, 2), 3))
    assert not is_acyclic(PINGPONG)
    assert is_acyclic(KaiInstance(3, 2, (), (1, 2), 3))


def test_pingpong_certificate():
    mirror = Player2Strategy(frozenset({(1, 2)}), frozenset({(3, 2)}), {(3, 2): 2})
    assert verify_player2_strategy(PINGPONG, mirror)
    assert not verify_player2_strategy(
        PINGPONG, Player2Strategy(frozenset({(2, 1)}), frozenset({(3, 2)}), {(3, 2): 2}))
    assert not verify_player2_strategy(
        PINGPONG, Player2Strategy(frozenset({(1, 2)}), frozenset({(3, 2)}), {(3, 2): 1}))


def test_certificates_exist_iff_player2_wins():
    for G in kai_family(n_max=4, m_max=2):
        sol = solve_kai(G)
        if sol.player1_wins:
            # soundness: nothing accepts a certificate for a lost game
            fake = Player2Strategy(frozenset({G.start}), frozenset(), {})
            assert not verify_player2_strategy(G, fake)
        else:
            assert verify_player2_strategy(G, sol.strategy)


def test_solver_matches_minimax_on_random_instances():
    rng = random.Random(31)
    for _ in range(300):
        G = random_instance(rng, n_max=5, m_max=4)
        assert solve_kai(G).player1_wins == minimax_player1_wins(G)


def test_replay_wins_for_the_solved_side():
    rng = random.Random(32)
    for _ in range(150):
        G = random_instance(rng, n_max=4, m_max=3)
        sol = solve_kai(G)
        for seed in range(3):
            opp_rng = random.Random(seed)
            winner, _ = replay(G, sol, lambda p, opts: opp_rng.choice(opts), max_rounds=200)
            assert (winner == PLAYER1) == sol.player1_wins


def test_text_format_round_trip():
    rng = random.Random(33)
    for _ in range(50):
        G = random_instance(rng, n_max=6, m_max=4)
        assert parse_kai(format_kai(G)) == G


@pytest.mark.parametrize("text", [
    "kai 3 2 1\nstart 1 2\ngoal 3\n",
    "kai 3 2 0\nstart 1 1\ngoal 3\n",
    "kai 3 2 1\nstart 1 2\ngoal 3\nrule 1 2 3 1 1\n",
    "kai 3 2 0\nstart 1 2\n",
    "kai 3 2 0\nstart 1 2\ngoal x\n",
    "kai 3 2 0\nstart 1 2\ngoal 3\nmove 1\n",
])
def test_parse_rejects_malformed_instances(text):
    with pytest.raises(KaiError):
        parse_kai(text)


def test_sampler_hits_both_winners():
    rng = random.Random(0)
    wins = [solve_kai(random_instance(rng)).player1_wins for _ in range(100)]
    assert 10 < sum(wins) < 90
