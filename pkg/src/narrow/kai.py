"""The KAI pebble game: model, text format, solver and Player 2 certificates.

A position is a tuple ``p`` with ``p[i - 1]`` the node carrying pebble ``i``.
Rules are 1-based in list order; that order is also the rule index used by
strategy maps and by the gadget compiler.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

PLAYER1, PLAYER2 = 1, 2


class KaiError(ValueError):
    pass


class KaiRule(NamedTuple):
    u: int
    v: int
    w: int
    c: int
    d: int

    def check(self, n: int | None = None, k: int | None = None):
        if self.c == self.d:
            raise KaiError(f"rule {tuple(self)}: pebbles c and d coincide")
        if len({self.u, self.v, self.w}) != 3:
            raise KaiError(f"rule {tuple(self)}: nodes u, v, w must be pairwise distinct")
        if n is not None and not all(1 <= x <= n for x in (self.u, self.v, self.w)):
            raise KaiError(f"rule {tuple(self)}: node outside [1, {n}]")
        if k is not None and not all(1 <= x <= k for x in (self.c, self.d)):
            raise KaiError(f"rule {tuple(self)}: pebble outside [1, {k}]")


def check_position(p: Sequence[int], n: int, k: int) -> tuple:
    p = tuple(int(x) for x in p)
    if len(p) != k:
        raise KaiError(f"position {p} has {len(p)} pebbles, expected {k}")
    if not all(1 <= x <= n for x in p):
        raise KaiError(f"position {p} leaves the universe [1, {n}]")
    if len(set(p)) != k:
        raise KaiError(f"position {p} is not injective")
    return p


@dataclass(frozen=True)
class KaiInstance:
    n: int
    k: int
    rules: tuple
    start: tuple
    theta: int

    def __post_init__(self):
        if self.k < 1 or self.n < self.k:
            raise KaiError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        rules = tuple(r if isinstance(r, KaiRule) else KaiRule(*r) for r in self.rules)
        for r in rules:
            r.check(self.n, self.k)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "start", check_position(self.start, self.n, self.k))
        if not 1 <= self.theta <= self.n:
            raise KaiError(f"goal {self.theta} outside [1, {self.n}]")

    @property
    def m(self) -> int:
        return len(self.rules)

    def positions(self):
        """All injective placements, in lexicographic order."""
        return itertools.permutations(range(1, self.n + 1), self.k)

    def rule(self, index: int) -> KaiRule:
        return self.rules[index - 1]


def applicable(rule: KaiRule, pos: Sequence[int]) -> bool:
    u, v, w, c, d = rule
    return pos[c - 1] == u and pos[d - 1] == v and w not in pos


def apply_rule(rule: KaiRule, pos: Sequence[int]) -> tuple:
    if not applicable(rule, pos):
        raise KaiError(f"rule {tuple(rule)} is not applicable to {tuple(pos)}")
    out = list(pos)
    out[rule.c - 1] = rule.w
    return tuple(out)


def blockers(rule: KaiRule, pos: Sequence[int]) -> frozenset:
    """Pebbles whose placement contradicts the applicability of ``rule``."""
    u, v, w, c, d = rule
    return frozenset(i for i in range(1, len(pos) + 1)
                     if (i == c and pos[i - 1] != u) or (i == d and pos[i - 1] != v)
                     or pos[i - 1] == w)


def applicable_rules(instance: KaiInstance, pos: Sequence[int]) -> list:
    """1-based indices of the rules applicable to ``pos``."""
    return [i for i, r in enumerate(instance.rules, start=1) if applicable(r, pos)]


def is_acyclic(instance: KaiInstance) -> bool:
    """Whether the node graph with arcs ``u -> w`` and ``v -> w`` per rule is a DAG."""
    succ = {x: set() for x in range(1, instance.n + 1)}
    for r in instance.rules:
        succ[r.u].add(r.w)
        succ[r.v].add(r.w)
    indeg = {x: 0 for x in succ}
    for x in succ:
        for y in succ[x]:
            indeg[y] += 1
    queue = deque(x for x in succ if indeg[x] == 0)
    seen = 0
    while queue:
        x = queue.popleft()
        seen += 1
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return seen == len(succ)


# -------------------------------------------------------------------- solving

@dataclass(frozen=True)
class Player2Strategy:
    K1: frozenset
    K2: frozenset
    kappa: dict = field(hash=False)


@dataclass
class KaiSolution:
    player1_wins: bool
    # Player 1 wins: position (Player 1 to move) -> rule index, following a
    # strictly decreasing win rank.  Player 2 wins: a certificate.
    strategy: dict | Player2Strategy | None
    winning: frozenset = frozenset()     # P1-winning (position, player) states
    rank: dict = field(default_factory=dict)


class BudgetExceeded(RuntimeError):
    pass


def solve_kai(instance: KaiInstance, *, max_states: int = 10**7) -> KaiSolution:
    """Least fixpoint of Player 1's winning states over ``(position, player)``.

    Player 1 wins by moving into a position that holds the goal, or by
    leaving Player 2 without an applicable rule.  The goal is not checked on
    positions that Player 2 produces or on the start, so Player 1 still has
    to move.  A stuck Player 1 and infinite play are wins for Player 2.
    """
    G = instance
    theta = G.theta
    states = [(p, pl) for p in G.positions() for pl in (PLAYER1, PLAYER2)]
    if len(states) > max_states:
        raise BudgetExceeded(f"{len(states)} states exceed the budget of {max_states}")
    moves = {p: [(i, apply_rule(G.rules[i - 1], p)) for i in applicable_rules(G, p)]
             for p, _ in states[::2]}
    other = {PLAYER1: PLAYER2, PLAYER2: PLAYER1}

    # backward induction: rank = rounds until Player 1 wins
    rank: dict = {}
    preds: dict = {s: [] for s in states}
    remaining: dict = {}
    queue: deque = deque()
    for p, pl in states:
        for _, q in moves[p]:
            preds[(q, other[pl])].append((p, pl))
        remaining[(p, pl)] = len(moves[p])
        if pl == PLAYER2 and (theta in p or not moves[p]):
            rank[(p, pl)] = 0
            queue.append((p, pl))
    while queue:
        s = queue.popleft()
        for t in preds[s]:
            if t in rank:
                continue
            if t[1] == PLAYER1:
                rank[t] = rank[s] + 1
                queue.append(t)
            else:
                remaining[t] -= 1
                if remaining[t] == 0:
                    rank[t] = rank[s] + 1
                    queue.append(t)
    winning = frozenset(rank)
    root = (G.start, PLAYER1)
    if root in winning:
        strat = {}
        for (p, pl), r in rank.items():
            if pl != PLAYER1 or r == 0:
                continue
            best = min((rank[(q, PLAYER2)], i) for i, q in moves[p] if (q, PLAYER2) in rank)
            strat[p] = best[1]
        return KaiSolution(True, strat, winning, rank)
    return KaiSolution(False, _player2_certificate(G, moves, winning), winning, rank)


def _player2_certificate(G: KaiInstance, moves: dict, winning: frozenset) -> Player2Strategy:
    K1, K2, kappa = set(), set(), {}
    stack = [G.start]
    K1.add(G.start)
    while stack:
        p = stack.pop()
        for _, q in moves[p]:
            if q in K2:
                continue
            K2.add(q)
            i, nxt = next((i, r) for i, r in moves[q] if (r, PLAYER1) not in winning)
            kappa[q] = i
            if nxt not in K1:
                K1.add(nxt)
                stack.append(nxt)
    return Player2Strategy(frozenset(K1), frozenset(K2), kappa)


def verify_player2_strategy(instance: KaiInstance, strat: Player2Strategy) -> bool:
    """Check a Player 2 certificate condition by condition.

    ``K2`` holds the positions Player 1 can produce, so it must avoid the
    goal; ``K1`` may hold it, since the goal only counts after a Player 1 move.
    """
    G = instance
    try:
        K1 = {check_position(p, G.n, G.k) for p in strat.K1}
        K2 = {check_position(p, G.n, G.k) for p in strat.K2}
    except KaiError:
        return False
    if G.start not in K1:
        return False
    if any(G.theta in p for p in K2):
        return False
    for p in K1:
        for i in applicable_rules(G, p):
            if apply_rule(G.rules[i - 1], p) not in K2:
                return False
    for p in K2:
        i = strat.kappa.get(p)
        if not isinstance(i, int) or not 1 <= i <= G.m:
            return False
        r = G.rules[i - 1]
        if not applicable(r, p) or apply_rule(r, p) not in K1:
            return False
    return True


def replay(instance: KaiInstance, solution: KaiSolution, opponent, max_rounds: int = 10_000):
    """Play the solved side's strategy against ``opponent(position, rule indices)``.

    Returns ``(winner, transcript)``; a transcript item is ``(player, rule, position)``.
    """
    G = instance
    p, transcript = G.start, []
    for _ in range(max_rounds):
        opts = applicable_rules(G, p)
        if not opts:
            return PLAYER2, transcript
        i = solution.strategy[p] if solution.player1_wins else opponent(p, opts)
        p = apply_rule(G.rules[i - 1], p)
        transcript.append((PLAYER1, i, p))
        if G.theta in p:
            return PLAYER1, transcript
        opts = applicable_rules(G, p)
        if not opts:
            return PLAYER1, transcript
        i = opponent(p, opts) if solution.player1_wins else solution.strategy.kappa[p]
        p = apply_rule(G.rules[i - 1], p)
        transcript.append((PLAYER2, i, p))
    return PLAYER2, transcript


# ---------------------------------------------------------------- text format

def parse_kai(text: str) -> KaiInstance:
    header = start = goal = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            vals = [int(x) for x in rest]
        except ValueError:
            raise KaiError(f"line {lineno}: non-integer field in {line!r}") from None
        expect = {"kai": 3, "goal": 1, "rule": 5}
        if head in expect and len(vals) != expect[head]:
            raise KaiError(f"line {lineno}: '{head}' takes {expect[head]} values")
        if head == "kai":
            header = vals
        elif head == "start":
            start = vals
        elif head == "goal":
            goal = vals[0]
        elif head == "rule":
            rules.append(KaiRule(*vals))
        else:
            raise KaiError(f"line {lineno}: unknown keyword {head!r}")
    if header is None or start is None or goal is None:
        raise KaiError("missing 'kai', 'start' or 'goal' line")
    n, k, m = header
    if len(rules) != m:
        raise KaiError(f"header declares {m} rules, found {len(rules)}")
    return KaiInstance(n, k, tuple(rules), tuple(start), goal)


def format_kai(instance: KaiInstance) -> str:
    G = instance
    lines = [f"kai {G.n} {G.k} {G.m}", "start " + " ".join(map(str, G.start)), f"goal {G.theta}"]
    lines += ["rule " + " ".join(map(str, r)) for r in G.rules]
    return "\n".join(lines) + "\n"


def random_instance(rng: random.Random, n_max: int = 4, m_max: int = 2, k: int = 2,
                    n_min: int = 3) -> KaiInstance:
    """Sample a well-formed instance.

    Half of the time the goal is drawn outside the start placement so that
    both players win a fair share of samples.
    """
    n = rng.randint(max(n_min, k + 1), n_max)
    m = rng.randint(1, m_max)
    rules = []
    while len(rules) < m:
        u, v, w = rng.sample(range(1, n + 1), 3)
        c, d = rng.sample(range(1, k + 1), 2)
        rules.append(KaiRule(u, v, w, c, d))
    start = tuple(rng.sample(range(1, n + 1), k))
    if rng.random() < 0.5:
        theta = rng.choice([x for x in range(1, n + 1) if x not in start])
    else:
        theta = rng.randint(1, n)
    return KaiInstance(n, k, tuple(rules), start, theta)


def all_rules(n: int, k: int):
    """Every well-formed rule over ``[n]`` and ``[k]``, in lexicographic order."""
    for u, v, w in itertools.permutations(range(1, n + 1), 3):
        for c, d in itertools.permutations(range(1, k + 1), 2):
            yield KaiRule(u, v, w, c, d)
