"""Bounded-width saturation, proof extraction and proof checking.

Saturation works in synchronous rounds.  Round 0 holds the input clauses of
width at most ``k`` (tautologies dropped).  Round ``r + 1`` adds every
non-tautological resolvent of width at most ``k`` of two clauses present after
round ``r``.  The clause store is kept as an antichain under subsumption; a
clause's first round is the earliest round at which it or a subset of it was
stored, which is the depth of its shallowest width-``k`` derivation.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .cnf import Clause, CnfFormula, lit_key, resolve

DEFAULT_MAX_CLAUSES = 10**7

_EMPTY = frozenset()


class BudgetExceeded(RuntimeError):
    """A clause-count, position-count or time budget ran out before a verdict."""

    def __init__(self, what: str, limit, partial=None):
        self.what = what
        self.limit = limit
        self.partial = partial
        super().__init__(f"{what} budget exceeded (limit {limit})")


def _canon(fs: frozenset) -> tuple:
    return (len(fs), tuple(sorted(lit_key(x) for x in fs)))


def _subsets(fs: frozenset):
    items = tuple(fs)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


@dataclass
class SaturationResult:
    formula: CnfFormula
    width_bound: int
    refuted: bool
    rounds_to_empty: int | None
    fixpoint_rounds: int
    # frozenset-of-literals keyed; every clause ever stored, including ones
    # later removed by backward subsumption
    rounds: dict = field(repr=False)
    parents: dict = field(repr=False)
    final: frozenset = field(repr=False)

    @property
    def derived(self) -> dict:
        """Map ``Clause -> (first_round, parents or None)``."""
        out = {}
        for fs, r in self.rounds.items():
            par = self.parents.get(fs)
            if par is not None:
                a, b, lit = par
                par = (Clause._from_frozenset(a), Clause._from_frozenset(b), abs(lit))
            out[Clause._from_frozenset(fs)] = (r, par)
        return out

    def clauses(self) -> list[Clause]:
        """The final antichain of stored clauses, canonically sorted."""
        return sorted(Clause._from_frozenset(fs) for fs in self.final)

    def first_round(self, clause: Clause | Iterable[int]) -> int | None:
        """Earliest round at which ``clause`` or a subset of it was stored."""
        fs = clause.literal_set if isinstance(clause, Clause) else frozenset(clause)
        best = None
        for sub in _subsets(fs):
            r = self.rounds.get(sub)
            if r is not None and (best is None or r < best):
                best = r
        return best

    def derives(self, clause: Clause | Iterable[int]) -> bool:
        return self.first_round(clause) is not None


def saturate(formula: CnfFormula, k: int, *, subsumption: bool = True,
             extra_clauses: Iterable = (), max_clauses: int = DEFAULT_MAX_CLAUSES,
             time_limit: float | None = None, max_rounds: int | None = None,
             stop_when=None) -> SaturationResult:
    """Derive all clauses of width at most ``k`` round by round.

    Stops at the fixpoint or as soon as the empty clause is derived.
    ``extra_clauses`` are added to round 0 (used for reachability queries);
    ``stop_when(rounds_dict)`` may end the run early once it returns true.
    Raises :class:`BudgetExceeded` when ``max_clauses`` or ``time_limit``
    (seconds) is exceeded.
    """
    if k < 0:
        raise ValueError("width bound must be non-negative")
    deadline = None if time_limit is None else time.monotonic() + time_limit

    rounds: dict = {}
    parents: dict = {}
    present: set = set()
    index: dict = defaultdict(set)

    def is_subsumed(fs):
        if fs in present:
            return True
        if not subsumption:
            return False
        for sub in _subsets(fs):
            if sub in present:
                return True
        return False

    def remove(fs):
        present.discard(fs)
        for x in fs:
            index[x].discard(fs)

    def store(fs, r, par):
        if subsumption:
            if fs:
                pivot_lit = min(fs, key=lambda x: len(index[x]))
                for d in [d for d in index[pivot_lit] if fs < d]:
                    remove(d)
            else:
                for d in list(present):
                    remove(d)
        present.add(fs)
        for x in fs:
            index[x].add(fs)
        if fs not in rounds:
            rounds[fs] = r
            if par is not None:
                parents[fs] = par
        if len(rounds) > max_clauses:
            raise BudgetExceeded("clause", max_clauses)

    # seeds may be one literal wider than k: a seed of width k + 1 stands for
    # a single full-size target position of the game
    seeds = {(c.literal_set if isinstance(c, Clause) else Clause(c).literal_set): k + 1
             for c in extra_clauses}
    limit = {c.literal_set: k for c in formula.clauses}
    for fs, w in seeds.items():
        limit[fs] = max(limit.get(fs, 0), w)
    frontier = []
    for fs in sorted(limit, key=_canon):
        if len(fs) > limit[fs] or any(-x in fs for x in fs):
            continue
        if not is_subsumed(fs):
            store(fs, 0, None)
            frontier.append(fs)

    r = 0
    refuted = _EMPTY in present
    while frontier and not refuted:
        if max_rounds is not None and r >= max_rounds:
            break
        if stop_when is not None and stop_when(rounds):
            break
        candidates: dict = {}
        ticks = 0
        frontier.sort(key=_canon)
        for a in frontier:
            if a not in present:
                continue
            for lit in sorted(a, key=lit_key):
                partners = index.get(-lit)
                if not partners:
                    continue
                arest = a - {lit}
                neg = -lit
                for b in partners:
                    res = arest | b
                    if len(res) > k + 1:
                        continue
                    res = res - {neg}
                    if any(-x in b for x in arest):
                        continue
                    if res in candidates or is_subsumed(res):
                        continue
                    candidates[res] = (a, b, lit)
                ticks += len(partners)
                if deadline is not None and ticks > 20000:
                    ticks = 0
                    if time.monotonic() > deadline:
                        raise BudgetExceeded("time", time_limit)
        r += 1
        frontier = []
        for fs in sorted(candidates, key=_canon):
            if is_subsumed(fs):
                continue
            store(fs, r, candidates[fs])
            frontier.append(fs)
            if not fs:
                refuted = True
                break
        frontier = [fs for fs in frontier if fs in present]

    return SaturationResult(
        formula=formula, width_bound=k, refuted=refuted,
        rounds_to_empty=rounds.get(_EMPTY) if refuted else None,
        fixpoint_rounds=r, rounds=rounds, parents=parents, final=frozenset(present))


def min_width(formula: CnfFormula, *, start: int = 0, **budget) -> int | None:
    """Smallest ``k`` whose saturation refutes ``formula``; ``None`` if unrefutable."""
    for k in range(start, formula.variable_count + 1):
        if saturate(formula, k, **budget).refuted:
            return k
    return None


# --------------------------------------------------------------------- proofs

@dataclass(frozen=True)
class ProofStep:
    id: int
    clause: Clause
    antecedents: tuple[int, int] | None = None
    pivot: int | None = None
    formula_index: int | None = None

    @property
    def is_input(self) -> bool:
        return self.antecedents is None


@dataclass(frozen=True)
class ResolutionProof:
    steps: tuple[ProofStep, ...]
    root: int

    def step(self, sid: int) -> ProofStep:
        return self.steps[self._pos()[sid]]

    def _pos(self) -> dict:
        return {s.id: i for i, s in enumerate(self.steps)}

    @property
    def is_refutation(self) -> bool:
        return self.step(self.root).clause.is_empty


class ProofError(ValueError):
    pass


def extract_proof(result: SaturationResult) -> ResolutionProof:
    """Read a refutation off the parent pointers of a refuted saturation."""
    if not result.refuted:
        raise ProofError("saturation did not derive the empty clause")
    first_index = {}
    for i, c in enumerate(result.formula.clauses):
        first_index.setdefault(c.literal_set, i)
    ids: dict = {}
    steps: list[ProofStep] = []

    # iterative post-order so deep proofs do not hit the recursion limit
    stack = [(_EMPTY, False)]
    while stack:
        fs, expanded = stack.pop()
        if fs in ids:
            continue
        par = result.parents.get(fs)
        if par is None:
            if fs not in first_index:
                raise ProofError(f"clause {sorted(fs)} has no parents and is not an input")
            ids[fs] = len(steps) + 1
            steps.append(ProofStep(ids[fs], Clause._from_frozenset(fs),
                                   formula_index=first_index[fs]))
            continue
        a, b, lit = par
        if not expanded:
            stack.append((fs, True))
            stack.append((b, False))
            stack.append((a, False))
            continue
        pos, neg = (a, b) if lit > 0 else (b, a)
        ids[fs] = len(steps) + 1
        steps.append(ProofStep(ids[fs], Clause._from_frozenset(fs),
                               antecedents=(ids[pos], ids[neg]), pivot=abs(lit)))
    return ResolutionProof(tuple(steps), ids[_EMPTY])


@dataclass(frozen=True)
class ProofReport:
    valid: bool
    width: int | None = None
    depth: int | None = None
    length: int | None = None
    regular: bool | None = None
    refutation: bool | None = None
    error_step: int | None = None
    message: str = ""


def verify_proof(formula: CnfFormula, proof: ResolutionProof) -> ProofReport:
    """Re-check every step and measure the DAG reachable from the root."""
    inputs = {c.literal_set for c in formula.clauses}
    by_id: dict = {}
    for s in proof.steps:
        if s.id in by_id:
            return ProofReport(False, error_step=s.id, message="duplicate step id")
        if s.is_input:
            if s.clause.literal_set not in inputs:
                return ProofReport(False, error_step=s.id, message="input clause not in formula")
        else:
            a1, a2 = s.antecedents
            if not (a1 in by_id and a2 in by_id and a1 < s.id and a2 < s.id):
                return ProofReport(False, error_step=s.id, message="antecedent is not an earlier step")
            try:
                res = resolve(by_id[a1].clause, by_id[a2].clause, s.pivot)
            except ValueError as e:
                return ProofReport(False, error_step=s.id, message=str(e))
            if res != s.clause:
                return ProofReport(False, error_step=s.id, message="clause is not the resolvent")
        by_id[s.id] = s
    if proof.root not in by_id:
        return ProofReport(False, message="root is not a step")

    # topological order is ascending id
    reach = {proof.root}
    for sid in sorted(by_id, reverse=True):
        s = by_id[sid]
        if sid in reach and not s.is_input:
            reach.update(s.antecedents)
    depth: dict = {}
    below: dict = {}  # pivots used strictly beneath a step
    regular = True
    for sid in sorted(reach):
        s = by_id[sid]
        if s.is_input:
            depth[sid] = 0
            below[sid] = frozenset()
            continue
        a1, a2 = s.antecedents
        depth[sid] = 1 + max(depth[a1], depth[a2])
        piv_a1 = {by_id[a1].pivot} if not by_id[a1].is_input else set()
        piv_a2 = {by_id[a2].pivot} if not by_id[a2].is_input else set()
        below[sid] = below[a1] | below[a2] | piv_a1 | piv_a2
        if s.pivot in below[sid]:
            regular = False
    root_clause = by_id[proof.root].clause
    return ProofReport(
        valid=True,
        width=max(by_id[s].clause.width for s in reach),
        depth=depth[proof.root],
        length=len(reach),
        regular=regular,
        refutation=root_clause.is_empty,
    )


def write_trace(proof: ResolutionProof) -> str:
    lines = []
    for s in proof.steps:
        body = " ".join(str(x) for x in s.clause.lits + (0,))
        tail = "0 0 0" if s.is_input else f"{s.antecedents[0]} {s.antecedents[1]} {s.pivot}"
        lines.append(f"{s.id} {body} {tail}\n")
    return "".join(lines)


def read_trace(text: str | bytes, formula: CnfFormula | None = None) -> ResolutionProof:
    """Parse a proof trace; forward references and malformed lines raise ProofError."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    index = {}
    if formula is not None:
        for i, c in enumerate(formula.clauses):
            index.setdefault(c.literal_set, i)
    steps = []
    seen = set()
    last = 0
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise ProofError(f"line {lineno}: non-integer token") from None
        if len(nums) < 5 or 0 not in nums[1:-3]:
            raise ProofError(f"line {lineno}: expected '<id> <lits> 0 <a1> <a2> <pivot>'")
        sid, rest = nums[0], nums[1:]
        zero = rest.index(0)
        lits, tail = rest[:zero], rest[zero + 1:]
        if len(tail) != 3:
            raise ProofError(f"line {lineno}: expected three trailing fields")
        if sid <= last:
            raise ProofError(f"line {lineno}: step ids must ascend")
        last = sid
        a1, a2, piv = tail
        clause = Clause(lits)
        if (a1, a2, piv) == (0, 0, 0):
            steps.append(ProofStep(sid, clause, formula_index=index.get(clause.literal_set)))
        else:
            if a1 not in seen or a2 not in seen:
                raise ProofError(f"line {lineno}: forward or dangling antecedent reference")
            steps.append(ProofStep(sid, clause, antecedents=(a1, a2), pivot=piv))
        seen.add(sid)
    if not steps:
        raise ProofError("empty trace")
    return ResolutionProof(tuple(steps), steps[-1].id)
