"""Duplicator strategies as symbolic families, and a checker for them.

A family is never materialized.  It is a union of *terms*; a term is a
product of *factors* over disjoint variable sets; a factor is a union of
:class:`StrategyBlock` objects, each denoting the subsets of one generator
assignment that respect a size cap and per-class caps.  Members are capped
at ``k + 2`` variables overall, where ``k`` is the number of KAI pebbles.

Critical positions have ``k + 1`` variables.  A factor may carry a
:class:`PartitionPattern` naming them; a term's critical positions are
those of its factors, and a union's are the positions critical in some term
that no other term contains non-critically.

:func:`check_critical` checks a family against a formula by brute force:
no member falsifies a clause, members are closed under taking subsets, and
every non-critical member with at most ``k + 1`` variables can be extended
by every variable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .cnf import CnfFormula, PartialAssignment
from .gadgets import (CompiledFormula, alpha_inv, carry_blockers, carry_level,
                      increment_at, vname)
from .kai import KaiRule, Player2Strategy, applicable, blockers
from .resolution import BudgetExceeded

SWITCH_A_BLOCKS = ("A0", "A1", "A", "AH", "AGE")
MEMO_LIMIT = 1_000_000


class StrategyError(ValueError):
    pass


def _lits(p) -> frozenset:
    if p is None:
        return frozenset()
    if isinstance(p, PartialAssignment):
        return p.true_lits
    return frozenset(p)


def _vmask(variables: Iterable[int]) -> int:
    m = 0
    for v in variables:
        m |= 1 << v
    return m


def _lmask(lits: Iterable[int]) -> int:
    m = 0
    for x in lits:
        m |= 1 << abs(x)
    return m


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------- blocks


@dataclass(frozen=True)
class StrategyBlock:
    """``{p subset of generator : |p| <= domain_cap, every class cap holds}``."""
    generator: PartialAssignment
    domain_cap: int | None = None
    class_caps: tuple = ()          # ((frozenset of variables, cap), ...)

    def contains(self, p) -> bool:
        lits = _lits(p)
        if not lits <= self.generator.true_lits:
            return False
        if self.domain_cap is not None and len(lits) > self.domain_cap:
            return False
        dom = {abs(x) for x in lits}
        return all(len(dom & cls) <= cap for cls, cap in self.class_caps)


@dataclass(frozen=True)
class PartitionPattern:
    """Positions with two variables in one class and one in each other class."""
    classes: tuple                  # frozensets of variables, one per partition

    def matches(self, lits: frozenset) -> bool:
        k = len(self.classes)
        if len(lits) != k + 1:
            return False
        dom = {abs(x) for x in lits}
        counts = [len(dom & cls) for cls in self.classes]
        return sum(counts) == k + 1 and sorted(counts) == [1] * (k - 1) + [2]


class Factor:
    """A union of blocks over one gadget's variables, with boundary and crit rule."""

    def __init__(self, name: str, blocks: Sequence[StrategyBlock], variables: Iterable[int] = (),
                 boundary: dict | None = None, crit: PartitionPattern | None = None):
        if not blocks:
            raise StrategyError(f"factor {name} has no blocks")
        self.name = name
        self.blocks = list(blocks)
        vs = set(variables)
        for b in self.blocks:
            vs |= b.generator.domain()
        self.variables = frozenset(vs)
        self.mask = _vmask(self.variables)
        self.boundary = dict(boundary or {})
        self.crit = crit
        self._lit_blocks: dict = {}
        self._dom, self._caps, self._dcap = [], [], []
        for bi, b in enumerate(self.blocks):
            for x in b.generator.true_lits:
                self._lit_blocks[x] = self._lit_blocks.get(x, 0) | (1 << bi)
            self._dom.append(_vmask(b.generator.domain()))
            self._caps.append([(_vmask(cls), cap) for cls, cap in b.class_caps])
            self._dcap.append(b.domain_cap)
        self._all = (1 << len(self.blocks)) - 1
        self._simple = all(c is None for c in self._dcap) and not any(self._caps)
        self._crit_cache = None
        self._contains_memo: dict = {}
        self._ext_memo: dict = {}

    def __repr__(self):
        return f"Factor({self.name!r}, {len(self.blocks)} blocks)"

    def valid_blocks(self, lits: frozenset, pm: int) -> list:
        bm = self._all
        for x in lits:
            bm &= self._lit_blocks.get(x, 0)
            if not bm:
                return []
        size = len(lits)
        out = []
        for bi in _bits(bm):
            cap = self._dcap[bi]
            if cap is not None and size > cap:
                continue
            if any((pm & cm).bit_count() > c for cm, c in self._caps[bi]):
                continue
            out.append(bi)
        return out

    def contains(self, lits: frozenset, pm: int | None = None) -> bool:
        hit = self._contains_memo.get(lits)
        if hit is None:
            if len(self._contains_memo) > MEMO_LIMIT:
                self._contains_memo.clear()
            hit = self._contains_memo[lits] = self._contains(lits, pm)
        return hit

    def _contains(self, lits: frozenset, pm: int | None) -> bool:
        bm = self._all
        for x in lits:
            bm &= self._lit_blocks.get(x, 0)
            if not bm:
                return False
        if self._simple:
            return True
        if pm is None:
            pm = _lmask(lits)
        size = len(lits)
        for bi in _bits(bm):
            cap = self._dcap[bi]
            if cap is not None and size > cap:
                continue
            if all((pm & cm).bit_count() <= c for cm, c in self._caps[bi]):
                return True
        return False

    def extension(self, lits: frozenset, pm: int) -> int:
        """Variables ``Z`` outside ``lits`` such that some value keeps membership."""
        hit = self._ext_memo.get(lits)
        if hit is None:
            if len(self._ext_memo) > MEMO_LIMIT:
                self._ext_memo.clear()
            hit = self._ext_memo[lits] = self._extension(lits, pm)
        return hit

    def _extension(self, lits: frozenset, pm: int) -> int:
        size = len(lits)
        ext = 0
        for bi in self.valid_blocks(lits, pm):
            cap = self._dcap[bi]
            if cap is not None and size + 1 > cap:
                continue
            m = self._dom[bi]
            for cm, c in self._caps[bi]:
                if (pm & cm).bit_count() >= c:
                    m &= ~cm
            ext |= m
        return ext & ~pm

    def is_critical(self, lits: frozenset) -> bool:
        return self.crit is not None and self.crit.matches(lits) and self.contains(lits)

    def critical_positions(self) -> frozenset:
        """Every critical position, by pattern iteration over each class's literals."""
        if self._crit_cache is not None:
            return self._crit_cache
        out = set()
        if self.crit is not None:
            classes = self.crit.classes
            universe = [sorted({x for x in self._lit_blocks if abs(x) in cls}, key=abs)
                        for cls in classes]
            for t in range(len(classes)):
                others = [universe[i] for i in range(len(classes)) if i != t]
                for a, b in itertools.combinations(universe[t], 2):
                    if a == -b:
                        continue
                    for rest in itertools.product(*others):
                        cand = frozenset((a, b) + rest)
                        if self._contains(cand, None):
                            out.add(cand)
        self._crit_cache = frozenset(out)
        return self._crit_cache

    def members(self, size: int) -> set:
        """Every member with at most ``size`` variables."""
        out = set()
        for b in self.blocks:
            gen = sorted(b.generator.true_lits, key=abs)
            top = size if b.domain_cap is None else min(size, b.domain_cap)
            for s in range(top + 1):
                for combo in itertools.combinations(gen, s):
                    cand = frozenset(combo)
                    if cand not in out and b.contains(cand):
                        out.add(cand)
        return out

    def member_bound(self, size: int) -> int:
        return sum(comb(len(b.generator.true_lits), s)
                   for b in self.blocks for s in range(size + 1))


# -------------------------------------------------------------- families


class StrategyFamily:
    """Union of terms, each a product of factors over disjoint variables."""

    def __init__(self, terms: Sequence[Sequence[Factor]], k: int, name: str = ""):
        if not terms:
            raise StrategyError("a family needs at least one term")
        self.terms = tuple(tuple(t) for t in terms)
        self.k = k
        self.cap = k + 2
        self.name = name
        self._owners = []
        for t in self.terms:
            own = {}
            for fi, f in enumerate(t):
                for v in f.variables:
                    if v in own:
                        raise StrategyError(f"factors {t[own[v]].name} and {f.name} overlap")
                    own[v] = fi
            self._owners.append(own)
        self.variables = frozenset().union(*(o.keys() for o in self._owners))

    def __repr__(self):
        return f"StrategyFamily({self.name!r}, {len(self.terms)} terms)"

    @property
    def blocks(self) -> list:
        return [b for t in self.terms for f in t for b in f.blocks]

    @property
    def factors(self) -> list:
        seen, out = set(), []
        for t in self.terms:
            for f in t:
                if id(f) not in seen:
                    seen.add(id(f))
                    out.append(f)
        return out

    @property
    def boundary(self) -> dict:
        """Boundary values; ``"unbounded"`` where terms disagree or one leaves it open."""
        maps = []
        for t in self.terms:
            m = {}
            for f in t:
                m.update(f.boundary)
            maps.append(m)
        keys = set().union(*maps)
        out = {}
        for v in keys:
            vals = {m.get(v) for m in maps}
            out[v] = vals.pop() if len(vals) == 1 and None not in vals else "unbounded"
        return out

    def _split(self, ti: int, lits: frozenset):
        own = self._owners[ti]
        parts: dict = {}
        for x in lits:
            fi = own.get(abs(x))
            if fi is None:
                return None
            parts.setdefault(fi, []).append(x)
        return {fi: frozenset(xs) for fi, xs in parts.items()}

    def term_contains(self, ti: int, lits: frozenset) -> bool:
        if len(lits) > self.cap:
            return False
        parts = self._split(ti, lits)
        if parts is None:
            return False
        t = self.terms[ti]
        return all(t[fi].contains(part) for fi, part in parts.items())

    def term_critical(self, ti: int, lits: frozenset) -> bool:
        if len(lits) != self.k + 1:
            return False
        parts = self._split(ti, lits)
        if parts is None or len(parts) != 1:
            return False
        (fi, part), = parts.items()
        return self.terms[ti][fi].is_critical(part)

    def contains(self, p) -> bool:
        lits = _lits(p)
        return any(self.term_contains(ti, lits) for ti in range(len(self.terms)))

    def noncritical_member(self, p) -> bool:
        lits = _lits(p)
        return any(self.term_contains(ti, lits) and not self.term_critical(ti, lits)
                   for ti in range(len(self.terms)))

    def is_critical(self, p) -> bool:
        lits = _lits(p)
        crit = False
        for ti in range(len(self.terms)):
            if not self.term_contains(ti, lits):
                continue
            if self.term_critical(ti, lits):
                crit = True
            else:
                return False
        return crit

    def classify(self, lits: frozenset):
        """``(member, critical, extension mask)`` in one pass over the terms."""
        pm = _lmask(lits)
        member = crit = noncrit = False
        ext = 0
        room = len(lits) + 1 <= self.cap
        for ti, t in enumerate(self.terms):
            if len(lits) > self.cap:
                break
            parts = self._split(ti, lits)
            if parts is None:
                continue
            if not all(t[fi].contains(part) for fi, part in parts.items()):
                continue
            member = True
            if (len(lits) == self.k + 1 and len(parts) == 1
                    and t[next(iter(parts))].crit is not None
                    and t[next(iter(parts))].crit.matches(lits)):
                crit = True
            else:
                noncrit = True
            if room:
                for fi, f in enumerate(t):
                    ext |= f.extension(parts.get(fi, frozenset()), pm & f.mask)
        return member, crit and not noncrit, ext & ~pm

    def extension_mask(self, p) -> int:
        lits = _lits(p)
        pm = _lmask(lits)
        ext = 0
        for ti, t in enumerate(self.terms):
            if not self.term_contains(ti, lits) or len(lits) + 1 > self.cap:
                continue
            parts = self._split(ti, lits)
            for fi, f in enumerate(t):
                part = parts.get(fi, frozenset())
                ext |= f.extension(part, pm & f.mask)
        return ext & ~pm

    def critical_positions(self) -> set:
        """Enumerate ``crit`` from the factors' patterns, then apply the union rule."""
        cands = set()
        for f in self.factors:
            cands |= f.critical_positions()
        return {p for p in cands if self.is_critical(p)}


def cl(assignment, k: int, *, variables: Iterable[int] = (), boundary_vars: Iterable[int] = (),
       name: str = "cl") -> StrategyFamily:
    """All subsets of one assignment, under the ambient cap only; no critical positions."""
    a = assignment if isinstance(assignment, PartialAssignment) else \
        PartialAssignment.from_literals(_lits(assignment))
    bd = {v: a[v] for v in boundary_vars if v in a.domain()}
    return StrategyFamily([[Factor(name, [StrategyBlock(a)], variables, bd)]], k, name)


def connectable(g: StrategyFamily, h: StrategyFamily, links: Iterable = ()):
    """``None`` when ``g`` and ``h`` can be composed, otherwise the reason."""
    if g.variables & h.variables:
        v = min(g.variables & h.variables)
        return f"shared variable {v}"
    bg, bh = g.boundary, h.boundary
    for a, b in links:
        if a in h.variables and b in g.variables:
            a, b = b, a
        if a not in g.variables or b not in h.variables:
            continue
        x, y = bg.get(a, "unbounded"), bh.get(b, "unbounded")
        if x == "unbounded" or y == "unbounded" or x != y:
            return f"boundary mismatch on {a} <-> {b}: {x} vs {y}"
    return None


def compose(g: StrategyFamily, h: StrategyFamily, links: Iterable = (),
            name: str | None = None) -> StrategyFamily:
    """``{a | b : a in g, b in h}``; critical positions are those of either side."""
    if g.k != h.k:
        raise StrategyError("families use different pebble counts")
    links = list(links)
    why = connectable(g, h, links)
    if why:
        raise StrategyError(f"not connectable: {why}")
    terms = [tg + th for tg in g.terms for th in h.terms]
    return StrategyFamily(terms, g.k, name or f"{g.name}+{h.name}")


def compose_all(families: Sequence[StrategyFamily], links: Iterable = (),
                name: str = "") -> StrategyFamily:
    links = list(links)
    out = families[0]
    for f in families[1:]:
        out = compose(out, f, links)
    out.name = name or out.name
    return out


def union(families: Sequence[StrategyFamily], name: str = "") -> StrategyFamily:
    ks = {f.k for f in families}
    if len(ks) != 1:
        raise StrategyError("families use different pebble counts")
    terms = [t for f in families for t in f.terms]
    return StrategyFamily(terms, ks.pop(), name or "|".join(f.name for f in families))


# --------------------------------------------------------------- checking


def format_position(p, names: dict | None = None) -> str:
    lits = sorted(_lits(p), key=abs)
    show = (lambda v: names.get(v, str(v))) if names else str
    return "{" + ",".join(f"{show(abs(x))}={int(x > 0)}" for x in lits) + "}"


@dataclass
class CheckReport:
    name: str
    mode: str
    positions: int = 0
    critical: int = 0
    failures: dict = field(default_factory=dict)     # check -> list of witnesses
    checks: tuple = ("boundary", "clauses", "downward-closure", "extension", "crit-shape")
    names: dict | None = field(default=None, repr=False)
    critical_seen: set = field(default_factory=set, repr=False)

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def fail(self, check: str, witness):
        self.failures.setdefault(check, []).append(witness)

    def lines(self) -> list:
        out = []
        for c in self.checks:
            bad = self.failures.get(c)
            if bad:
                w = bad[0]
                shown = w if isinstance(w, str) else format_position(w, self.names)
                out.append(f"{c} FAIL witness={shown}")
            else:
                out.append(f"{c} PASS")
        return out

    def rows(self) -> list:
        return [(self.name, c, "FAIL" if self.failures.get(c) else "PASS",
                 len(self.failures.get(c, ()))) for c in self.checks]

    def __str__(self):
        head = f"# {self.name} mode={self.mode} positions={self.positions} crit={self.critical}"
        return "\n".join([head] + self.lines())


class _Checker:
    def __init__(self, formula: CnfFormula, H: StrategyFamily, report: CheckReport):
        self.H = H
        self.k = H.k
        self.report = report
        self.universe = _vmask(range(1, formula.variable_count + 1))
        self.seen: set = set()
        self.max_witnesses = 20

    def _fail(self, check, witness):
        if len(self.report.failures.get(check, ())) < self.max_witnesses:
            self.report.fail(check, witness)
        else:
            self.report.failures[check].append(witness)

    def position(self, lits: frozenset, closure: bool = True):
        if lits in self.seen:
            return
        self.seen.add(lits)
        H, k = self.H, self.k
        self.report.positions += 1
        member, critical, ext = H.classify(lits)
        if not member:
            self._fail("downward-closure", lits)
            return
        if closure:
            for x in lits:
                if not H.contains(lits - {x}):
                    self._fail("downward-closure", lits - {x})
                    break
        if critical:
            self.report.critical += 1
            self.report.critical_seen.add(lits)
            if len(lits) != k + 1:
                self._fail("crit-shape", lits)
            return
        if len(lits) > k + 1:
            return
        need = self.universe & ~_lmask(lits)
        missing = need & ~ext
        if missing:
            z = next(_bits(missing))
            self._fail("extension", f"{format_position(lits, self.report.names)} var={z}")


def _check_static(formula: CnfFormula, H: StrategyFamily, report: CheckReport):
    for f in H.factors:
        for b in f.blocks:
            for v, bit in f.boundary.items():
                if v in b.generator.domain() and b.generator[v] != bit:
                    report.fail("boundary", f"{f.name}: var {v}")
                    break
    for c in formula.clauses:
        if c.is_tautology or c.width > H.cap:
            continue
        q = frozenset(-x for x in c.lits)
        if H.contains(q):
            report.fail("clauses", q)


def _by_size(f: Factor, size: int) -> dict:
    cache = f.__dict__.setdefault("_members_cache", {})
    if size not in cache:
        by: dict = {}
        for m in f.members(size):
            by.setdefault(len(m), []).append(m)
        cache[size] = by
    return cache[size]


def _term_members(H: StrategyFamily, ti: int, size: int):
    per = [_by_size(f, size) for f in H.terms[ti]]

    def rec(i, budget, acc):
        if i == len(per):
            yield acc
            return
        for s, ms in per[i].items():
            if s > budget:
                continue
            for m in ms:
                yield from rec(i + 1, budget - s, acc | m)

    yield from rec(0, size, frozenset())


def _term_count(H: StrategyFamily, ti: int, size: int, limit: int) -> int:
    """Exact number of products with at most ``size`` literals (stops past ``limit``)."""
    dist = [1] + [0] * size
    for f in H.terms[ti]:
        if f.member_bound(size) > 50 * limit:
            return limit + 1
        counts = {s: len(ms) for s, ms in _by_size(f, size).items()}
        new = [0] * (size + 1)
        for a, x in enumerate(dist):
            if x:
                for s, c in counts.items():
                    if a + s <= size:
                        new[a + s] += x * c
        dist = new
    return sum(dist)


def check_critical(formula: CnfFormula, H: StrategyFamily, *, mode: str = "exhaustive",
                   trials: int = 100_000, seed: int = 0, max_positions: int = 10**7,
                   names: dict | None = None) -> CheckReport:
    """Check the critical-strategy conditions of ``H`` against ``formula``.

    ``mode="exhaustive"`` enumerates every member with at most ``k + 1``
    variables; ``mode="sampled"`` draws ``trials`` random members.  Clause
    and boundary checks are complete in both modes.
    """
    report = CheckReport(H.name, mode, names=names if names is not None else formula.name_table)
    _check_static(formula, H, report)
    chk = _Checker(formula, H, report)
    size = H.k + 1
    if mode == "exhaustive":
        bound = sum(_term_count(H, ti, size, max_positions) for ti in range(len(H.terms)))
        if bound > max_positions:
            raise BudgetExceeded("position", max_positions)
        for ti in range(len(H.terms)):
            for lits in _term_members(H, ti, size):
                chk.position(lits)
    elif mode == "sampled":
        rng = random.Random(seed)
        for _ in range(trials):
            chk.position(_sample_member(H, rng, size))
        report.positions = trials
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report


def _sample_member(H: StrategyFamily, rng: random.Random, size: int) -> frozenset:
    """A random member; half the draws stay inside a single factor."""
    t = H.terms[rng.randrange(len(H.terms))]
    blocks = [f.blocks[rng.randrange(len(f.blocks))] for f in t]
    if rng.random() < 0.5:
        i = rng.randrange(len(t))
        pool = sorted(blocks[i].generator.true_lits, key=abs)
    else:
        pool = sorted(set().union(*(b.generator.true_lits for b in blocks)), key=abs)
    s = rng.randint(0, min(size, len(pool)))
    for _ in range(50):
        cand = frozenset(rng.sample(pool, s))
        if H.contains(cand):
            return cand
        s = max(0, s - 1) if rng.random() < 0.3 else s
    return frozenset()


@dataclass
class InclusionResult:
    name: str
    critical: int
    passed: bool
    witness: frozenset | None = None

    def line(self, names: dict | None = None) -> str:
        head = f"inclusion[{self.name}] crit={self.critical}"
        if self.passed:
            return f"{head} PASS"
        return f"{head} FAIL witness={format_position(self.witness, names)}"


def check_crit_inclusions(items: Sequence, max_positions: int = 10**7) -> list:
    """For ``(name, family, partners)`` items: is every critical position of
    ``family`` a non-critical member of some partner?"""
    out = []
    for name, fam, partners in items:
        crit = fam.critical_positions()
        if len(crit) > max_positions:
            raise BudgetExceeded("crit", max_positions)
        witness = None
        for p in sorted(crit, key=lambda q: sorted(q, key=abs)):
            if not any(g.noncritical_member(p) for g in partners):
                witness = p
                break
        out.append(InclusionResult(name, len(crit), witness is None, witness))
    return out


# ------------------------------------------------------ gadget assignments


def _xy(gid: str, block: str, k: int, n: int, pos: Sequence[int] | None,
        skip: Iterable[int] = ()) -> dict:
    """``block_j^i -> 1`` iff ``j = pos(i)`` and ``i`` not skipped; all 0 when ``pos`` is None."""
    skip = set(skip)
    return {vname(gid, block, i=i, j=j):
            int(pos is not None and i not in skip and pos[i - 1] == j)
            for i in range(1, k + 1) for j in range(1, n + 1)}


def switch_impasse_assignment(gid: str, k: int, n: int, p: Sequence[int], T) -> dict:
    T = set(T)
    if not T or not T <= set(range(1, k + 1)):
        raise StrategyError(f"impasse set {sorted(T)} must be a nonempty subset of [1,{k}]")
    tstar = min(T)
    on = lambda i, j: i not in T and j == p[i - 1]
    a = _xy(gid, "X", k, n, p, T)
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            a[vname(gid, "A0", i=i, j=j)] = int(on(i, j))
            a[vname(gid, "A1", i=i, j=j)] = 0
            for c in range(1, 5):
                a[vname(gid, "A", i=i, j=j, c=c)] = int(on(i, j) and c == 1)
                for l in range(1, k + 1):
                    a[vname(gid, "AH", i=i, j=j, c=c, l=l)] = int(on(i, j) and c == 1 and l == i)
                for l in range(2, k):
                    a[vname(gid, "AGE", i=i, j=j, c=c, l=l)] = int(on(i, j) and c == 1 and l <= i)
    for l in range(1, k + 1):
        a[vname(gid, "B", l=l)] = int(l not in T)
    for l in range(2, k):
        a[vname(gid, "BGE", l=l)] = int(l > tstar)
    a[vname(gid, "Bflag")] = 0
    a.update(_xy(gid, "Y", k, n, None))
    return a


def switch_output_assignment(gid: str, k: int, n: int, p: Sequence[int], b: Sequence[int],
                             sigma: Sequence[int]) -> dict:
    a = _xy(gid, "X", k, n, None)
    for i in range(1, k + 1):
        bi, si = b[i - 1], sigma[i - 1]
        for j in range(1, n + 1):
            here = j == p[i - 1]
            a[vname(gid, "A0", i=i, j=j)] = int(here and bi in (1, 2))
            a[vname(gid, "A1", i=i, j=j)] = int(here and bi in (3, 4))
            for c in range(1, 5):
                cell = here and c == bi
                a[vname(gid, "A", i=i, j=j, c=c)] = int(cell)
                for l in range(1, k + 1):
                    a[vname(gid, "AH", i=i, j=j, c=c, l=l)] = int(cell and l == si)
                for l in range(2, k):
                    a[vname(gid, "AGE", i=i, j=j, c=c, l=l)] = int(cell and l <= si)
    for l in range(1, k + 1):
        a[vname(gid, "B", l=l)] = 1
    for l in range(2, k):
        a[vname(gid, "BGE", l=l)] = 1
    a[vname(gid, "Bflag")] = 1
    a.update(_xy(gid, "Y", k, n, p))
    return a


def switch_input_assignment(gid: str, k: int, n: int, p: Sequence[int], t: int,
                            b: Sequence[int], sigma: Sequence[int]) -> dict:
    """The partial input assignment; the cells left open on partition ``t`` are absent."""
    a = _xy(gid, "X", k, n, p)
    for i in range(1, k + 1):
        bi, si = b[i - 1], sigma[i - 1]
        for j in range(1, n + 1):
            here = j == p[i - 1]
            a[vname(gid, "A0", i=i, j=j)] = int(here and bi in (1, 2))
            a[vname(gid, "A1", i=i, j=j)] = int(here and bi in (3, 4))
            for c in range(1, 5):
                cell = here and c == bi
                rows = [(vname(gid, "A", i=i, j=j, c=c), cell)]
                rows += [(vname(gid, "AH", i=i, j=j, c=c, l=l), cell and l == si)
                         for l in range(1, k + 1)]
                rows += [(vname(gid, "AGE", i=i, j=j, c=c, l=l), cell and l <= si)
                         for l in range(2, k)]
                for var, val in rows:
                    if val and i == t:
                        continue
                    a[var] = int(val)
    st = sigma[t - 1]
    for l in range(1, k + 1):
        a[vname(gid, "B", l=l)] = int(l != st)
    for l in range(2, k):
        a[vname(gid, "BGE", l=l)] = int(l > st)
    a[vname(gid, "Bflag")] = 0
    a.update(_xy(gid, "Y", k, n, None))
    return a


def choice_assignment(gid: str, k: int, n: int, m: int, p: Sequence[int] | None,
                      q: int | None) -> dict:
    a = _xy(gid, "X", k, n, p)
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            here = p is not None and j == p[i - 1]
            for l in range(1, m + 1):
                a[vname(gid, "Y", i=i, j=j, q=l)] = int(here and l == q)
            for l in range(2, m):
                a[vname(gid, "E", i=i, j=j, q=l)] = int(here and q is not None and l <= q)
    return a


def rule_image(rule: KaiRule, p: Sequence[int]) -> tuple:
    """``r(p)``: pebble ``c`` moved to ``w``, whether or not the rule applies."""
    out = list(p)
    out[rule.c - 1] = rule.w
    return tuple(out)


# ---------------------------------------------------------- make_strategy


def _check_pos(p, k: int, n: int, what: str = "position") -> tuple:
    p = tuple(p)
    if len(p) != k or not all(1 <= x <= n for x in p):
        raise StrategyError(f"{what} {p} is not a map [1,{k}] -> [1,{n}]")
    return p


class StrategyBuilder:
    """Makes the gadget families of one compiled formula, sharing equal factors."""

    def __init__(self, cf: CompiledFormula):
        self.cf = cf
        self._factors: dict = {}

    # -- plumbing
    def _numbered(self, values: dict) -> PartialAssignment:
        return PartialAssignment({self.cf.var_of[v]: b for v, b in values.items()})

    def _gadget_vars(self, gid: str) -> frozenset:
        return frozenset(i for v, i in self.cf.var_of.items() if v.gadget == gid)

    def _boundary_vars(self, gid: str) -> set:
        g = self.cf.gadget(gid)
        return {self.cf.var_of[v] for blk in g.boundary.values() for v in blk.vars.values()}

    def _params(self, gid: str) -> dict:
        return self.cf.gadget(gid).params

    def _total_factor(self, key, gid: str, values: dict, variables=None) -> Factor:
        if key not in self._factors:
            a = self._numbered(values)
            bvars = self._boundary_vars(gid)
            bd = {v: a[v] for v in bvars if v in a.domain()}
            vs = variables if variables is not None else self._gadget_vars(gid)
            self._factors[key] = Factor(f"{key[0]}<{gid}>", [StrategyBlock(a)], vs, bd)
        return self._factors[key]

    def _family(self, factors: Sequence[Factor], name: str) -> StrategyFamily:
        return StrategyFamily([list(factors)], self._k(), name)

    def _k(self) -> int:
        g = self.cf.gadgets[0]
        return g.params["k"]

    def _partition_classes(self, gid: str, k: int) -> tuple:
        cls = {i: set() for i in range(1, k + 1)}
        for v, idx in self.cf.var_of.items():
            if v.gadget == gid and v.block in SWITCH_A_BLOCKS:
                cls[v.get("i")].add(idx)
        return tuple(frozenset(cls[i]) for i in range(1, k + 1))

    # -- rule gadgets
    def rule_factor(self, gid: str, p=None) -> Factor:
        par = self._params(gid)
        k, n, rule = par["k"], par["n"], par["rule"]
        dup = self.cf.gadget(gid).kind == "dup_rule"
        if p is None:
            vals = {**_xy(gid, "X", k, n, None), **_xy(gid, "Y", k, n, None)}
            return self._total_factor(("R0", gid), gid, vals)
        p = _check_pos(p, k, n)
        if dup:
            if not applicable(rule, p):
                raise StrategyError(f"rule {tuple(rule)} is not applicable to {p}")
            y = _xy(gid, "Y", k, n, rule_image(rule, p))
        else:
            y = _xy(gid, "Y", k, n, rule_image(rule, p), skip=blockers(rule, p))
        return self._total_factor(("R", gid, p), gid, {**_xy(gid, "X", k, n, p), **y})

    def increment_factor(self, gid: str, p=None) -> Factor:
        par = self._params(gid)
        k, n, level = par["k"], par["n"], par["level"]
        if p is None:
            vals = {**_xy(gid, "X", k, n, None), **_xy(gid, "Y", k, n, None)}
            return self._total_factor(("R0", gid), gid, vals)
        p = _check_pos(p, k, n)
        T = carry_blockers(p, level, n)
        img = tuple(min(x, n) for x in increment_at(p, level, n))
        vals = {**_xy(gid, "X", k, n, p), **_xy(gid, "Y", k, n, img, skip=T)}
        return self._total_factor(("R", gid, p), gid, vals)

    def hub_factor(self, gid: str, p=None) -> Factor:
        par = self._params(gid)
        k, n = par["k"], par["n"]
        p = None if p is None else _check_pos(p, k, n)
        return self._total_factor(("hub", gid, p), gid, _xy(gid, "X", k, n, p))

    # -- switch
    def impasse_factor(self, gid: str, p, T) -> Factor:
        par = self._params(gid)
        k, n = par["k"], par["n"]
        p = _check_pos(p, k, n)
        T = frozenset(T)
        return self._total_factor(("imp", gid, p, T), gid,
                                  switch_impasse_assignment(gid, k, n, p, T))

    def output_factor(self, gid: str, p) -> Factor:
        par = self._params(gid)
        k, n = par["k"], par["n"]
        p = _check_pos(p, k, n)
        key = ("out", gid, p)
        if key not in self._factors:
            blocks = [StrategyBlock(self._numbered(switch_output_assignment(gid, k, n, p, b, s)))
                      for b in itertools.product(range(1, 5), repeat=k)
                      for s in itertools.permutations(range(1, k + 1))]
            bd = {**_xy(gid, "X", k, n, None), **_xy(gid, "Y", k, n, p)}
            self._factors[key] = Factor(f"out{p}<{gid}>", blocks, self._gadget_vars(gid),
                                        {self.cf.var_of[v]: x for v, x in bd.items()})
        return self._factors[key]

    def input_factor(self, gid: str, p) -> Factor:
        par = self._params(gid)
        k, n = par["k"], par["n"]
        p = _check_pos(p, k, n)
        key = ("in", gid, p)
        if key not in self._factors:
            classes = self._partition_classes(gid, k)
            blocks = [StrategyBlock(self._numbered(switch_input_assignment(gid, k, n, p, t, b, s)),
                                    k + 2, ((classes[t - 1], 2),))
                      for t in range(1, k + 1)
                      for b in itertools.product(range(1, 5), repeat=k)
                      for s in itertools.permutations(range(1, k + 1))]
            bd = {**_xy(gid, "X", k, n, p), **_xy(gid, "Y", k, n, None)}
            self._factors[key] = Factor(f"in{p}<{gid}>", blocks, self._gadget_vars(gid),
                                        {self.cf.var_of[v]: x for v, x in bd.items()},
                                        PartitionPattern(classes))
        return self._factors[key]

    # -- choice
    def choice_factor(self, gid: str, p=None, q=None) -> Factor:
        par = self._params(gid)
        k, n, m, theta = par["k"], par["n"], par["m"], par["theta"]
        if p is None:
            return self._total_factor(("C0", gid), gid, choice_assignment(gid, k, n, m, None, None))
        p = _check_pos(p, k, n)
        if theta in p:
            raise StrategyError(f"position {p} holds the goal {theta}")
        if q is None or not 1 <= q <= m:
            raise StrategyError(f"choice column {q} outside [1, {m}]")
        return self._total_factor(("C", gid, p, q), gid, choice_assignment(gid, k, n, m, p, q))

    # -- init
    def init_family(self, gid: str, which: str, p=None) -> StrategyFamily:
        par = self._params(gid)
        k, n, s = par["k"], par["n"], par["start"]
        m1, m2 = f"{gid}[M1]", f"{gid}[M2]"
        own = self._gadget_vars(gid)

        def outer(s1, s2, pos):
            vals = {vname(gid, "S1"): s1, vname(gid, "S2"): s2, **_xy(gid, "Y", k, n, pos)}
            return self._total_factor(("init", gid, s1, s2, pos), gid, vals, own)

        if which == "part1":
            return self._family([self.input_factor(m1, s), self.output_factor(m2, s),
                                 outer(1, 0, s)], "I1")
        if which == "part2":
            return self._family([self.output_factor(m1, s), self.input_factor(m2, s),
                                 outer(0, 1, s)], "I2")
        if which == "winning":
            return union([self.init_family(gid, "part1"), self.init_family(gid, "part2")],
                         "Iinit")
        if which == "position":
            p = _check_pos(p, k, n)
            return self._family([self.input_factor(m1, s), self.input_factor(m2, s),
                                 outer(1, 1, p)], f"Iinit{p}")
        if which == "zero":
            return self._family([self.input_factor(m1, s), self.input_factor(m2, s),
                                 outer(1, 1, None)], "Iinit0")
        raise StrategyError(f"unknown init family {which!r}")


def _builder(cf: CompiledFormula) -> StrategyBuilder:
    b = getattr(cf, "_strategy_builder", None)
    if b is None:
        b = StrategyBuilder(cf)
        cf._strategy_builder = b
    return b


STRATEGY_KINDS = ("rule_spoiler", "rule_duplicator", "switch_impasse", "switch_output",
                  "switch_input", "init", "choice", "increment", "counter_hub")


def make_strategy(kind: str, cf: CompiledFormula, gadget_id: str | None = None,
                  **params) -> StrategyFamily:
    """One gadget-level Duplicator family on ``cf``.

    ``p`` is a position tuple (``None`` for the all-zero variant where one
    exists); ``T`` the impasse set; ``q`` the choice column; ``which`` picks
    an init family (``winning``, ``part1``, ``part2``, ``position``, ``zero``).
    """
    B = _builder(cf)
    gid = gadget_id or cf.gadgets[0].gadget_id
    p = params.get("p")
    k = B._k()
    if kind in ("rule_spoiler", "rule_duplicator"):
        want = "spoiler_rule" if kind == "rule_spoiler" else "dup_rule"
        if cf.gadget(gid).kind != want:
            raise StrategyError(f"{gid} is not a {want} gadget")
        f = B.rule_factor(gid, p)
    elif kind == "switch_impasse":
        f = B.impasse_factor(gid, p, params["T"])
    elif kind == "switch_output":
        f = B.output_factor(gid, p)
    elif kind == "switch_input":
        f = B.input_factor(gid, p)
    elif kind == "init":
        return B.init_family(gid, params.get("which", "winning"), p)
    elif kind == "choice":
        f = B.choice_factor(gid, p, params.get("q"))
    elif kind == "increment":
        f = B.increment_factor(gid, p)
    elif kind == "counter_hub":
        f = B.hub_factor(gid, p)
    else:
        raise StrategyError(f"unknown strategy kind {kind!r}")
    return StrategyFamily([[f]], k, f.name)


# --------------------------------------------------------- global families


def _links_for(cf: CompiledFormula) -> list:
    return list(cf.links)


def global_families(cf: CompiledFormula, strategy: Player2Strategy) -> dict:
    """The auxiliary families ``H^init``, ``H^1_p`` (p in K1) and ``H^2_p`` (p in K2).

    Keys are ``("init",)``, ``("one", p)`` and ``("two", p)``.  Works on both
    the per-rule choice layout and the shared choice layout.
    """
    if cf.variant not in ("gamma", "gamma_prime"):
        raise StrategyError("global families need a compiled KAI formula")
    G = cf.params["instance"]
    B = _builder(cf)
    k = G.k
    prime = cf.variant == "gamma_prime"
    R = range(1, G.m + 1)
    links = _links_for(cf)

    def choice(p=None, q=None):
        if prime:
            return [B.choice_factor("C", p, q)] if G.m else []
        return [B.choice_factor(f"C[r{r}]", p, q) for r in R]

    def one(p, init: StrategyFamily, name: str) -> StrategyFamily:
        parts = [init]
        rest = choice()
        for r in R:
            rule = G.rules[r - 1]
            rest.append(B.rule_factor(f"D[r{r}]"))
            rest.append(B.output_factor(f"MD[r{r}]", p))
            rest.append(B.rule_factor(f"S[r{r}]", p))
            img = rule_image(rule, p)
            if applicable(rule, p):
                rest.append(B.input_factor(f"MS[r{r}]", img))
            else:
                rest.append(B.impasse_factor(f"MS[r{r}]", img, blockers(rule, p)))
        parts.append(StrategyFamily([rest], k, "rest"))
        return compose_all(parts, links, name)

    def two(p) -> StrategyFamily:
        kap = strategy.kappa[p]
        rest = choice(p, kap)
        for r in R:
            rest.append(B.rule_factor(f"S[r{r}]"))
            rest.append(B.output_factor(f"MS[r{r}]", p))
            if r == kap:
                rest.append(B.rule_factor(f"D[r{r}]", p))
                rest.append(B.input_factor(f"MD[r{r}]", rule_image(G.rules[r - 1], p)))
            else:
                rest.append(B.rule_factor(f"D[r{r}]"))
                rest.append(B.impasse_factor(f"MD[r{r}]", p, range(1, k + 1)))
        return compose_all([B.init_family("Is", "zero"), StrategyFamily([rest], k, "rest")],
                           links, f"H2{p}")

    out = {("init",): one(G.start, B.init_family("Is", "winning"), "Hinit")}
    for p in sorted(strategy.K1):
        out[("one", p)] = one(p, B.init_family("Is", "position", p), f"H1{p}")
    for p in sorted(strategy.K2):
        out[("two", p)] = two(p)
    return out


def global_inclusions(cf: CompiledFormula, strategy: Player2Strategy,
                      families: dict | None = None) -> list:
    """The three inclusion displays as ``(name, family, partners)`` items."""
    G = cf.params["instance"]
    H = families or global_families(cf, strategy)
    succ = lambda p: [rule_image(r, p) for r in G.rules if applicable(r, p)]
    items = [("Hinit", H[("init",)], [H[("two", q)] for q in succ(G.start)])]
    for p in sorted(strategy.K1):
        items.append((f"H1{p}", H[("one", p)],
                      [H[("init",)]] + [H[("two", q)] for q in succ(p)]))
    for p in sorted(strategy.K2):
        nxt = rule_image(G.rules[strategy.kappa[p] - 1], p)
        items.append((f"H2{p}", H[("two", p)], [H[("init",)], H[("one", nxt)]]))
    return items


def counter_last_index(n: int, k: int) -> int:
    """Largest ``b`` whose successor ``alpha_inv(b + 1)`` still has a last digit below ``n``."""
    return (n - 1) * n ** (k - 1) - 1


def counter_families(cf: CompiledFormula) -> dict:
    """``("init",)``, ``("one", b)`` for ``1 <= b <= B`` and ``("two", b)`` for ``0 <= b <= B``."""
    if cf.variant != "counter":
        raise StrategyError("counter families need a compiled counter formula")
    n, k = cf.params["n"], cf.params["k"]
    B = _builder(cf)
    last = counter_last_index(n, k)
    links = _links_for(cf)
    L = range(1, k + 1)

    def one(b: int, init: StrategyFamily, name: str) -> StrategyFamily:
        p = alpha_inv(b, n, k)
        lp = carry_level(p, n)
        rest = [B.hub_factor("CTR", p), B.output_factor("M", p)]
        for l in L:
            rest.append(B.increment_factor(f"S[l{l}]", p))
            if l == lp:
                rest.append(B.input_factor(f"M[l{l}]", alpha_inv(b + 1, n, k)))
            else:
                img = tuple(min(x, n) for x in increment_at(p, l, n))
                rest.append(B.impasse_factor(f"M[l{l}]", img, carry_blockers(p, l, n)))
        return compose_all([init, StrategyFamily([rest], k, "rest")], links, name)

    def two(b: int) -> StrategyFamily:
        nxt = alpha_inv(b + 1, n, k)
        rest = [B.hub_factor("CTR"), B.input_factor("M", nxt)]
        for l in L:
            rest.append(B.increment_factor(f"S[l{l}]"))
            rest.append(B.output_factor(f"M[l{l}]", nxt))
        return compose_all([B.init_family("Is", "zero"), StrategyFamily([rest], k, "rest")],
                           links, f"H2[{b}]")

    out = {("init",): one(0, B.init_family("Is", "winning"), "Hinit")}
    for b in range(1, last + 1):
        p = alpha_inv(b, n, k)
        out[("one", b)] = one(b, B.init_family("Is", "position", p), f"H1[{b}]")
    for b in range(0, last + 1):
        out[("two", b)] = two(b)
    return out


def counter_inclusions(cf: CompiledFormula, families: dict | None = None) -> list:
    n, k = cf.params["n"], cf.params["k"]
    H = families or counter_families(cf)
    last = counter_last_index(n, k)
    items = [("Hinit", H[("init",)], [H[("two", 0)]])]
    for b in range(1, last + 1):
        items.append((f"H1[{b}]", H[("one", b)], [H[("two", b)], H[("init",)]]))
    for b in range(0, last):
        items.append((f"H2[{b}]", H[("two", b)], [H[("one", b + 1)], H[("init",)]]))
    return items


def global_strategy(families: dict, name: str = "H") -> StrategyFamily:
    """The union of all auxiliary families."""
    return union(list(families.values()), name)
