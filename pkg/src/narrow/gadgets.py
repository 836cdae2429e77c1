"""Gadget clause sets, block wiring, and whole-formula compilation.

Every gadget is built over structured variable names (:class:`VarName`) and
only numbered when a :class:`CompiledFormula` is assembled.  Numbering is
deterministic: gadgets in compilation order, variables in declaration order
inside a gadget, indices lexicographic in ``(i, j, c, l, q)``.

Boolean ``X(B)_j^i`` means "pebble ``i`` is on node ``j``" on block ``B``.
Implications ``a -> b`` are emitted as ``{-a, b}`` and ``a & b -> c`` as
``{-a, -b, c}``.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .cnf import Clause, CnfFormula, PartialAssignment, emit_dimacs, emit_name_table
from .kai import KaiInstance, KaiRule

INDEX_ORDER = ("i", "j", "c", "l", "q")

SWITCH_BLOCKS = ("X", "A0", "A1", "A", "AH", "AGE", "B", "BGE", "Bflag", "Y")


class VarName(NamedTuple):
    gadget: str
    block: str
    index: tuple = ()  # ((key, value), ...) in INDEX_ORDER

    def __str__(self) -> str:
        if not self.index:
            return f"{self.gadget}.{self.block}"
        inner = ",".join(f"{k}={v}" for k, v in self.index)
        return f"{self.gadget}.{self.block}[{inner}]"

    def get(self, key: str):
        return dict(self.index).get(key)

    @classmethod
    def parse(cls, text: str) -> "VarName":
        gadget, _, rest = text.partition(".")
        if "[" in rest:
            block, _, inner = rest.partition("[")
            pairs = tuple((k, int(v)) for k, v in
                          (item.split("=") for item in inner.rstrip("]").split(",") if item))
        else:
            block, pairs = rest, ()
        return cls(gadget, block, pairs)


def vname(gadget: str, block: str, **idx) -> VarName:
    return VarName(gadget, block, tuple((k, idx[k]) for k in INDEX_ORDER if k in idx))


Lit = tuple  # (VarName, bool)


@dataclass
class Block:
    """A boundary block: ``(i, j)`` -> variable name."""
    name: str
    vars: dict

    def shape(self) -> tuple:
        return tuple(sorted(self.vars))


@dataclass
class GadgetInstance:
    kind: str
    gadget_id: str
    params: dict
    variables: list
    clauses: list
    boundary: dict = field(default_factory=dict)
    subgadgets: list = field(default_factory=list)

    def all_variables(self) -> list:
        out = []
        for sub in self.subgadgets:
            out.extend(sub.all_variables())
        out.extend(self.variables)
        return out

    def all_clauses(self) -> list:
        out = []
        for sub in self.subgadgets:
            out.extend(sub.all_clauses())
        out.extend(self.clauses)
        return out

    def block(self, name: str) -> Block:
        return self.boundary[name]


class GadgetError(ValueError):
    pass


class _Builder:
    def __init__(self, gadget_id: str):
        self.gid = gadget_id
        self.variables: list = []
        self.clauses: list = []
        self._known: set = set()

    def declare(self, block: str, **idx) -> VarName:
        v = vname(self.gid, block, **idx)
        if v not in self._known:
            self._known.add(v)
            self.variables.append(v)
        return v

    def v(self, block: str, **idx) -> VarName:
        v = vname(self.gid, block, **idx)
        if v not in self._known:
            raise GadgetError(f"undeclared variable {v}")
        return v

    def clause(self, *lits: Lit):
        self.clauses.append(tuple(lits))

    def implies(self, a: VarName, *alternatives: VarName):
        self.clause((a, False), *((b, True) for b in alternatives))

    def and_implies(self, a: VarName, b: VarName, c: VarName):
        self.clause((a, False), (b, False), (c, True))

    def nand(self, a: VarName, b: VarName):
        self.clause((a, False), (b, False))

    def xy_block(self, block: str, k: int, n: int) -> Block:
        return Block(block, {(i, j): self.v(block, i=i, j=j)
                             for i in range(1, k + 1) for j in range(1, n + 1)})

    def declare_xy(self, block: str, k: int, n: int):
        for i in range(1, k + 1):
            for j in range(1, n + 1):
                self.declare(block, i=i, j=j)


def _check_kn(k: int, n: int):
    if k < 2:
        raise GadgetError(f"need k >= 2 pebbles, got {k}")
    if n < 2:
        raise GadgetError(f"need n >= 2 nodes, got {n}")


def _check_rule(rule: KaiRule, k: int, n: int):
    for x in (rule.u, rule.v, rule.w):
        if not 1 <= x <= n:
            raise GadgetError(f"rule node {x} outside [1, {n}]")
    for x in (rule.c, rule.d):
        if not 1 <= x <= k:
            raise GadgetError(f"rule pebble {x} outside [1, {k}]")


def _rule_gadget(gid: str, k: int, n: int, rule: KaiRule, duplicator: bool) -> GadgetInstance:
    _check_kn(k, n)
    _check_rule(rule, k, n)
    u, v, w, c, d = rule
    b = _Builder(gid)
    b.declare_xy("X", k, n)
    b.declare_xy("Y", k, n)
    X = lambda i, j: b.v("X", i=i, j=j)
    Y = lambda i, j: b.v("Y", i=i, j=j)
    # pebble c moves u -> w, pebble d stays on v, everyone else stays off w
    b.implies(X(c, u), Y(c, w))
    b.implies(X(d, v), Y(d, v))
    for i in range(1, k + 1):
        if i in (c, d):
            continue
        for j in range(1, n + 1):
            if j != w:
                b.implies(X(i, j), Y(i, j))
    if duplicator:
        # an inapplicable rule position on the input falsifies a unit clause
        for j in range(1, n + 1):
            if j != u:
                b.clause((X(c, j), False))
        for j in range(1, n + 1):
            if j != v:
                b.clause((X(d, j), False))
        for i in range(1, k + 1):
            if i not in (c, d):
                b.clause((X(i, w), False))
    kind = "dup_rule" if duplicator else "spoiler_rule"
    return GadgetInstance(kind, gid, {"k": k, "n": n, "rule": rule}, b.variables, b.clauses,
                          {"X": b.xy_block("X", k, n), "Y": b.xy_block("Y", k, n)})


def _increment_gadget(gid: str, k: int, n: int, level: int) -> GadgetInstance:
    _check_kn(k, n)
    if not 1 <= level <= k:
        raise GadgetError(f"increment level {level} outside [1, {k}]")
    b = _Builder(gid)
    b.declare_xy("X", k, n)
    b.declare_xy("Y", k, n)
    X = lambda i, j: b.v("X", i=i, j=j)
    Y = lambda i, j: b.v("Y", i=i, j=j)
    for i in range(1, level):
        b.implies(X(i, n), Y(i, 1))          # carry digits wrap to the first node
    for j in range(1, n):
        b.implies(X(level, j), Y(level, j + 1))
    for i in range(level + 1, k + 1):
        for j in range(1, n + 1):
            b.implies(X(i, j), Y(i, j))
    return GadgetInstance("increment", gid, {"k": k, "n": n, "level": level},
                          b.variables, b.clauses,
                          {"X": b.xy_block("X", k, n), "Y": b.xy_block("Y", k, n)})


def _switch_gadget(gid: str, k: int, n: int) -> GadgetInstance:
    _check_kn(k, n)
    b = _Builder(gid)
    I, J, C4, L = range(1, k + 1), range(1, n + 1), range(1, 5), range(1, k + 1)
    b.declare_xy("X", k, n)
    for blk in ("A0", "A1"):
        for i in I:
            for j in J:
                b.declare(blk, i=i, j=j)
    for i in I:
        for j in J:
            for c in C4:
                b.declare("A", i=i, j=j, c=c)
    for i in I:
        for j in J:
            for c in C4:
                for l in L:
                    b.declare("AH", i=i, j=j, c=c, l=l)
    for i in I:
        for j in J:
            for c in C4:
                for l in range(2, k):
                    b.declare("AGE", i=i, j=j, c=c, l=l)
    for l in L:
        b.declare("B", l=l)
    for l in range(2, k):
        b.declare("BGE", l=l)
    b.declare("Bflag")
    b.declare_xy("Y", k, n)

    X = lambda i, j: b.v("X", i=i, j=j)
    A = lambda i, j, c: b.v("A", i=i, j=j, c=c)
    AH = lambda i, j, c, l: b.v("AH", i=i, j=j, c=c, l=l)
    AGE = lambda i, j, c, l: b.v("AGE", i=i, j=j, c=c, l=l)
    Bl = lambda l: b.v("B", l=l)
    BGE = lambda l: b.v("BGE", l=l)
    Bflag = b.v("Bflag")

    for i in I:
        for j in J:
            b.implies(X(i, j), b.v("A0", i=i, j=j), b.v("A1", i=i, j=j))
    for i in I:
        for j in J:
            b.implies(b.v("A0", i=i, j=j), A(i, j, 1), A(i, j, 2))
    for i in I:
        for j in J:
            b.implies(b.v("A1", i=i, j=j), A(i, j, 3), A(i, j, 4))
    # an arriving pigeon sits in some hole, as an or-chain over the holes
    for i in I:
        for j in J:
            for c in C4:
                if k == 2:
                    b.implies(A(i, j, c), AH(i, j, c, 1), AH(i, j, c, 2))
                    continue
                b.implies(A(i, j, c), AH(i, j, c, 1), AGE(i, j, c, 2))
                for l in range(2, k - 1):
                    b.implies(AGE(i, j, c, l), AH(i, j, c, l), AGE(i, j, c, l + 1))
                b.implies(AGE(i, j, c, k - 1), AH(i, j, c, k - 1), AH(i, j, c, k))
    # pigeons of different partitions never share a hole
    cells = [(i, j, c) for i in I for j in J for c in C4]
    for l in L:
        for (i, j, c), (i2, j2, c2) in itertools.combinations(cells, 2):
            if i != i2:
                b.nand(AH(i, j, c, l), AH(i2, j2, c2, l))
    for i in I:
        for j in J:
            for c in C4:
                for l in L:
                    b.implies(AH(i, j, c, l), Bl(l))
    # Bflag <- all holes occupied, as an and-chain
    if k == 2:
        b.and_implies(Bl(1), Bl(2), Bflag)
    else:
        b.and_implies(Bl(1), BGE(2), Bflag)
        for l in range(2, k - 1):
            b.and_implies(Bl(l), BGE(l + 1), BGE(l))
        b.and_implies(Bl(k - 1), Bl(k), BGE(k - 1))
    for i in I:
        for j in J:
            for c in C4:
                for l in L:
                    b.and_implies(AH(i, j, c, l), Bflag, b.v("Y", i=i, j=j))
    return GadgetInstance("switch", gid, {"k": k, "n": n}, b.variables, b.clauses,
                          {"X": b.xy_block("X", k, n), "Y": b.xy_block("Y", k, n)})


def _init_gadget(gid: str, k: int, n: int, start: Sequence[int]) -> GadgetInstance:
    _check_kn(k, n)
    start = tuple(start)
    if len(start) != k or not all(1 <= x <= n for x in start):
        raise GadgetError(f"start {start} is not a map [1,{k}] -> [1,{n}]")
    m1 = _switch_gadget(f"{gid}[M1]", k, n)
    m2 = _switch_gadget(f"{gid}[M2]", k, n)
    b = _Builder(gid)
    s1, s2 = b.declare("S1"), b.declare("S2")
    b.declare_xy("Y", k, n)
    b.clause((s1, True), (s2, True))
    for sc, m in ((s1, m1), (s2, m2)):
        for i in range(1, k + 1):
            b.implies(sc, m.block("X").vars[(i, start[i - 1])])
    for m in (m1, m2):
        for i in range(1, k + 1):
            j = start[i - 1]
            b.implies(m.block("Y").vars[(i, j)], b.v("Y", i=i, j=j))
    return GadgetInstance("init", gid, {"k": k, "n": n, "start": start}, b.variables, b.clauses,
                          {"Y": b.xy_block("Y", k, n)}, subgadgets=[m1, m2])


def _choice_gadget(gid: str, k: int, n: int, m: int, theta: int) -> GadgetInstance:
    _check_kn(k, n)
    if m < 1:
        raise GadgetError("choice gadget needs m >= 1")
    if not 1 <= theta <= n:
        raise GadgetError(f"goal {theta} outside [1, {n}]")
    b = _Builder(gid)
    I, J, Q = range(1, k + 1), range(1, n + 1), range(1, m + 1)
    b.declare_xy("X", k, n)
    for i in I:
        for j in J:
            for q in Q:
                b.declare("Y", i=i, j=j, q=q)
    for i in I:
        for j in J:
            for q in range(2, m):
                b.declare("E", i=i, j=j, q=q)
    X = lambda i, j: b.v("X", i=i, j=j)
    Y = lambda i, j, q: b.v("Y", i=i, j=j, q=q)
    E = lambda i, j, q: b.v("E", i=i, j=j, q=q)
    for i in I:
        b.clause((X(i, theta), False))
    for i in I:
        for j in J:
            if m == 1:
                b.implies(X(i, j), Y(i, j, 1))
            elif m == 2:
                b.implies(X(i, j), Y(i, j, 1), Y(i, j, 2))
            else:
                b.implies(X(i, j), Y(i, j, 1), E(i, j, 2))
                for q in range(2, m - 1):
                    b.implies(E(i, j, q), Y(i, j, q), E(i, j, q + 1))
                b.implies(E(i, j, m - 1), Y(i, j, m - 1), Y(i, j, m))
    for i in I:
        for j in J:
            for q, q2 in itertools.combinations(Q, 2):
                b.nand(Y(i, j, q), Y(i, j, q2))
    # Duplicator commits to one choice column across partitions as well
    for i, i2 in itertools.combinations(I, 2):
        for j in J:
            for j2 in J:
                for q in Q:
                    for q2 in Q:
                        if q != q2:
                            b.nand(Y(i, j, q), Y(i2, j2, q2))
    boundary = {"X": b.xy_block("X", k, n)}
    for q in Q:
        boundary[f"Y[q={q}]"] = Block(f"Y[q={q}]", {(i, j): Y(i, j, q) for i in I for j in J})
    return GadgetInstance("choice", gid, {"k": k, "n": n, "m": m, "theta": theta},
                          b.variables, b.clauses, boundary)


GADGET_KINDS = ("spoiler_rule", "dup_rule", "switch", "init", "choice", "increment")


def build_gadget(kind: str, k: int, n: int, *, rule: KaiRule | Sequence[int] | None = None,
                 start: Sequence[int] | None = None, m: int | None = None,
                 theta: int | None = None, level: int | None = None,
                 gadget_id: str | None = None) -> GadgetInstance:
    """Instantiate one gadget's clause schema over fresh structured names."""
    if kind in ("spoiler_rule", "dup_rule"):
        if rule is None:
            raise GadgetError(f"{kind} needs a rule")
        rule = rule if isinstance(rule, KaiRule) else KaiRule(*rule)
        return _rule_gadget(gadget_id or ("S" if kind == "spoiler_rule" else "D"),
                            k, n, rule, kind == "dup_rule")
    if kind == "switch":
        return _switch_gadget(gadget_id or "M", k, n)
    if kind == "init":
        if start is None:
            raise GadgetError("init needs a start position")
        return _init_gadget(gadget_id or "Is", k, n, start)
    if kind == "choice":
        if m is None or theta is None:
            raise GadgetError("choice needs m and theta")
        return _choice_gadget(gadget_id or "C", k, n, m, theta)
    if kind == "increment":
        if level is None:
            raise GadgetError("increment needs a level")
        return _increment_gadget(gadget_id or f"S[l{level}]", k, n, level)
    raise GadgetError(f"unknown gadget kind {kind!r}")


def connect_blocks(a: Block, b: Block) -> list:
    """Biconditionals ``A_v <-> B_v`` for aligned block variables."""
    if a.shape() != b.shape():
        raise GadgetError(f"cannot connect {a.name} and {b.name}: shapes differ")
    out = []
    for key in sorted(a.vars):
        x, y = a.vars[key], b.vars[key]
        out.append(((x, False), (y, True)))
        out.append(((x, True), (y, False)))
    return out


# ------------------------------------------------------------------- compile

@dataclass
class CompiledFormula:
    formula: CnfFormula
    var_of: dict                 # VarName -> DIMACS index
    gadgets: list                # top-level GadgetInstances, in order
    wiring: list                 # (label_a, label_b) per connected block pair
    clause_owner: list           # gadget id (or "wiring"/"goal") per clause
    variant: str = ""
    params: dict = field(default_factory=dict)
    links: list = field(default_factory=list)  # (var_a, var_b) per biconditional

    @property
    def names(self) -> dict:
        return {i: str(v) for v, i in self.var_of.items()}

    @property
    def block_index(self) -> dict:
        """``(gadget_id, block) -> sorted list of variable indices``."""
        out = defaultdict(list)
        for v, i in self.var_of.items():
            out[(v.gadget, v.block)].append(i)
        return {key: sorted(vals) for key, vals in out.items()}

    def var(self, gadget: str, block: str, **idx) -> int:
        return self.var_of[vname(gadget, block, **idx)]

    def gadget(self, gid: str) -> GadgetInstance:
        for g in self._all_gadgets():
            if g.gadget_id == gid:
                return g
        raise KeyError(gid)

    def _all_gadgets(self):
        stack = list(self.gadgets)
        while stack:
            g = stack.pop(0)
            yield g
            stack[:0] = g.subgadgets

    def position(self, gadget: str, p: Sequence[int], block: str = "X", q: int | None = None
                 ) -> PartialAssignment:
        """``{block_{p(i)}^i -> 1}``, the encoding of KAI position ``p`` on a block."""
        extra = {} if q is None else {"q": q}
        return PartialAssignment({self.var(gadget, block, i=i, j=j, **extra): 1
                                  for i, j in enumerate(p, start=1)})

    def assignment(self, values: dict) -> PartialAssignment:
        """Translate ``{VarName: bit}`` to a numbered assignment (unknown names dropped)."""
        return PartialAssignment({self.var_of[v]: b for v, b in values.items() if v in self.var_of})

    def dimacs(self) -> bytes:
        return emit_dimacs(self.formula)

    def sidecar(self) -> bytes:
        return emit_name_table(self.names)

    def wiring_manifest(self) -> str:
        return "".join(f"{a} <-> {b}\n" for a, b in self.wiring)


class _Assembler:
    def __init__(self):
        self.var_of: dict = {}
        self.clauses: list = []
        self.owner: list = []
        self.gadgets: list = []
        self.wiring: list = []

    def _number(self, g: GadgetInstance):
        for sub in g.subgadgets:
            self._number(sub)
        for v in g.variables:
            if v not in self.var_of:
                self.var_of[v] = len(self.var_of) + 1

    def add(self, g: GadgetInstance):
        self._number(g)
        self.gadgets.append(g)
        return g

    def _emit(self, g: GadgetInstance):
        for sub in g.subgadgets:
            self._emit(sub)
        for cl in g.clauses:
            self.clauses.append(cl)
            self.owner.append(g.gadget_id)

    def connect(self, ga: GadgetInstance, ba: str, gb: GadgetInstance, bb: str):
        self.wiring.append((ga, ba, gb, bb))

    def finish(self, extra: Iterable = (), variant="", params=None) -> CompiledFormula:
        for g in self.gadgets:
            self._emit(g)
        labels, links = [], []
        for ga, ba, gb, bb in self.wiring:
            for cl in connect_blocks(ga.block(ba), gb.block(bb)):
                self.clauses.append(cl)
                self.owner.append("wiring")
            a, b = ga.block(ba), gb.block(bb)
            links.extend((self.var_of[a.vars[key]], self.var_of[b.vars[key]])
                         for key in sorted(a.vars))
            labels.append((f"{ga.gadget_id}.{ba}", f"{gb.gadget_id}.{bb}"))
        for owner, cl in extra:
            self.clauses.append(cl)
            self.owner.append(owner)
        numbered = tuple(Clause(self.var_of[v] if pos else -self.var_of[v] for v, pos in cl)
                         for cl in self.clauses)
        cf = CompiledFormula(CnfFormula(len(self.var_of), numbered), dict(self.var_of),
                             self.gadgets, labels, self.owner, variant, params or {}, links)
        object.__setattr__(cf.formula, "name_table", cf.names)
        return cf


def compile_gadget(g: GadgetInstance) -> CompiledFormula:
    """Number a lone gadget (used for gadget-level checks)."""
    asm = _Assembler()
    asm.add(g)
    return asm.finish(variant=g.kind, params=g.params)


def compile_gamma(instance: KaiInstance, prime: bool = False) -> CompiledFormula:
    """The formula whose width-(k+1) game simulates the KAI game on ``instance``.

    With ``prime`` a single choice gadget is shared by every rule.
    """
    G = instance
    k, n, m = G.k, G.n, len(G.rules)
    _check_kn(k, n)
    asm = _Assembler()
    init = asm.add(build_gadget("init", k, n, start=G.start, gadget_id="Is"))
    S, MS, C, D, MD = {}, {}, {}, {}, {}
    shared = None
    for r, rule in enumerate(G.rules, start=1):
        S[r] = asm.add(build_gadget("spoiler_rule", k, n, rule=rule, gadget_id=f"S[r{r}]"))
        MS[r] = asm.add(build_gadget("switch", k, n, gadget_id=f"MS[r{r}]"))
        if not prime:
            C[r] = asm.add(build_gadget("choice", k, n, m=m, theta=G.theta, gadget_id=f"C[r{r}]"))
        D[r] = asm.add(build_gadget("dup_rule", k, n, rule=rule, gadget_id=f"D[r{r}]"))
        MD[r] = asm.add(build_gadget("switch", k, n, gadget_id=f"MD[r{r}]"))
    if prime and m:
        shared = asm.add(build_gadget("choice", k, n, m=m, theta=G.theta, gadget_id="C"))
    for r in S:
        asm.connect(init, "Y", S[r], "X")
    for r in S:
        asm.connect(S[r], "Y", MS[r], "X")
        choice = shared if prime else C[r]
        asm.connect(MS[r], "Y", choice, "X")
        if not prime:
            for q in range(1, m + 1):
                asm.connect(choice, f"Y[q={q}]", D[q], "X")
    if prime and m:
        for q in range(1, m + 1):
            asm.connect(shared, f"Y[q={q}]", D[q], "X")
    for r in S:
        asm.connect(D[r], "Y", MD[r], "X")
        for r2 in S:
            asm.connect(MD[r], "Y", S[r2], "X")
    return asm.finish(variant="gamma_prime" if prime else "gamma",
                      params={"instance": G})


# ------------------------------------------------------------------ counter

def alpha(p: Sequence[int], n: int, k: int) -> int:
    """Counter value of the digit map ``p`` (digit ``i`` is ``p[i] - 1``)."""
    if len(p) != k or not all(1 <= x <= n for x in p):
        raise ValueError(f"{p} is not a map [1,{k}] -> [1,{n}]")
    return sum((p[i] - 1) * n ** i for i in range(k))


def alpha_inv(b: int, n: int, k: int) -> tuple:
    if not 0 <= b < n ** k:
        raise ValueError(f"{b} outside [0, {n ** k - 1}]")
    out = []
    for _ in range(k):
        b, digit = divmod(b, n)
        out.append(digit + 1)
    return tuple(out)


def carry_blockers(p: Sequence[int], level: int, n: int) -> set:
    """Digits witnessing that incrementing at ``level`` is not the right move."""
    return {i for i in range(1, level + 1)
            if (i < level and p[i - 1] != n) or (i == level and p[i - 1] == n)}


def increment_at(p: Sequence[int], level: int, n: int) -> tuple:
    """Reset the digits below ``level`` and bump digit ``level`` by one."""
    return tuple(1 if i < level else (p[i - 1] + 1 if i == level else p[i - 1])
                 for i in range(1, len(p) + 1))


def carry_level(p: Sequence[int], n: int) -> int | None:
    """The unique level whose increment gadget applies to ``p``."""
    k = len(p)
    levels = [l for l in range(1, k + 1) if not carry_blockers(p, l, n)]
    return levels[0] if levels else None


def compile_counter(n: int, k: int) -> CompiledFormula:
    """The k-digit base-n counter family."""
    _check_kn(k, n)
    asm = _Assembler()
    start = alpha_inv(0, n, k)
    init = asm.add(build_gadget("init", k, n, start=start, gadget_id="Is"))
    hub_b = _Builder("CTR")
    hub_b.declare_xy("X", k, n)
    hub = asm.add(GadgetInstance("counter_hub", "CTR", {"k": k, "n": n}, hub_b.variables, [],
                                 {"X": hub_b.xy_block("X", k, n)}))
    incs = [asm.add(build_gadget("increment", k, n, level=l, gadget_id=f"S[l{l}]"))
            for l in range(1, k + 1)]
    switches = [asm.add(build_gadget("switch", k, n, gadget_id=f"M[l{l}]"))
                for l in range(1, k + 1)]
    final = asm.add(build_gadget("switch", k, n, gadget_id="M"))
    asm.connect(init, "Y", hub, "X")
    for s in incs:
        asm.connect(hub, "X", s, "X")
    for s, sw in zip(incs, switches):
        asm.connect(s, "Y", sw, "X")
    for sw in switches:
        asm.connect(sw, "Y", final, "X")
    asm.connect(final, "Y", hub, "X")
    X = hub.block("X").vars
    goal = [("goal", ((X[(k, n)], False),)),
            ("goal", ((X[(1, 1)], False), (X[(1, 2)], False)))]
    return asm.finish(goal, variant="counter", params={"n": n, "k": k})


def compile(variant: str, arg) -> CompiledFormula:
    """``compile("gamma" | "gamma_prime", KaiInstance)`` or ``compile("counter", (n, k))``."""
    if variant == "gamma":
        return compile_gamma(arg, prime=False)
    if variant in ("gamma_prime", "gamma-prime"):
        return compile_gamma(arg, prime=True)
    if variant == "counter":
        n, k = arg
        return compile_counter(n, k)
    raise GadgetError(f"unknown variant {variant!r}")


def top_gadget(gid: str) -> str:
    """``"Is[M1]"`` -> ``"Is"``; other ids unchanged."""
    return gid.split("[M")[0] if gid.startswith("Is[") else gid


@dataclass
class SizeReport:
    variables: dict
    clauses: dict
    total_variables: int
    total_clauses: int

    def rows(self) -> list:
        keys = sorted(set(self.variables) | set(self.clauses))
        return [(g, self.variables.get(g, 0), self.clauses.get(g, 0)) for g in keys]


def size_report(cf: CompiledFormula) -> SizeReport:
    vars_per = Counter(v.gadget for v in cf.var_of)
    cls_per = Counter(cf.clause_owner)
    return SizeReport(dict(vars_per), dict(cls_per), cf.formula.variable_count,
                      len(cf.formula.clauses))
