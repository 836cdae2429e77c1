"""CNF data model, the clause/assignment bijection, and DIMACS I/O.

Literals are nonzero DIMACS integers: ``v`` is the variable ``v`` and ``-v``
its negation.  A :class:`Clause` keeps its literals in canonical order
(ascending variable, positive before negative).  A :class:`PartialAssignment`
is stored as the set of literals it makes true, so ``{X -> 1, Y -> 0}`` is
``{X, -Y}`` and the clause it falsifies is obtained by negating every element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple


class DimacsError(ValueError):
    """Malformed DIMACS input; ``line`` is 1-based (0 when not line-specific)."""

    def __init__(self, kind: str, line: int, message: str):
        self.kind = kind
        self.line = line
        super().__init__(f"line {line}: {kind}: {message}")


class ResolutionError(ValueError):
    pass


class Literal(NamedTuple):
    variable: int
    positive: bool

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit > 0)

    def to_int(self) -> int:
        return self.variable if self.positive else -self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.positive)


def lit_key(lit: int) -> tuple[int, bool]:
    """Sort key of the canonical literal order."""
    return (abs(lit), lit < 0)


class Clause:
    """An immutable set of literals in canonical order."""

    __slots__ = ("lits", "_set", "_hash")

    def __init__(self, lits: Iterable[int] = ()):
        s = frozenset(int(x) for x in lits)
        if 0 in s:
            raise ValueError("0 is not a literal")
        self._set = s
        self.lits = tuple(sorted(s, key=lit_key))
        self._hash = hash(s)

    @classmethod
    def _from_frozenset(cls, s: frozenset) -> "Clause":
        c = cls.__new__(cls)
        c._set = s
        c.lits = tuple(sorted(s, key=lit_key))
        c._hash = hash(s)
        return c

    @property
    def literal_set(self) -> frozenset:
        return self._set

    @property
    def width(self) -> int:
        return len(self.lits)

    def __len__(self) -> int:
        return len(self.lits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.lits)

    def __contains__(self, lit: int) -> bool:
        return lit in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Clause) and self._set == other._set

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Clause") -> bool:
        return clause_sort_key(self) < clause_sort_key(other)

    def __repr__(self) -> str:
        return f"Clause({list(self.lits)})"

    @property
    def is_tautology(self) -> bool:
        return any(-x in self._set for x in self.lits if x > 0)

    @property
    def is_empty(self) -> bool:
        return not self.lits

    def variables(self) -> frozenset:
        return frozenset(abs(x) for x in self.lits)

    def literals(self) -> list[Literal]:
        return [Literal.from_int(x) for x in self.lits]


def clause_sort_key(c: Clause) -> tuple:
    return (len(c.lits), tuple(lit_key(x) for x in c.lits))


EMPTY_CLAUSE = Clause()


@dataclass(frozen=True)
class CnfFormula:
    variable_count: int
    clauses: tuple[Clause, ...]
    name_table: Mapping[int, str] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(
            c if isinstance(c, Clause) else Clause(c) for c in self.clauses))
        if self.variable_count < 0:
            raise ValueError("negative variable count")
        for i, c in enumerate(self.clauses):
            for x in c.lits:
                if abs(x) > self.variable_count:
                    raise ValueError(
                        f"clause {i} uses variable {abs(x)} > {self.variable_count}")

    @classmethod
    def from_lists(cls, clauses: Iterable[Iterable[int]],
                   variable_count: int | None = None, name_table=None) -> "CnfFormula":
        cs = tuple(Clause(c) for c in clauses)
        if variable_count is None:
            variable_count = max((abs(x) for c in cs for x in c.lits), default=0)
        return cls(variable_count, cs, name_table)

    def __len__(self) -> int:
        return len(self.clauses)

    @property
    def max_width(self) -> int:
        return max((c.width for c in self.clauses), default=0)

    def with_clauses(self, extra: Iterable[Clause]) -> "CnfFormula":
        return CnfFormula(self.variable_count, self.clauses + tuple(extra), self.name_table)


class PartialAssignment:
    """Immutable map variable -> {0, 1}, stored as the set of true literals."""

    __slots__ = ("true_lits", "_hash")

    def __init__(self, bindings: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        lits = set()
        seen: dict[int, int] = {}
        for var, val in items:
            var = int(var)
            if var < 1:
                raise ValueError(f"bad variable {var}")
            if val not in (0, 1):
                raise ValueError(f"value of {var} must be 0 or 1, got {val!r}")
            if seen.setdefault(var, val) != val:
                raise ValueError(f"variable {var} bound twice")
            lits.add(var if val else -var)
        self.true_lits = frozenset(lits)
        self._hash = hash(self.true_lits)

    @classmethod
    def from_literals(cls, lits: Iterable[int]) -> "PartialAssignment":
        s = frozenset(lits)
        if any(-x in s for x in s):
            raise ValueError("inconsistent literal set")
        p = cls.__new__(cls)
        p.true_lits = s
        p._hash = hash(s)
        return p

    def __len__(self) -> int:
        return len(self.true_lits)

    @property
    def domain_size(self) -> int:
        return len(self.true_lits)

    def domain(self) -> frozenset:
        return frozenset(abs(x) for x in self.true_lits)

    def get(self, var: int):
        if var in self.true_lits:
            return 1
        if -var in self.true_lits:
            return 0
        return None

    def __getitem__(self, var: int) -> int:
        v = self.get(var)
        if v is None:
            raise KeyError(var)
        return v

    def __contains__(self, var: int) -> bool:
        return var in self.true_lits or -var in self.true_lits

    def items(self) -> list[tuple[int, int]]:
        return sorted((abs(x), int(x > 0)) for x in self.true_lits)

    def as_dict(self) -> dict[int, int]:
        return dict(self.items())

    def extend(self, var: int, value: int) -> "PartialAssignment":
        lit = var if value else -var
        if -lit in self.true_lits:
            raise ValueError(f"variable {var} already bound to {1 - value}")
        return PartialAssignment.from_literals(self.true_lits | {lit})

    def restrict(self, variables: Iterable[int]) -> "PartialAssignment":
        vs = set(variables)
        return PartialAssignment.from_literals(x for x in self.true_lits if abs(x) in vs)

    def issubset(self, other: "PartialAssignment") -> bool:
        return self.true_lits <= other.true_lits

    def __le__(self, other: "PartialAssignment") -> bool:
        return self.issubset(other)

    def __or__(self, other: "PartialAssignment") -> "PartialAssignment":
        return PartialAssignment.from_literals(self.true_lits | other.true_lits)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialAssignment) and self.true_lits == other.true_lits

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}->{b}" for v, b in self.items())
        return f"PartialAssignment({{{inner}}})"


def resolve(c1: Clause, c2: Clause, pivot: int) -> Clause:
    """Resolvent of ``c1`` (holding ``pivot``) and ``c2`` (holding ``-pivot``).

    The result may be a tautology; check :attr:`Clause.is_tautology`.
    """
    if pivot <= 0:
        raise ResolutionError(f"pivot must be a positive variable, got {pivot}")
    if pivot not in c1.literal_set:
        raise ResolutionError(f"first clause lacks literal {pivot}")
    if -pivot not in c2.literal_set:
        raise ResolutionError(f"second clause lacks literal {-pivot}")
    return Clause._from_frozenset((c1.literal_set - {pivot}) | (c2.literal_set - {-pivot}))


def clause_of(p: PartialAssignment) -> Clause:
    """The maximal clause falsified by ``p``."""
    return Clause._from_frozenset(frozenset(-x for x in p.true_lits))


def assignment_of(c: Clause) -> PartialAssignment:
    """The unique minimal assignment falsifying ``c``."""
    if c.is_tautology:
        raise ValueError(f"{c!r} is a tautology and is never falsified")
    return PartialAssignment.from_literals(-x for x in c.lits)


def falsifies(p: PartialAssignment, c: Clause) -> bool:
    t = p.true_lits
    return all(-x in t for x in c.lits)


def subsumes(c1: Clause, c2: Clause) -> bool:
    return c1.literal_set <= c2.literal_set


# --------------------------------------------------------------------- DIMACS

def _decode(text) -> str:
    if isinstance(text, (bytes, bytearray)):
        return text.decode("ascii")
    return text


def parse_dimacs(text: bytes | str) -> CnfFormula:
    """Parse DIMACS CNF.  Raises :class:`DimacsError` with a line number."""
    lines = _decode(text).split("\n")
    header = None
    nvars = ncls = 0
    clauses: list[Clause] = []
    pending: list[int] = []
    pending_line = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise DimacsError("header", lineno, "duplicate problem line")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError("header", lineno, f"expected 'p cnf <vars> <clauses>', got {line!r}")
            try:
                nvars, ncls = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError("header", lineno, f"non-integer counts in {line!r}") from None
            if nvars < 0 or ncls < 0:
                raise DimacsError("header", lineno, "negative counts")
            header = lineno
            continue
        if header is None:
            raise DimacsError("header", lineno, "clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError("literal", lineno, f"not an integer: {tok!r}") from None
            if lit == 0:
                clauses.append(Clause(pending))
                pending = []
                continue
            if abs(lit) > nvars:
                raise DimacsError("range", lineno, f"literal {lit} exceeds {nvars} variables")
            if not pending:
                pending_line = lineno
            pending.append(lit)
    if header is None:
        raise DimacsError("header", 0, "missing problem line")
    if pending:
        raise DimacsError("terminator", pending_line, "clause not terminated by 0")
    if len(clauses) != ncls:
        raise DimacsError("count", header, f"header declares {ncls} clauses, found {len(clauses)}")
    return CnfFormula(nvars, tuple(clauses))


def emit_dimacs(formula: CnfFormula) -> bytes:
    out = [f"p cnf {formula.variable_count} {len(formula.clauses)}\n"]
    for c in formula.clauses:
        out.append(" ".join(str(x) for x in c.lits + (0,)) + "\n")
    return "".join(out).encode("ascii")


def emit_name_table(names: Mapping[int, str]) -> bytes:
    return "".join(f"{i} {names[i]}\n" for i in sorted(names)).encode("ascii")


def parse_name_table(text: bytes | str) -> dict[int, str]:
    table = {}
    for lineno, raw in enumerate(_decode(text).split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        idx, _, name = line.partition(" ")
        try:
            table[int(idx)] = name.strip()
        except ValueError:
            raise DimacsError("name-table", lineno, f"bad index {idx!r}") from None
    return table
