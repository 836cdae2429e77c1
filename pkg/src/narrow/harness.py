"""Cross-validation experiments and CSV output.

Every experiment is a pure function of its configuration (all randomness
comes from the seed), and report files are written to a temporary name and
renamed only once complete.
"""

from __future__ import annotations

import csv
import io
import os
import random
import tempfile
import time
from dataclasses import dataclass, field

from .gadgets import compile_counter, compile_gamma, size_report
from .game import solve_width_game
from .kai import KaiInstance, format_kai, parse_kai, random_instance, solve_kai
from .resolution import BudgetExceeded, extract_proof, min_width, saturate, verify_proof

CSV_SCHEMA_VERSION = 1
DEFAULT_BUDGET_SECS = 600.0
BUDGET_ENV = "NARROW_BUDGET_SECS"


def budget_seconds(default: float = DEFAULT_BUDGET_SECS) -> float:
    """Per-instance wall budget; ``NARROW_BUDGET_SECS`` overrides ``default``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV} must be a number of seconds, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV} must be positive")
    return value


def atomic_write(path: str, data: bytes | str):
    """Write ``data`` to ``path`` via a temporary file in the same directory."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".narrow-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(kind: str, columns: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(f"# narrow {kind} schema={CSV_SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple:
    """``(kind, columns, rows)`` from a file written by :func:`render_csv`."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# narrow "):
        raise ValueError("missing schema header line")
    kind = lines[0].split()[2]
    reader = csv.reader(lines[1:])
    columns = next(reader)
    return kind, columns, [row for row in reader]


def kai_to_line(instance: KaiInstance) -> str:
    return format_kai(instance).strip().replace("\n", " / ")


def kai_from_line(line: str) -> KaiInstance:
    return parse_kai(line.replace(" / ", "\n"))


# ------------------------------------------------------------------- xcheck

@dataclass
class XCheckConfig:
    seed: int = 0
    trials: int = 20
    n_max: int = 4
    m_max: int = 2
    k: int = 2
    variant: str = "gamma_prime"
    budget: float | None = None          # seconds per instance; None reads the env
    verify_proofs: bool = True
    instances: list = field(default_factory=list)   # explicit instances replace sampling


XCHECK_COLUMNS = ["trial", "n", "k", "m", "player1_wins", "refutable", "verdict",
                  "rounds_to_empty", "proof_ok", "proof_depth", "variables", "clauses",
                  "seconds", "instance"]


@dataclass
class XCheckRow:
    trial: int
    instance: KaiInstance
    player1_wins: bool
    refutable: bool | None
    verdict: str                         # AGREE, FAIL or SKIPPED
    rounds_to_empty: int | None = None
    proof_ok: bool | None = None
    proof_depth: int | None = None
    variables: int = 0
    clauses: int = 0
    seconds: float = 0.0

    def as_row(self) -> list:
        G = self.instance
        b = lambda x: None if x is None else int(x)
        return [self.trial, G.n, G.k, G.m, b(self.player1_wins), b(self.refutable), self.verdict,
                self.rounds_to_empty, b(self.proof_ok), self.proof_depth, self.variables,
                self.clauses, f"{self.seconds:.2f}", kai_to_line(G)]


def xcheck_instances(config: XCheckConfig) -> list:
    if config.instances:
        return list(config.instances)
    rng = random.Random(config.seed)
    return [random_instance(rng, n_max=config.n_max, m_max=config.m_max, k=config.k)
            for _ in range(config.trials)]


def check_instance(G: KaiInstance, variant: str = "gamma_prime", budget: float | None = None,
                   verify_proofs: bool = True, trial: int = 0) -> XCheckRow:
    """Compare the KAI winner with width-``(k+1)`` refutability of the compiled formula."""
    t0 = time.monotonic()
    sol = solve_kai(G)
    cf = compile_gamma(G, prime=(variant in ("gamma_prime", "gamma-prime")))
    row = XCheckRow(trial, G, sol.player1_wins, None, "SKIPPED",
                    variables=cf.formula.variable_count, clauses=len(cf.formula.clauses))
    limit = budget_seconds() if budget is None else budget
    try:
        res = saturate(cf.formula, G.k + 1, time_limit=limit)
    except BudgetExceeded:
        row.seconds = time.monotonic() - t0
        return row
    row.refutable = res.refuted
    row.rounds_to_empty = res.rounds_to_empty
    row.verdict = "AGREE" if res.refuted == sol.player1_wins else "FAIL"
    if res.refuted and verify_proofs:
        rep = verify_proof(cf.formula, extract_proof(res))
        row.proof_ok = (rep.valid and rep.refutation and rep.width <= G.k + 1
                        and rep.depth == res.rounds_to_empty)
        row.proof_depth = rep.depth
        if not row.proof_ok:
            row.verdict = "FAIL"
    row.seconds = time.monotonic() - t0
    return row


def xcheck(config: XCheckConfig, progress=None) -> list:
    rows = []
    for trial, G in enumerate(xcheck_instances(config)):
        row = check_instance(G, config.variant, config.budget, config.verify_proofs, trial)
        rows.append(row)
        if progress is not None:
            progress(row)
    return rows


def xcheck_summary(rows: list) -> dict:
    out = {"AGREE": 0, "FAIL": 0, "SKIPPED": 0, "player1": 0, "player2": 0}
    for r in rows:
        out[r.verdict] += 1
        out["player1" if r.player1_wins else "player2"] += 1
    return out


# ----------------------------------------------------------- counter sweep

COUNTER_COLUMNS = ["n", "k", "vars", "clauses", "min_width", "rounds_at_k_plus_1",
                   "rounds_at_k_plus_2"]


@dataclass
class CounterRow:
    n: int
    k: int
    vars: int
    clauses: int
    min_width: int | str | None
    rounds_at_k_plus_1: int | str | None
    rounds_at_k_plus_2: int | str | None

    def as_row(self) -> list:
        return [self.n, self.k, self.vars, self.clauses, self.min_width,
                self.rounds_at_k_plus_1, self.rounds_at_k_plus_2]


def counter_cell(n: int, k: int, budget: float | None = None, sizes_only: bool = False,
                 plus_two: bool = True) -> CounterRow:
    """One sweep row; a cell over budget holds ``"BUDGET"``."""
    cf = compile_counter(n, k)
    rep = size_report(cf)
    row = CounterRow(n, k, rep.total_variables, rep.total_clauses, None, None, None)
    if sizes_only:
        return row
    limit = budget_seconds() if budget is None else budget

    def run(width):
        try:
            return saturate(cf.formula, width, time_limit=limit)
        except BudgetExceeded:
            return None

    low = run(k)
    if low is None:
        row.min_width = "BUDGET"
    elif low.refuted:
        row.min_width = min_width(cf.formula, time_limit=limit)
    high = run(k + 1)
    row.rounds_at_k_plus_1 = "BUDGET" if high is None else high.rounds_to_empty
    if row.min_width is None:
        row.min_width = "BUDGET" if high is None else (k + 1 if high.refuted else None)
    if not plus_two:
        return row
    top = run(k + 2)
    row.rounds_at_k_plus_2 = "BUDGET" if top is None else top.rounds_to_empty
    return row


def counter_sweep(ns, ks, budget: float | None = None, sizes_only: bool = False,
                  progress=None, plus_two: bool = True) -> list:
    rows = []
    for k in ks:
        for n in ns:
            row = counter_cell(n, k, budget, sizes_only, plus_two)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def width_game_summary(formula, k: int) -> dict:
    v = solve_width_game(formula, k)
    return {"spoiler_wins": v.spoiler_wins, "rounds": v.rounds}
