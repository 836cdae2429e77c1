"""Command-line interface.

Exit codes: 0 success (refuted, valid, agreement), 1 negative verdict or
failed check, 2 budget exceeded, 3 input error.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import gadgets, game, harness, kai, resolution, strategies
from .cnf import DimacsError, parse_dimacs, parse_name_table

EXIT_OK, EXIT_NO, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str, mode: str = "rb"):
    try:
        with open(path, mode) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _formula(path: str):
    return parse_dimacs(_read(path))


def _names(path: str | None) -> dict:
    return parse_name_table(_read(path)) if path else {}


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise InputError(f"expected a comma-separated integer list, got {text!r}") from None


def _budget(args) -> dict:
    out = {}
    if getattr(args, "budget", None) is not None:
        out["time_limit"] = args.budget
    if getattr(args, "max_clauses", None) is not None:
        out["max_clauses"] = args.max_clauses
    return out


def _say(msg: str):
    print(msg, file=sys.stderr)


# ------------------------------------------------------------------ commands

def cmd_prove(args) -> int:
    f = _formula(args.cnf)
    res = resolution.saturate(f, args.width, **_budget(args))
    if not res.refuted:
        _say(f"NOT-REFUTABLE width={args.width} fixpoint_rounds={res.fixpoint_rounds}")
        return EXIT_NO
    proof = resolution.extract_proof(res)
    if args.proof:
        harness.atomic_write(args.proof, resolution.write_trace(proof))
    else:
        sys.stdout.write(resolution.write_trace(proof))
    _say(f"REFUTED width={args.width} rounds={res.rounds_to_empty} steps={len(proof.steps)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    f = _formula(args.cnf)
    try:
        proof = resolution.read_trace(_read(args.proof), f)
    except resolution.ProofError as exc:
        _say(f"REJECTED {exc}")
        return EXIT_NO
    rep = resolution.verify_proof(f, proof)
    if not rep.valid:
        _say(f"REJECTED step={rep.error_step} {rep.message}")
        return EXIT_NO
    if not rep.refutation:
        _say("REJECTED root is not the empty clause")
        return EXIT_NO
    if args.width is not None and rep.width > args.width:
        _say(f"REJECTED width {rep.width} exceeds {args.width}")
        return EXIT_NO
    _say(f"VALID width={rep.width} depth={rep.depth} length={rep.length} regular={rep.regular}")
    return EXIT_OK


def cmd_min_width(args) -> int:
    f = _formula(args.cnf)
    w = resolution.min_width(f, **_budget(args))
    print("none" if w is None else w)
    return EXIT_NO if w is None else EXIT_OK


def cmd_game(args) -> int:
    f = _formula(args.cnf)
    if args.regular:
        v = game.solve_regular_width_game(f, args.width)
    else:
        v = game.solve_width_game(f, args.width, method=args.method, **_budget(args))
    who = "spoiler" if v.spoiler_wins else "duplicator"
    print(f"{who} rounds={v.rounds}")
    return EXIT_OK if v.spoiler_wins else EXIT_NO


def cmd_kai_solve(args) -> int:
    G = kai.parse_kai(_read(args.instance, "r"))
    sol = kai.solve_kai(G)
    if sol.player1_wins:
        print(f"player1 rank={sol.rank.get((G.start, kai.PLAYER1))}")
        if args.strategy:
            for p in sorted(sol.strategy):
                print(f"  {p} -> rule {sol.strategy[p]}")
    else:
        cert = sol.strategy
        print(f"player2 K1={len(cert.K1)} K2={len(cert.K2)} "
              f"verified={kai.verify_player2_strategy(G, cert)}")
        if args.strategy:
            for p in sorted(cert.K1):
                print(f"  K1 {p}")
            for p in sorted(cert.K2):
                print(f"  K2 {p} -> rule {cert.kappa[p]}")
    return EXIT_OK


def _compiled(args):
    if args.variant == "counter":
        if args.n is None or args.k is None:
            raise InputError("counter needs --n and --k")
        return gadgets.compile_counter(args.n, args.k)
    if not args.kai:
        raise InputError(f"{args.variant} needs --kai FILE")
    G = kai.parse_kai(_read(args.kai, "r"))
    return gadgets.compile_gamma(G, prime=(args.variant == "gamma-prime"))


def cmd_compile(args) -> int:
    cf = _compiled(args)
    outputs = [(args.output, cf.dimacs())]
    if args.sidecar:
        outputs.append((args.sidecar, cf.sidecar()))
    if args.wiring:
        outputs.append((args.wiring, cf.wiring_manifest()))
    for path, data in outputs:
        if path == "-":
            sys.stdout.write(data.decode() if isinstance(data, bytes) else data)
        else:
            harness.atomic_write(path, data)
    rep = gadgets.size_report(cf)
    if args.sizes:
        for g, nv, nc in rep.rows():
            print(f"{g}\t{nv}\t{nc}")
    _say(f"COMPILED variant={cf.variant} vars={rep.total_variables} clauses={rep.total_clauses}")
    return EXIT_OK


_GADGET_OF = {"rule_spoiler": "spoiler_rule", "rule_duplicator": "dup_rule",
              "switch_impasse": "switch", "switch_output": "switch", "switch_input": "switch",
              "init": "init", "choice": "choice", "increment": "increment"}


def cmd_strategy_check(args) -> int:
    kind = args.kind
    if kind == "counter_hub":
        raise InputError("counter_hub families are checked through counter-sweep inclusions")
    gkind = _GADGET_OF[kind]
    cf = gadgets.compile_gadget(gadgets.build_gadget(
        gkind, args.k, args.n,
        rule=_ints(args.rule) if args.rule else None,
        start=_ints(args.start) if args.start else None,
        m=args.m, theta=args.theta, level=args.level))
    params = {}
    if args.p:
        params["p"] = _ints(args.p)
    if args.T is not None:
        params["T"] = frozenset(_ints(args.T))
    if args.q is not None:
        params["q"] = args.q
    if args.which:
        params["which"] = args.which
    H = strategies.make_strategy(kind, cf, **params)
    rep = strategies.check_critical(cf.formula, H, mode=args.mode, trials=args.trials,
                                    seed=args.seed, names=cf.names)
    print(rep)
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_trace(args) -> int:
    f = _formula(args.cnf)
    names = _names(args.names)
    v = game.solve_width_game(f, args.width, method="explicit")
    if not v.spoiler_wins:
        print("duplicator wins; no Spoiler strategy to replay")
        return EXIT_NO
    strat = game.spoiler_strategy(f, args.width, v)
    dup = (game.adversarial_duplicator(v.win_rounds) if args.duplicator == "adversarial"
           else game.random_duplicator(random.Random(args.seed)))
    queries, transcript = game.replay(f, args.width, strat, v.win_rounds, dup)
    show = lambda lit: ("" if lit > 0 else "-") + names.get(abs(lit), str(abs(lit)))
    for i, (keep, x, bit, p) in enumerate(transcript, start=1):
        kept = " ".join(show(l) for l in sorted(keep, key=abs))
        print(f"{i:3d} keep {{{kept}}} ask {names.get(x, x)} -> {bit}")
    print(f"spoiler wins after {queries} queries (optimal {v.rounds})")
    return EXIT_OK


def _replay_instances(path: str) -> list:
    text = _read(path, "r")
    if text.lstrip().startswith("# narrow xcheck"):
        _, cols, rows = harness.read_csv(text)
        col, verdict = cols.index("instance"), cols.index("verdict")
        return [harness.kai_from_line(r[col]) for r in rows if r[verdict] == "FAIL"] or \
               [harness.kai_from_line(r[col]) for r in rows]
    return [kai.parse_kai(text)]


def cmd_xcheck(args) -> int:
    cfg = harness.XCheckConfig(seed=args.seed, trials=args.trials, n_max=args.n_max,
                               m_max=args.m_max, variant=args.variant.replace("-", "_"),
                               budget=args.budget, verify_proofs=not args.no_verify)
    if args.replay:
        cfg.instances = _replay_instances(args.replay)

    def progress(row):
        if not args.quiet:
            _say(f"trial {row.trial:3d} n={row.instance.n} m={row.instance.m} "
                 f"p1={int(row.player1_wins)} refutable={row.refutable} {row.verdict} "
                 f"{row.seconds:.1f}s")

    rows = harness.xcheck(cfg, progress)
    if args.csv:
        harness.atomic_write(args.csv, harness.render_csv(
            "xcheck", harness.XCHECK_COLUMNS, [r.as_row() for r in rows]))
    s = harness.xcheck_summary(rows)
    print(f"AGREE={s['AGREE']} FAIL={s['FAIL']} SKIPPED={s['SKIPPED']} "
          f"player1={s['player1']} player2={s['player2']}")
    for r in rows:
        if r.verdict == "FAIL":
            print(f"FAIL trial={r.trial} instance: {harness.kai_to_line(r.instance)}")
    return EXIT_NO if s["FAIL"] else EXIT_OK


def cmd_counter_sweep(args) -> int:
    def progress(row):
        if not args.quiet:
            _say(f"n={row.n} k={row.k} vars={row.vars} clauses={row.clauses} "
                 f"min_width={row.min_width} r1={row.rounds_at_k_plus_1} "
                 f"r2={row.rounds_at_k_plus_2}")

    rows = harness.counter_sweep(_ints(args.n), _ints(args.k), args.budget, args.sizes_only,
                                 progress, plus_two=not args.skip_k_plus_2)
    text = harness.render_csv("counter-sweep", harness.COUNTER_COLUMNS,
                              [r.as_row() for r in rows])
    if args.csv:
        harness.atomic_write(args.csv, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="narrow", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def budgeted(p):
        p.add_argument("--budget", type=float, help="wall-clock limit in seconds")
        p.add_argument("--max-clauses", type=int, help="clause store limit")

    p = sub.add_parser("prove", help="width-bounded saturation with proof output")
    p.add_argument("cnf")
    p.add_argument("--width", "-k", type=int, required=True)
    p.add_argument("--proof", "-o", help="trace output path (stdout if omitted)")
    budgeted(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="check a proof trace against a formula")
    p.add_argument("cnf")
    p.add_argument("proof")
    p.add_argument("--width", "-k", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("min-width", help="smallest refuting width")
    p.add_argument("cnf")
    budgeted(p)
    p.set_defaults(func=cmd_min_width)

    p = sub.add_parser("game", help="solve the width game")
    p.add_argument("cnf")
    p.add_argument("--width", "-k", type=int, required=True)
    p.add_argument("--regular", action="store_true", help="no variable asked twice")
    p.add_argument("--method", choices=["auto", "explicit", "antichain"], default="auto")
    budgeted(p)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("kai-solve", help="solve a KAI instance file")
    p.add_argument("instance")
    p.add_argument("--strategy", action="store_true", help="print the winning strategy")
    p.set_defaults(func=cmd_kai_solve)

    p = sub.add_parser("compile", help="emit a gadget formula as DIMACS")
    p.add_argument("--variant", choices=["gamma", "gamma-prime", "counter"], required=True)
    p.add_argument("--kai", help="KAI instance file (gamma variants)")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--sidecar", help="variable name table output path")
    p.add_argument("--wiring", help="wiring manifest output path")
    p.add_argument("--sizes", action="store_true", help="print per-gadget sizes")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("strategy-check", help="check one gadget-level Duplicator family")
    p.add_argument("kind", choices=list(strategies.STRATEGY_KINDS))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--rule", help="u,v,w,c,d")
    p.add_argument("--start", help="start position, e.g. 1,2")
    p.add_argument("--m", type=int)
    p.add_argument("--theta", type=int)
    p.add_argument("--level", type=int)
    p.add_argument("--p", help="position tuple, e.g. 1,2")
    p.add_argument("--T", help="impasse set, e.g. 1")
    p.add_argument("--q", type=int)
    p.add_argument("--which", choices=["winning", "part1", "part2", "position", "zero"])
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_strategy_check)

    p = sub.add_parser("trace", help="replay an optimal Spoiler strategy")
    p.add_argument("cnf")
    p.add_argument("--width", "-k", type=int, required=True)
    p.add_argument("--names", help="variable name table")
    p.add_argument("--duplicator", choices=["adversarial", "random"], default="adversarial")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("xcheck", help="KAI winner against width-3 refutability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--m-max", type=int, default=2)
    p.add_argument("--variant", choices=["gamma", "gamma-prime"], default="gamma-prime")
    p.add_argument("--budget", type=float, help="seconds per instance (default: env or 600)")
    p.add_argument("--csv", help="report output path")
    p.add_argument("--replay", help="KAI instance file or xcheck CSV to rerun")
    p.add_argument("--no-verify", action="store_true", help="skip proof re-verification")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_xcheck)

    p = sub.add_parser("counter-sweep", help="size and width table for the counter family")
    p.add_argument("--n", default="2,3")
    p.add_argument("--k", default="2")
    p.add_argument("--budget", type=float, help="seconds per cell (default: env or 600)")
    p.add_argument("--csv", help="output path (stdout if omitted)")
    p.add_argument("--sizes-only", action="store_true")
    p.add_argument("--skip-k-plus-2", action="store_true", help="leave the width k+2 column empty")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_counter_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (resolution.BudgetExceeded, kai.BudgetExceeded) as exc:
        _say(f"BUDGET {exc}")
        return EXIT_BUDGET
    except (InputError, DimacsError, kai.KaiError, gadgets.GadgetError,
            strategies.StrategyError, resolution.ProofError) as exc:
        _say(f"INPUT-ERROR {exc}")
        return EXIT_INPUT
    except ValueError as exc:
        _say(f"INPUT-ERROR {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
