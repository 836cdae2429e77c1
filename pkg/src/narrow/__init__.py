"""Bounded-width resolution, width games, KAI games and gadget formulas."""

from .cnf import (Clause, CnfFormula, DimacsError, Literal, PartialAssignment, ResolutionError,
                  assignment_of, clause_of, emit_dimacs, falsifies, parse_dimacs, resolve, subsumes)
from .kai import (KaiInstance, KaiRule, Player2Strategy, applicable, apply_rule, blockers,
                  is_acyclic, parse_kai, solve_kai, verify_player2_strategy)
from .resolution import (BudgetExceeded, SaturationResult, extract_proof, min_width, saturate,
                         verify_proof)
from .game import can_reach, solve_regular_width_game, solve_width_game
from .gadgets import build_gadget, compile_counter, compile_gadget, compile_gamma
from .strategies import check_critical, make_strategy

__version__ = "0.1.0"

__all__ = [
    "Clause",
    "CnfFormula",
    "DimacsError",
    "Literal",
    "PartialAssignment",
    "ResolutionError",
    "assignment_of",
    "clause_of",
    "emit_dimacs",
    "falsifies",
    "parse_dimacs",
    "resolve",
    "subsumes",
    "KaiInstance",
    "KaiRule",
    "Player2Strategy",
    "applicable",
    "apply_rule",
    "blockers",
    "is_acyclic",
    "parse_kai",
    "solve_kai",
    "verify_player2_strategy",
    "BudgetExceeded",
    "SaturationResult",
    "extract_proof",
    "min_width",
    "saturate",
    "verify_proof",
    "can_reach",
    "solve_regular_width_game",
    "solve_width_game",
    "build_gadget",
    "compile_counter",
    "compile_gadget",
    "compile_gamma",
    "check_critical",
    "make_strategy",
]
