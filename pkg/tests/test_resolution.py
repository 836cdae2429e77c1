import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from narrow.cnf import Clause, CnfFormula
from narrow.resolution import (BudgetExceeded, ProofError, ProofStep, ResolutionProof,
                               extract_proof, min_width, read_trace, saturate, verify_proof,
                               write_trace)

from oracles import (full_contradiction, random_cnf, reference_saturation, satisfiable,
                     small_suite)

XOR2 = full_contradiction(2)
UNIT = CnfFormula.from_lists([[1], [-1]])


def test_unit_contradiction():
    r = saturate(UNIT, 1)
    assert r.refuted and r.rounds_to_empty == 1


def test_two_variable_contradiction():
    r = saturate(XOR2, 2)
    assert r.refuted and r.rounds_to_empty == 2
    assert reference_saturation(XOR2, 2)[:2] == (True, 2)
    for c in ([1], [-1], [2], [-2]):
        assert r.first_round(c) == 1


def test_two_variable_contradiction_not_at_width_one():
    r = saturate(XOR2, 1)
    assert not r.refuted and r.rounds_to_empty is None
    assert reference_saturation(XOR2, 1)[0] is False


def test_min_width_examples():
    assert min_width(UNIT) == 1
    assert min_width(XOR2) == 2
    assert min_width(CnfFormula.from_lists([[1, 2]])) is None


def test_wide_input_clauses_are_excluded():
    f = CnfFormula.from_lists([[1, 2, 3], [-1], [-2], [-3]])
    assert not saturate(f, 2).refuted
    assert saturate(f, 3).refuted


def test_input_clauses_have_round_zero_and_widths_are_bounded():
    rng = random.Random(3)
    for _ in range(50):
        f = random_cnf(rng)
        for k in (1, 2, 3):
            r = saturate(f, k)
            for c, (rnd, _) in r.derived.items():
                assert c.width <= k
            for c in f.clauses:
                if c.width <= k and not c.is_tautology:
                    assert r.first_round(c) == 0
            assert r.refuted == (Clause() in r.derived)


def test_subsumption_matches_reference_on_sample():
    for f in small_suite(120, seed=11):
        for k in (1, 2, 3):
            r = saturate(f, k)
            ref = reference_saturation(f, k)
            assert (r.refuted, r.rounds_to_empty) == ref[:2]


def test_pruning_flag_changes_nothing_observable():
    for f in small_suite(60, seed=5):
        for k in (2, 3):
            a, b = saturate(f, k), saturate(f, k, subsumption=False)
            assert (a.refuted, a.rounds_to_empty) == (b.refuted, b.rounds_to_empty)


def test_monotone_in_width():
    for f in small_suite(150, seed=8):
        prev = None
        for k in range(1, 5):
            r = saturate(f, k)
            if prev is not None and prev.refuted:
                assert r.refuted and r.rounds_to_empty <= prev.rounds_to_empty
            prev = r


def test_min_width_unrefutable_iff_satisfiable():
    for f in small_suite(200, seed=9):
        assert (min_width(f) is None) == satisfiable(f)


def test_clause_budget_is_distinct_from_unrefutable():
    with pytest.raises(BudgetExceeded):
        saturate(full_contradiction(5), 5, max_clauses=3)


def test_time_budget():
    with pytest.raises(BudgetExceeded):
        saturate(full_contradiction(6), 6, time_limit=1e-9)


def test_negative_width_rejected():
    with pytest.raises(ValueError):
        saturate(UNIT, -1)


# ------------------------------------------------------------------ proofs

def test_extract_unit_proof():
    p = extract_proof(saturate(UNIT, 1))
    assert len(p.steps) == 3
    assert sum(s.is_input for s in p.steps) == 2
    rep = verify_proof(UNIT, p)
    assert (rep.valid, rep.width, rep.depth, rep.length, rep.regular) == (True, 1, 1, 3, True)


def test_extract_requires_refutation():
    with pytest.raises(ProofError):
        extract_proof(saturate(XOR2, 1))


def test_extracted_depth_equals_rounds():
    r = saturate(XOR2, 2)
    rep = verify_proof(XOR2, extract_proof(r))
    assert rep.valid and rep.depth == 2 == r.rounds_to_empty


def test_extracted_proofs_verify_on_random_suite():
    for f in small_suite(200, seed=12):
        for k in (2, 3):
            r = saturate(f, k)
            if r.refuted:
                rep = verify_proof(f, extract_proof(r))
                assert rep.valid and rep.refutation
                assert rep.width <= k and rep.depth == r.rounds_to_empty


def test_edited_pivot_is_rejected():
    p = extract_proof(saturate(UNIT, 1))
    last = p.steps[-1]
    bad = ResolutionProof(p.steps[:-1] + (dataclasses.replace(last, pivot=2),), p.root)
    rep = verify_proof(CnfFormula.from_lists([[1], [-1], [2]]), bad)
    assert not rep.valid and rep.error_step == last.id


def test_foreign_input_is_rejected():
    p = extract_proof(saturate(UNIT, 1))
    first = p.steps[0]
    bad = ResolutionProof((dataclasses.replace(first, clause=Clause([1, 2])),) + p.steps[1:],
                          p.root)
    assert not verify_proof(UNIT, bad).valid


def test_irregular_proof_detected():
    # variable 1 is the pivot at steps 3 and 7, which lie on one path to the root
    f = CnfFormula.from_lists([[1, 2], [-1, 3], [1, -2], [-1], [-3]])
    proof = ResolutionProof((
        ProofStep(1, Clause([1, 2])),
        ProofStep(2, Clause([-1, 3])),
        ProofStep(3, Clause([2, 3]), (1, 2), 1),
        ProofStep(4, Clause([1, -2])),
        ProofStep(5, Clause([1, 3]), (3, 4), 2),
        ProofStep(6, Clause([-1])),
        ProofStep(7, Clause([3]), (5, 6), 1),
        ProofStep(8, Clause([-3])),
        ProofStep(9, Clause(), (7, 8), 3),
    ), 9)
    rep = verify_proof(f, proof)
    assert rep.valid and rep.refutation
    assert rep.regular is False


def test_trace_round_trip_and_forward_reference():
    f = XOR2
    p = extract_proof(saturate(f, 2))
    text = write_trace(p)
    assert text.splitlines()[-1].split()[1] == "0"
    q = read_trace(text, f)
    assert verify_proof(f, q).valid
    lines = text.splitlines()
    # move the root before its antecedents
    with pytest.raises(ProofError):
        read_trace("\n".join([lines[-1].replace(lines[-1].split()[0], "1", 1)]
                             + lines[:-1]) + "\n", f)
    sid = len(lines) + 1
    with pytest.raises(ProofError):
        read_trace(text + f"{sid} 0 {sid + 5} 1 1\n", f)


@given(st.integers(0, 10_000), st.integers(1, 4))
@settings(max_examples=150, deadline=None)
def test_saturation_equals_reference(seed, k):
    f = random_cnf(random.Random(seed))
    r = saturate(f, k)
    ref = reference_saturation(f, k)
    assert (r.refuted, r.rounds_to_empty) == ref[:2]
    if r.refuted:
        rep = verify_proof(f, extract_proof(r))
        assert rep.valid and rep.width <= k and rep.depth == r.rounds_to_empty
