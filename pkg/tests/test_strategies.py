import itertools

import pytest

from narrow.cnf import CnfFormula, PartialAssignment
from narrow.gadgets import build_gadget, compile_gadget, vname
from narrow.kai import KaiRule
from narrow.strategies import (Factor, StrategyError, StrategyFamily,
                               check_crit_inclusions, check_critical, cl, compose, connectable,
                               make_strategy, union)

R = KaiRule(1, 2, 3, 1, 2)


def _subsets(lits, size):
    return {frozenset(c) for r in range(size + 1) for c in itertools.combinations(lits, r)}


def _gadget(kind, k, n, **kw):
    return compile_gadget(build_gadget(kind, k, n, **kw))


def _boundary(cf, H, gid, block, expect):
    """Compare the family's boundary on one block with ``expect(name) -> bit``."""
    got = H.boundary
    for v, idx in cf.var_of.items():
        if v.gadget == gid and v.block == block:
            assert got[idx] == expect(v), v


# ---------------------------------------------------------------- combinators

def test_cl_of_empty_assignment_is_empty_position_only():
    H = cl(PartialAssignment(), 2)
    assert H.contains(frozenset())
    assert not H.contains(frozenset({1}))


def test_cl_membership_is_subset_enumeration():
    a = PartialAssignment({1: 1, 2: 0, 3: 1, 4: 0, 5: 1})
    H = cl(a, 2)
    universe = [v * s for v in range(1, 6) for s in (1, -1)]
    members = {p for r in range(6) for p in map(frozenset, itertools.combinations(universe, r))
               if H.contains(p)}
    assert members == _subsets(a.true_lits, H.cap)
    assert not H.critical_positions()


def test_cl_of_satisfying_total_assignment_passes():
    f = CnfFormula.from_lists([[1, 2], [-1, 3], [-2, -3], [2, 3]])
    rep = check_critical(f, cl(PartialAssignment({1: 1, 2: 0, 3: 1}), 2))
    assert rep.ok and rep.critical == 0


def test_cl_of_falsifying_assignment_fails_clause_check():
    f = CnfFormula.from_lists([[1, 2], [-1, 3]])
    rep = check_critical(f, cl(PartialAssignment({1: 1, 2: 0, 3: 0}), 2))
    assert not rep.ok and "clauses FAIL" in " ".join(rep.lines())


def test_compose_of_closures_is_closure_of_union():
    a, b = PartialAssignment({1: 1, 2: 0}), PartialAssignment({3: 0, 4: 1})
    H = compose(cl(a, 2), cl(b, 2))
    joint = PartialAssignment({1: 1, 2: 0, 3: 0, 4: 1})
    expect = cl(joint, 2)
    for p in _subsets(joint.true_lits | {-1, 2}, 4):
        assert H.contains(p) == expect.contains(p)


def test_connectable_checks_boundaries_on_links():
    g = cl(PartialAssignment({1: 1}), 2, boundary_vars=[1])
    h_ok = cl(PartialAssignment({2: 1}), 2, boundary_vars=[2])
    h_bad = cl(PartialAssignment({2: 0}), 2, boundary_vars=[2])
    assert connectable(g, h_ok, [(1, 2)]) is None
    assert "mismatch" in connectable(g, h_bad, [(1, 2)])
    assert "shared" in connectable(g, g)
    with pytest.raises(StrategyError):
        compose(g, h_bad, [(1, 2)])
    with pytest.raises(StrategyError):
        compose(g, cl(PartialAssignment({2: 1}), 3))


def test_union_with_itself_keeps_membership():
    H = cl(PartialAssignment({1: 1, 2: 0, 3: 1}), 2)
    U = union([H, H])
    for p in _subsets([1, -1, 2, -2, 3, -3], 3):
        assert U.contains(p) == H.contains(p)


def test_factor_needs_blocks():
    with pytest.raises(StrategyError):
        Factor("empty", [])


# ------------------------------------------------------------ gadget families

def test_rule_family_passes_exhaustively_without_critical_positions():
    cf = _gadget("dup_rule", 2, 3, rule=R)
    rep = check_critical(cf.formula, make_strategy("rule_duplicator", cf, p=(1, 2)))
    assert rep.ok and rep.critical == 0 and rep.positions > 0


def test_inapplicable_duplicator_rule_is_refused():
    cf = _gadget("dup_rule", 2, 3, rule=R)
    with pytest.raises(StrategyError):
        make_strategy("rule_duplicator", cf, p=(2, 1))


def test_switch_output_family_passes():
    cf = _gadget("switch", 2, 2, gadget_id="M")
    rep = check_critical(cf.formula, make_strategy("switch_output", cf, p=(1, 2)))
    assert rep.ok and rep.critical == 0


def test_switch_input_family_has_critical_positions():
    cf = _gadget("switch", 2, 2, gadget_id="M")
    H = make_strategy("switch_input", cf, p=(1, 2))
    rep = check_critical(cf.formula, H, mode="sampled", trials=3000, seed=4)
    assert rep.ok and rep.critical > 0
    assert all(len(p) == H.k + 1 for p in rep.critical_seen)


def test_dropping_blocks_breaks_extension():
    cf = _gadget("switch", 2, 2, gadget_id="M")
    f = make_strategy("switch_input", cf, p=(1, 2)).factors[0]
    # the first half covers only the first open partition
    mutant = Factor(f.name, f.blocks[:len(f.blocks) // 2], f.variables, f.boundary, f.crit)
    rep = check_critical(cf.formula, StrategyFamily([[mutant]], 2), mode="sampled", trials=3000,
                         seed=1)
    assert not rep.ok
    assert any(line.startswith("extension FAIL witness=") for line in rep.lines())


def test_init_first_part_alone_is_critical():
    cf = _gadget("init", 2, 2, start=(1, 2))
    H = make_strategy("init", cf, which="part1")
    assert H.critical_positions()


def test_critical_positions_of_union_need_a_partner():
    cf = _gadget("init", 2, 2, start=(1, 2))
    part1 = make_strategy("init", cf, which="part1")
    part2 = make_strategy("init", cf, which="part2")
    [res] = check_crit_inclusions([("part1", part1, [part2])])
    assert res.passed and res.critical > 0
    # no family can stand in for itself
    [bad] = check_crit_inclusions([("self", part1, [part1])])
    assert not bad.passed and bad.witness is not None


# ------------------------------------------------------------ boundary tables

def test_boundary_spoiler_rule():
    cf = _gadget("spoiler_rule", 2, 3, rule=R, gadget_id="S")
    p = (2, 2)                              # pebble 2 blocks the rule
    H = make_strategy("rule_spoiler", cf, p=p)
    _boundary(cf, H, "S", "X", lambda v: int(v.get("j") == p[v.get("i") - 1]))
    img = (3, 2)
    _boundary(cf, H, "S", "Y", lambda v: int(v.get("i") not in {1}
                                             and v.get("j") == img[v.get("i") - 1]))
    H0 = make_strategy("rule_spoiler", cf, p=None)
    for block in ("X", "Y"):
        _boundary(cf, H0, "S", block, lambda v: 0)


def test_boundary_duplicator_rule():
    cf = _gadget("dup_rule", 2, 3, rule=R, gadget_id="D")
    H = make_strategy("rule_duplicator", cf, p=(1, 2))
    _boundary(cf, H, "D", "X", lambda v: int(v.get("j") == (1, 2)[v.get("i") - 1]))
    _boundary(cf, H, "D", "Y", lambda v: int(v.get("j") == (3, 2)[v.get("i") - 1]))


@pytest.mark.parametrize("T", [{1}, {2}, {1, 2}])
def test_boundary_switch_impasse(T):
    cf = _gadget("switch", 2, 3, gadget_id="M")
    p = (3, 1)
    H = make_strategy("switch_impasse", cf, p=p, T=frozenset(T))
    _boundary(cf, H, "M", "X", lambda v: int(v.get("i") not in T and v.get("j") == p[v.get("i") - 1]))
    _boundary(cf, H, "M", "Y", lambda v: 0)


def test_boundary_switch_output_and_input():
    cf = _gadget("switch", 2, 3, gadget_id="M")
    p = (2, 3)
    out = make_strategy("switch_output", cf, p=p)
    _boundary(cf, out, "M", "X", lambda v: 0)
    _boundary(cf, out, "M", "Y", lambda v: int(v.get("j") == p[v.get("i") - 1]))
    inp = make_strategy("switch_input", cf, p=p)
    _boundary(cf, inp, "M", "X", lambda v: int(v.get("j") == p[v.get("i") - 1]))
    _boundary(cf, inp, "M", "Y", lambda v: 0)


def test_boundary_init_position():
    cf = _gadget("init", 2, 3, start=(1, 2), gadget_id="Is")
    H = make_strategy("init", cf, which="position", p=(3, 1))
    _boundary(cf, H, "Is", "Y", lambda v: int(v.get("j") == (3, 1)[v.get("i") - 1]))
    H0 = make_strategy("init", cf, which="zero")
    _boundary(cf, H0, "Is", "Y", lambda v: 0)


def test_boundary_choice_and_extra_rows():
    cf = _gadget("choice", 2, 4, m=3, theta=4, gadget_id="C")
    p, q = (1, 3), 2
    H = make_strategy("choice", cf, p=p, q=q)
    _boundary(cf, H, "C", "X", lambda v: int(v.get("j") == p[v.get("i") - 1]))
    _boundary(cf, H, "C", "Y", lambda v: int(v.get("j") == p[v.get("i") - 1] and v.get("q") == q))
    gen = H.factors[0].blocks[0].generator
    for i in (1, 2):
        assert gen[cf.var_of[vname("C", "E", i=i, j=p[i - 1], q=2)]] == 1
    assert check_critical(cf.formula, H).ok
    with pytest.raises(StrategyError):
        make_strategy("choice", cf, p=(4, 1), q=1)
