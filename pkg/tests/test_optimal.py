from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twoway.core import (
    Atom,
    Comparison,
    Instance,
    IntervalLeaf,
    KeyLeaf,
    NilLeaf,
    Op,
    Tree,
    TreeKind,
    cost,
    validate,
)
from twoway.generate import tightness_instance
from twoway.optimal import (
    QueryState,
    SolverLimitError,
    brute_force_items,
    brute_force_optimal,
    optimal,
    reachable_states,
    successful_only_optimal_over_items,
)

from conftest import instances


def test_two_key_golden(two_key, two_key_nil):
    c, t = optimal(two_key, TreeKind.NIL)
    assert c == Fraction(9, 5)
    assert t == two_key_nil  # smallest key first, = before <
    c, t = optimal(two_key, TreeKind.LOC)
    assert c == Fraction(12, 5)
    assert cost(t, two_key) == c
    assert brute_force_optimal(two_key, TreeKind.NIL)[0] == Fraction(9, 5)


@pytest.mark.parametrize(
    "eps", [Fraction(49, 100), Fraction(1, 4), Fraction(1, 10), Fraction(1, 100)]
)
def test_tightness_family(eps):
    inst = tightness_instance(eps)
    nil, _ = optimal(inst, TreeKind.NIL)
    loc, _ = optimal(inst, TreeKind.LOC)
    assert nil == 1
    assert loc == 2 - eps
    assert loc - nil == 1 - eps


def test_empty_instance():
    inst = Instance(0, (), (1,))
    for kind in TreeKind:
        c, t = optimal(inst, kind)
        assert c == 0 and t.internal_count() == 0
        assert brute_force_optimal(inst, kind)[0] == 0
    assert optimal(inst, TreeKind.LOC)[1].root == IntervalLeaf(0)
    assert optimal(inst, TreeKind.NIL)[1].root == NilLeaf()


def test_successful_only_prices_keys_only(two_key):
    c, t = optimal(two_key, TreeKind.SUCCESSFUL_ONLY)
    assert c == Fraction(2, 5)
    assert validate(t, two_key, TreeKind.SUCCESSFUL_ONLY).correct


def test_limits():
    big = Instance.from_weights([1] * 11, [1] * 12)
    with pytest.raises(SolverLimitError):
        optimal(big, TreeKind.NIL)
    with pytest.raises(SolverLimitError):
        brute_force_optimal(Instance.from_weights([1] * 5, [1] * 6), TreeKind.NIL)
    assert optimal(big, TreeKind.NIL, max_n=11)[0] > 0


@settings(max_examples=80, deadline=None)
@given(instances(max_n=6))
def test_optimal_tree_invariants(inst):
    nil_c, nil_t = optimal(inst, TreeKind.NIL)
    loc_c, loc_t = optimal(inst, TreeKind.LOC)
    for kind, c, t in ((TreeKind.NIL, nil_c, nil_t), (TreeKind.LOC, loc_c, loc_t)):
        rep = validate(t, inst, kind)
        assert rep.correct and rep.redundant_nodes == []
        assert cost(t, inst) == c
    assert nil_c <= loc_c <= nil_c + 1
    assert len(loc_t.leaves()) == 2 * inst.n + 1
    assert inst.n + 1 <= len(nil_t.leaves()) <= 2 * inst.n + 1


@settings(max_examples=40, deadline=None)
@given(instances(max_n=3))
def test_memoised_matches_brute_force(inst):
    for kind in TreeKind:
        assert optimal(inst, kind)[0] == brute_force_optimal(inst, kind)[0]


@settings(max_examples=30, deadline=None)
@given(instances(min_n=1, max_n=6))
def test_states_are_ranges_minus_keys(inst):
    for kind in (TreeKind.LOC, TreeKind.NIL):
        for mask in reachable_states(inst, kind):
            qs = QueryState.from_mask(mask)
            assert qs.mask == mask
            assert {a.index for a in qs.atoms()} == {j for j in range(2 * inst.n + 1) if mask >> j & 1}


def test_query_state_split():
    qs = QueryState.universe(2)
    yes, no = qs.split(Comparison(Op.EQ, 1))
    assert yes.atoms() == [Atom.key(1)]
    assert no == QueryState(0, 4, frozenset({1}))
    yes, no = no.split(Comparison(Op.LESS, 2))
    assert yes == QueryState(0, 2, frozenset({1}))
    assert no == QueryState(3, 4)
    with pytest.raises(ValueError):
        QueryState.from_mask(0b11011)  # a missing interval is not reachable
    with pytest.raises(ValueError):
        QueryState(0, 2, frozenset({2}))


# --- item trees -------------------------------------------------------------

def test_items_examples():
    c, t = successful_only_optimal_over_items([1])
    assert c == 0 and t.root == KeyLeaf(1)
    c, t = successful_only_optimal_over_items([Fraction(1, 2), Fraction(1, 2)])
    assert c == 1 and t.internal_count() == 1
    with pytest.raises(ValueError):
        successful_only_optimal_over_items([])
    with pytest.raises(ValueError):
        successful_only_optimal_over_items([1, -1])


def test_items_two_key_merged():
    # (0,1) alone, then {1}+(1,2) and {2}+(2,3)
    weights = [Fraction(1, 5), Fraction(2, 5), Fraction(2, 5)]
    for equality in (True, False):
        c, _ = successful_only_optimal_over_items(weights, equality)
        assert c == brute_force_items(weights, equality)
    assert successful_only_optimal_over_items(weights, False)[0] == Fraction(8, 5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=1, max_size=5), st.booleans())
def test_items_match_brute_force(weights, equality):
    assert successful_only_optimal_over_items(weights, equality)[0] == brute_force_items(weights, equality)
