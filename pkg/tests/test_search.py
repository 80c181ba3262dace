import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superll.generate import random_proof
from superll.instance import UnknownSignature
from superll.presets import broken, broken_derivation, make_preset
from superll.proof import Ax, OneI, ParrI, check_proof
from superll.search import EXHAUSTED, FOUND, NOT_FOUND, SearchBudget, search_cutfree
from superll.syntax import parse_sequent, sequent_perm_eq


def test_one():
    res = search_cutfree(make_preset("ell"), parse_sequent("|- 1"))
    assert res.status == FOUND and res.depth == 1
    assert res.proof.rule == OneI()


def test_parr_then_axiom():
    res = search_cutfree(make_preset("ll-full"), parse_sequent("|- X^ | X"))
    assert res.found
    assert isinstance(res.proof.rule, ParrI)
    assert isinstance(res.proof.premises[0].rule, Ax)


def test_broken_goal_has_no_cut_free_proof_within_budget():
    inst = broken()
    goal = broken_derivation().conclusion
    assert goal == parse_sequent("|- !e' X^, ?e (X * X), ?e X^")
    res = search_cutfree(inst, goal, SearchBudget(12, 100_000))
    assert res.status == NOT_FOUND
    assert res.nodes < 100_000


def test_goal_is_provable_with_the_cut():
    # the same sequent does have a proof once the cut is allowed
    assert check_proof(broken(), broken_derivation()).ok


def test_tiny_node_budget_exhausts():
    res = search_cutfree(make_preset("ll-full"), parse_sequent("|- ?b X^, !b (X * X)"), SearchBudget(12, 3))
    assert res.status == EXHAUSTED and res.proof is None


@pytest.mark.parametrize("field", ["max_depth", "max_nodes", "max_contraction_arity", "max_promotion_width"])
def test_budget_validation(field):
    with pytest.raises(ValueError, match=field):
        SearchBudget(**{field: 0})
    with pytest.raises(ValueError):
        SearchBudget(max_dg_streak=-1)


def test_goal_signatures_checked():
    with pytest.raises(UnknownSignature):
        search_cutfree(make_preset("ell"), parse_sequent("|- ?zz X, X^"))


def test_report_lines():
    res = search_cutfree(make_preset("ell"), parse_sequent("|- 1"))
    assert res.lines()[:2] == ["goal: |- 1", "result: found"]


def test_unprovable_atom():
    assert search_cutfree(make_preset("ll-full"), parse_sequent("|- X")).status == NOT_FOUND


PRESETS = ("ll-functorial", "ell", "sll", "ll-full", "lll", "shift", "sell", "bsll")


@settings(max_examples=60)
@given(st.sampled_from(PRESETS), st.integers(0, 10**6))
def test_found_proofs_validate(name, seed):
    inst = make_preset(name)
    goal = random_proof(inst, seed, max_height=4, formula_size=3).conclusion
    res = search_cutfree(inst, goal, SearchBudget(8, 20_000))
    if res.found:
        assert check_proof(inst, res.proof).ok
        assert res.proof.cut_free
        assert sequent_perm_eq(res.proof.conclusion, goal)


@settings(max_examples=40)
@given(st.sampled_from(PRESETS), st.integers(0, 10**6), st.integers(1, 6))
def test_depth_monotonicity(name, seed, depth):
    inst = make_preset(name)
    goal = random_proof(inst, seed, max_height=4, formula_size=3).conclusion
    small = search_cutfree(inst, goal, SearchBudget(depth, 50_000))
    if small.found:
        assert search_cutfree(inst, goal, SearchBudget(depth + 2, 50_000)).status != NOT_FOUND
