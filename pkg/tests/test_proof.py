import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superll.generate import random_proof
from superll.presets import broken, broken_derivation, make_preset, sll
from superll.proof import (
    Ax,
    BotI,
    Co,
    Cut,
    De,
    Exchange,
    OneI,
    Prom,
    PromGirard,
    Proof,
    ProofSyntaxError,
    RuleError,
    SideConditionError,
    TensorI,
    TopI,
    check_proof,
    infer,
    node,
    normalize,
    permute_to,
    proof_size,
    read_proof,
    rule_counts,
    strip_exchanges,
    to_latex,
    write_proof,
)
from superll.syntax import Atom, DualAtom, Quest, parse_sequent, sequent_perm_eq

X, NX = Atom("X"), DualAtom("X")


def test_infer_axiom():
    p = infer(make_preset("ll-functorial"), Ax(X), [])
    assert p.conclusion == (X, NX)


def test_infer_weakening_as_nullary_contraction():
    ell = make_preset("ell")
    gamma = infer(ell, Ax(X), [])
    p = infer(ell, Co((), "b", (), X), [gamma])
    assert p.conclusion == (Quest("b", X), X, NX)


def test_infer_multiplexing_shape():
    inst = sll()
    base = node(TensorI(0, 0), node(Ax(NX)), node(Ax(NX)))
    # |- X^ * X^, X, X  then rotate so that the two copies of X come first
    two = permute_to(base, (X, X, base.conclusion[0]))
    d1 = infer(inst, De("s", 0), [two])
    d2 = infer(inst, De("s", 1), [d1])
    out = infer(inst, Co(("s", "s"), "b", (0, 1), X), [d2])
    assert out.conclusion == (Quest("b", X), base.conclusion[0])


def test_infer_side_condition():
    with pytest.raises(SideConditionError):
        infer(make_preset("ell"), De("b", 0), [node(Ax(X))])


def test_broken_derivation_is_valid():
    assert check_proof(broken(), broken_derivation()).ok


def test_swapped_cut_is_invalid_at_cut():
    p = broken_derivation()
    swapped = Proof(Cut(p.rule.formula, 0, 0), (p.premises[1], p.premises[0]), p.conclusion)
    rep = check_proof(broken(), swapped)
    assert not rep.ok and rep.first.path == () and rep.first.rule == "cut"


def test_promotion_side_condition_names_query():
    ctx = node(TensorI(0, 0), node(Ax(X)), node(TensorI(0, 0), node(Ax(X)), node(Ax(X))))
    p = Proof(Prom("e", 0), (ctx,))
    assert p.conclusion[1:] == (Quest("e", NX),) * 3
    rep = check_proof(broken(), p)
    assert not rep.ok
    assert str(rep.first.query) == "p(3, e)"


def test_unknown_signature_reported():
    p = node(Prom("zz", 0), node(OneI()))
    rep = check_proof(broken(), p)
    assert not rep.ok and "zz" in rep.first.message


def test_stored_conclusion_mismatch():
    p = Proof(Ax(X), (), (X, X))
    assert not check_proof(broken(), p).ok


def test_strict_mode_demands_exact_order():
    p = Proof(Ax(X), (), (NX, X))
    assert check_proof(broken(), p).ok
    assert not check_proof(broken(), p, strict=True).ok


def test_derived_rules_can_be_excluded():
    ll = make_preset("ll-full")
    p = node(PromGirard("b", 1, ("b",)), node(Ax(Quest("b", X))))
    assert check_proof(ll, p).ok
    assert not check_proof(ll, p, allowed=(Ax, Prom)).ok


def test_arity_mismatch():
    with pytest.raises(RuleError):
        node(TensorI(0, 0), node(Ax(X)))


def test_sizes():
    ax = node(Ax(X))
    ex = node(Exchange((1, 0)), ax)
    assert proof_size(ax) == 1
    assert proof_size(ex, "raw") == 2 and proof_size(ex, "measure") == 1
    assert proof_size(node(TensorI(0, 0), ax, ax)) == 3


def test_permute_to_merges_exchanges():
    ax = node(Ax(X))
    once = permute_to(ax, (NX, X))
    assert isinstance(once.rule, Exchange)
    assert permute_to(once, (X, NX)) is ax


def test_rule_counts():
    counts = rule_counts(broken_derivation())
    assert counts == {"ax": 3, "prom": 2, "co1": 1, "tensor": 1, "cut": 1}


# -- file format ------------------------------------------------------------------

SAMPLE = """
; a comment
(parr 0 1 :concl "|- X^ | X"
  (ax "X^"))
"""


def test_read_without_stored_conclusions():
    p = read_proof(SAMPLE)
    assert p.conclusion == parse_sequent("|- X^ | X")
    assert p.premises[0].conclusion == (NX, X)


def test_write_read_round_trip_broken():
    p = broken_derivation()
    assert read_proof(write_proof(p)) == p


@pytest.mark.parametrize(
    "text, where",
    [
        ("(ax \"X\"", "offset"),
        ("(frob 1)", "frob"),
        ("(tensor 0 0 (ax \"X\"))", "expects 2 premise"),
        ("(ax \"X *\")", "end of input"),
        ("(one (parr 0 0 (ax \"X\")))", r"root\.0 \(parr\)"),
        ("(ax \"X\") (ax \"X\")", "trailing"),
    ],
)
def test_read_errors(text, where):
    with pytest.raises((ProofSyntaxError, RuleError), match=where):
        read_proof(text)


def test_latex_export():
    tex = to_latex(broken_derivation())
    assert tex.startswith("\\begin{prooftree}") and tex.rstrip().endswith("\\end{prooftree}")
    assert tex.count("\\AxiomC{}") == 3
    assert "\\BinaryInfC" in tex and "\\oc_{e'}" in tex


def test_latex_units_and_top():
    p = node(BotI(), node(TopI((X,))))
    tex = to_latex(p)
    assert "\\top" in tex and "\\bot" in tex


# -- properties -------------------------------------------------------------------

PRESETS = ("ll-functorial", "ell", "sll", "ll-full", "lll", "shift", "sell", "bsll")


@settings(max_examples=150)
@given(st.sampled_from(PRESETS), st.integers(0, 10**6), st.booleans())
def test_generated_proofs_validate_and_round_trip(name, seed, cut):
    inst = make_preset(name)
    p = random_proof(inst, seed, max_height=6, with_cut=cut)
    assert check_proof(inst, p, strict=True).ok
    assert read_proof(write_proof(p)) == p
    assert all(proof_size(p, "raw") > proof_size(q, "raw") for q in p.premises)


@settings(max_examples=150)
@given(st.sampled_from(PRESETS), st.integers(0, 10**6))
def test_normalize_and_strip_keep_validity(name, seed):
    inst = make_preset(name)
    p = random_proof(inst, seed, max_height=6)
    rng = random.Random(seed)
    c = list(p.conclusion)
    rng.shuffle(c)
    loose = Proof(p.rule, p.premises, tuple(c))
    fixed = normalize(loose)
    assert check_proof(inst, fixed, strict=True).ok
    assert sequent_perm_eq(fixed.conclusion, p.conclusion)
    assert strip_exchanges(p).size == p.size
