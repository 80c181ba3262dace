import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superll.generate import random_proof
from superll.native import (
    Ctr,
    Der1,
    Dig,
    Leq,
    Mpx,
    NativeError,
    PromBS,
    PromLL,
    PromSec,
    PromSub,
    Wk,
    WkSub,
    check_native,
    decode_native,
    encode_native,
    native_sequent,
    native_system,
    read_native,
)
from superll.presets import ll_full, lll, make_preset, sll
from superll.proof import (
    Ax,
    Co,
    Dg,
    Exchange,
    Prom,
    PromOrdered,
    RuleError,
    TensorI,
    check_proof,
    node,
    write_proof,
)
from superll.syntax import Atom, DualAtom, Quest, sequent_perm_eq

X, NX = Atom("X"), DualAtom("X")


def names(p):
    return [q.rule.name for q in p.nodes() if not isinstance(q.rule, Exchange)]


# -- encoding ---------------------------------------------------------------------


def test_encode_multiplexing():
    system = native_system("sll")
    base = node(TensorI(0, 0), node(Ax(NX)), node(Ax(NX)))
    np = node(Mpx((1, 2), X), base)
    assert check_native(system, np).ok
    out = encode_native(system, np)
    assert check_proof(sll(), out).ok
    assert names(out)[:3] == ["co", "de", "de"]
    co = out.rule if isinstance(out.rule, Co) else out.premises[0].rule
    assert co.sigs == ("s", "s") and co.sig == "b"


def test_encode_sell_promotion():
    system = native_system("sell")
    inst = system.instance()
    np = node(PromSub("a", 1), node(Ax(Quest("c", X))))  # a <= c
    assert check_native(system, np).ok
    out = encode_native(system, np)
    assert check_proof(inst, out).ok
    dgs = [q.rule for q in out.nodes() if isinstance(q.rule, Dg)]
    assert [(d.outer, d.inner, d.sig) for d in dgs] == [("a", "c", "c")]
    assert any(isinstance(q.rule, Prom) and q.rule.sig == "a" for q in out.nodes())


def test_encode_bsll_promotion():
    system = native_system("bsll")
    np = node(PromBS("2", 1, ("6",)), node(Ax(Quest("3", X))))
    assert check_native(system, np).ok
    out = encode_native(system, np)
    assert check_proof(system.instance(), out).ok
    (d,) = [q.rule for q in out.nodes() if isinstance(q.rule, Dg)]
    assert (d.outer, d.inner, d.sig) == ("2", "3", "6")


def test_native_side_conditions():
    sell = native_system("sell")
    assert not check_native(sell, node(PromSub("c", 1), node(Ax(Quest("a", X))))).ok
    w = native_system("sell:a<b;W=b;C=a,b")
    assert not check_native(w, node(WkSub("a", X), node(Ax(X)))).ok
    b = native_system("bsll")
    assert not check_native(b, node(PromBS("2", 1, ("5",)), node(Ax(Quest("3", X))))).ok
    assert not check_native(b, node(Der1("2", 0), node(Ax(X)))).ok
    assert not check_native(b, node(Leq("1", 0), node(Ax(Quest("3", X))))).ok


def test_foreign_rules_rejected():
    ell = native_system("ell")
    assert not check_native(ell, node(Dig(0), node(Ax(Quest("b", Quest("b", X)))))).ok
    assert not check_native(ell, node(Prom("b", 0), node(Ax(X)))).ok
    with pytest.raises(NativeError):
        encode_native(ell, node(Dig(0), node(Ax(Quest("b", Quest("b", X))))))


# -- decoding ---------------------------------------------------------------------


def test_decode_ell_is_node_for_node():
    system = native_system("ell")
    inst = system.instance()
    for seed in range(20):
        p = random_proof(inst, seed, max_height=6)
        n = decode_native(system, p, inst)
        assert check_native(system, n).ok
        assert n.conclusion == p.conclusion
        assert sum(1 for _ in n.nodes()) == sum(1 for _ in p.nodes())


def test_decode_sll_erases_star_promotion():
    system = native_system("sll")
    p = node(Prom("s", 0), node(Ax(X)))  # |- !s X, ?s X^
    n = decode_native(system, p)
    assert n.rule == Ax(X)
    assert native_sequent(system, p.conclusion) == (X, NX)


def test_decode_lll_section_promotion():
    system = native_system("lll")
    inst = lll()
    ctx = node(TensorI(0, 0), node(Ax(Quest("s", X))), node(Ax(Quest("b", X))))
    # |- ?s X * ?b X, !s X^, !b X^  -> promote on s with targets [b, s]
    p = node(PromOrdered("s", 0, ("b", "s")), ctx)
    assert check_proof(inst, p).ok
    n = decode_native(system, p, inst)
    assert isinstance(n.rule, PromSec) and n.rule.labels == ("b", "s")
    assert check_native(system, n).ok


def test_decode_ll_full_promotion():
    system = native_system("ll-full")
    p = node(Prom("b", 1), node(Ax(Quest("b", X))))
    n = decode_native(system, p, ll_full())
    assert check_native(system, n).ok
    assert any(isinstance(q.rule, PromLL) for q in n.nodes())
    assert sequent_perm_eq(n.conclusion, p.conclusion)


# -- file format ------------------------------------------------------------------

def test_native_file_rules():
    n = read_native("(mpx 2 [1 2] \"X\" (tensor 0 0 (ax \"X^\") (ax \"X^\")))")
    assert n.rule == Mpx((1, 2), X)
    with pytest.raises(Exception, match="indices"):
        read_native("(mpx 3 [1 2] \"X\" (tensor 0 0 (ax \"X^\") (ax \"X^\")))")


def test_native_round_trip_text():
    system = native_system("bsll")
    inst = system.instance()
    p = random_proof(inst, 4, max_height=6)
    n = decode_native(system, p, inst)
    assert read_native(write_proof(n)) == n


def test_wk_and_ctr_constructors():
    p = node(Wk(X), node(Ax(X)))
    assert p.conclusion == (Quest("b", X), X, NX)
    with pytest.raises(RuleError):
        node(Ctr(0, 1), node(Ax(X)))


# -- round trips ------------------------------------------------------------------

SYSTEMS = ("ll-functorial", "ell", "sll", "ll-full", "lll", "shift", "sell", "bsll", "bsll:maxplus", "sell:a<b a<c;W=b,c;C=c")


@settings(max_examples=200)
@given(st.sampled_from(SYSTEMS), st.integers(0, 10**6), st.booleans())
def test_decode_encode_round_trip(ident, seed, cut):
    system = native_system(ident)
    inst = system.instance()
    p = random_proof(inst, seed, max_height=7, with_cut=cut)
    n = decode_native(system, p, inst)
    assert check_native(system, n).ok
    assert sequent_perm_eq(n.conclusion, native_sequent(system, p.conclusion))
    e = encode_native(system, n)
    assert check_proof(inst, e).ok
    assert e.cut_free == n.cut_free == p.cut_free
    n2 = decode_native(system, e, inst)
    assert check_native(system, n2).ok and sequent_perm_eq(n2.conclusion, n.conclusion)
    if ident != "sll":
        assert sequent_perm_eq(e.conclusion, p.conclusion)


def test_unknown_system():
    with pytest.raises(NativeError):
        native_system("broken")
    assert make_preset("ell").name == native_system("ell").instance().name
