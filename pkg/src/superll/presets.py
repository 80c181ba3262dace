"""Built-in instances for the eight known systems.

Signature names: ``b`` plays the role of the default exponential and ``s``
the second one (the LLL paragraph, SLL's auxiliary modality, the shift).
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .instance import Instance, Witnesses

ALL = frozenset({"cut", "expansion"})

PRESET_NAMES = ("ll-functorial", "ell", "sll", "ll-full", "lll", "shift", "sell", "bsll")


class PresetError(ValueError):
    pass


def _finite(name, sigs, de=(), co=(), dg=(), p=lambda n, e: True, proved=ALL, max_k=2) -> Instance:
    de, co, dg = frozenset(de), frozenset(co), frozenset(dg)
    return Instance(
        name=name,
        signatures=tuple(sigs),
        de_fn=de.__contains__,
        co_fn=lambda es, e: (tuple(es), e) in co,
        dg_fn=lambda a, b, c: (a, b, c) in dg,
        p_fn=p,
        proved=frozenset(proved),
        max_co_arity=max_k,
    )


def ll_functorial() -> Instance:
    return _finite(
        "ll-functorial", ["b"], de=["b"], co=[((), "b"), (("b", "b"), "b")], dg=[("b", "b", "b")]
    )


def ell() -> Instance:
    return _finite("ell", ["b"], co=[((), "b"), (("b", "b"), "b")])


def sll() -> Instance:
    return Instance(
        name="sll",
        signatures=("b", "s"),
        de_fn=lambda e: e == "s",
        co_fn=lambda es, e: e == "b" and all(x == "s" for x in es),
        dg_fn=lambda a, b, c: False,
        p_fn=lambda n, e: True,
        proved=ALL,
    )


def ll_full() -> Instance:
    return Instance(
        name="ll-full",
        signatures=("b",),
        de_fn=lambda e: True,
        co_fn=lambda es, e: True,
        dg_fn=lambda a, b, c: True,
        p_fn=lambda n, e: True,
        proved=ALL | {"girardization", "subsumption"},
    )


def lll() -> Instance:
    return _finite(
        "lll",
        ["b", "s"],
        co=[((), "b"), (("b",), "b"), (("s",), "s"), (("s",), "b"), (("b", "b"), "b")],
        p=lambda n, e: n == 1 if e == "b" else True,
        proved=ALL | {"subsumption"},
    )


def shift() -> Instance:
    return _finite(
        "shift",
        ["b", "s"],
        de=["b", "s"],
        co=[((), "b"), (("b",), "b"), (("b", "b"), "b"), (("s",), "s")],
        dg=[("b", "b", "b"), ("s", "s", "s")],
        proved=ALL | {"girardization"},
    )


# -- seLL ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SellParams:
    signatures: tuple[str, ...]
    leq: frozenset  # reflexive-transitive closure, pairs (e, e') with e <= e'
    weak: frozenset
    contr: frozenset

    def below(self, a: str, b: str) -> bool:
        return (a, b) in self.leq


def preorder_closure(sigs: Iterable[str], pairs: Iterable[tuple[str, str]]) -> frozenset:
    sigs = list(sigs)
    rel = {(e, e) for e in sigs} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return frozenset(rel)


def sell_params(sigs, pairs, weak, contr) -> SellParams:
    sigs = tuple(sigs)
    known = set(sigs)
    for e in [x for pr in pairs for x in pr] + list(weak) + list(contr):
        if e not in known:
            raise PresetError(f"sell: unknown signature {e!r}")
    leq = preorder_closure(sigs, pairs)
    for label, subset in (("E_W", weak), ("E_C", contr)):
        for a, b in sorted(leq):
            if a in subset and b not in subset:
                raise PresetError(f"sell: {label} is not upward closed ({a} <= {b}, {a} in {label}, {b} not)")
    return SellParams(sigs, leq, frozenset(weak), frozenset(contr))


def default_sell_params() -> SellParams:
    return sell_params("abc", [("a", "b"), ("b", "c")], "bc", "abc")


def sell(params: SellParams | None = None, name: str = "sell") -> Instance:
    """Default: the chain a <= b <= c with E_W = {b, c} and E_C = {a, b, c}."""
    P = params or default_sell_params()

    def co(es, e):
        match len(es):
            case 0:
                return e in P.weak
            case 1:
                return es[0] == e
            case 2:
                return es[0] == es[1] == e and e in P.contr
        return False

    return Instance(
        name=name,
        signatures=P.signatures,
        de_fn=lambda e: True,
        co_fn=co,
        dg_fn=lambda a, b, c: b == c and P.below(a, b),
        p_fn=lambda n, e: True,
        proved=ALL | {"girardization"},
        max_co_arity=2,
    )


# -- B_SLL --------------------------------------------------------------------------


@dataclass(frozen=True)
class Semiring:
    """An ordered semiring on string-named elements."""

    name: str
    add: Callable[[str, str], str]
    mul: Callable[[str, str], str]
    zero: str
    one: str
    leq: Callable[[str, str], bool]
    member: Callable[[str], bool]
    sample: tuple[str, ...]
    key: Callable[[str], object]


def _nat(v: str) -> int:
    return int(v)


def nat_semiring(size: int = 5) -> Semiring:
    """(N, +, 0, *, 1, <=), sampled on 0..size-1."""
    return Semiring(
        name="nat",
        add=lambda a, b: str(int(a) + int(b)),
        mul=lambda a, b: str(int(a) * int(b)),
        zero="0",
        one="1",
        leq=lambda a, b: int(a) <= int(b),
        member=lambda a: re.fullmatch(r"0|[1-9][0-9]*", a) is not None,
        sample=tuple(str(i) for i in range(size)),
        key=_nat,
    )


NINF = "ninf"


def _arc(v: str) -> float:
    return float("-inf") if v == NINF else int(v)


def _arc_out(x: float) -> str:
    return NINF if x == float("-inf") else str(int(x))


def maxplus_semiring(size: int = 5) -> Semiring:
    """The max/plus (arctic) semiring N u {-inf} with max as sum and + as
    product; ``ninf`` is its zero and ``0`` its unit."""
    return Semiring(
        name="maxplus",
        add=lambda a, b: _arc_out(max(_arc(a), _arc(b))),
        mul=lambda a, b: _arc_out(_arc(a) + _arc(b)),
        zero=NINF,
        one="0",
        leq=lambda a, b: _arc(a) <= _arc(b),
        member=lambda a: a == NINF or re.fullmatch(r"0|[1-9][0-9]*", a) is not None,
        sample=(NINF,) + tuple(str(i) for i in range(size - 1)),
        key=_arc,
    )


def check_semiring(S: Semiring) -> None:
    """Probe the ordered-semiring laws exhaustively on the sample."""
    xs = S.sample
    add, mul, leq = S.add, S.mul, S.leq

    def need(cond, law, *vals):
        if not cond:
            raise PresetError(f"bsll: semiring {S.name} violates {law} at {vals}")

    for a in xs:
        need(add(a, S.zero) == a, "additive identity", a)
        need(mul(a, S.one) == a == mul(S.one, a), "multiplicative identity", a)
        need(mul(a, S.zero) == S.zero == mul(S.zero, a), "annihilation", a)
        need(leq(a, a), "order reflexivity", a)
        for b in xs:
            need(add(a, b) == add(b, a), "commutativity of +", a, b)
            for c in xs:
                need(add(add(a, b), c) == add(a, add(b, c)), "associativity of +", a, b, c)
                need(mul(mul(a, b), c) == mul(a, mul(b, c)), "associativity of *", a, b, c)
                need(mul(a, add(b, c)) == add(mul(a, b), mul(a, c)), "left distributivity", a, b, c)
                need(mul(add(a, b), c) == add(mul(a, c), mul(b, c)), "right distributivity", a, b, c)
                if leq(a, b):
                    need(not leq(b, c) or leq(a, c), "order transitivity", a, b, c)
                    need(leq(add(a, c), add(b, c)), "order compatibility with +", a, b, c)
                    need(leq(mul(a, c), mul(b, c)), "order compatibility with *", a, b, c)
                    need(leq(mul(c, a), mul(c, b)), "order compatibility with *", c, a, b)


def bsll(S: Semiring | None = None, name: str = "bsll") -> Instance:
    S = S or nat_semiring()
    check_semiring(S)

    def co(es, e):
        match len(es):
            case 0:
                return e == S.zero
            case 1:
                return S.leq(es[0], e)
            case 2:
                return S.add(es[0], es[1]) == e
        return False

    witnesses = Witnesses(
        gir3=lambda eps, e1, e2, e: tuple(S.mul(x, e2) for x in eps),
        gir4=lambda e1, e2, e3, e: S.mul(e2, e3),
        gir5=lambda e: S.one,
    )
    return Instance(
        name=name,
        signatures=S.sample,
        de_fn=lambda e: e == S.one,
        co_fn=co,
        dg_fn=lambda a, b, c: S.mul(a, b) == c,
        p_fn=lambda n, e: True,
        witnesses=witnesses,
        finite=False,
        member=S.member,
        proved=ALL | {"girardization"},
        max_co_arity=2,
        order_key=S.key,
    )


# -- the broken instance ------------------------------------------------------------------


def broken() -> Instance:
    """Two signatures e, e' with p_2(e), p_1(e') and co_1(e', e) only: the
    cut-elimination counterexample."""
    return _finite(
        "broken",
        ["e", "e'"],
        co=[(("e'",), "e")],
        p=lambda n, e: (n, e) in {(2, "e"), (1, "e'")},
        proved=frozenset(),
        max_k=1,
    )


# -- lookup -------------------------------------------------------------------------------

_SIMPLE = {
    "ll-functorial": ll_functorial,
    "ell": ell,
    "sll": sll,
    "ll-full": ll_full,
    "lll": lll,
    "shift": shift,
    "broken": broken,
}


def parse_sell(spec: str) -> SellParams:
    # a<b<c;W=b,c;C=a,b,c   (chains separated by spaces: "a<b a<c")
    parts = [x.strip() for x in spec.split(";") if x.strip()]
    if not parts:
        raise PresetError("sell: empty parameter")
    sigs: list[str] = []
    pairs = []
    for chain in parts[0].split():
        elems = [x.strip() for x in chain.split("<")]
        for e in elems:
            if e and e not in sigs:
                sigs.append(e)
        pairs += list(zip(elems, elems[1:]))
    weak, contr = set(sigs), set(sigs)
    for kv in parts[1:]:
        key, _, vals = kv.partition("=")
        items = {v for v in re.split(r"[,\s]+", vals.strip()) if v}
        if key.strip() == "W":
            weak = items
        elif key.strip() == "C":
            contr = items
        else:
            raise PresetError(f"sell: unknown parameter {key!r}")
    return sell_params(sigs, pairs, weak, contr)


def make_preset(ident: str) -> Instance:
    """``ell``, ``sll``, ... ; ``sell`` or ``sell:a<b<c;W=b,c;C=a,b,c``;
    ``bsll``, ``bsll:nat:6`` or ``bsll:maxplus``."""
    base, _, arg = ident.partition(":")
    if base in _SIMPLE and not arg:
        return _SIMPLE[base]()
    if base == "sell":
        return sell(parse_sell(arg) if arg else None, name=ident)
    if base == "bsll":
        kind, _, size = arg.partition(":")
        n = int(size) if size else 5
        if kind in ("", "nat"):
            return bsll(nat_semiring(n), name=ident)
        if kind == "maxplus":
            return bsll(maxplus_semiring(n), name=ident)
        raise PresetError(f"bsll: unknown semiring {kind!r}")
    raise PresetError(f"unknown preset {ident!r}; known: {', '.join(PRESET_NAMES)}")


def all_presets() -> list[Instance]:
    return [make_preset(n) for n in PRESET_NAMES]


def load_instance(ref: str) -> Instance:
    """Resolve ``preset:NAME`` or an instance file path."""
    from .instance import load_instance_file

    if ref.startswith("preset:"):
        return make_preset(ref[len("preset:"):])
    return load_instance_file(ref)


def broken_derivation():
    """The proof with one cut whose conclusion has no cut-free proof in ``broken()``."""
    from .proof import Ax, Co, Cut, Prom, TensorI, node
    from .syntax import Atom, DualAtom, Quest

    x, nx = Atom("X"), DualAtom("X")
    left = node(Co(("e'",), "e", (1,), x), node(Prom("e'", 0), node(Ax(nx))))
    right = node(Prom("e", 1), node(TensorI(0, 0), node(Ax(x)), node(Ax(x))))
    return node(Cut(Quest("e", x), 0, 0), left, right)
