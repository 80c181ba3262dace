"""Native rule sets of the eight known systems, their own checkers, and the
translations to and from superLL.

Native proofs share the ``Proof`` tree with superLL: the multiplicative and
additive rules are the same objects, only the exponential rules differ.
Native formulas use the signatures of the matching preset (``b`` for the
ordinary exponential, ``s`` for the second modality), so the renaming of
connectives is the identity except for SLL, whose ``s`` modalities are
erased.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from .instance import Instance
from .presets import (
    SellParams,
    Semiring,
    default_sell_params,
    make_preset,
    maxplus_semiring,
    nat_semiring,
    parse_sell,
)
from .proof import (
    Ax,
    BotI,
    Co,
    Cut,
    De,
    Dg,
    Exchange,
    Failure,
    OneI,
    ParrI,
    Plus1,
    Plus2,
    Prom,
    PromGirard,
    PromOrdered,
    Proof,
    Rule,
    RuleError,
    TensorI,
    TopI,
    ValidationReport,
    WithI,
    _Args,
    _at,
    _core_rule,
    _ctx,
    _fmt_list,
    _kept,
    _quote,
    build_proof,
    node,
    normalize,
    permute_to,
    read_sexpr,
)
from .syntax import (
    Bang,
    Formula,
    Quest,
    sequent_perm_eq,
    show,
    show_sequent,
    signatures_of,
)
from .transform import (
    _apply,
    eliminate_subsumption,
    expand_derived_promotions,
    girardize,
)

B, S = "b", "s"
CORE = (Ax, Cut, Exchange, TensorI, ParrI, OneI, BotI, WithI, Plus1, Plus2, TopI)


class NativeError(ValueError):
    """A native proof is malformed or a translation does not apply."""


def _quest_at(p, i: int, sig: str | None = None) -> Quest:
    f = _at(p, i)
    if not isinstance(f, Quest) or (sig is not None and f.sig != sig):
        want = f"?{sig} _" if sig else "a ?-formula"
        raise RuleError(f"expected {want} at position {i}, found {show(f)}")
    return f


def _pick(p, idxs) -> tuple:
    return tuple(p[x] for x in _kept(len(p), *idxs))


# -- rules with the ordinary exponential ------------------------------------------------


@dataclass(frozen=True)
class PromF(Rule):
    """Functorial promotion on ``b``."""

    index: int
    name = "prom-f"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Bang(B, a),) + tuple(Quest(B, p[x]) for x in k), (None,) * len(p)

    def remap(self, fns):
        return PromF(fns[0](self.index))

    def args(self):
        return [str(self.index)]


@dataclass(frozen=True)
class PromLL(Rule):
    """Girard's promotion on ``b``: the context must be ``?b`` formulas."""

    index: int
    name = "prom-ll"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        for x in k:
            _quest_at(p, x, B)
        return (Bang(B, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return PromLL(fns[0](self.index))

    def args(self):
        return [str(self.index)]


@dataclass(frozen=True)
class Der(Rule):
    index: int
    name = "der"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Quest(B, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Der(fns[0](self.index))

    def args(self):
        return [str(self.index)]


@dataclass(frozen=True)
class Dig(Rule):
    index: int
    name = "dig"

    def layout(self, prems):
        (p,) = prems
        f = _quest_at(p, self.index, B)
        inner = f.body
        if not (isinstance(inner, Quest) and inner.sig == B):
            raise RuleError(f"dig: expected ?b ?b _ at position {self.index}")
        k = _kept(len(p), self.index)
        return (inner,) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Dig(fns[0](self.index))

    def args(self):
        return [str(self.index)]


@dataclass(frozen=True)
class Wk(Rule):
    body: Formula
    name = "wk"

    def layout(self, prems):
        (p,) = prems
        return (Quest(B, self.body),) + tuple(p), (None,) + _ctx(0, range(len(p)))

    def args(self):
        return [_quote(show(self.body))]


@dataclass(frozen=True)
class Ctr(Rule):
    left: int
    right: int
    name = "ctr"

    def layout(self, prems):
        (p,) = prems
        f = _quest_at(p, self.left, B)
        if self.left == self.right or _at(p, self.right) != f:
            raise RuleError(f"ctr: positions {self.left} and {self.right} do not hold two copies of a ?b formula")
        k = _kept(len(p), self.left, self.right)
        return (f,) + _pick(p, [self.left, self.right]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Ctr(fns[0](self.left), fns[0](self.right))

    def args(self):
        return [str(self.left), str(self.right)]


@dataclass(frozen=True)
class Mpx(Rule):
    """Multiplexing: k bare copies of ``body`` become ``?b body``."""

    indices: tuple
    body: Formula
    name = "mpx"

    def layout(self, prems):
        (p,) = prems
        if len(set(self.indices)) != len(self.indices):
            raise RuleError("mpx: repeated index")
        for x in self.indices:
            if _at(p, x) != self.body:
                raise RuleError(f"mpx: expected {show(self.body)} at position {x}")
        k = _kept(len(p), *self.indices)
        return (Quest(B, self.body),) + _pick(p, self.indices), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Mpx(tuple(fns[0](x) for x in self.indices), self.body)

    def args(self):
        return [str(len(self.indices)), _fmt_list(self.indices), _quote(show(self.body))]


# -- LLL --------------------------------------------------------------------------------


@dataclass(frozen=True)
class PromU(Rule):
    """Unary promotion: ``A, B`` gives ``!b A, ?b B``."""

    index: int
    name = "prom-u"

    def layout(self, prems):
        (p,) = prems
        if len(p) != 2:
            raise RuleError(f"prom-u: premise must have exactly two formulas, has {len(p)}")
        a = _at(p, self.index)
        (x,) = _kept(2, self.index)
        return (Bang(B, a), Quest(B, p[x])), (None, None)

    def remap(self, fns):
        return PromU(fns[0](self.index))

    def args(self):
        return [str(self.index)]


@dataclass(frozen=True)
class PromSec(Rule):
    """Paragraph promotion: context formula j receives ``?{labels[j]}`` with labels in {s, b}."""

    index: int
    labels: tuple
    name = "prom-sec"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        if len(k) != len(self.labels) or not set(self.labels) <= {B, S}:
            raise RuleError("prom-sec: one label in {s, b} per context formula expected")
        return (Bang(S, a),) + tuple(Quest(l, p[x]) for l, x in zip(self.labels, k)), (None,) * len(p)

    def remap(self, fns):
        return PromSec(fns[0](self.index), self.labels)

    def args(self):
        return [str(self.index), _fmt_list(self.labels)]


# -- shifts ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ShPos(Rule):
    index: int
    name = "shpos"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        for x in k:
            _quest_at(p, x, S)
        return (Bang(S, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return ShPos(fns[0](self.index))

    def args(self):
        return [str(self.index)]


@dataclass(frozen=True)
class ShNeg(Rule):
    index: int
    name = "shneg"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Quest(S, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return ShNeg(fns[0](self.index))

    def args(self):
        return [str(self.index)]


# -- seLL -------------------------------------------------------------------------------


@dataclass(frozen=True)
class PromSub(Rule):
    """Subexponential promotion; the side condition ``sig <= e_i`` is the system's."""

    sig: str
    index: int
    name = "prom-sub"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        for x in k:
            _quest_at(p, x)
        return (Bang(self.sig, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return PromSub(self.sig, fns[0](self.index))

    def args(self):
        return [self.sig, str(self.index)]


@dataclass(frozen=True)
class DerSub(Rule):
    sig: str
    index: int
    name = "der-sub"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Quest(self.sig, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return DerSub(self.sig, fns[0](self.index))

    def args(self):
        return [self.sig, str(self.index)]


@dataclass(frozen=True)
class WkSub(Rule):
    sig: str
    body: Formula
    name = "wk-sub"

    def layout(self, prems):
        (p,) = prems
        return (Quest(self.sig, self.body),) + tuple(p), (None,) + _ctx(0, range(len(p)))

    def args(self):
        return [self.sig, _quote(show(self.body))]


@dataclass(frozen=True)
class CtrSub(Rule):
    sig: str
    left: int
    right: int
    name = "ctr-sub"

    def layout(self, prems):
        (p,) = prems
        f = _quest_at(p, self.left, self.sig)
        if self.left == self.right or _at(p, self.right) != f:
            raise RuleError(f"ctr-sub: positions {self.left} and {self.right} do not hold two copies of ?{self.sig} _")
        k = _kept(len(p), self.left, self.right)
        return (f,) + _pick(p, [self.left, self.right]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return CtrSub(self.sig, fns[0](self.left), fns[0](self.right))

    def args(self):
        return [self.sig, str(self.left), str(self.right)]


# -- B_SLL ------------------------------------------------------------------------------


@dataclass(frozen=True)
class PromBS(Rule):
    """Context ``?{e_i} B_i`` becomes ``?{sig . e_i} B_i``; products come from the system."""

    sig: str
    index: int
    products: tuple
    name = "prom-bs"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        if len(k) != len(self.products):
            raise RuleError("prom-bs: one product per context formula expected")
        concl = (Bang(self.sig, a),) + tuple(Quest(t, _quest_at(p, x).body) for t, x in zip(self.products, k))
        return concl, (None,) * len(p)

    def remap(self, fns):
        return PromBS(self.sig, fns[0](self.index), self.products)

    def args(self):
        return [self.sig, str(self.index), _fmt_list(self.products)]


@dataclass(frozen=True)
class Leq(Rule):
    sig: str
    index: int
    name = "leq"

    def layout(self, prems):
        (p,) = prems
        f = _quest_at(p, self.index)
        k = _kept(len(p), self.index)
        return (Quest(self.sig, f.body),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Leq(self.sig, fns[0](self.index))

    def args(self):
        return [self.sig, str(self.index)]


@dataclass(frozen=True)
class Der1(Rule):
    unit: str
    index: int
    name = "der1"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Quest(self.unit, a),) + _pick(p, [self.index]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Der1(self.unit, fns[0](self.index))

    def args(self):
        return [self.unit, str(self.index)]


@dataclass(frozen=True)
class Wk0(Rule):
    zero: str
    body: Formula
    name = "wk0"

    def layout(self, prems):
        (p,) = prems
        return (Quest(self.zero, self.body),) + tuple(p), (None,) + _ctx(0, range(len(p)))

    def args(self):
        return [self.zero, _quote(show(self.body))]


@dataclass(frozen=True)
class CtrPlus(Rule):
    sig: str
    left: int
    right: int
    name = "ctr-plus"

    def layout(self, prems):
        (p,) = prems
        f1, f2 = _quest_at(p, self.left), _quest_at(p, self.right)
        if self.left == self.right or f1.body != f2.body:
            raise RuleError("ctr-plus: the two positions must hold ?-formulas with the same body")
        k = _kept(len(p), self.left, self.right)
        return (Quest(self.sig, f1.body),) + _pick(p, [self.left, self.right]), (None,) + _ctx(0, k)

    def remap(self, fns):
        return CtrPlus(self.sig, fns[0](self.left), fns[0](self.right))

    def args(self):
        return [self.sig, str(self.left), str(self.right)]


NATIVE_RULES = (PromF, PromLL, Der, Dig, Wk, Ctr, Mpx, PromU, PromSec, ShPos, ShNeg,
                PromSub, DerSub, WkSub, CtrSub, PromBS, Leq, Der1, Wk0, CtrPlus)


def native_rule_reader(name: str, a: _Args):
    match name:
        case "prom-f":
            return PromF(a.int())
        case "prom-ll":
            return PromLL(a.int())
        case "der":
            return Der(a.int())
        case "dig":
            return Dig(a.int())
        case "wk":
            return Wk(a.formula())
        case "ctr":
            return Ctr(a.int(), a.int())
        case "mpx":
            k = a.int("arity")
            idxs = a.int_list()
            if len(idxs) != k:
                raise RuleError(f"mpx {k}: {len(idxs)} indices given")
            return Mpx(idxs, a.formula())
        case "prom-u":
            return PromU(a.int())
        case "prom-sec":
            return PromSec(a.int(), a.sym_list("labels"))
        case "shpos":
            return ShPos(a.int())
        case "shneg":
            return ShNeg(a.int())
        case "prom-sub":
            return PromSub(a.sym(), a.int())
        case "der-sub":
            return DerSub(a.sym(), a.int())
        case "wk-sub":
            return WkSub(a.sym(), a.formula())
        case "ctr-sub":
            return CtrSub(a.sym(), a.int(), a.int())
        case "prom-bs":
            return PromBS(a.sym(), a.int(), a.sym_list("products"))
        case "leq":
            return Leq(a.sym(), a.int())
        case "der1":
            return Der1(a.sym(), a.int())
        case "wk0":
            return Wk0(a.sym(), a.formula())
        case "ctr-plus":
            return CtrPlus(a.sym(), a.int(), a.int())
    return _core_rule(name, a)


def read_native(text: str) -> Proof:
    return build_proof(read_sexpr(text), native_rule_reader)


# -- systems ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NativeSystem:
    """A native rule vocabulary, its signature set, and its extra side conditions.

    ``side(rule, premises)`` returns an error message or None.
    """

    name: str
    rules: tuple
    member: Callable[[str], bool]
    side: Callable[[Rule, list], str | None]
    preset: str
    sell: SellParams | None = None
    semiring: Semiring | None = None

    def instance(self) -> Instance:
        return _instance_for(self)


def _no_side(rule, prems):
    return None


def _sell_side(P: SellParams):
    def side(rule, prems):
        match rule:
            case PromSub(e, i):
                for x in _kept(len(prems[0]), i):
                    ei = prems[0][x].sig
                    if not P.below(e, ei):
                        return f"prom-sub: {e} <= {ei} fails"
            case WkSub(e, _):
                if e not in P.weak:
                    return f"wk-sub: {e} is not a weakening signature"
            case CtrSub(e, _, _):
                if e not in P.contr:
                    return f"ctr-sub: {e} is not a contraction signature"
        return None

    return side


def _bsll_side(R: Semiring):
    def side(rule, prems):
        match rule:
            case PromBS(e, i, prods):
                for x, t in zip(_kept(len(prems[0]), i), prods):
                    want = R.mul(e, prems[0][x].sig)
                    if t != want:
                        return f"prom-bs: product {e}.{prems[0][x].sig} is {want}, not {t}"
            case Leq(e2, i):
                e1 = prems[0][i].sig
                if not R.leq(e1, e2):
                    return f"leq: {e1} <= {e2} fails"
            case Der1(u, _):
                if u != R.one:
                    return f"der1: {u} is not the unit"
            case Wk0(z, _):
                if z != R.zero:
                    return f"wk0: {z} is not the zero"
            case CtrPlus(e, l, r):
                want = R.add(prems[0][l].sig, prems[0][r].sig)
                if e != want:
                    return f"ctr-plus: sum is {want}, not {e}"
        return None

    return side


def _one_of(*sigs):
    allowed = frozenset(sigs)
    return allowed.__contains__


def native_system(ident: str) -> NativeSystem:
    """The native system of a preset name (``sell:...`` and ``bsll:...`` take parameters)."""
    base, _, arg = ident.partition(":")
    match base:
        case "ll-functorial":
            return NativeSystem(base, CORE + (PromF, Dig, Der, Wk, Ctr), _one_of(B), _no_side, base)
        case "ell":
            return NativeSystem(base, CORE + (PromF, Wk, Ctr), _one_of(B), _no_side, base)
        case "sll":
            return NativeSystem(base, CORE + (PromF, Mpx), _one_of(B), _no_side, base)
        case "ll-full":
            return NativeSystem(base, CORE + (PromLL, Der, Wk, Ctr), _one_of(B), _no_side, base)
        case "lll":
            return NativeSystem(base, CORE + (PromU, PromSec, Wk, Ctr), _one_of(B, S), _no_side, base)
        case "shift":
            return NativeSystem(base, CORE + (PromLL, Der, Wk, Ctr, ShPos, ShNeg), _one_of(B, S), _no_side, base)
        case "sell":
            P = parse_sell(arg) if arg else default_sell_params()
            member = frozenset(P.signatures).__contains__
            return NativeSystem(ident, CORE + (PromSub, DerSub, WkSub, CtrSub), member, _sell_side(P), ident, sell=P)
        case "bsll":
            kind, _, size = arg.partition(":")
            n = int(size) if size else 5
            R = maxplus_semiring(n) if kind == "maxplus" else nat_semiring(n)
            return NativeSystem(ident, CORE + (PromBS, Leq, Der1, Wk0, CtrPlus), R.member, _bsll_side(R), ident, semiring=R)
    raise NativeError(f"no native system for {ident!r}")


def _instance_for(system: NativeSystem) -> Instance:
    return make_preset(system.preset)


def check_native(system: NativeSystem, p: Proof, strict: bool = False, limit: int = 1) -> ValidationReport:
    """Validate a native proof by the system's own rule schemas."""
    failures: list[Failure] = []
    count = 0
    stack = [(p, (), False)]
    while stack and len(failures) < limit:
        q, path, expanded = stack.pop()
        if not expanded:
            stack.append((q, path, True))
            for i in reversed(range(len(q.premises))):
                stack.append((q.premises[i], path + (i,), False))
            continue
        count += 1
        name = q.rule.name
        if type(q.rule) not in system.rules:
            failures.append(Failure(path, name, f"rule {name} is not a {system.name} rule"))
            continue
        prems = [r.conclusion for r in q.premises]
        try:
            concl = q.rule.conclude(prems)
        except RuleError as exc:
            failures.append(Failure(path, name, str(exc)))
            continue
        sigs = set().union(*(signatures_of(f) for f in concl)) if concl else set()
        sigs |= {x for f in q.rule.formulas() for x in signatures_of(f)}
        bad = sorted(e for e in sigs if not system.member(e))
        if bad:
            failures.append(Failure(path, name, f"signature {bad[0]!r} is not part of {system.name}"))
            continue
        msg = system.side(q.rule, prems)
        if msg:
            failures.append(Failure(path, name, msg))
            continue
        same = concl == tuple(q.conclusion) if strict else sequent_perm_eq(concl, q.conclusion)
        if not same:
            failures.append(Failure(path, name, f"stored conclusion {show_sequent(q.conclusion)} differs from {show_sequent(concl)}"))
    return ValidationReport(failures, count)


# -- formula renaming ---------------------------------------------------------------------


def erase_s(a: Formula) -> Formula:
    """Drop every ``!s`` and ``?s`` (the SLL reading of superLL formulas)."""
    from .syntax import Atom, DualAtom

    match a:
        case Bang(e, b) | Quest(e, b):
            inner = erase_s(b)
            if e == S:
                return inner
            return type(a)(e, inner)
        case Atom() | DualAtom():
            return a
    if hasattr(a, "left"):
        return type(a)(erase_s(a.left), erase_s(a.right))
    return a


def native_sequent(system: NativeSystem, seq) -> tuple:
    """The native reading of a superLL sequent."""
    if system.preset == "sll":
        return tuple(erase_s(f) for f in seq)
    return tuple(seq)


# -- encoding ------------------------------------------------------------------------------


def _dg_context(cur: Proof, outer: str, n: int, target: Callable[[str], str]) -> Proof:
    """After ``Prom(outer)`` on a ``?e_i``-context, apply ``Dg(outer, e_i, target(e_i))`` to each."""
    tags = [None] + list(range(n))
    for j in range(n):
        k = tags.index(j)
        inner = cur.conclusion[k].body.sig
        cur, tags = _apply(cur, tags, Dg(outer, inner, target(inner), k))
    return cur


def encode_native(system: NativeSystem, np: Proof, check: bool = True) -> Proof:
    """Translate a native proof into a superLL proof valid in the matching preset."""
    if check:
        rep = check_native(system, np)
        if not rep.ok:
            raise NativeError(f"native proof is invalid: {rep.first}")
    return _encode(system, normalize(np))


def _encode(system: NativeSystem, p: Proof) -> Proof:
    prems = [_encode(system, q) for q in p.premises]
    rule = p.rule
    if isinstance(rule, CORE):
        return Proof(rule, tuple(prems), p.conclusion)
    (q,) = prems
    n = len(q.conclusion) - 1
    match rule:
        case PromF(i):
            out = node(Prom(B, i), q)
        case PromLL(i):
            out = _dg_context(node(Prom(B, i), q), B, n, lambda e: B)
        case Der(i):
            out = node(De(B, i), q)
        case Dig(i):
            out = node(Dg(B, B, B, i), q)
        case Wk(a):
            out = node(Co((), B, (), a), q)
        case Ctr(l, r):
            out = node(Co((B, B), B, (l, r), q.conclusion[l].body), q)
        case Mpx(idxs, a):
            tags = [None] * len(q.conclusion)
            for j, x in enumerate(idxs):
                tags[x] = j
            cur = q
            for j in range(len(idxs)):
                cur, tags = _apply(cur, tags, De(S, tags.index(j)))
                tags[0] = j
            where = tuple(tags.index(j) for j in range(len(idxs)))
            out = node(Co((S,) * len(idxs), B, where, a), cur)
        case PromU(i):
            out = node(Prom(B, i), q)
        case PromSec(i, labels):
            cur = node(Prom(S, i), q)
            tags = [None] + list(range(n))
            for j, l in enumerate(labels):
                if l == B:
                    k = tags.index(j)
                    cur, tags = _apply(cur, tags, Co((S,), B, (k,), cur.conclusion[k].body))
            out = cur
        case ShPos(i):
            out = _dg_context(node(Prom(S, i), q), S, n, lambda e: S)
        case ShNeg(i):
            out = node(De(S, i), q)
        case PromSub(e, i):
            out = _dg_context(node(Prom(e, i), q), e, n, lambda ei: ei)
        case DerSub(e, i):
            out = node(De(e, i), q)
        case WkSub(e, a):
            out = node(Co((), e, (), a), q)
        case CtrSub(e, l, r):
            out = node(Co((e, e), e, (l, r), q.conclusion[l].body), q)
        case PromBS(e, i, _):
            R = system.semiring
            out = _dg_context(node(Prom(e, i), q), e, n, lambda ei: R.mul(e, ei))
        case Leq(e2, i):
            out = node(Co((q.conclusion[i].sig,), e2, (i,), q.conclusion[i].body), q)
        case Der1(u, i):
            out = node(De(u, i), q)
        case Wk0(z, a):
            out = node(Co((), z, (), a), q)
        case CtrPlus(e, l, r):
            f1, f2 = q.conclusion[l], q.conclusion[r]
            out = node(Co((f1.sig, f2.sig), e, (l, r), f1.body), q)
        case _:
            raise NativeError(f"{system.name}: cannot encode rule {rule.name}")
    return permute_to(out, p.conclusion)


# -- decoding ------------------------------------------------------------------------------


def decode_native(system: NativeSystem, p: Proof, inst: Instance | None = None) -> Proof:
    """Translate a superLL proof valid in the matching preset into a native proof."""
    inst = inst or system.instance()
    p = normalize(p)
    base = system.preset.partition(":")[0]
    if base in ("ll-full", "shift", "sell", "bsll"):
        p = girardize(inst, p)
    elif base == "lll":
        p = eliminate_subsumption(inst, p)
    else:
        p = expand_derived_promotions(p)
    return _decode(system, base, p)


def _contract_chain(q: Proof, idxs, mk: Callable[[int, int], Rule], weaken: Callable[[], Rule]) -> Proof:
    """k copies at ``idxs`` merged by binary contraction; k = 0 uses ``weaken``."""
    if not idxs:
        return node(weaken(), q)
    tags = [None] * len(q.conclusion)
    for x in idxs:
        tags[x] = "c"
    cur = q
    for _ in range(len(idxs) - 1):
        l, r = [k for k, t in enumerate(tags) if t == "c"][:2]
        cur, tags = _apply(cur, tags, mk(l, r))
        tags[0] = "c"
    return cur


def _decode(system: NativeSystem, base: str, p: Proof) -> Proof:
    prems = [_decode(system, base, q) for q in p.premises]
    target = native_sequent(system, p.conclusion)
    rule = p.rule
    if isinstance(rule, CORE):
        if base == "sll":
            rule = _erase_rule(rule)
        return permute_to(node(rule, *prems), target)
    (q,) = prems
    out: Proof | None = None
    match base, rule:
        case ("ll-functorial" | "ell" | "sll"), Prom(e, i):
            out = q if e == S else node(PromF(i), q)
        case "ll-functorial", Dg(_, _, _, i):
            out = node(Dig(i), q)
        case "ll-functorial", De(_, i):
            out = node(Der(i), q)
        case "sll", De(_, i):
            out = q
        case "sll", Co(sigs, _, idxs, body):
            out = node(Mpx(idxs, erase_s(body)), q)
        case ("ll-functorial" | "ell" | "ll-full" | "lll"), Co(sigs, e, idxs, body):
            out = _contract_chain(q, idxs, lambda l, r: Ctr(l, r), lambda: Wk(body))
        case ("ll-full" | "shift"), PromGirard(e, i, _):
            out = node(PromLL(i) if e == B else ShPos(i), q)
        case ("ll-full" | "shift"), De(e, i):
            out = node(Der(i) if e == B else ShNeg(i), q)
        case "shift", Co(sigs, e, idxs, body):
            out = _contract_chain(q, idxs, lambda l, r: Ctr(l, r), lambda: Wk(body))
        case "lll", PromOrdered(e, i, targets):
            out = node(PromU(i) if e == B else PromSec(i, targets), q)
        case "sell", PromGirard(e, i, _):
            out = node(PromSub(e, i), q)
        case "sell", De(e, i):
            out = node(DerSub(e, i), q)
        case "sell", Co(sigs, e, idxs, body):
            out = _contract_chain(q, idxs, lambda l, r: CtrSub(e, l, r), lambda: WkSub(e, body))
        case "bsll", PromGirard(e, i, targets):
            out = node(PromBS(e, i, targets), q)
        case "bsll", De(e, i):
            out = node(Der1(e, i), q)
        case "bsll", Co(sigs, e, idxs, body):
            R = system.semiring
            if len(idxs) == 0:
                out = node(Wk0(e, body), q)
            elif len(idxs) == 1:
                out = q if sigs[0] == e else node(Leq(e, idxs[0]), q)
            elif len(idxs) == 2:
                out = node(CtrPlus(R.add(*sigs), *idxs), q)
                if R.add(*sigs) != e:
                    raise NativeError(f"bsll: co({' '.join(sigs)} -> {e}) is not a sum")
    if out is None:
        raise NativeError(f"{system.name}: no native counterpart for {rule.name} {rule}")
    return permute_to(out, target)


def _erase_rule(rule: Rule) -> Rule:
    match rule:
        case Ax(a):
            return Ax(erase_s(a))
        case Cut(a, i, j):
            return Cut(erase_s(a), i, j)
        case Plus1(i, o):
            return Plus1(i, erase_s(o))
        case Plus2(i, o):
            return Plus2(i, erase_s(o))
        case TopI(ctx):
            return TopI(tuple(erase_s(f) for f in ctx))
    return rule
