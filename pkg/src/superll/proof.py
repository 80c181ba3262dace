"""Derivation trees, structural inference, and validation against an instance.

Every rule addresses its active formulas by position in the premise
conclusions.  The conclusion of a rule puts the principal formula first,
followed by the untouched premise formulas in premise order.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .instance import Instance, Query, UnknownSignature, co_q, de_q, dg_q, p_q
from .syntax import (
    BOT,
    ONE,
    TOP,
    Bang,
    Formula,
    Parr,
    Plus,
    Quest,
    Sequent,
    Tensor,
    With,
    dual,
    permutation_between,
    sequent_perm_eq,
    show,
    show_sequent,
    signatures_of,
)


class RuleError(ValueError):
    """A rule does not apply to the given premises."""


def _drop(seq: Sequent, *idx: int) -> tuple:
    skip = set(idx)
    return tuple(f for k, f in enumerate(seq) if k not in skip)


def _kept(n: int, *idx: int) -> list[int]:
    skip = set(idx)
    return [k for k in range(n) if k not in skip]


def _at(seq: Sequent, i: int) -> Formula:
    if not 0 <= i < len(seq):
        raise RuleError(f"active index {i} out of range for a sequent of length {len(seq)}")
    return seq[i]


class Rule:
    """Base class: subclasses are frozen dataclasses."""

    name = "?"
    arity = 1

    def layout(self, prems: Sequence[Sequent]) -> tuple[tuple, tuple]:
        """Return ``(conclusion, origin)``; ``origin[k]`` is ``(m, pos)`` when
        conclusion formula ``k`` is premise ``m``'s formula ``pos`` unchanged,
        and None when the rule introduces or rewrites it."""
        raise NotImplementedError

    def conclude(self, prems: Sequence[Sequent]) -> tuple:
        if len(prems) != self.arity:
            raise RuleError(f"{self.name} expects {self.arity} premise(s), got {len(prems)}")
        return self.layout(prems)[0]

    def queries(self, prems: Sequence[Sequent]) -> list[Query]:
        return []

    def remap(self, fns: Sequence[Callable[[int], int]]) -> Rule:
        """Same rule with premise positions renamed through ``fns[m]``."""
        return self

    def signatures(self) -> set:
        return set()

    def formulas(self) -> list[Formula]:
        return []


def _ctx(m: int, kept: Iterable[int]) -> tuple:
    return tuple((m, k) for k in kept)


@dataclass(frozen=True)
class Ax(Rule):
    formula: Formula
    name = "ax"
    arity = 0

    def layout(self, prems):
        return (self.formula, dual(self.formula)), (None, None)

    def formulas(self):
        return [self.formula]


@dataclass(frozen=True)
class Cut(Rule):
    formula: Formula
    left: int
    right: int
    name = "cut"
    arity = 2

    def layout(self, prems):
        p1, p2 = prems
        if _at(p1, self.left) != self.formula:
            raise RuleError(f"cut formula {show(self.formula)} not at left position {self.left}")
        if _at(p2, self.right) != dual(self.formula):
            raise RuleError(f"dual of cut formula {show(self.formula)} not at right position {self.right}")
        k1, k2 = _kept(len(p1), self.left), _kept(len(p2), self.right)
        return tuple(p1[k] for k in k1) + tuple(p2[k] for k in k2), _ctx(0, k1) + _ctx(1, k2)

    def remap(self, fns):
        return Cut(self.formula, fns[0](self.left), fns[1](self.right))

    def formulas(self):
        return [self.formula]


@dataclass(frozen=True)
class Exchange(Rule):
    perm: tuple[int, ...]
    name = "ex"

    def layout(self, prems):
        (p,) = prems
        if sorted(self.perm) != list(range(len(p))):
            raise RuleError(f"{list(self.perm)} is not a permutation of a sequent of length {len(p)}")
        return tuple(p[k] for k in self.perm), _ctx(0, self.perm)

    def remap(self, fns):
        raise RuleError("exchange cannot be remapped")


@dataclass(frozen=True)
class TensorI(Rule):
    left: int
    right: int
    name = "tensor"
    arity = 2

    def layout(self, prems):
        p1, p2 = prems
        a, b = _at(p1, self.left), _at(p2, self.right)
        k1, k2 = _kept(len(p1), self.left), _kept(len(p2), self.right)
        concl = (Tensor(a, b),) + tuple(p1[k] for k in k1) + tuple(p2[k] for k in k2)
        return concl, (None,) + _ctx(0, k1) + _ctx(1, k2)

    def remap(self, fns):
        return TensorI(fns[0](self.left), fns[1](self.right))


@dataclass(frozen=True)
class ParrI(Rule):
    left: int
    right: int
    name = "parr"

    def layout(self, prems):
        (p,) = prems
        if self.left == self.right:
            raise RuleError("parr needs two distinct positions")
        a, b = _at(p, self.left), _at(p, self.right)
        k = _kept(len(p), self.left, self.right)
        return (Parr(a, b),) + tuple(p[x] for x in k), (None,) + _ctx(0, k)

    def remap(self, fns):
        return ParrI(fns[0](self.left), fns[0](self.right))


@dataclass(frozen=True)
class OneI(Rule):
    name = "one"
    arity = 0

    def layout(self, prems):
        return (ONE,), (None,)


@dataclass(frozen=True)
class BotI(Rule):
    name = "bot"

    def layout(self, prems):
        (p,) = prems
        return (BOT,) + tuple(p), (None,) + _ctx(0, range(len(p)))


@dataclass(frozen=True)
class WithI(Rule):
    """Both contexts must agree up to permutation; the conclusion uses the left one."""

    left: int
    right: int
    name = "with"
    arity = 2

    def layout(self, prems):
        p1, p2 = prems
        a, b = _at(p1, self.left), _at(p2, self.right)
        c1, c2 = _drop(p1, self.left), _drop(p2, self.right)
        if not sequent_perm_eq(c1, c2):
            raise RuleError(f"with contexts differ: {show_sequent(c1)} vs {show_sequent(c2)}")
        return (With(a, b),) + c1, (None,) + _ctx(0, _kept(len(p1), self.left))

    def remap(self, fns):
        return WithI(fns[0](self.left), fns[1](self.right))


@dataclass(frozen=True)
class Plus1(Rule):
    index: int
    other: Formula
    name = "plus1"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Plus(a, self.other),) + tuple(p[x] for x in k), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Plus1(fns[0](self.index), self.other)

    def formulas(self):
        return [self.other]


@dataclass(frozen=True)
class Plus2(Rule):
    index: int
    other: Formula
    name = "plus2"

    def layout(self, prems):
        (p,) = prems
        b = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Plus(self.other, b),) + tuple(p[x] for x in k), (None,) + _ctx(0, k)

    def remap(self, fns):
        return Plus2(fns[0](self.index), self.other)

    def formulas(self):
        return [self.other]


@dataclass(frozen=True)
class TopI(Rule):
    context: tuple = ()
    name = "top"
    arity = 0

    def layout(self, prems):
        return (TOP,) + tuple(self.context), (None,) * (1 + len(self.context))

    def formulas(self):
        return list(self.context)


@dataclass(frozen=True)
class De(Rule):
    sig: str
    index: int
    name = "de"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Quest(self.sig, a),) + tuple(p[x] for x in k), (None,) + _ctx(0, k)

    def queries(self, prems):
        return [de_q(self.sig)]

    def remap(self, fns):
        return De(self.sig, fns[0](self.index))

    def signatures(self):
        return {self.sig}


@dataclass(frozen=True)
class Co(Rule):
    """``co_k``: the formulas at ``indices`` are ``?_{sigs[j]} body``; k = 0 is weakening."""

    sigs: tuple
    sig: str
    indices: tuple
    body: Formula
    name = "co"

    def layout(self, prems):
        (p,) = prems
        if len(self.sigs) != len(self.indices):
            raise RuleError("co: signature list and index list differ in length")
        if len(set(self.indices)) != len(self.indices):
            raise RuleError("co: repeated index")
        for e, i in zip(self.sigs, self.indices):
            if _at(p, i) != Quest(e, self.body):
                raise RuleError(f"co: expected {show(Quest(e, self.body))} at position {i}, found {show(p[i])}")
        k = _kept(len(p), *self.indices)
        return (Quest(self.sig, self.body),) + tuple(p[x] for x in k), (None,) + _ctx(0, k)

    def queries(self, prems):
        return [co_q(self.sigs, self.sig)]

    def remap(self, fns):
        return Co(self.sigs, self.sig, tuple(fns[0](i) for i in self.indices), self.body)

    def signatures(self):
        return set(self.sigs) | {self.sig}

    def formulas(self):
        return [self.body]


@dataclass(frozen=True)
class Dg(Rule):
    """``?_{outer} ?_{inner} A`` becomes ``?_{sig} A``."""

    outer: str
    inner: str
    sig: str
    index: int
    name = "dg"

    def layout(self, prems):
        (p,) = prems
        f = _at(p, self.index)
        match f:
            case Quest(e1, Quest(e2, a)) if e1 == self.outer and e2 == self.inner:
                k = _kept(len(p), self.index)
                return (Quest(self.sig, a),) + tuple(p[x] for x in k), (None,) + _ctx(0, k)
        raise RuleError(f"dg: expected ?{self.outer} ?{self.inner} _ at position {self.index}, found {show(f)}")

    def queries(self, prems):
        return [dg_q(self.outer, self.inner, self.sig)]

    def remap(self, fns):
        return Dg(self.outer, self.inner, self.sig, fns[0](self.index))

    def signatures(self):
        return {self.outer, self.inner, self.sig}


@dataclass(frozen=True)
class Prom(Rule):
    """Functorial promotion."""

    sig: str
    index: int
    name = "prom"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        return (Bang(self.sig, a),) + tuple(Quest(self.sig, p[x]) for x in k), (None,) * len(p)

    def queries(self, prems):
        return [p_q(len(prems[0]) - 1, self.sig)]

    def remap(self, fns):
        return Prom(self.sig, fns[0](self.index))

    def signatures(self):
        return {self.sig}


@dataclass(frozen=True)
class PromGirard(Rule):
    """Girard's promotion: context ``?_{eps_j} A_j`` becomes ``?_{targets[j]} A_j``."""

    sig: str
    index: int
    targets: tuple
    name = "prom-g"

    def _parts(self, p):
        k = _kept(len(p), self.index)
        if len(k) != len(self.targets):
            raise RuleError(f"prom-g: {len(self.targets)} targets for a context of length {len(k)}")
        parts = []
        for x in k:
            if not isinstance(p[x], Quest):
                raise RuleError(f"prom-g: context formula {show(p[x])} is not a ?-formula")
            parts.append(p[x])
        return parts

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        parts = self._parts(p)
        concl = (Bang(self.sig, a),) + tuple(Quest(t, q.body) for t, q in zip(self.targets, parts))
        return concl, (None,) * len(p)

    def queries(self, prems):
        parts = self._parts(prems[0])
        return [dg_q(self.sig, q.sig, t) for t, q in zip(self.targets, parts)] + [p_q(len(parts), self.sig)]

    def remap(self, fns):
        return PromGirard(self.sig, fns[0](self.index), self.targets)

    def signatures(self):
        return {self.sig} | set(self.targets)


@dataclass(frozen=True)
class PromOrdered(Rule):
    """Ordered promotion: context ``A_j`` becomes ``?_{targets[j]} A_j`` with sig <= target."""

    sig: str
    index: int
    targets: tuple
    name = "prom-o"

    def layout(self, prems):
        (p,) = prems
        a = _at(p, self.index)
        k = _kept(len(p), self.index)
        if len(k) != len(self.targets):
            raise RuleError(f"prom-o: {len(self.targets)} targets for a context of length {len(k)}")
        concl = (Bang(self.sig, a),) + tuple(Quest(t, p[x]) for t, x in zip(self.targets, k))
        return concl, (None,) * len(p)

    def queries(self, prems):
        return [co_q((self.sig,), t) for t in self.targets] + [p_q(len(self.targets), self.sig)]

    def remap(self, fns):
        return PromOrdered(self.sig, fns[0](self.index), self.targets)

    def signatures(self):
        return {self.sig} | set(self.targets)


RULES = (Ax, Cut, Exchange, TensorI, ParrI, OneI, BotI, WithI, Plus1, Plus2, TopI, De, Co, Dg, Prom, PromGirard, PromOrdered)
PROMOTIONS = (Prom, PromGirard, PromOrdered)


# -- proofs -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Proof:
    rule: Rule
    premises: tuple = ()
    conclusion: tuple = field(default=None)

    def __post_init__(self):
        if self.conclusion is None:
            concl = self.rule.conclude([q.conclusion for q in self.premises])
            object.__setattr__(self, "conclusion", concl)

    @cached_property
    def raw_size(self) -> int:
        return 1 + sum(q.raw_size for q in self.premises)

    @cached_property
    def size(self) -> int:
        own = 0 if isinstance(self.rule, Exchange) else 1
        return own + sum(q.size for q in self.premises)

    @cached_property
    def height(self) -> int:
        return 1 + max((q.height for q in self.premises), default=0)

    @cached_property
    def cut_free(self) -> bool:
        return not isinstance(self.rule, Cut) and all(q.cut_free for q in self.premises)

    def nodes(self) -> Iterable[Proof]:
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.premises))

    def count(self, pred: Callable[[Proof], bool]) -> int:
        return sum(1 for p in self.nodes() if pred(p))

    def layout(self) -> tuple[tuple, tuple]:
        return self.rule.layout([q.conclusion for q in self.premises])

    def __eq__(self, other):
        if not isinstance(other, Proof):
            return NotImplemented
        return self.rule == other.rule and self.conclusion == other.conclusion and self.premises == other.premises

    __hash__ = None

    def __repr__(self) -> str:
        return f"Proof({self.rule.name}, {show_sequent(self.conclusion)})"


def node(rule: Rule, *premises: Proof) -> Proof:
    """Build a proof node, computing its conclusion structurally."""
    return Proof(rule, tuple(premises))


class SideConditionError(RuleError):
    def __init__(self, query: Query):
        super().__init__(f"side condition {query} fails")
        self.query = query


def infer(inst: Instance, rule: Rule, premises: Sequence[Proof]) -> Proof:
    """Apply ``rule`` to ``premises`` after checking its side conditions in ``inst``."""
    prems = [q.conclusion for q in premises]
    concl = rule.conclude(prems)
    for f in concl:
        inst.require(*signatures_of(f))
    for q in rule.queries(prems):
        if not inst.eval(q):
            raise SideConditionError(q)
    return Proof(rule, tuple(premises), concl)


def proof_size(p: Proof, mode: str = "measure") -> int:
    """Number of rule nodes; ``measure`` ignores exchange nodes, ``raw`` counts them."""
    if mode == "raw":
        return p.raw_size
    if mode in ("measure", "exchange-free"):
        return p.size
    raise ValueError(f"unknown size mode {mode!r}")


# -- validation ----------------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    path: tuple[int, ...]
    rule: str
    message: str
    query: Query | None = None

    def where(self) -> str:
        return "root" + "".join(f".{i}" for i in self.path)

    def __str__(self) -> str:
        return f"{self.where()} ({self.rule}): {self.message}"


@dataclass
class ValidationReport:
    failures: list[Failure]
    nodes: int

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first(self) -> Failure | None:
        return self.failures[0] if self.failures else None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "valid" if self.ok else f"invalid at {self.first}"


def check_proof(
    inst: Instance,
    p: Proof,
    strict: bool = False,
    allowed: Iterable[type] | None = None,
    limit: int = 1,
) -> ValidationReport:
    """Re-infer every node; report failures in post-order, premises before their node."""
    allowed = tuple(allowed) if allowed is not None else RULES
    failures: list[Failure] = []
    count = 0
    stack: list[tuple[Proof, tuple, bool]] = [(p, (), False)]
    while stack and len(failures) < limit:
        q, path, expanded = stack.pop()
        if not expanded:
            stack.append((q, path, True))
            for i in reversed(range(len(q.premises))):
                stack.append((q.premises[i], path + (i,), False))
            continue
        count += 1
        name = q.rule.name
        if allowed is not None and not isinstance(q.rule, allowed):
            failures.append(Failure(path, name, f"rule {name} is not admitted here"))
            continue
        prems = [r.conclusion for r in q.premises]
        try:
            concl = q.rule.conclude(prems)
            for f in concl:
                inst.require(*signatures_of(f))
            inst.require(*q.rule.signatures())
            bad = next((x for x in q.rule.queries(prems) if not inst.eval(x)), None)
        except UnknownSignature as exc:
            failures.append(Failure(path, name, str(exc)))
            continue
        except RuleError as exc:
            failures.append(Failure(path, name, str(exc)))
            continue
        if bad is not None:
            failures.append(Failure(path, name, f"side condition {bad} fails", bad))
            continue
        same = concl == tuple(q.conclusion) if strict else sequent_perm_eq(concl, q.conclusion)
        if not same:
            failures.append(
                Failure(path, name, f"stored conclusion {show_sequent(q.conclusion)} differs from {show_sequent(concl)}")
            )
    return ValidationReport(failures, count)


# -- exchange bookkeeping ------------------------------------------------------------


def permute_to(p: Proof, target: Sequence[Formula]) -> Proof:
    """Return a proof of exactly ``target``, adding or merging one exchange."""
    target = tuple(target)
    if p.conclusion == target:
        return p
    perm = permutation_between(p.conclusion, target)
    if perm is None:
        raise RuleError(f"{show_sequent(target)} is not a permutation of {show_sequent(p.conclusion)}")
    if isinstance(p.rule, Exchange):
        inner = p.premises[0]
        perm = tuple(p.rule.perm[k] for k in perm)
        if perm == tuple(range(len(perm))):
            return inner
        return Proof(Exchange(perm), (inner,), target)
    return Proof(Exchange(perm), (p,), target)


def normalize(p: Proof) -> Proof:
    """Rebuild ``p`` so that every stored conclusion equals the computed one,
    inserting exchanges where a stored conclusion was only a permutation."""
    prems = tuple(normalize(q) for q in p.premises)
    built = Proof(p.rule, prems)
    if built.conclusion != tuple(p.conclusion):
        return permute_to(built, p.conclusion)
    if all(a is b for a, b in zip(prems, p.premises)):
        return p
    return built


def strip_exchanges(p: Proof) -> Proof:
    """Remove exchange nodes whose permutation is the identity."""
    prems = tuple(strip_exchanges(q) for q in p.premises)
    if isinstance(p.rule, Exchange) and p.rule.perm == tuple(range(len(p.rule.perm))):
        return prems[0]
    return Proof(p.rule, prems, p.conclusion)


def rule_counts(p: Proof) -> dict[str, int]:
    out: dict[str, int] = {}
    for q in p.nodes():
        key = q.rule.name
        if isinstance(q.rule, Co):
            key = f"co{len(q.rule.sigs)}"
        out[key] = out.get(key, 0) + 1
    return out


# -- s-expression format --------------------------------------------------------------


class ProofSyntaxError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        super().__init__(message if pos is None else f"{message} at offset {pos}")
        self.pos = pos


@dataclass(frozen=True)
class SNode:
    items: tuple
    pos: int


@dataclass(frozen=True)
class SList:
    items: tuple
    pos: int


@dataclass(frozen=True)
class SStr:
    value: str
    pos: int


@dataclass(frozen=True)
class SSym:
    value: str
    pos: int


def read_sexpr(text: str):
    """Parse the nested ``( ... )`` / ``[ ... ]`` / ``"..."`` text form."""
    pos = 0
    n = len(text)

    def skip():
        nonlocal pos
        while pos < n:
            if text[pos].isspace():
                pos += 1
            elif text[pos] == ";":
                while pos < n and text[pos] != "\n":
                    pos += 1
            else:
                break

    def item():
        nonlocal pos
        skip()
        if pos >= n:
            raise ProofSyntaxError("unexpected end of input", pos)
        c = text[pos]
        start = pos
        if c in "([":
            close = ")" if c == "(" else "]"
            pos += 1
            items = []
            while True:
                skip()
                if pos >= n:
                    raise ProofSyntaxError(f"missing '{close}'", start)
                if text[pos] == close:
                    pos += 1
                    break
                if text[pos] in ")]":
                    raise ProofSyntaxError(f"mismatched '{text[pos]}'", pos)
                items.append(item())
            return SNode(tuple(items), start) if c == "(" else SList(tuple(items), start)
        if c == '"':
            pos += 1
            buf = []
            while pos < n and text[pos] != '"':
                if text[pos] == "\\" and pos + 1 < n:
                    pos += 1
                buf.append(text[pos])
                pos += 1
            if pos >= n:
                raise ProofSyntaxError("unterminated string", start)
            pos += 1
            return SStr("".join(buf), start)
        if c in ")]":
            raise ProofSyntaxError(f"unexpected '{c}'", pos)
        while pos < n and not text[pos].isspace() and text[pos] not in '()[]";':
            pos += 1
        return SSym(text[start:pos], start)

    out = item()
    skip()
    if pos != n:
        raise ProofSyntaxError("trailing input", pos)
    return out


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _fmt_list(xs) -> str:
    return "[" + " ".join(str(x) for x in xs) + "]"


def rule_args(rule) -> list[str]:
    """Printed arguments of a rule, in file order."""
    match rule:
        case Ax(a):
            return [_quote(show(a))]
        case Cut(a, i, j):
            return [_quote(show(a)), str(i), str(j)]
        case Exchange(perm):
            return [_fmt_list(perm)]
        case TensorI(i, j) | ParrI(i, j) | WithI(i, j):
            return [str(i), str(j)]
        case OneI() | BotI():
            return []
        case Plus1(i, b) | Plus2(i, b):
            return [str(i), _quote(show(b))]
        case TopI(ctx):
            return [_quote(show(f)) for f in ctx]
        case De(e, i):
            return [e, str(i)]
        case Co(sigs, e, idxs, body):
            return [_fmt_list(sigs), e, _fmt_list(idxs), _quote(show(body))]
        case Dg(e1, e2, e, i):
            return [e1, e2, e, str(i)]
        case Prom(e, i):
            return [e, str(i)]
        case PromGirard(e, i, ts) | PromOrdered(e, i, ts):
            return [e, str(i), _fmt_list(ts)]
    if hasattr(rule, "args"):
        return rule.args()
    raise TypeError(f"cannot print rule {rule!r}")


def write_proof(p: Proof, conclusions: bool = True, indent: int = 0) -> str:
    pad = "  " * indent
    head = " ".join([p.rule.name] + rule_args(p.rule))
    if conclusions:
        head += " :concl " + _quote(show_sequent(p.conclusion))
    if not p.premises:
        return f"{pad}({head})"
    inner = "\n".join(write_proof(q, conclusions, indent + 1) for q in p.premises)
    return f"{pad}({head}\n{inner})"


class _Args:
    def __init__(self, items, pos, name):
        self.items = list(items)
        self.pos = pos
        self.name = name

    def _next(self, what):
        if not self.items:
            raise ProofSyntaxError(f"{self.name}: missing {what}", self.pos)
        return self.items.pop(0)

    def sym(self, what="signature") -> str:
        x = self._next(what)
        if not isinstance(x, SSym):
            raise ProofSyntaxError(f"{self.name}: expected {what}", x.pos)
        return x.value

    def int(self, what="index") -> int:
        x = self._next(what)
        if not isinstance(x, SSym) or not x.value.lstrip("-").isdigit():
            raise ProofSyntaxError(f"{self.name}: expected {what}", x.pos)
        return int(x.value)

    def formula(self, what="formula") -> Formula:
        from .syntax import ParseError, parse_formula

        x = self._next(what)
        if not isinstance(x, SStr):
            raise ProofSyntaxError(f"{self.name}: expected quoted {what}", x.pos)
        try:
            return parse_formula(x.value)
        except ParseError as exc:
            raise ProofSyntaxError(f"{self.name}: {exc}", x.pos) from None

    def formulas_rest(self) -> tuple:
        out = []
        while self.items and isinstance(self.items[0], SStr):
            out.append(self.formula())
        return tuple(out)

    def sym_list(self, what="signature list") -> tuple:
        x = self._next(what)
        if not isinstance(x, SList) or not all(isinstance(y, SSym) for y in x.items):
            raise ProofSyntaxError(f"{self.name}: expected [{what}]", x.pos)
        return tuple(y.value for y in x.items)

    def int_list(self, what="index list") -> tuple:
        vals = self.sym_list(what)
        if not all(v.isdigit() for v in vals):
            raise ProofSyntaxError(f"{self.name}: expected [{what}]", self.pos)
        return tuple(int(v) for v in vals)

    def done(self):
        if self.items:
            raise ProofSyntaxError(f"{self.name}: unexpected argument", self.items[0].pos)


def _core_rule(name: str, a: _Args):
    match name:
        case "ax":
            return Ax(a.formula())
        case "cut":
            return Cut(a.formula(), a.int(), a.int())
        case "ex":
            return Exchange(a.int_list("permutation"))
        case "tensor":
            return TensorI(a.int(), a.int())
        case "parr":
            return ParrI(a.int(), a.int())
        case "with":
            return WithI(a.int(), a.int())
        case "one":
            return OneI()
        case "bot":
            return BotI()
        case "plus1":
            return Plus1(a.int(), a.formula())
        case "plus2":
            return Plus2(a.int(), a.formula())
        case "top":
            return TopI(a.formulas_rest())
        case "de":
            return De(a.sym(), a.int())
        case "co":
            return Co(a.sym_list(), a.sym(), a.int_list(), a.formula())
        case "dg":
            return Dg(a.sym(), a.sym(), a.sym(), a.int())
        case "prom":
            return Prom(a.sym(), a.int())
        case "prom-g":
            return PromGirard(a.sym(), a.int(), a.sym_list())
        case "prom-o":
            return PromOrdered(a.sym(), a.int(), a.sym_list())
    return None


def build_proof(sx, rule_reader=_core_rule, path: tuple = ()) -> Proof:
    """Turn a parsed s-expression into a proof.  ``rule_reader(name, args)``
    returns a rule or None for an unknown name."""
    from .syntax import ParseError, parse_sequent

    if not isinstance(sx, SNode) or not sx.items or not isinstance(sx.items[0], SSym):
        raise ProofSyntaxError("expected a proof node '(rule ...)'", getattr(sx, "pos", None))
    name = sx.items[0].value
    args, prems, concl = [], [], None
    rest = list(sx.items[1:])
    while rest:
        x = rest.pop(0)
        if isinstance(x, SSym) and x.value == ":concl":
            if not rest or not isinstance(rest[0], SStr):
                raise ProofSyntaxError(":concl needs a quoted sequent", x.pos)
            s = rest.pop(0)
            try:
                concl = parse_sequent(s.value)
            except ParseError as exc:
                raise ProofSyntaxError(f":concl: {exc}", s.pos) from None
        elif isinstance(x, SNode):
            prems.append(x)
        else:
            args.append(x)
    a = _Args(args, sx.pos, name)
    rule = rule_reader(name, a)
    if rule is None:
        raise ProofSyntaxError(f"unknown rule {name!r}", sx.pos)
    a.done()
    built = tuple(build_proof(q, rule_reader, path + (i,)) for i, q in enumerate(prems))
    if len(built) != rule.arity:
        raise ProofSyntaxError(f"{name} expects {rule.arity} premise(s), got {len(built)}", sx.pos)
    if concl is None:
        try:
            return Proof(rule, built)
        except RuleError as exc:
            where = "root" + "".join(f".{i}" for i in path)
            raise ProofSyntaxError(f"{where} ({name}): {exc}", sx.pos) from None
    return Proof(rule, built, concl)


def read_proof(text: str, rule_reader=_core_rule) -> Proof:
    return build_proof(read_sexpr(text), rule_reader)


# -- LaTeX -------------------------------------------------------------------------------

_TEX_OPS = {Tensor: r"\otimes", Parr: r"\parr", With: r"\with", Plus: r"\oplus"}


def tex_formula(a: Formula) -> str:
    from .syntax import BINARY, Atom, DualAtom

    def sub(b):
        s = tex_formula(b)
        return f"({s})" if isinstance(b, BINARY) else s

    match a:
        case Atom(x):
            return x
        case DualAtom(x):
            return x + r"^\bot"
        case Bang(e, b):
            return rf"\oc_{{{e}}} {sub(b)}"
        case Quest(e, b):
            return rf"\wn_{{{e}}} {sub(b)}"
        case Tensor(l, r) | Parr(l, r) | With(l, r) | Plus(l, r):
            return f"{sub(l)} {_TEX_OPS[type(a)]} {sub(r)}"
    return {"1": "1", "F": r"\bot", "T": r"\top", "0": "0"}[str(a)]


def _tex_label(rule) -> str:
    match rule:
        case Co(sigs, e, _, _):
            return rf"\textsc{{co}}_{{{len(sigs)}}}"
        case De(e, _):
            return rf"\textsc{{de}}_{{{e}}}"
        case Dg(e1, e2, e, _):
            return rf"\textsc{{dg}}({e1},{e2},{e})"
        case Prom(e, _):
            return rf"\textsc{{p}}_{{{e}}}"
        case PromGirard(e, _, _):
            return rf"\textsc{{p}}_g({e})"
        case PromOrdered(e, _, _):
            return rf"\textsc{{p}}_\leq({e})"
    return r"\text{" + rule.name + "}"


def to_latex(p: Proof) -> str:
    """One bussproofs ``prooftree`` environment; expects ``\\parr``, ``\\with``,
    ``\\oc`` and ``\\wn`` from the cmll package."""
    lines: list[str] = []

    def emit(q: Proof):
        for r in q.premises:
            emit(r)
        if not q.premises:
            lines.append(r"\AxiomC{}")
        seq = r"\vdash " + ", ".join(tex_formula(f) for f in q.conclusion)
        lines.append(rf"\RightLabel{{${_tex_label(q.rule)}$}}")
        cmd = {0: "UnaryInfC", 1: "UnaryInfC", 2: "BinaryInfC"}[len(q.premises)]
        lines.append(rf"\{cmd}{{${seq}$}}")

    emit(p)
    return "\\begin{prooftree}\n" + "\n".join(lines) + "\n\\end{prooftree}"
