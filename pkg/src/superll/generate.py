"""Random formulas and random valid proofs for a given instance.

Proofs are built goal-first: ``with_formula(F)`` returns a proof whose
conclusion starts with ``F``, choosing among the rules that can introduce
``F`` and whose side conditions hold.  Cuts are inserted on dual pairs
produced the same way.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .instance import Instance
from .proof import (
    Ax,
    BotI,
    Co,
    Cut,
    De,
    Dg,
    Exchange,
    OneI,
    ParrI,
    Plus1,
    Plus2,
    Prom,
    Proof,
    TensorI,
    TopI,
    WithI,
    node,
    permute_to,
)
from .syntax import (
    BOT,
    ONE,
    TOP,
    ZERO,
    Atom,
    Bang,
    Bot,
    DualAtom,
    Formula,
    One,
    Parr,
    Plus,
    Quest,
    Tensor,
    Top,
    With,
    Zero,
    dual,
)

ATOMS = ("X", "Y", "Z")


def random_formula(rng: random.Random, sigs, size: int, atoms=ATOMS, exp_weight: float = 0.35) -> Formula:
    """A random formula with exactly ``size`` connectives and leaves combined."""
    if size <= 1:
        r = rng.random()
        if r < 0.8:
            name = rng.choice(atoms)
            return Atom(name) if rng.random() < 0.5 else DualAtom(name)
        return rng.choice((ONE, BOT, TOP, ZERO))
    if size == 2 or rng.random() < exp_weight:
        body = random_formula(rng, sigs, size - 1, atoms, exp_weight)
        e = rng.choice(sigs)
        return Bang(e, body) if rng.random() < 0.5 else Quest(e, body)
    left = rng.randint(1, size - 2)
    ctor = rng.choice((Tensor, Parr, With, Plus))
    return ctor(
        random_formula(rng, sigs, left, atoms, exp_weight),
        random_formula(rng, sigs, size - 1 - left, atoms, exp_weight),
    )


def logical_height(p: Proof) -> int:
    """Height not counting exchange nodes."""
    own = 0 if isinstance(p.rule, Exchange) else 1
    return own + max((logical_height(q) for q in p.premises), default=0)


def front(p: Proof, i: int) -> Proof:
    """Move conclusion formula ``i`` to the front."""
    c = p.conclusion
    return permute_to(p, (c[i],) + c[:i] + c[i + 1:])


@dataclass
class ProofGen:
    inst: Instance
    rng: random.Random
    cut_rate: float = 0.0
    exp_weight: float = 0.4
    max_co: int = 3
    atoms: tuple = ATOMS

    @property
    def sigs(self) -> tuple:
        return self.inst.signatures

    def formula(self, size: int) -> Formula:
        return random_formula(self.rng, self.sigs, size, self.atoms, self.exp_weight)

    # -- combinators -------------------------------------------------------------------

    def join(self, p: Proof, q: Proof) -> Proof:
        """One proof whose conclusion holds both conclusions, plus ``F * F``."""
        bp, bq = node(BotI(), p), node(BotI(), q)
        return node(TensorI(0, 0), bp, bq)

    def collapse(self, p: Proof) -> Proof:
        """Keep formula 0 and fold the rest into exactly one formula."""
        n = len(p.conclusion)
        if n == 1:
            return front(node(BotI(), p), 1)
        cur = p
        while len(cur.conclusion) > 2:
            cur = node(ParrI(1, 2), cur)
            cur = front(cur, 1)
        return cur

    # -- goal-directed construction ------------------------------------------------------

    def with_formula(self, f: Formula, depth: int) -> Proof:
        """A proof of ``f, Delta`` with ``f`` first."""
        if depth > 2 and self.rng.random() < self.cut_rate:
            p = self._with_cut(f, depth)
            if p is not None:
                return p
        if depth <= 1:
            return node(Ax(f))
        p = self._intro(f, depth)
        return p if p is not None else node(Ax(f))

    def _with_cut(self, f: Formula, depth: int) -> Proof | None:
        c = self.cut_formula()
        left = self.join(self.with_formula(f, depth - 2), self.with_formula(c, depth - 2))
        idx = next(k for k, g in enumerate(left.conclusion) if g == c and k > 0)
        right = self.with_formula(dual(c), depth - 1)
        res = node(Cut(c, idx, 0), left, right)
        pos = res.conclusion.index(f)
        return front(res, pos)

    def cut_formula(self) -> Formula:
        size = self.rng.randint(2, 4)
        f = self.formula(size)
        if not isinstance(f, (Bang, Quest)) and self.rng.random() < 0.6:
            e = self.rng.choice(self.sigs)
            f = Bang(e, f) if self.rng.random() < 0.5 else Quest(e, f)
        return f

    def _intro(self, f: Formula, depth: int) -> Proof | None:
        d = depth - 1
        rng = self.rng
        match f:
            case Atom() | DualAtom():
                if rng.random() < 0.1:
                    return front(node(TopI((f,))), 1)
                return node(Ax(f))
            case One():
                return node(OneI())
            case Bot():
                return node(BotI(), self.with_formula(self.formula(rng.randint(1, 3)), d))
            case Top():
                ctx = tuple(self.formula(rng.randint(1, 3)) for _ in range(rng.randint(0, 2)))
                return node(TopI(ctx))
            case Zero():
                return node(Ax(ZERO))
            case Tensor(a, b):
                return node(TensorI(0, 0), self.with_formula(a, d), self.with_formula(b, d))
            case Parr(a, b):
                pa, pb = self.with_formula(a, d - 1), self.with_formula(b, d - 1)
                j = self.join(pa, pb)
                return node(ParrI(1, 1 + len(pa.conclusion)), j)
            case Plus(a, b):
                if rng.random() < 0.5:
                    return node(Plus1(0, b), self.with_formula(a, d))
                return node(Plus2(0, a), self.with_formula(b, d))
            case With(a, b):
                pa = self.collapse(self.with_formula(a, d - 1))
                pb = self.collapse(self.with_formula(b, d - 1))
                ca, cb = pa.conclusion[1], pb.conclusion[1]
                la = node(Plus1(1, cb), pa)
                lb = node(Plus2(1, ca), pb)
                return node(WithI(0, 0), front(la, 1), front(lb, 1))
            case Bang(e, a):
                return self._bang(e, a, d)
            case Quest(e, a):
                return self._quest(f, e, a, d)
        return None

    def _bang(self, e: str, a: Formula, d: int) -> Proof | None:
        p = self.with_formula(a, d - 1)
        n = len(p.conclusion) - 1
        if not self.inst.p(n, e):
            if n >= 1 and self.inst.p(1, e):
                p = self.collapse(p)
            elif n == 0 and self.inst.p(1, e):
                p = node(BotI(), p)
                p = front(p, 1)
            else:
                return None
        return node(Prom(e, 0), p)

    def _quest(self, f: Formula, e: str, a: Formula, d: int) -> Proof | None:
        inst, rng = self.inst, self.rng
        options = []
        if inst.de(e):
            options.append("de")
        cos = [es for k in range(self.max_co + 1) for es, t in inst.co_tuples(k) if t == e]
        if cos:
            options.append("co")
        dgs = [(x, y) for x, y, t in inst.dg_triples if t == e]
        if dgs:
            options.append("dg")
        if inst.p(1, e):
            options.append("prom")
        if not options:
            return None
        match rng.choice(options):
            case "de":
                return node(De(e, 0), self.with_formula(a, d))
            case "prom":
                p = self.collapse(self.with_formula(a, d - 1))
                return front(node(Prom(e, 1), p), 1)
            case "dg":
                x, y = rng.choice(dgs)
                return node(Dg(x, y, e, 0), self.with_formula(Quest(x, Quest(y, a)), d))
            case "co":
                es = rng.choice(cos)
                if not es:
                    body = self.with_formula(self.formula(rng.randint(1, 3)), d)
                    return node(Co((), e, (), a), body)
                parts = [self.with_formula(Quest(x, a), d - 1 if len(es) > 1 else d) for x in es]
                cur = parts[0]
                idxs = [0]
                for q in parts[1:]:
                    offset = 1 + len(cur.conclusion)
                    cur = self.join(cur, q)
                    idxs = [x + 1 for x in idxs] + [offset]
                return node(Co(tuple(es), e, tuple(idxs), a), cur)
        return None

    # -- entry points ------------------------------------------------------------------

    def proof(self, max_height: int = 8, formula_size: int = 4, with_cut: bool = False, tries: int = 200) -> Proof:
        """A random valid proof of logical height <= ``max_height``."""
        for _ in range(tries):
            f = self.formula(self.rng.randint(2, formula_size))
            if with_cut:
                saved = self.cut_rate
                self.cut_rate = max(saved, 0.15)
                try:
                    p = self._with_cut(f, max_height - 1)
                finally:
                    self.cut_rate = saved
            else:
                p = self.with_formula(f, max_height)
            if p is not None and logical_height(p) <= max_height and (not with_cut or not p.cut_free):
                return p
        raise RuntimeError("no proof within the height bound")


def random_proof(inst: Instance, seed: int, **kw) -> Proof:
    gen_kw = {k: kw.pop(k) for k in ("cut_rate", "exp_weight", "max_co") if k in kw}
    return ProofGen(inst, random.Random(seed), **gen_kw).proof(**kw)
