"""Proof rewrites: cut elimination, axiom expansion, Girardization,
subsumption elimination and the collapse to plain LL.

All recursive helpers return proofs whose conclusion is exactly the
expected sequent; exchange nodes are added by ``permute_to`` wherever the
rule schemas put formulas in another order.
"""

from __future__ import annotations

import sys
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, field

from .instance import (
    AxiomReport,
    Instance,
    NoWitness,
    Obligation,
    Query,
    check_cut_axioms,
    check_expansion_axiom,
    check_girardization_axioms,
    check_subsumption_axioms,
    co_q,
    de_q,
    find_witness,
    p_q,
)
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
    PromGirard,
    PromOrdered,
    Proof,
    RuleError,
    TensorI,
    TopI,
    WithI,
    _kept,
    check_proof,
    node,
    normalize,
    permute_to,
)
from .syntax import (
    Atom,
    Bang,
    DualAtom,
    Formula,
    One,
    Plus,
    Quest,
    Tensor,
    Top,
    Zero,
    dual,
    formula_size,
    map_signatures,
    permutation_between,
    quests,
)

LL_SIG = "b"


class TransformError(RuntimeError):
    """A transformation refused to run or hit a broken precondition."""


class StuckError(TransformError):
    """Internal invariant breach; carries the offending redex description."""


@dataclass
class TransformReport:
    name: str
    input_size: int = 0
    output_size: int = 0
    steps: Counter = field(default_factory=Counter)
    witness_queries: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"transform: {self.name}", f"input-size: {self.input_size}", f"output-size: {self.output_size}"]
        out += [f"step {k}: {v}" for k, v in sorted(self.steps.items())]
        out.append(f"witness-queries: {len(self.witness_queries)}")
        return out


def _bump_recursion() -> None:
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)


_REPORT_CACHE: dict = {}


def _axioms_ok(inst: Instance, table: str, checker, bounds) -> AxiomReport | None:
    """Return a failing report, or None when the table holds (proved or checked)."""
    if table in inst.proved:
        return None
    key = (id(inst), table, tuple(bounds))
    hit = _REPORT_CACHE.get(key)
    if hit is None or hit[0] is not inst:
        hit = (inst, checker(inst, bounds))
        _REPORT_CACHE[key] = hit
    report = hit[1]
    return None if report.ok else report


def _refuse(inst, table, checker, bounds, what):
    bad = _axioms_ok(inst, table, checker, bounds)
    if bad is not None:
        ex = bad.counterexamples[0] if bad.counterexamples else ""
        raise TransformError(f"{what} refused: {table} axioms fail for {inst.name} ({ex})")


# -- shared helpers ----------------------------------------------------------------------


def _sources(p: Proof) -> list[list[tuple[int, int]]]:
    """Per conclusion position, every premise occurrence it is copied from."""
    _, origin = p.layout()
    src = [[o] if o else [] for o in origin]
    if isinstance(p.rule, WithI):
        p1, p2 = (q.conclusion for q in p.premises)
        c1, c2 = _kept(len(p1), p.rule.left), _kept(len(p2), p.rule.right)
        perm = permutation_between([p2[x] for x in c2], [p1[x] for x in c1])
        for t in range(len(c1)):
            src[1 + t].append((1, c2[perm[t]]))
    return src


def _offsets(n: int, lens: dict[int, int]) -> list[int]:
    out, acc = [], 0
    for x in range(n):
        out.append(acc)
        acc += lens.get(x, 1)
    return out


def _expand(seq, blocks: dict[int, tuple]) -> tuple:
    out: list = []
    for k, f in enumerate(seq):
        out.extend(blocks[k] if k in blocks else (f,))
    return tuple(out)


def _apply(q: Proof, tags: list, rule) -> tuple[Proof, list]:
    """Apply a one-premise rule and carry occurrence tags through it."""
    new = node(rule, q)
    _, origin = new.layout()
    return new, [tags[o[1]] if o else None for o in origin]


def _context_rebuild(p: Proof, new_prems: list[Proof], lens: list[dict[int, int]]) -> Proof:
    maps = []
    for m, q in enumerate(p.premises):
        offs = _offsets(len(q.conclusion), lens[m])
        maps.append(offs.__getitem__)
    return node(p.rule.remap(maps), *new_prems)


def expand_derived_promotions(p: Proof, which=(PromGirard, PromOrdered)) -> Proof:
    """Replace Girard promotions by Prom + Dg and ordered promotions by Prom + Co1."""
    prems = [expand_derived_promotions(q, which) for q in p.premises]
    rule = p.rule
    if isinstance(rule, PromGirard) and PromGirard in which:
        (q,) = prems
        cur = node(Prom(rule.sig, rule.index), q)
        tags = [None] + list(range(len(rule.targets)))
        eps = [q.conclusion[x].sig for x in _kept(len(q.conclusion), rule.index)]
        for j, t in enumerate(rule.targets):
            cur, tags = _apply(cur, tags, Dg(rule.sig, eps[j], t, tags.index(j)))
        return permute_to(cur, p.conclusion)
    if isinstance(rule, PromOrdered) and PromOrdered in which:
        (q,) = prems
        cur = node(Prom(rule.sig, rule.index), q)
        tags = [None] + list(range(len(rule.targets)))
        bodies = [q.conclusion[x] for x in _kept(len(q.conclusion), rule.index)]
        for j, t in enumerate(rule.targets):
            cur, tags = _apply(cur, tags, Co((rule.sig,), t, (tags.index(j),), bodies[j]))
        return permute_to(cur, p.conclusion)
    if all(a is b for a, b in zip(prems, p.premises)):
        return p
    return Proof(rule, tuple(prems), p.conclusion)


# -- cut elimination ----------------------------------------------------------------------

_POSITIVE = (Tensor, One, Plus, Bang, Atom, Zero)


class _CutEliminator:
    def __init__(self, inst: Instance, report: TransformReport, debug: bool = False):
        self.inst = inst
        self.report = report
        self.debug = debug

    def need(self, q: Query, why: str) -> None:
        if not self.inst.eval(q):
            raise TransformError(f"{why}: {q} is false")

    # single cut, both premises cut-free and exact
    def cut(self, a: Formula, i: int, j: int, p1: Proof, p2: Proof, bound: tuple) -> Proof:
        target = p1.conclusion[:i] + p1.conclusion[i + 1:] + p2.conclusion[:j] + p2.conclusion[j + 1:]
        measure = (formula_size(a), p1.raw_size + p2.raw_size)
        if not measure < bound:
            raise StuckError(f"cut measure {measure} does not decrease below {bound} on {a}")
        res = self._cut(a, i, j, p1, p2, measure)
        try:
            return permute_to(res, target)
        except RuleError as exc:
            raise StuckError(f"cut on {a}: {exc}") from None

    def _acts(self, p: Proof, k: int) -> bool:
        if isinstance(p.rule, TopI):
            return k == 0
        return p.layout()[1][k] is None

    def _cut(self, a, i, j, p1, p2, measure):
        steps = self.report.steps
        if isinstance(p1.rule, Exchange):
            steps["exchange"] += 1
            return self.cut(a, p1.rule.perm[i], j, p1.premises[0], p2, measure)
        if isinstance(p2.rule, Exchange):
            steps["exchange"] += 1
            return self.cut(a, i, p2.rule.perm[j], p1, p2.premises[0], measure)
        if isinstance(p1.rule, Ax):
            steps["key-ax"] += 1
            return p2
        if isinstance(p2.rule, Ax):
            steps["key-ax"] += 1
            return p1
        if not self._acts(p1, i):
            steps["commute-left"] += 1
            return self._commute(a, i, j, p1, p2, measure, left=True)
        if not self._acts(p2, j):
            steps["commute-right"] += 1
            return self._commute(a, i, j, p1, p2, measure, left=False)
        if not isinstance(a, _POSITIVE):
            a, i, j, p1, p2 = dual(a), j, i, p2, p1
        return self._key(a, i, j, p1, p2, measure)

    def _commute(self, a, i, j, p1, p2, measure, left: bool):
        side = p1 if left else p2
        k = i if left else j
        if isinstance(side.rule, TopI):
            ctx = list(side.rule.context)
            del ctx[k - 1]
            if left:
                rest = p2.conclusion[:j] + p2.conclusion[j + 1:]
                return node(TopI(tuple(ctx) + rest))
            rest = p1.conclusion[:i] + p1.conclusion[i + 1:]
            return node(TopI(rest + tuple(ctx)))
        new_prems = list(side.premises)
        maps = [lambda x: x for _ in side.premises]
        shift = 0 if left else len(p1.conclusion) - 1
        for m, pos in _sources(side)[k]:
            q = side.premises[m]
            if left:
                new_prems[m] = self.cut(a, pos, j, q, p2, measure)
            else:
                new_prems[m] = self.cut(a, i, pos, p1, q, measure)
            maps[m] = lambda x, pos=pos: shift + (x if x < pos else x - 1)
        return node(side.rule.remap(maps), *new_prems)

    def _key(self, a, i, j, p1, p2, measure):
        steps = self.report.steps
        r1, r2 = p1.rule, p2.rule
        match a:
            case Tensor(b, c):
                if not (isinstance(r1, TensorI) and isinstance(r2, ParrI)):
                    raise StuckError(f"tensor redex with {r1.name}/{r2.name}")
                steps["key-tensor"] += 1
                q1, q2 = p1.premises
                (r,) = p2.premises
                s1 = self.cut(b, r1.left, r2.left, q1, r, measure)
                d = r2.right if r2.right < r2.left else r2.right - 1
                pos_c = len(q1.conclusion) - 1 + d
                return self.cut(c, r1.right, pos_c, q2, s1, measure)
            case One():
                if not (isinstance(r1, OneI) and isinstance(r2, BotI)):
                    raise StuckError(f"one redex with {r1.name}/{r2.name}")
                steps["key-one"] += 1
                return p2.premises[0]
            case Plus(b, c):
                if not (isinstance(r1, (Plus1, Plus2)) and isinstance(r2, WithI)):
                    raise StuckError(f"plus redex with {r1.name}/{r2.name}")
                steps["key-plus"] += 1
                (q,) = p1.premises
                if isinstance(r1, Plus1):
                    return self.cut(b, r1.index, r2.left, q, p2.premises[0], measure)
                return self.cut(c, r1.index, r2.right, q, p2.premises[1], measure)
            case Bang(e, b):
                if not isinstance(r1, Prom):
                    raise StuckError(f"bang redex with {r1.name}")
                steps["key-bang"] += 1
                (q,) = p1.premises
                k = r1.index
                delta = q.conclusion[:k] + q.conclusion[k + 1:]
                outer = (formula_size(a), 0)
                nb = dual(b)

                def replacer(r: Proof, t: int) -> Proof:
                    res = self.cut(nb, t, k, r, q, outer)
                    return permute_to(res, r.conclusion[:t] + delta + r.conclusion[t + 1:])

                sub = _Substitution(self, nb, delta, replacer)
                return sub.run(p2, {j: (e,)})
        raise StuckError(f"no key case for {a} ({r1.name} against {r2.name})")


class _Substitution:
    """Replace tracked ``?_{l} A`` occurrences by ``?_{l} Delta`` in a cut-free proof."""

    def __init__(self, elim: _CutEliminator, a: Formula, delta: tuple, replacer: Callable[[Proof, int], Proof]):
        self.elim = elim
        self.inst = elim.inst
        self.steps = elim.report.steps
        self.a = a
        self.delta = tuple(delta)
        self.replacer = replacer
        self.m = len(self.delta)

    def block(self, sigs) -> tuple:
        return tuple(quests(sigs, d) for d in self.delta)

    def replace(self, q: Proof, t: int) -> Proof:
        if q.conclusion[t] != self.a:
            raise StuckError(f"replacer applied to {q.conclusion[t]} instead of {self.a}")
        return self.replacer(q, t)

    def run(self, p: Proof, tracked: dict[int, tuple]) -> Proof:
        if not tracked:
            return p
        for k, l in tracked.items():
            if not l or p.conclusion[k] != quests(l, self.a):
                raise StuckError(f"substitution: position {k} is not ?{list(l)} {self.a}")
        target = _expand(p.conclusion, {k: self.block(l) for k, l in tracked.items()})
        res = permute_to(self._run(p, tracked), target)
        if self.elim.debug:
            rep = check_proof(self.inst, res)
            if not rep.ok:
                raise StuckError(f"substitution produced an invalid proof: {rep}")
        return res

    def _run(self, p: Proof, tracked: dict[int, tuple]) -> Proof:
        rule = p.rule
        m = self.m
        if isinstance(rule, Exchange):
            self.steps["subst-exchange"] += 1
            return self.run(p.premises[0], {rule.perm[k]: l for k, l in tracked.items()})
        if isinstance(rule, TopI):
            self.steps["subst-ctx"] += 1
            ctx = p.conclusion[1:]
            return node(TopI(_expand(ctx, {k - 1: self.block(l) for k, l in tracked.items()})))
        if isinstance(rule, Ax):
            self.steps["subst-ax"] += 1
            ((_, l),) = tracked.items()
            cur = self.replace(node(Ax(self.a)), 0)
            idx = m
            for e in reversed(l):
                self.elim.need(p_q(m, e), "substitution axiom case")
                cur = node(Prom(e, idx), cur)
                idx = 0
            return cur
        if isinstance(rule, Prom):
            return self._prom(p, tracked)
        _, origin = p.layout()
        acting = [k for k in tracked if origin[k] is None]
        if not acting:
            self.steps["subst-ctx"] += 1
            src = _sources(p)
            new_prems, lens = [], []
            for mi, q in enumerate(p.premises):
                sub = {pos: tracked[k] for k in tracked for (mm, pos) in src[k] if mm == mi}
                new_prems.append(self.run(q, sub))
                lens.append({pos: m for pos in sub})
            return _context_rebuild(p, new_prems, lens)
        if acting != [0] or not isinstance(rule, (De, Co, Dg)):
            raise StuckError(f"substitution: unexpected {rule.name} acting on {acting}")
        l = tracked[0]
        if l[0] != rule.sig:
            raise StuckError(f"substitution: list {l} does not start with {rule.sig}")
        rest = l[1:]
        (q,) = p.premises
        sub = {origin[k][1]: v for k, v in tracked.items() if k != 0}
        match rule:
            case De(e, a_idx):
                self.steps["subst-de"] += 1
                if rest:
                    sub[a_idx] = rest
                q1 = self.run(q, sub)
                offs = _offsets(len(q.conclusion), {pos: m for pos in sub} | {a_idx: m})
                if not rest:
                    q1 = self.replace(q1, offs[a_idx])
                tags = [None] * len(q1.conclusion)
                for t in range(m):
                    tags[offs[a_idx] + t] = t
                cur = q1
                for t in range(m):
                    cur, tags = _apply(cur, tags, De(e, tags.index(t)))
                return cur
            case Co(sigs, e, idxs, _):
                self.steps["subst-co"] += 1
                for s in sigs:
                    self.elim.need(p_q(m, s), "substitution contraction case (ce2)")
                for s, x in zip(sigs, idxs):
                    sub[x] = (s,) + rest
                q1 = self.run(q, sub)
                offs = _offsets(len(q.conclusion), {pos: m for pos in sub})
                tags = [None] * len(q1.conclusion)
                for jj, x in enumerate(idxs):
                    for t in range(m):
                        tags[offs[x] + t] = (jj, t)
                cur = q1
                for t in range(m):
                    where = tuple(tags.index((jj, t)) for jj in range(len(idxs)))
                    cur, tags = _apply(cur, tags, Co(sigs, e, where, quests(rest, self.delta[t])))
                return cur
            case Dg(e1, e2, e, a_idx):
                self.steps["subst-dg"] += 1
                self.elim.need(p_q(m, e1), "substitution digging case (ce3)")
                self.elim.need(p_q(m, e2), "substitution digging case (ce3)")
                sub[a_idx] = (e1, e2) + rest
                q1 = self.run(q, sub)
                offs = _offsets(len(q.conclusion), {pos: m for pos in sub})
                tags = [None] * len(q1.conclusion)
                for t in range(m):
                    tags[offs[a_idx] + t] = t
                cur = q1
                for t in range(m):
                    cur, tags = _apply(cur, tags, Dg(e1, e2, e, tags.index(t)))
                return cur
        raise StuckError(f"substitution: unhandled {rule.name}")

    def _prom(self, p: Proof, tracked: dict[int, tuple]) -> Proof:
        self.steps["subst-prom"] += 1
        rule = p.rule
        (q,) = p.premises
        e = rule.sig
        kept = _kept(len(q.conclusion), rule.index)
        long, short = {}, []
        for k, l in sorted(tracked.items()):
            if k == 0 or l[0] != e:
                raise StuckError(f"substitution: promotion on {e} meets list {l} at {k}")
            pos = kept[k - 1]
            if len(l) >= 2:
                long[pos] = l[1:]
            else:
                short.append(pos)
        q1 = self.run(q, long)
        offs = _offsets(len(q.conclusion), {pos: self.m for pos in long})
        for pos in sorted(short, reverse=True):
            q1 = self.replace(q1, offs[pos])
        n = len(q.conclusion) - 1
        width = iterated_ce1(self.inst, e, n, self.m, len(tracked))
        final = _offsets(len(q.conclusion), {pos: self.m for pos in list(long) + short})
        res = node(Prom(e, final[rule.index]), q1)
        if len(res.conclusion) - 1 != width:
            raise StuckError("promotion width bookkeeping mismatch")
        return res


def iterated_ce1(inst: Instance, e: str, k: int, m: int, i: int) -> int:
    """From p_k(e) and p_m(e) derive p_{k+(m-1)i}(e) by i uses of ce1."""
    if not inst.p(k, e):
        raise TransformError(f"p({k}, {e}) is false")
    if i and not inst.p(m, e):
        raise TransformError(f"p({m}, {e}) is false")
    cur = k
    for _ in range(i):
        nxt = cur + m - 1
        if cur <= 0 or not inst.p(nxt, e):
            raise TransformError(f"ce1 fails: p({cur},{e}) and p({m},{e}) but not p({nxt},{e})")
        cur = nxt
    return cur


def eliminate_cut(
    inst: Instance,
    p: Proof,
    bounds=(6, 6),
    check_axioms: bool = True,
    debug: bool = False,
    report: TransformReport | None = None,
) -> Proof:
    """Return a cut-free proof of the same conclusion."""
    if check_axioms:
        _refuse(inst, "cut", check_cut_axioms, bounds, "cut elimination")
    _bump_recursion()
    report = report or TransformReport("cut-elim")
    report.input_size = p.size
    elim = _CutEliminator(inst, report, debug)
    p = normalize(p)

    def go(q: Proof) -> Proof:
        prems = [go(r) for r in q.premises]
        if isinstance(q.rule, Cut):
            l, r = (expand_derived_promotions(x) for x in prems)
            report.steps["cut"] += 1
            return elim.cut(q.rule.formula, q.rule.left, q.rule.right, l, r, (float("inf"),))
        if all(a is b for a, b in zip(prems, q.premises)):
            return q
        return Proof(q.rule, tuple(prems), q.conclusion)

    out = go(p)
    report.output_size = out.size
    return out


def substitute(
    inst: Instance,
    a: Formula,
    delta,
    lists,
    p: Proof,
    replacer: Callable[[Proof, int], Proof],
    positions=None,
) -> Proof:
    """The substitution step on its own: ``p`` proves ``?_{l_1}A, ..., ?_{l_s}A, Gamma``.

    ``positions`` gives the occurrence of each list (default: the first s
    formulas).  ``replacer(q, t)`` must turn a cut-free proof with ``A`` at
    position ``t`` into one with ``delta`` there.
    """
    lists = [tuple(l) for l in lists]
    positions = list(positions) if positions is not None else list(range(len(lists)))
    for l in lists:
        for e in l:
            if not inst.p(len(delta), e):
                raise TransformError(f"substitution needs p({len(delta)}, {e})")
    report = TransformReport("substitute")
    elim = _CutEliminator(inst, report)
    sub = _Substitution(elim, a, tuple(delta), replacer)
    _bump_recursion()
    return sub.run(normalize(p), dict(zip(positions, lists)))


# -- axiom expansion ----------------------------------------------------------------------------


def eta(a: Formula) -> Proof:
    """A proof of exactly ``A, A^`` whose axioms are atomic."""
    match a:
        case Atom() | DualAtom():
            return node(Ax(a))
        case Tensor(b, c):
            t = node(TensorI(0, 0), eta(b), eta(c))
            return permute_to(node(ParrI(1, 2), t), (a, dual(a)))
        case One():
            return permute_to(node(BotI(), node(OneI())), (a, dual(a)))
        case Top():
            return node(TopI((dual(a),)))
        case Plus(b, c):
            left = node(Plus1(0, c), eta(b))
            right = node(Plus2(0, b), eta(c))
            return permute_to(node(WithI(1, 1), left, right), (a, dual(a)))
        case Bang(e, b):
            return node(Prom(e, 0), eta(b))
    d = eta(dual(a))
    return permute_to(d, (a, dual(a)))


def expand_axioms(inst: Instance, p: Proof, check_axioms: bool = True) -> Proof:
    if check_axioms:
        _refuse(inst, "expansion", check_expansion_axiom, (6, 6), "axiom expansion")
    _bump_recursion()

    def go(q: Proof) -> Proof:
        if isinstance(q.rule, Ax):
            return permute_to(eta(q.rule.formula), q.conclusion)
        prems = tuple(go(r) for r in q.premises)
        return Proof(q.rule, prems, q.conclusion)

    return go(normalize(p))


# -- Girardization -------------------------------------------------------------------------------


class _Girardizer:
    def __init__(self, inst: Instance, report: TransformReport):
        self.inst = inst
        self.report = report

    def witness(self, kind: str, args: tuple):
        ob = Obligation(kind, args)
        self.report.witness_queries.append(str(ob))
        try:
            return find_witness(self.inst, ob)
        except NoWitness as exc:
            raise TransformError(f"{exc} (the Girardization axioms do not hold)") from None

    def need(self, q: Query) -> None:
        if not self.inst.eval(q):
            raise TransformError(f"Girardization needs {q}")

    def top(self, p: Proof) -> Proof:
        prems = [self.top(q) for q in p.premises]
        rule = p.rule
        if isinstance(rule, Prom):
            (q,) = prems
            n = len(q.conclusion) - 1
            self.report.steps["prom"] += 1
            if n == 0:
                return node(PromGirard(rule.sig, rule.index, ()), q)
            e1 = self.witness("gir5", (rule.sig,))
            tags = list(range(len(q.conclusion)))
            cur = q
            for x in _kept(len(q.conclusion), rule.index):
                cur, tags = _apply(cur, tags, De(e1, tags.index(x)))
            cur = node(PromGirard(rule.sig, tags.index(rule.index), (rule.sig,) * n), cur)
            return permute_to(cur, p.conclusion)
        if isinstance(rule, Dg):
            (q,) = prems
            self.report.steps["dg"] += 1
            res = self.dig(q, {rule.index: (rule.outer, rule.inner, rule.sig)})
            return permute_to(res, p.conclusion)
        return Proof(rule, tuple(prems), p.conclusion)

    def dig(self, p: Proof, tracked: dict[int, tuple]) -> Proof:
        """``?_{outer} ?_{inner} A`` at each tracked position becomes ``?_{new} A``."""
        if not tracked:
            return p
        blocks = {}
        for k, (o, i, n) in tracked.items():
            f = p.conclusion[k]
            if not (isinstance(f, Quest) and f.sig == o and isinstance(f.body, Quest) and f.body.sig == i):
                raise StuckError(f"dig: position {k} is not ?{o} ?{i} _")
            blocks[k] = (Quest(n, f.body.body),)
        target = _expand(p.conclusion, blocks)
        return permute_to(self._dig(p, tracked), target)

    def _dig(self, p: Proof, tracked) -> Proof:
        rule = p.rule
        steps = self.report.steps
        if isinstance(rule, Exchange):
            return self.dig(p.premises[0], {rule.perm[k]: v for k, v in tracked.items()})
        if isinstance(rule, TopI):
            ctx = list(p.conclusion[1:])
            for k, (_, _, n) in tracked.items():
                ctx[k - 1] = Quest(n, ctx[k - 1].body.body)
            return node(TopI(tuple(ctx)))
        if isinstance(rule, Ax):
            steps["dig-ax"] += 1
            ((k, (o, i, n)),) = tracked.items()
            a = p.conclusion[k].body.body
            self.need(p_q(1, o))
            return node(PromGirard(o, 0, (n,)), node(Ax(dual(Quest(i, a)))))
        if isinstance(rule, PromGirard):
            steps["dig-prom"] += 1
            (q,) = p.premises
            kept = _kept(len(q.conclusion), rule.index)
            targets = list(rule.targets)
            sub = {}
            for k, (o, i, n) in tracked.items():
                pos = kept[k - 1]
                eps = q.conclusion[pos].sig
                w = self.witness("gir4", (rule.sig, eps, i, n))
                sub[pos] = (eps, i, w)
                targets[k - 1] = n
            return node(PromGirard(rule.sig, rule.index, tuple(targets)), self.dig(q, sub))
        _, origin = p.layout()
        acting = [k for k in tracked if origin[k] is None]
        if not acting:
            steps["dig-ctx"] += 1
            src = _sources(p)
            new_prems = []
            for mi, q in enumerate(p.premises):
                sub = {pos: tracked[k] for k in tracked for (mm, pos) in src[k] if mm == mi}
                new_prems.append(self.dig(q, sub))
            return node(rule, *new_prems)
        if acting != [0] or not isinstance(rule, (De, Co)):
            raise StuckError(f"dig: unexpected {rule.name} acting on {acting}")
        (q,) = p.premises
        o, i, n = tracked[0]
        sub = {origin[k][1]: v for k, v in tracked.items() if k != 0}
        match rule:
            case De(_, a_idx):
                steps["dig-de"] += 1
                self.need(co_q((i,), n))
                q1 = self.dig(q, sub)
                body = q.conclusion[a_idx].body
                return node(Co((i,), n, (a_idx,), body), q1)
            case Co(sigs, _, idxs, body):
                steps["dig-co"] += 1
                ws = self.witness("gir3", (tuple(sigs), o, i, n))
                for s, x, w in zip(sigs, idxs, ws):
                    sub[x] = (s, i, w)
                q1 = self.dig(q, sub)
                return node(Co(tuple(ws), n, idxs, body.body), q1)
        raise StuckError(f"dig: unhandled {rule.name}")


def girardize(inst: Instance, p: Proof, bounds=(6, 6), check_axioms: bool = True, report=None) -> Proof:
    """Remove functorial promotion and digging in favour of Girard's promotion."""
    if check_axioms:
        _refuse(inst, "girardization", check_girardization_axioms, bounds, "Girardization")
    _bump_recursion()
    report = report or TransformReport("girardize")
    report.input_size = p.size
    p = expand_derived_promotions(normalize(p), which=(PromOrdered,))
    out = _Girardizer(inst, report).top(p)
    report.output_size = out.size
    return out


# -- subsumption elimination ------------------------------------------------------------------------


class _Desubsumer:
    def __init__(self, inst: Instance, report: TransformReport):
        self.inst = inst
        self.report = report

    def witness(self, kind: str, args: tuple):
        ob = Obligation(kind, args)
        self.report.witness_queries.append(str(ob))
        try:
            return find_witness(self.inst, ob)
        except NoWitness as exc:
            raise TransformError(f"{exc} (the subsumption axioms do not hold)") from None

    def need(self, q: Query) -> None:
        if not self.inst.eval(q):
            raise TransformError(f"subsumption elimination needs {q}")

    def top(self, p: Proof) -> Proof:
        prems = [self.top(q) for q in p.premises]
        rule = p.rule
        if isinstance(rule, Prom):
            (q,) = prems
            self.need(co_q((rule.sig,), rule.sig))
            self.report.steps["prom"] += 1
            return node(PromOrdered(rule.sig, rule.index, (rule.sig,) * (len(q.conclusion) - 1)), q)
        if isinstance(rule, Co) and len(rule.sigs) == 1:
            (q,) = prems
            self.report.steps["co1"] += 1
            res = self.lift(q, {rule.indices[0]: rule.sig})
            return permute_to(res, p.conclusion)
        return Proof(rule, tuple(prems), p.conclusion)

    def lift(self, p: Proof, tracked: dict[int, str]) -> Proof:
        """``?_e A`` at each tracked position becomes ``?_{e'} A`` (with e <= e')."""
        tracked = {k: v for k, v in tracked.items() if p.conclusion[k].sig != v}
        if not tracked:
            return p
        blocks = {k: (Quest(v, p.conclusion[k].body),) for k, v in tracked.items()}
        return permute_to(self._lift(p, tracked), _expand(p.conclusion, blocks))

    def _lift(self, p: Proof, tracked) -> Proof:
        rule = p.rule
        steps = self.report.steps
        if isinstance(rule, Exchange):
            return self.lift(p.premises[0], {rule.perm[k]: v for k, v in tracked.items()})
        if isinstance(rule, TopI):
            ctx = list(p.conclusion[1:])
            for k, v in tracked.items():
                ctx[k - 1] = Quest(v, ctx[k - 1].body)
            return node(TopI(tuple(ctx)))
        if isinstance(rule, Ax):
            steps["lift-ax"] += 1
            ((k, v),) = tracked.items()
            f = p.conclusion[k]
            self.need(p_q(1, f.sig))
            self.need(co_q((f.sig,), v))
            return node(PromOrdered(f.sig, 1, (v,)), node(Ax(f.body)))
        if isinstance(rule, PromOrdered):
            steps["lift-prom"] += 1
            targets = list(rule.targets)
            for k, v in tracked.items():
                self.need(co_q((rule.sig,), v))
                targets[k - 1] = v
            return node(PromOrdered(rule.sig, rule.index, tuple(targets)), p.premises[0])
        _, origin = p.layout()
        acting = [k for k in tracked if origin[k] is None]
        if not acting:
            steps["lift-ctx"] += 1
            src = _sources(p)
            new_prems = []
            for mi, q in enumerate(p.premises):
                sub = {pos: tracked[k] for k in tracked for (mm, pos) in src[k] if mm == mi}
                new_prems.append(self.lift(q, sub))
            return node(rule, *new_prems)
        if acting != [0] or not isinstance(rule, (De, Co, Dg)):
            raise StuckError(f"subsumption: unexpected {rule.name} acting on {acting}")
        (q,) = p.premises
        v = tracked[0]
        sub = {origin[k][1]: w for k, w in tracked.items() if k != 0}
        match rule:
            case De(_, a_idx):
                steps["lift-de"] += 1
                self.need(de_q(v))
                return node(De(v, a_idx), self.lift(q, sub))
            case Co(sigs, _, idxs, body):
                steps["lift-co"] += 1
                ws = self.witness("sb5", (tuple(sigs), v))
                for x, w in zip(idxs, ws):
                    sub[x] = w
                return node(Co(tuple(ws), v, idxs, body), self.lift(q, sub))
            case Dg(o, i, _, a_idx):
                steps["lift-dg"] += 1
                w = self.witness("sb6", (o, i, v))
                sub[a_idx] = w
                return node(Dg(w, i, v, a_idx), self.lift(q, sub))
        raise StuckError(f"subsumption: unhandled {rule.name}")


def eliminate_subsumption(inst: Instance, p: Proof, bounds=(6, 6), check_axioms: bool = True, report=None) -> Proof:
    """Remove functorial promotion and unary contraction in favour of ordered promotion."""
    if check_axioms:
        _refuse(inst, "subsumption", check_subsumption_axioms, bounds, "subsumption elimination")
    _bump_recursion()
    report = report or TransformReport("desubsume")
    report.input_size = p.size
    p = expand_derived_promotions(normalize(p), which=(PromGirard,))
    out = _Desubsumer(inst, report).top(p)
    report.output_size = out.size
    return out


# -- forgetful collapse -------------------------------------------------------------------------------


def forget_formula(a: Formula) -> Formula:
    return map_signatures(a, lambda e: LL_SIG)


def forget_to_ll(p: Proof) -> Proof:
    """Collapse every signature to ``b``; the result is an ll-full proof."""
    _bump_recursion()
    return _forget(normalize(p))


def _forget(p: Proof) -> Proof:
    f = forget_formula
    prems = [_forget(q) for q in p.premises]
    target = tuple(f(x) for x in p.conclusion)
    b = LL_SIG
    match p.rule:
        case Ax(a):
            rule = Ax(f(a))
        case Cut(a, i, j):
            rule = Cut(f(a), i, j)
        case Plus1(i, o):
            rule = Plus1(i, f(o))
        case Plus2(i, o):
            rule = Plus2(i, f(o))
        case TopI(ctx):
            rule = TopI(tuple(f(x) for x in ctx))
        case De(_, i):
            rule = De(b, i)
        case Dg(_, _, _, i):
            rule = Dg(b, b, b, i)
        case Prom(_, i) | PromOrdered(_, i, _):
            rule = Prom(b, i)
        case PromGirard(_, i, ts):
            rule = PromGirard(b, i, (b,) * len(ts))
        case Co(sigs, _, idxs, body):
            (q,) = prems
            body = f(body)
            if len(sigs) == 0:
                return permute_to(node(Co((), b, (), body), q), target)
            if len(sigs) == 1:
                return permute_to(q, target)
            tags = [None] * len(q.conclusion)
            for x in idxs:
                tags[x] = "c"
            cur = q
            for _ in range(len(sigs) - 1):
                where = [k for k, t in enumerate(tags) if t == "c"][:2]
                cur, tags = _apply(cur, tags, Co((b, b), b, tuple(where), body))
                tags[0] = "c"
            return permute_to(cur, target)
        case _:
            rule = p.rule
    return permute_to(node(rule, *prems), target)
