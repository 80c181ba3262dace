"""Bounded backward search for cut-free proofs.

Parr, bottom, with and top are applied eagerly (they are invertible); the
remaining rules branch.  Failed sequents are memoized up to permutation,
together with the depth at which they failed.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from .instance import Instance
from .proof import (
    Ax,
    BotI,
    Co,
    De,
    Dg,
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
    Bang,
    Bot,
    One,
    Parr,
    Plus,
    Quest,
    Tensor,
    Top,
    With,
    dual,
    show_sequent,
    signatures_of,
)

FOUND = "found"
EXHAUSTED = "exhausted"
NOT_FOUND = "not-provable-within-budget"


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 12
    max_nodes: int = 100_000
    max_contraction_arity: int = 3
    max_promotion_width: int = 8
    max_dg_streak: int = 2

    def __post_init__(self):
        for name in ("max_depth", "max_nodes", "max_contraction_arity", "max_promotion_width"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_dg_streak < 0:
            raise ValueError("max_dg_streak must be non-negative")


@dataclass
class SearchResult:
    status: str
    proof: Proof | None = None
    nodes: int = 0
    depth: int | None = None
    goal: tuple = field(default=())

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def lines(self) -> list[str]:
        out = [f"goal: {show_sequent(self.goal)}", f"result: {self.status}", f"nodes: {self.nodes}"]
        if self.proof is not None:
            out += [f"depth: {self.depth}", f"size: {self.proof.size}"]
        return out


class _OutOfNodes(Exception):
    pass


def _key(seq) -> frozenset:
    return frozenset(Counter(seq).items())


class _Searcher:
    def __init__(self, inst: Instance, budget: SearchBudget):
        self.inst = inst
        self.b = budget
        self.nodes = 0
        self.failed: dict[tuple, int] = {}
        self._co: dict[str, list] = {}
        self._dg: dict[str, list] = {}

    def co_sources(self, e: str) -> list[tuple]:
        if e not in self._co:
            out = []
            for k in range(self.b.max_contraction_arity + 1):
                if k == 1:
                    out += [es for es, t in self.inst.co_tuples(1) if t == e and es != (e,)]
                else:
                    out += [es for es, t in self.inst.co_tuples(k) if t == e]
            self._co[e] = out
        return self._co[e]

    def dg_sources(self, e: str) -> list[tuple]:
        if e not in self._dg:
            self._dg[e] = [(a, b) for a, b, t in self.inst.dg_triples if t == e]
        return self._dg[e]

    def prove(self, seq: tuple, depth: int, streak: int = 0) -> Proof | None:
        if depth <= 0:
            return None
        self.nodes += 1
        if self.nodes > self.b.max_nodes:
            raise _OutOfNodes
        key = (_key(seq), streak)
        if self.failed.get(key, 0) >= depth:
            return None
        res = self._prove(seq, depth, streak)
        if res is None:
            self.failed[key] = max(self.failed.get(key, 0), depth)
            return None
        return permute_to(res, seq)

    def _prove(self, seq: tuple, depth: int, streak: int) -> Proof | None:
        d = depth - 1
        for i, f in enumerate(seq):
            rest = seq[:i] + seq[i + 1:]
            match f:
                case Top():
                    return node(TopI(rest))
                case Parr(a, b):
                    q = self.prove((a, b) + rest, d)
                    return None if q is None else node(ParrI(0, 1), q)
                case Bot():
                    q = self.prove(rest, d)
                    return None if q is None else node(BotI(), q)
                case With(a, b):
                    q1 = self.prove((a,) + rest, d)
                    if q1 is None:
                        return None
                    q2 = self.prove((b,) + rest, d)
                    return None if q2 is None else node(WithI(0, 0), q1, q2)
        if len(seq) == 2 and seq[1] == dual(seq[0]):
            return node(Ax(seq[0]))
        if seq == (One(),):
            return node(OneI())
        for i, f in enumerate(seq):
            rest = seq[:i] + seq[i + 1:]
            match f:
                case Tensor(a, b):
                    for left, right in _splits(rest):
                        q1 = self.prove((a,) + left, d)
                        if q1 is None:
                            continue
                        q2 = self.prove((b,) + right, d)
                        if q2 is not None:
                            return node(TensorI(0, 0), q1, q2)
                case Plus(a, b):
                    q = self.prove((a,) + rest, d)
                    if q is not None:
                        return node(Plus1(0, b), q)
                    q = self.prove((b,) + rest, d)
                    if q is not None:
                        return node(Plus2(0, a), q)
                case Bang(e, a):
                    if len(rest) > self.b.max_promotion_width:
                        continue
                    if all(isinstance(g, Quest) and g.sig == e for g in rest) and self.inst.p(len(rest), e):
                        q = self.prove((a,) + tuple(g.body for g in rest), d)
                        if q is not None:
                            return node(Prom(e, 0), q)
        for i, f in enumerate(seq):
            if not isinstance(f, Quest):
                continue
            rest = seq[:i] + seq[i + 1:]
            e, a = f.sig, f.body
            if self.inst.de(e):
                q = self.prove((a,) + rest, d)
                if q is not None:
                    return node(De(e, 0), q)
            for es in self.co_sources(e):
                q = self.prove(tuple(Quest(x, a) for x in es) + rest, d)
                if q is not None:
                    return node(Co(es, e, tuple(range(len(es))), a), q)
            if streak < self.b.max_dg_streak:
                for e1, e2 in self.dg_sources(e):
                    q = self.prove((Quest(e1, Quest(e2, a)),) + rest, d, streak + 1)
                    if q is not None:
                        return node(Dg(e1, e2, e, 0), q)
        return None


def _splits(rest: tuple):
    """Every split of ``rest`` into two multisets, each pair once."""
    counts = Counter(rest)
    forms = list(counts)
    for picks in itertools.product(*(range(counts[f] + 1) for f in forms)):
        left: list = []
        right: list = []
        for f, k in zip(forms, picks):
            left += [f] * k
            right += [f] * (counts[f] - k)
        yield tuple(left), tuple(right)


def search_cutfree(inst: Instance, goal, budget: SearchBudget | None = None) -> SearchResult:
    """Iterative deepening up to ``budget.max_depth``."""
    budget = budget or SearchBudget()
    goal = tuple(goal)
    for f in goal:
        inst.require(*signatures_of(f))
    s = _Searcher(inst, budget)
    try:
        for depth in range(1, budget.max_depth + 1):
            p = s.prove(goal, depth)
            if p is not None:
                return SearchResult(FOUND, p, s.nodes, depth, goal)
    except _OutOfNodes:
        return SearchResult(EXHAUSTED, None, s.nodes, None, goal)
    return SearchResult(NOT_FOUND, None, s.nodes, None, goal)
