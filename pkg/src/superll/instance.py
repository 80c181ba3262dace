"""Parameter bundles (E, de, co, dg, p) and bounded checking of their axiom tables."""

from __future__ import annotations

import itertools
import re
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .syntax import Signature

DEFAULT_BOUNDS = (6, 6)


class UnknownSignature(ValueError):
    def __init__(self, sig: Signature, instance: str = ""):
        super().__init__(f"unknown signature {sig!r}" + (f" in instance {instance}" if instance else ""))
        self.sig = sig


class NoWitness(LookupError):
    def __init__(self, obligation: Obligation):
        super().__init__(f"no witness for {obligation}")
        self.obligation = obligation


class BadWitness(ValueError):
    def __init__(self, obligation: Obligation, witness):
        super().__init__(f"bad witness {witness!r} for {obligation}")
        self.obligation = obligation
        self.witness = witness


@dataclass(frozen=True)
class Query:
    """One predicate application: ``de(e)``, ``co(es -> e)``, ``dg(e1, e2, e)`` or ``p(n, e)``."""

    pred: str
    args: tuple

    def __str__(self) -> str:
        if self.pred == "co":
            es, e = self.args
            return f"co({' '.join(es)} -> {e})" if es else f"co(-> {e})"
        return f"{self.pred}({', '.join(map(str, self.args))})"


def de_q(e):
    return Query("de", (e,))


def co_q(es, e):
    return Query("co", (tuple(es), e))


def dg_q(e1, e2, e):
    return Query("dg", (e1, e2, e))


def p_q(n, e):
    return Query("p", (n, e))


@dataclass(frozen=True)
class Obligation:
    """An existential demanded by a Girardization or subsumption axiom.

    ``gir3``: args ``(eps, e1, e2, e)``, wants eps' with dg(eps_j, e2, eps'_j) and co(eps' -> e).
    ``gir4``: args ``(e1, e2, e3, e)``, wants e'' with dg(e2, e3, e'') and dg(e1, e'', e).
    ``gir5``: args ``(e,)``, wants e' with de(e') and dg(e, e', e).
    ``sb5``:  args ``(eps, e2)``, wants eps' with eps_j <= eps'_j and co(eps' -> e2).
    ``sb6``:  args ``(eps1, eps2, e2)``, wants eps1' with eps1 <= eps1' and dg(eps1', eps2, e2).
    """

    kind: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.kind}{self.args}"


@dataclass(frozen=True)
class Witnesses:
    gir3: Callable | None = None
    gir4: Callable | None = None
    gir5: Callable | None = None
    sb5: Callable | None = None
    sb6: Callable | None = None


@dataclass(frozen=True, eq=False)
class Instance:
    """A superLL instance.

    ``signatures`` is the declared set in canonical order.  For an infinite
    signature set it is a finite sample, ``finite`` is False, and
    ``member`` decides membership in the full set.
    """

    name: str
    signatures: tuple[Signature, ...]
    de_fn: Callable[[Signature], bool]
    co_fn: Callable[[tuple, Signature], bool]
    dg_fn: Callable[[Signature, Signature, Signature], bool]
    p_fn: Callable[[int, Signature], bool]
    witnesses: Witnesses | None = None
    finite: bool = True
    member: Callable[[Signature], bool] | None = None
    proved: frozenset = frozenset()
    max_co_arity: int | None = None  # co_k is false for every k above this, when known
    order_key: Callable[[Signature], object] | None = None

    def contains(self, e: Signature) -> bool:
        if self.member is not None:
            return self.member(e)
        return e in self._sigset

    @cached_property
    def _sigset(self) -> frozenset:
        return frozenset(self.signatures)

    def require(self, *sigs: Signature) -> None:
        for e in sigs:
            if not self.contains(e):
                raise UnknownSignature(e, self.name)

    def de(self, e: Signature) -> bool:
        self.require(e)
        return bool(self.de_fn(e))

    def co(self, es: Sequence[Signature], e: Signature) -> bool:
        es = tuple(es)
        self.require(*es, e)
        if self.max_co_arity is not None and len(es) > self.max_co_arity:
            return False
        return bool(self.co_fn(es, e))

    def dg(self, e1: Signature, e2: Signature, e: Signature) -> bool:
        self.require(e1, e2, e)
        return bool(self.dg_fn(e1, e2, e))

    def p(self, n: int, e: Signature) -> bool:
        self.require(e)
        return n >= 0 and bool(self.p_fn(n, e))

    def leq(self, e1: Signature, e2: Signature) -> bool:
        return self.co((e1,), e2)

    def eval(self, q: Query) -> bool:
        match q.pred:
            case "de":
                return self.de(*q.args)
            case "co":
                return self.co(*q.args)
            case "dg":
                return self.dg(*q.args)
            case "p":
                return self.p(*q.args)
        raise ValueError(f"unknown predicate {q.pred!r}")

    def sort_key(self, e: Signature):
        if e in self._index:
            return (0, self._index[e])
        return (1, self.order_key(e) if self.order_key else e)

    @cached_property
    def _index(self) -> dict:
        return {e: i for i, e in enumerate(self.signatures)}

    # cached enumerations over the declared (or sampled) set

    def co_tuples(self, k: int) -> list[tuple[tuple, Signature]]:
        cache = self.__dict__.setdefault("_co_cache", {})
        if k not in cache:
            if self.max_co_arity is not None and k > self.max_co_arity:
                cache[k] = []
            else:
                cache[k] = [
                    (es, e)
                    for es in itertools.product(self.signatures, repeat=k)
                    for e in self.signatures
                    if self.co_fn(es, e)
                ]
        return cache[k]

    @cached_property
    def dg_triples(self) -> list[tuple[Signature, Signature, Signature]]:
        return [t for t in itertools.product(self.signatures, repeat=3) if self.dg_fn(*t)]


def eval_param(inst: Instance, query: Query) -> bool:
    return inst.eval(query)


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    axiom: str
    values: tuple[tuple[str, object], ...]
    note: str = ""

    def __str__(self) -> str:
        parts = [self.axiom] + [f"{k}={v}" for k, v in self.values]
        if self.note:
            parts.append(f"({self.note})")
        return " ".join(parts)

    def get(self, key: str):
        return dict(self.values)[key]


@dataclass
class AxiomReport:
    table: str
    verdicts: dict[str, bool]
    counterexamples: list[Counterexample] = field(default_factory=list)
    bounds: tuple[int, int] = DEFAULT_BOUNDS
    proved: bool = False

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def failing(self) -> list[str]:
        return [a for a, v in self.verdicts.items() if not v]

    def lines(self) -> list[str]:
        out = [f"table: {self.table}"]
        out += [f"{a}: {'pass' if v else 'fail'}" for a, v in self.verdicts.items()]
        out.append(f"verdict: {'pass' if self.ok else 'fail'}")
        if self.ok and self.proved:
            out.append("scope: proved")
        else:
            out.append(f"scope: bounded K={self.bounds[0]} N={self.bounds[1]}")
        out += [f"counterexample: {c}" for c in self.counterexamples]
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


class _Collector:
    def __init__(self, axioms: Iterable[str], limit: int):
        self.verdicts = {a: True for a in axioms}
        self.examples: list[Counterexample] = []
        self.limit = limit
        self._count: dict[str, int] = {}

    def fail(self, axiom: str, note: str = "", **values) -> None:
        self.verdicts[axiom] = False
        n = self._count.get(axiom, 0)
        if n < self.limit:
            self.examples.append(Counterexample(axiom, tuple(values.items()), note))
        self._count[axiom] = n + 1

    def report(self, table: str, bounds, proved: bool) -> AxiomReport:
        return AxiomReport(table, self.verdicts, self.examples, tuple(bounds), proved)


def _named(prefix: str, es: Sequence[Signature]) -> dict:
    return {f"{prefix}{i + 1}": e for i, e in enumerate(es)}


def is_functional(inst: Instance, bounds=DEFAULT_BOUNDS, limit: int = 5) -> AxiomReport:
    """Check that de, dg and every co_k (k != 1, k <= K) determine their last argument."""
    K, _ = bounds
    ks = [k for k in range(K + 1) if k != 1]
    col = _Collector(["de"] + [f"co{k}" for k in ks] + ["dg"], limit)
    des = [e for e in inst.signatures if inst.de_fn(e)]
    for a, b in itertools.combinations(des, 2):
        col.fail("de", e=a, e_alt=b)
    for k in ks:
        seen: dict[tuple, Signature] = {}
        for es, e in inst.co_tuples(k):
            if es in seen:
                col.fail(f"co{k}", **_named("e", es), e=seen[es], e_alt=e)
            else:
                seen[es] = e
    seen2: dict[tuple, Signature] = {}
    for e1, e2, e in inst.dg_triples:
        if (e1, e2) in seen2:
            col.fail("dg", e1=e1, e2=e2, e=seen2[(e1, e2)], e_alt=e)
        else:
            seen2[(e1, e2)] = e
    return col.report("functional", bounds, False)


def check_cut_axioms(inst: Instance, bounds=DEFAULT_BOUNDS, limit: int = 5) -> AxiomReport:
    K, N = bounds
    col = _Collector(["ce1", "ce2", "ce3"], limit)
    p = inst.p_fn
    for e in inst.signatures:
        for m in range(1, N + 1):
            if not p(m, e):
                continue
            for n in range(N + 1):
                if p(n, e) and not p(m + n - 1, e):
                    col.fail("ce1", m=m, n=n, e=e)
    for k in range(K + 1):
        for es, e in inst.co_tuples(k):
            for n in range(N + 1):
                if p(n, e) and not all(p(n, ei) for ei in es):
                    col.fail("ce2", k=k, **_named("e", es), e=e, n=n)
    for e1, e2, e in inst.dg_triples:
        for n in range(N + 1):
            if p(n, e) and not (p(n, e1) and p(n, e2)):
                col.fail("ce3", e1=e1, e2=e2, e=e, n=n)
    return col.report("cut-elimination", bounds, "cut" in inst.proved)


def check_expansion_axiom(inst: Instance, bounds=DEFAULT_BOUNDS, limit: int = 5) -> AxiomReport:
    col = _Collector(["ea"], limit)
    for e in inst.signatures:
        if not inst.p_fn(1, e):
            col.fail("ea", e=e)
    return col.report("expansion", bounds, "expansion" in inst.proved)


def _discharge(col: _Collector, inst: Instance, axiom: str, ob: Obligation, values: dict) -> None:
    try:
        find_witness(inst, ob)
    except NoWitness:
        col.fail(axiom, **values)
    except BadWitness as exc:
        col.fail(axiom, note=f"bad witness {exc.witness}", **values)


def check_girardization_axioms(inst: Instance, bounds=DEFAULT_BOUNDS, limit: int = 5) -> AxiomReport:
    K, N = bounds
    col = _Collector(["gir1", "gir2", "gir3", "gir4", "gir5"], limit)
    dg = inst.dg_triples
    by_first: dict[Signature, list] = {}
    for t in dg:
        by_first.setdefault(t[0], []).append(t)
    for e1, e2, e in dg:
        if not inst.p_fn(1, e1):
            col.fail("gir1", e1=e1, e2=e2, e=e)
        if inst.de_fn(e1) and not inst.co_fn((e2,), e):
            col.fail("gir2", e1=e1, e2=e2, e=e)
    for k in range(K + 1):
        for eps, e1 in inst.co_tuples(k):
            for _, e2, e in by_first.get(e1, ()):
                ob = Obligation("gir3", (eps, e1, e2, e))
                _discharge(col, inst, "gir3", ob, dict(k=k, **_named("eps", eps), e1=e1, e2=e2, e=e))
    for e1, e2, ep in dg:
        for _, e3, e in by_first.get(ep, ()):
            ob = Obligation("gir4", (e1, e2, e3, e))
            _discharge(col, inst, "gir4", ob, dict(e1=e1, e2=e2, e3=e3, e_mid=ep, e=e))
    for e in inst.signatures:
        for n in range(1, N + 1):
            if inst.p_fn(n, e):
                _discharge(col, inst, "gir5", Obligation("gir5", (e,)), dict(n=n, e=e))
    return col.report("girardization", bounds, "girardization" in inst.proved)


def check_subsumption_axioms(inst: Instance, bounds=DEFAULT_BOUNDS, limit: int = 5) -> AxiomReport:
    K, _ = bounds
    col = _Collector(["sb1", "sb2", "sb3", "sb4", "sb5", "sb6"], limit)
    sigs = inst.signatures
    leq = {(a, b) for (a,), b in inst.co_tuples(1)}
    for e in sigs:
        if not inst.p_fn(1, e):
            col.fail("sb1", e=e)
        if (e, e) not in leq:
            col.fail("sb2", e=e)
    above: dict[Signature, list] = {}
    for a, b in leq:
        above.setdefault(a, []).append(b)
    for a, b in sorted(leq, key=lambda t: (inst.sort_key(t[0]), inst.sort_key(t[1]))):
        for c in above.get(b, ()):
            if (a, c) not in leq:
                col.fail("sb3", e1=a, e2=b, e3=c)
        if inst.de_fn(a) and not inst.de_fn(b):
            col.fail("sb4", e1=a, e2=b)
    for k in range(K + 1):
        for eps, e1 in inst.co_tuples(k):
            for e2 in above.get(e1, ()):
                ob = Obligation("sb5", (eps, e2))
                _discharge(col, inst, "sb5", ob, dict(k=k, **_named("eps", eps), e1=e1, e2=e2))
    for eps1, eps2, e1 in inst.dg_triples:
        for e2 in above.get(e1, ()):
            ob = Obligation("sb6", (eps1, eps2, e2))
            _discharge(col, inst, "sb6", ob, dict(eps1=eps1, eps2=eps2, e1=e1, e2=e2))
    return col.report("subsumption", bounds, "subsumption" in inst.proved)


TABLES = {
    "cut": check_cut_axioms,
    "expansion": check_expansion_axiom,
    "girardization": check_girardization_axioms,
    "subsumption": check_subsumption_axioms,
    "functional": is_functional,
}


# -- witnesses -----------------------------------------------------------------


def _holds(inst: Instance, ob: Obligation, w) -> bool:
    """Does ``w`` discharge ``ob``?  Membership is checked against the full set."""
    try:
        match ob.kind:
            case "gir3":
                eps, _, e2, e = ob.args
                return len(w) == len(eps) and all(inst.dg(a, e2, b) for a, b in zip(eps, w)) and inst.co(w, e)
            case "gir4":
                e1, e2, e3, e = ob.args
                return inst.dg(e2, e3, w) and inst.dg(e1, w, e)
            case "gir5":
                (e,) = ob.args
                return inst.de(w) and inst.dg(e, w, e)
            case "sb5":
                eps, e2 = ob.args
                return len(w) == len(eps) and all(inst.leq(a, b) for a, b in zip(eps, w)) and inst.co(w, e2)
            case "sb6":
                eps1, eps2, e2 = ob.args
                return inst.leq(eps1, w) and inst.dg(w, eps2, e2)
    except UnknownSignature:
        return False
    raise ValueError(f"unknown obligation {ob.kind!r}")


def _candidates(inst: Instance, ob: Obligation) -> Iterator:
    sigs = inst.signatures
    match ob.kind:
        case "gir3":
            eps, _, e2, e = ob.args
            cols = [[b for b in sigs if inst.dg_fn(a, e2, b)] for a in eps]
            yield from itertools.product(*cols)
        case "sb5":
            eps, e2 = ob.args
            cols = [[b for b in sigs if inst.co_fn((a,), b)] for a in eps]
            yield from itertools.product(*cols)
        case _:
            yield from sigs


def find_witness(inst: Instance, ob: Obligation):
    """Return the canonical witness for ``ob``: the instance's witness function if
    it has one (validated), else the first candidate in declaration order."""
    fn = getattr(inst.witnesses, ob.kind, None) if inst.witnesses else None
    if fn is not None:
        w = fn(*ob.args)
        if w is None:
            raise NoWitness(ob)
        if ob.kind in ("gir3", "sb5"):
            w = tuple(w)
        if not _holds(inst, ob, w):
            raise BadWitness(ob, w)
        return w
    for w in _candidates(inst, ob):
        if _holds(inst, ob, w):
            return w
    raise NoWitness(ob)


# -- instance files ----------------------------------------------------------------


class InstanceFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str = ""):
        loc = f"{path or '<instance>'}:{line}: " if line is not None else ""
        super().__init__(loc + message)
        self.line = line


def _parse_pspec(spec: str) -> Callable[[int], bool]:
    spec = spec.strip()
    if spec == "all":
        return lambda n: True
    if spec == "none":
        return lambda n: False
    m = re.fullmatch(r">=\s*(\d+)", spec)
    if m:
        lo = int(m.group(1))
        return lambda n: n >= lo
    m = re.fullmatch(r"\{([\d\s,]*)\}", spec)
    if m:
        vals = frozenset(int(x) for x in m.group(1).replace(",", " ").split())
        return lambda n: n in vals
    raise ValueError(f"bad p specification {spec!r}")


def parse_instance(text: str, name: str = "file", path: str = "") -> Instance:
    sigs: list[str] = []
    de: set[str] = set()
    co: set[tuple[tuple, str]] = set()
    dg: set[tuple[str, str, str]] = set()
    pmap: dict[str, Callable[[int], bool]] = {}
    preset = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"(\w+)(?:\s+(\d+))?\s*:\s*(.*)", line)
        if not m:
            raise InstanceFileError(f"cannot read line {raw!r}", lineno, path)
        key, arity, rest = m.group(1), m.group(2), m.group(3)
        try:
            if key == "signatures":
                sigs += rest.split()
            elif key == "de":
                de.update(rest.split())
            elif key == "co":
                if arity is None:
                    raise ValueError("co needs an arity, e.g. 'co 2: a a -> a'")
                lhs, arrow, rhs = rest.partition("->")
                es, tgt = tuple(lhs.split()), rhs.split()
                if not arrow or len(tgt) != 1 or len(es) != int(arity):
                    raise ValueError(f"malformed co {arity} entry")
                co.add((es, tgt[0]))
            elif key == "dg":
                lhs, arrow, rhs = rest.partition("->")
                es, tgt = lhs.split(), rhs.split()
                if not arrow or len(es) != 2 or len(tgt) != 1:
                    raise ValueError("malformed dg entry, expected 'dg: a b -> c'")
                dg.add((es[0], es[1], tgt[0]))
            elif key == "p":
                sig, eq, spec = rest.partition("=")
                if not eq or not sig.strip():
                    raise ValueError("malformed p entry, expected 'p: e = spec'")
                pmap[sig.strip()] = _parse_pspec(spec)
            elif key == "preset":
                preset = rest.strip()
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise InstanceFileError(str(exc), lineno, path) from None
    if preset is not None:
        from .presets import make_preset

        return make_preset(preset)
    if len(set(sigs)) != len(sigs):
        raise InstanceFileError("duplicate signature", None, path)
    known = set(sigs)
    used = set(de) | {e for es, t in co for e in es + (t,)} | {e for t in dg for e in t} | set(pmap)
    for e in sorted(used - known):
        raise InstanceFileError(f"unknown signature {e!r}", None, path)
    max_k = max((len(es) for es, _ in co), default=0)
    return Instance(
        name=name,
        signatures=tuple(sigs),
        de_fn=de.__contains__,
        co_fn=lambda es, e: (tuple(es), e) in co,
        dg_fn=lambda a, b, c: (a, b, c) in dg,
        p_fn=lambda n, e: e in pmap and pmap[e](n),
        max_co_arity=max_k,
    )


def load_instance_file(path: str) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read(), name=path, path=path)
