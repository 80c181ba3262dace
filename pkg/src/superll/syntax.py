"""Formulas with indexed exponentials, sequents, and the concrete text syntax.

Negation is primitive on atoms only; ``dual`` computes the linear negation of
compound formulas.  Exponential signatures are plain strings.

Concrete syntax::

    *  tensor        |  par          &  with         +  plus
    1  one           F  bottom       T  top          0  zero
    !e A  bang       ?e A  quest     X^  dual atom

``&``/``+`` bind tighter than ``*``/``|``; binary operators of one level are
left-associative and may not be mixed without parentheses.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Union

Signature = str


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class DualAtom:
    name: str

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Tensor:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Parr:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class With:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Plus:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class One:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True, slots=True)
class Bot:
    def __str__(self) -> str:
        return "F"


@dataclass(frozen=True, slots=True)
class Top:
    def __str__(self) -> str:
        return "T"


@dataclass(frozen=True, slots=True)
class Zero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True, slots=True)
class Bang:
    sig: Signature
    body: Formula

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Quest:
    sig: Signature
    body: Formula

    def __str__(self) -> str:
        return show(self)


Formula = Union[Atom, DualAtom, Tensor, Parr, With, Plus, One, Bot, Top, Zero, Bang, Quest]
Sequent = tuple  # tuple[Formula, ...]

ONE, BOT, TOP, ZERO = One(), Bot(), Top(), Zero()

BINARY = (Tensor, Parr, With, Plus)
MULTIPLICATIVE = (Tensor, Parr)
ADDITIVE = (With, Plus)

_DUAL_BINARY = {Tensor: Parr, Parr: Tensor, With: Plus, Plus: With}
_DUAL_UNIT = {One: BOT, Bot: ONE, Top: ZERO, Zero: TOP}


def dual(a: Formula) -> Formula:
    match a:
        case Atom(name):
            return DualAtom(name)
        case DualAtom(name):
            return Atom(name)
        case Tensor(l, r) | Parr(l, r) | With(l, r) | Plus(l, r):
            return _DUAL_BINARY[type(a)](dual(l), dual(r))
        case Bang(e, b):
            return Quest(e, dual(b))
        case Quest(e, b):
            return Bang(e, dual(b))
        case _:
            return _DUAL_UNIT[type(a)]


def formula_size(a: Formula) -> int:
    match a:
        case Tensor(l, r) | Parr(l, r) | With(l, r) | Plus(l, r):
            return 1 + formula_size(l) + formula_size(r)
        case Bang(_, b) | Quest(_, b):
            return 1 + formula_size(b)
        case _:
            return 1


def is_atomic(a: Formula) -> bool:
    return isinstance(a, (Atom, DualAtom))


def quests(sigs: Sequence[Signature], a: Formula) -> Formula:
    """``?_{e1} ... ?_{en} a`` with ``sigs[0]`` outermost."""
    for e in reversed(sigs):
        a = Quest(e, a)
    return a


def bangs(sigs: Sequence[Signature], a: Formula) -> Formula:
    for e in reversed(sigs):
        a = Bang(e, a)
    return a


def signatures_of(a: Formula) -> set[Signature]:
    out: set[Signature] = set()
    stack = [a]
    while stack:
        f = stack.pop()
        match f:
            case Tensor(l, r) | Parr(l, r) | With(l, r) | Plus(l, r):
                stack += [l, r]
            case Bang(e, b) | Quest(e, b):
                out.add(e)
                stack.append(b)
    return out


def map_signatures(a: Formula, fn) -> Formula:
    """Rename every signature through ``fn``."""
    match a:
        case Tensor(l, r) | Parr(l, r) | With(l, r) | Plus(l, r):
            return type(a)(map_signatures(l, fn), map_signatures(r, fn))
        case Bang(e, b):
            return Bang(fn(e), map_signatures(b, fn))
        case Quest(e, b):
            return Quest(fn(e), map_signatures(b, fn))
        case _:
            return a


# -- sequents ---------------------------------------------------------------


def sequent_perm_eq(g1: Iterable[Formula], g2: Iterable[Formula]) -> bool:
    return Counter(g1) == Counter(g2)


def permutation_between(src: Sequence[Formula], dst: Sequence[Formula]) -> tuple[int, ...] | None:
    """Return ``perm`` with ``dst[k] == src[perm[k]]``, or None if not a permutation.

    Equal formulas are matched in order of occurrence.
    """
    if len(src) != len(dst):
        return None
    slots: dict[Formula, list[int]] = {}
    for i, f in enumerate(src):
        slots.setdefault(f, []).append(i)
    for v in slots.values():
        v.reverse()
    perm = []
    for f in dst:
        v = slots.get(f)
        if not v:
            return None
        perm.append(v.pop())
    return tuple(perm)


# -- printing ---------------------------------------------------------------

_OPS = {Tensor: "*", Parr: "|", With: "&", Plus: "+"}


def show(a: Formula) -> str:
    match a:
        case Atom(name):
            return name
        case DualAtom(name):
            return name + "^"
        case Bang(e, b):
            return f"!{e} {_show_operand(b)}"
        case Quest(e, b):
            return f"?{e} {_show_operand(b)}"
        case Tensor(l, r) | Parr(l, r) | With(l, r) | Plus(l, r):
            return f"{_show_child(a, l, left=True)} {_OPS[type(a)]} {_show_child(a, r, left=False)}"
        case _:
            return str(a)


def _show_operand(b: Formula) -> str:
    return f"({show(b)})" if isinstance(b, BINARY) else show(b)


def _show_child(parent: Formula, child: Formula, left: bool) -> str:
    if not isinstance(child, BINARY):
        return show(child)
    if isinstance(parent, MULTIPLICATIVE) and isinstance(child, ADDITIVE):
        return show(child)
    if left and type(child) is type(parent):
        return show(child)
    return f"({show(child)})"


def show_sequent(g: Sequence[Formula]) -> str:
    return "|- " + ", ".join(show(f) for f in g) if g else "|-"


# -- parsing ----------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_']+)|(\S))")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_UNITS = {"1": ONE, "0": ZERO, "T": TOP, "F": BOT}
_LEVEL = {"*": 0, "|": 0, "&": 1, "+": 1}
_CTOR = {"*": Tensor, "|": Parr, "&": With, "+": Plus}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("name", m.group(1), m.start(1)))
        else:
            toks.append(("op", m.group(2), m.start(2)))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def binary(self, level: int) -> Formula:
        left = self.unary() if level == 1 else self.binary(1)
        op = None
        while True:
            kind, val, _ = self.peek()
            if kind != "op" or _LEVEL.get(val) != level:
                return left
            if op is not None and val != op:
                self.fail(f"cannot mix '{op}' and '{val}' without parentheses")
            op = val
            self.take()
            right = self.unary() if level == 1 else self.binary(1)
            left = _CTOR[val](left, right)

    def unary(self) -> Formula:
        kind, val, _ = self.peek()
        if kind == "op" and val in "!?":
            self.take()
            k2, sig, _ = self.peek()
            if k2 != "name":
                self.fail("expected a signature after '%s'" % val)
            self.take()
            body = self.unary()
            return Bang(sig, body) if val == "!" else Quest(sig, body)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        kind, val, _ = tok
        if kind == "op" and val == "(":
            inner = self.binary(0)
            if self.peek()[1] != ")" or self.peek()[0] != "op":
                self.fail("expected ')'")
            self.take()
            return inner
        if kind == "name":
            if val in _UNITS:
                return _UNITS[val]
            if not _IDENT.match(val):
                self.fail(f"bad atom name {val!r}", tok)
            if self.peek()[:2] == ("op", "^"):
                self.take()
                return DualAtom(val)
            return Atom(val)
        self.fail("unexpected " + (repr(val) if val else "end of input"), tok)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.binary(0)
    if p.peek()[0] != "eof":
        p.fail("unexpected " + repr(p.peek()[1]))
    return f


def parse_sequent(text: str) -> tuple[Formula, ...]:
    """Parse ``|- A, B, ...`` (the leading turnstile is optional)."""
    s = text.strip()
    s = s.removeprefix("|-")
    if not s.strip():
        return ()
    return tuple(parse_formula(part) for part in s.split(","))
