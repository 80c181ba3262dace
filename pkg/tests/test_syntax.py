import pytest
from hypothesis import given

from superll.syntax import (
    TOP,
    ZERO,
    Atom,
    Bang,
    DualAtom,
    Parr,
    ParseError,
    Plus,
    Quest,
    Tensor,
    With,
    dual,
    formula_size,
    parse_formula,
    parse_sequent,
    permutation_between,
    sequent_perm_eq,
    show,
    show_sequent,
    signatures_of,
)

from .conftest import formulas, sequents

X, Y = Atom("X"), Atom("Y")


def test_dual_tensor():
    assert dual(Tensor(X, Y)) == Parr(DualAtom("X"), DualAtom("Y"))


def test_dual_twice_with_zero():
    assert dual(dual(With(X, ZERO))) == With(X, ZERO)


def test_dual_bang():
    assert dual(Bang("e", X)) == Quest("e", DualAtom("X"))


@pytest.mark.parametrize(
    "f, size",
    [(X, 1), (Tensor(X, X), 3), (Quest("e", Quest("e'", X)), 3)],
)
def test_formula_size(f, size):
    assert formula_size(f) == size


def test_parse_examples():
    assert parse_formula("!e X * ?e X^") == Tensor(Bang("e", X), Quest("e", DualAtom("X")))
    assert parse_formula("(X + Y) & T") == With(Plus(X, Y), TOP)


@pytest.mark.parametrize("text", ["X ^ ^", "X * Y | Z", "!X", "(X", "X Y", ""])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_signature_identifiers():
    f = parse_formula("!e' ?0 ?12 X")
    assert signatures_of(f) == {"e'", "0", "12"}


def test_sequent_syntax():
    assert parse_sequent("|- X, Y") == parse_sequent("X, Y") == (X, Y)
    assert parse_sequent("|-") == ()
    assert show_sequent((X, DualAtom("Y"))) == "|- X, Y^"


def test_perm_eq_examples():
    assert sequent_perm_eq((X, Y), (Y, X))
    assert not sequent_perm_eq((X, X, Y), (X, Y))
    assert sequent_perm_eq((), ())


def test_permutation_between_matches_in_order():
    src = (X, Y, X)
    perm = permutation_between(src, (X, X, Y))
    assert perm == (0, 2, 1)
    assert permutation_between(src, (X, Y)) is None


@given(formulas)
def test_size_laws(f):
    assert formula_size(f) >= 1
    assert formula_size(Bang("a", f)) == formula_size(f) + 1
    assert formula_size(Tensor(f, f)) == 2 * formula_size(f) + 1


@given(formulas)
def test_dual_preserves_size_and_signatures(f):
    assert formula_size(dual(f)) == formula_size(f)
    assert signatures_of(dual(f)) == signatures_of(f)


@given(sequents)
def test_sequent_round_trip(g):
    assert parse_sequent(show_sequent(g)) == g


@given(formulas)
def test_show_is_canonical(f):
    assert show(parse_formula(show(f))) == show(f)
