import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from superll.generate import random_formula
from superll.presets import make_preset
from superll.syntax import (
    BOT,
    ONE,
    TOP,
    ZERO,
    Atom,
    Bang,
    DualAtom,
    Parr,
    Plus,
    Quest,
    Tensor,
    With,
)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SIGS = ("a", "b", "e'", "0", "s1")
ATOM_NAMES = ("X", "Y", "Z", "Xs")

leaves = st.one_of(
    st.sampled_from(ATOM_NAMES).map(Atom),
    st.sampled_from(ATOM_NAMES).map(DualAtom),
    st.sampled_from((ONE, BOT, TOP, ZERO)),
)


def _extend(children):
    sig = st.sampled_from(SIGS)
    return st.one_of(
        st.builds(Tensor, children, children),
        st.builds(Parr, children, children),
        st.builds(With, children, children),
        st.builds(Plus, children, children),
        st.builds(Bang, sig, children),
        st.builds(Quest, sig, children),
    )


formulas = st.recursive(leaves, _extend, max_leaves=12)
sequents = st.lists(formulas, max_size=5).map(tuple)


@pytest.fixture(scope="session")
def presets():
    names = ("ll-functorial", "ell", "sll", "ll-full", "lll", "shift", "sell", "bsll")
    return {n: make_preset(n) for n in names}


def formula_sample(inst, seed, count, max_size=12):
    rng = random.Random(seed)
    return [random_formula(rng, inst.signatures, rng.randint(1, max_size)) for _ in range(count)]
