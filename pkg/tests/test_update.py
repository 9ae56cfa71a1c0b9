import random

import pytest

from rtr.core import TOP, Field, OVar, PairT, PairV, split_path
from rtr.eval import value_not_in, value_type
from rtr.prover import HybridEnv, overlap, restrict, update, uninhabited

from generators import SMALL_VALUES, random_type
from update_cases import IB, INT, IT, NAT, PTT, TRUE, UPDATE_CASES


def _ids(case):
    t, pol, path, s, _ = case
    return f"{t}{pol}{''.join(path) or 'here'}:{s}"


@pytest.mark.parametrize("case", UPDATE_CASES, ids=[_ids(c) for c in UPDATE_CASES])
def test_update_table(case):
    t, pol, path, s, expected = case
    assert update(t, pol, path, s, HybridEnv.empty()) == expected


def test_table_has_enough_cases():
    assert len(UPDATE_CASES) >= 30


def _at(v, path):
    for fld in path:
        if not isinstance(v, PairV) or fld == "len":
            return None
        v = v.left if fld == "fst" else v.right
    return v


_VALUES = list(SMALL_VALUES) + [PairV(PairV(a, b), c) for a in SMALL_VALUES[:3] for b in SMALL_VALUES[7:9]
                                  for c in SMALL_VALUES[3:5]]


@pytest.mark.parametrize("case", UPDATE_CASES, ids=[_ids(c) for c in UPDATE_CASES])
def test_update_table_is_sound_on_samples(case):
    t, pol, path, s, _ = case
    out = update(t, pol, path, s, HybridEnv.empty())
    for v in _VALUES:
        part = _at(v, path)
        if part is None or not value_type(v, t):
            continue
        if (pol == "+" and value_type(part, s)) or (pol == "-" and value_not_in(part, s)):
            assert value_type(v, out), (v, out)


def test_update_random_soundness():
    rng = random.Random(11)
    env = HybridEnv.empty()
    for _ in range(400):
        t, s = random_type(rng, 2), random_type(rng, 1)
        path = rng.choice([[], [], ["fst"], ["snd"], ["fst", "snd"]])
        pol = rng.choice("+-")
        out = update(t, pol, path, s, env)
        for v in _VALUES:
            part = _at(v, path)
            if part is None or not value_type(v, t):
                continue
            if (pol == "+" and value_type(part, s)) or (pol == "-" and value_not_in(part, s)):
                assert value_type(v, out), (t, pol, path, s, v, out)


def test_restrict_is_bottom_without_shared_inhabitants():
    rng = random.Random(5)
    env = HybridEnv.empty()
    for _ in range(300):
        t, s = random_type(rng, 2), random_type(rng, 2)
        shared = [v for v in _VALUES if value_type(v, t) and value_type(v, s)]
        if not overlap(t, s):
            assert not shared
            assert uninhabited(restrict(t, s, env))


def test_restrict_otherwise_returns_sigma():
    assert restrict(TOP, NAT, HybridEnv.empty()) == NAT
    # pointwise over the union: False shares nothing with (U Int True)
    assert restrict(IB, IT, HybridEnv.empty()) == IT


def test_union_member_refinements_are_kept():
    out = update(PairT(IT, NAT), "-", ["fst"], TRUE, HybridEnv.empty())
    assert out == PairT(INT, NAT)


def test_split_path_feeds_update():
    root, path = split_path(Field("snd", Field("fst", OVar("x"))))
    assert root == OVar("x")
    assert update(PairT(PTT, INT), "+", path, INT, HybridEnv.empty()) == PairT(PairT(TOP, INT), INT)
