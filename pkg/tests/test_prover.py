import itertools
import random

import pytest

from rtr.core import (
    BOOL, FALSE, FF, INT, TOP, TRUE, TT, VEC, Alias, Field, IntLit, IsType, Leq, Lt, NotType, OVar,
    PairObj, PairT, Refine, add, and_, or_, union,
)
from rtr.eval import satisfies
from rtr.prover import HybridEnv, assume, negate_defined, proves

from generators import SMALL_VALUES, models, random_atom, random_query

x, y, z, n, i, v = (OVar(s) for s in "xyzniv")
IT = union(INT, TRUE)


def _env(*props):
    return HybridEnv.of(props)


def test_assume_union_then_negation():
    env = assume(assume(HybridEnv.empty(), IsType(x, IT)), NotType(x, INT))
    assert env.type_map[x][0] == TRUE


def test_alias_then_type_gives_one_class():
    env = assume(assume(HybridEnv.empty(), Alias(x, y)), IsType(y, INT))
    classes = [c for c in env.classes() if x in c]
    assert classes == [{x, y}]
    assert env.type_of(x) == INT and env.type_of(y) == INT
    assert env.representative(y) == env.representative(x)


def test_assume_ff_is_absurd():
    assert assume(HybridEnv.empty(), FF).absurd


def test_absurd_persists():
    env = assume(HybridEnv.empty(), FF).assume(IsType(x, INT))
    assert env.absurd


def test_proves_examples():
    assert proves(_env(IsType(x, IT), NotType(x, INT)), IsType(x, TRUE))
    assert proves(assume(HybridEnv.empty(), FF), IsType(x, FALSE))
    assert not proves(_env(IsType(x, INT)), IsType(x, TRUE))


def test_connectives():
    env = _env(IsType(x, INT), IsType(y, TRUE))
    assert proves(env, TT)
    assert proves(env, and_(IsType(x, INT), IsType(y, BOOL)))
    assert proves(env, or_(IsType(x, TRUE), IsType(y, TRUE)))
    assert not proves(env, FF)


def test_or_in_environment_is_case_split():
    env = _env(or_(IsType(x, INT), IsType(x, TRUE)))
    assert proves(env, IsType(x, IT))
    assert not proves(env, IsType(x, INT))


def test_unit_propagation_through_the_worklist():
    env = _env(or_(IsType(x, INT), IsType(y, INT)), NotType(x, INT))
    assert proves(env, IsType(y, INT))


def test_split_depth_zero_gives_up_on_disjunctions():
    env = HybridEnv.of([or_(and_(IsType(x, INT), Leq(IntLit(0), x)), and_(IsType(x, INT), Leq(IntLit(1), x)))],
                       split_depth=0)
    assert not proves(env, Leq(IntLit(0), x))
    env8 = HybridEnv.of(env.facts, split_depth=8)
    assert proves(env8, Leq(IntLit(0), x))


def test_field_updates_the_root():
    env = _env(IsType(x, PairT(TOP, TOP)), IsType(Field("fst", x), INT))
    assert env.type_of(x) == PairT(INT, TOP)
    env = _env(IsType(x, PairT(IT, INT)), NotType(Field("fst", x), INT))
    assert proves(env, IsType(x, PairT(TRUE, INT)))


def test_pair_objects_fork():
    env = _env(IsType(PairObj(x, y), PairT(INT, BOOL)))
    assert proves(env, IsType(x, INT)) and proves(env, IsType(y, BOOL))


def test_refinement_is_unfolded():
    nat = Refine("w", INT, Leq(IntLit(0), OVar("w")))
    env = _env(IsType(x, nat))
    assert proves(env, Leq(IntLit(-1), x))
    assert proves(env, IsType(x, Refine("q", INT, Leq(IntLit(-5), OVar("q")))))


def test_negated_refinement():
    nat = Refine("w", INT, Leq(IntLit(0), OVar("w")))
    env = _env(IsType(x, INT), NotType(x, nat))
    assert proves(env, Lt(x, IntLit(0)))


def test_theory_entailment_over_fields():
    env = _env(IsType(v, VEC), Leq(IntLit(0), i), Lt(i, Field("len", v)))
    assert proves(env, Leq(add(i, IntLit(1)), Field("len", v)))
    assert proves(env, Lt(IntLit(0), Field("len", v)))


def test_theory_unsat_marks_absurd():
    assert _env(Leq(IntLit(0), i), Lt(add(i, IntLit(1)), n), Leq(n, IntLit(0))).absurd


def test_arithmetic_needs_integers():
    # nothing says x is an integer, so x <= x is not a tautology of the model
    assert not proves(HybridEnv.empty(), Leq(x, x))
    assert proves(_env(IsType(x, INT)), Leq(x, x))


def test_lia_atoms_imply_integers():
    assert proves(_env(Leq(x, y)), IsType(x, INT))


def test_alias_with_literals():
    env = _env(Alias(x, IntLit(3)))
    assert proves(env, IsType(x, INT))
    assert proves(env, Leq(IntLit(2), x))
    assert _env(Alias(x, IntLit(3)), Alias(x, IntLit(4))).absurd


def test_alias_transports_facts():
    env = _env(IsType(y, IT), Alias(x, y), NotType(x, TRUE))
    assert proves(env, IsType(y, INT))


def test_alias_of_pairs_is_componentwise():
    env = _env(Alias(PairObj(x, y), PairObj(z, IntLit(1))))
    assert proves(env, Alias(x, z)) and proves(env, Alias(y, IntLit(1)))


def test_representative_is_deterministic():
    e1 = _env(Alias(y, x), Alias(z, y))
    e2 = _env(Alias(x, z), Alias(y, z))
    assert e1.representative(z) == e2.representative(z) == x
    assert _env(Alias(x, IntLit(2))).representative(x) == IntLit(2)


def test_negation_respects_definedness():
    # not (fst x <= 0) also covers models where x is not a pair
    neg = negate_defined(Leq(Field("fst", x), IntLit(0)))
    for val in SMALL_VALUES:
        rho = {"x": val}
        assert satisfies(rho, neg) != satisfies(rho, Leq(Field("fst", x), IntLit(0)))


def test_not_on_bool_union():
    env = _env(IsType(x, BOOL), NotType(x, FALSE))
    assert proves(env, IsType(x, TRUE))


_ATOMS = [IsType(x, union(INT, BOOL)), NotType(x, TRUE), Leq(IntLit(0), x), Alias(x, y), NotType(y, FALSE)]
_GOALS = [IsType(x, INT), IsType(y, INT), Leq(IntLit(0), y), IsType(y, BOOL), Lt(x, IntLit(0))]


def test_assume_is_order_insensitive():
    expected = None
    for perm in itertools.permutations(_ATOMS):
        env = HybridEnv.of(perm)
        got = tuple(proves(env, g) for g in _GOALS)
        expected = expected or got
        assert got == expected


def test_monotonicity_on_random_queries():
    rng = random.Random(2)
    checked = 0
    for _ in range(300):
        names, gamma, goal = random_query(rng)
        env = HybridEnv.of(gamma)
        if not proves(env, goal):
            continue
        extra = random_atom(rng, names)
        if not any(True for _ in itertools.islice(models(names, gamma + [extra]), 1)):
            continue
        assert proves(env.assume(extra), goal)
        checked += 1
    assert checked > 20


@pytest.mark.parametrize("seed", range(3))
def test_proofs_hold_in_every_small_model(seed):
    rng = random.Random(100 + seed)
    for _ in range(150):
        names, gamma, goal = random_query(rng)
        if proves(HybridEnv.of(gamma), goal):
            for rho in models(names, gamma):
                assert satisfies(rho, goal), (gamma, goal, rho)
