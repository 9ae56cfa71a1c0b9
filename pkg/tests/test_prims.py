import itertools
import random

import pytest

from rtr.core import (
    BOOL, FALSE_V, INT, TOP, TRUE_V, Field, Fun, IntLit, IntV, IsType, Leq, Lt, NotType, OVar,
    PairV, PrimOp, Result, VecV, BoolV, add, FALSE,
)
from rtr.eval import satisfies, value_type
from rtr.prims import PrimError, delta_apply, delta_type

from generators import SMALL_VALUES

x, p = OVar("x"), OVar("p")


def test_every_op_has_a_type():
    for op in PrimOp:
        assert isinstance(delta_type(op), Fun)


def test_int_predicate_type():
    assert delta_type(PrimOp.INT_P) == Fun("x", TOP, Result(BOOL, IsType(x, INT), NotType(x, INT)))


def test_not_type():
    assert delta_type(PrimOp.NOT) == Fun("x", TOP, Result(BOOL, IsType(x, FALSE), NotType(x, FALSE)))


def test_add1_type():
    t = delta_type(PrimOp.ADD1)
    assert t.dom == INT and t.rng.type == INT and t.rng.obj == add(x, IntLit(1))


def test_leq_else_is_strict_flip():
    t = delta_type(PrimOp.LEQ)
    assert t.rng.then == Leq(Field("fst", p), Field("snd", p))
    assert t.rng.else_ == Lt(Field("snd", p), Field("fst", p))
    # not (a <= b) exactly when b < a
    for a, b in itertools.product(range(-4, 5), repeat=2):
        assert (not a <= b) == (b < a)


def test_delta_examples():
    assert delta_apply(PrimOp.ADD1, IntV(1)) == IntV(2)
    assert delta_apply(PrimOp.INT_P, TRUE_V) == FALSE_V
    v = VecV((IntV(10), IntV(20), IntV(30)))
    assert delta_apply(PrimOp.VEC_REF, PairV(v, IntV(2))) == IntV(30)
    assert delta_apply(PrimOp.NOT, FALSE_V) == TRUE_V
    assert delta_apply(PrimOp.NOT, IntV(0)) == FALSE_V


def test_domain_violations():
    with pytest.raises(PrimError):
        delta_apply(PrimOp.VEC_REF, PairV(VecV(()), IntV(0)))
    with pytest.raises(PrimError):
        delta_apply(PrimOp.ADD1, TRUE_V)


def _domain_samples(op):
    rng = random.Random(op.value)
    ints = [IntV(n) for n in range(-4, 5)]
    vecs = [VecV(tuple(IntV(rng.randint(-3, 3)) for _ in range(k))) for k in range(4)]
    pool = list(SMALL_VALUES) + ints + vecs
    pool += [PairV(a, b) for a in ints for b in ints]
    pool += [PairV(v, i) for v in vecs for i in ints]
    return [v for v in pool if value_type(v, delta_type(op).dom)]


@pytest.mark.parametrize("op", list(PrimOp))
def test_agreement_with_range(op):
    t = delta_type(op)
    samples = _domain_samples(op)
    assert samples
    for v in samples:
        out = delta_apply(op, v)
        rho = {t.var: v}
        assert value_type(out, t.rng.type, rho)
        assert satisfies(rho, t.rng.then if out != FALSE_V else t.rng.else_)


@pytest.mark.parametrize("op", [PrimOp.INT_P, PrimOp.BOOL_P, PrimOp.PAIR_P, PrimOp.NOT])
def test_predicates_never_stick(op):
    for v in SMALL_VALUES:
        assert isinstance(delta_apply(op, v), BoolV)
