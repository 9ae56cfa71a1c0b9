import random

import pytest

from rtr.checker import check
from rtr.core import (
    BOOL, FALSE, FALSE_V, FF, INT, TOP, TRUE_V, TT, VEC, Alias, add, Exists, Field, Fun, IntLit, IntV, IsType,
    Leq, NotType, OVar, PairT, PairV, PrimOp, PrimV, Refine, Result, VecV, BoolV, union,
)
from rtr.eval import (
    FuelExhausted, StuckError, closure_type, denote, evaluate, satisfies, value_not_in, value_type,
)
from rtr.prover import HybridEnv
from rtr.reader import parse_expr, parse_type

from generators import SMALL_VALUES, TermGen

x, p = OVar("x"), OVar("p")


def run(src, fuel=10_000):
    return evaluate({}, parse_expr(src), fuel)


def test_add1():
    assert run("(add1 1)") == IntV(2)


def test_zero_is_truthy():
    assert run("(if 0 1 2)") == IntV(1)


def test_closure_application():
    assert run("((lambda (x : Int) (cons x x)) 3)") == PairV(IntV(3), IntV(3))


def test_let_projection_and_vectors():
    assert run("(let (v (vec 4 5 6)) (vec-ref (cons v 2)))") == IntV(6)
    assert run("(len (vec 1 2))") == IntV(2)
    assert run("(snd (cons 1 false))") == FALSE_V


def test_closures_capture_their_environment():
    assert run("(let (k 10) (let (f (lambda (y : Int) (plus (cons y k)))) (let (k 0) (f 1))))") == IntV(11)


@pytest.mark.parametrize("src", ["(1 2)", "(fst 3)", "(vec-ref (cons (vec) 0))", "(add1 true)", "(vec true)"])
def test_stuck_terms(src):
    with pytest.raises(StuckError):
        run(src)


def test_fuel():
    src = "(let (f (lambda (x : Int) (add1 (add1 x)))) (f (f (f 0))))"
    assert run(src, fuel=10_000) == IntV(6)
    with pytest.raises(FuelExhausted):
        run(src, fuel=5)


def test_fuel_only_decides_completion():
    rng = random.Random(7)
    for _ in range(100):
        e = TermGen(rng).closed(5)
        full = evaluate({}, e, 100_000)
        for fuel in (3, 20, 200):
            try:
                assert evaluate({}, e, fuel) == full
            except FuelExhausted:
                pass


def test_value_type_examples():
    assert value_type(IntV(5), Refine("x", INT, Leq(IntLit(1), x)))
    assert not value_type(IntV(0), Refine("x", INT, Leq(IntLit(1), x)))
    assert value_type(FALSE_V, FALSE)
    assert value_type(PairV(IntV(1), TRUE_V), PairT(INT, BOOL))
    assert not value_type(PairV(IntV(1), TRUE_V), PairT(INT, INT))
    assert value_type(VecV((IntV(1),)), VEC) and not value_type(IntV(1), VEC)


def test_value_type_of_closures():
    inc = run("(lambda (x : Int) (add1 x))")
    assert value_type(inc, Fun("a", INT, Result(INT)))
    positive = Fun("a", Refine("n", INT, Leq(IntLit(0), OVar("n"))),
                   Result(Refine("r", INT, Leq(IntLit(1), OVar("r")))))
    assert value_type(inc, positive)
    assert not value_type(inc, Fun("a", TOP, Result(INT)))
    assert not value_type(IntV(3), Fun("a", INT, Result(INT)))


def test_captured_values_are_used():
    f = run("(let (k 5) (lambda (y : Int) (plus (cons y k))))")
    above = Fun("a", Refine("n", INT, Leq(IntLit(0), OVar("n"))),
                Result(Refine("r", INT, Leq(IntLit(5), OVar("r")))))
    assert value_type(f, above)
    # the captured k is replaced by its value in the object
    assert closure_type(f) == Fun("y", INT, Result(INT, TT, FF, add(OVar("y"), IntLit(5))))


def test_primitive_values():
    assert value_type(PrimV(PrimOp.ADD1), Fun("z", INT, Result(INT)))
    assert not value_type(PrimV(PrimOp.ADD1), Fun("z", BOOL, Result(INT)))


def test_satisfies_examples():
    assert satisfies({"x": IntV(3)}, Leq(IntLit(0), x))
    assert not satisfies({"x": IntV(3)}, IsType(x, FALSE))
    assert satisfies({"p": PairV(IntV(1), IntV(2))}, Alias(Field("fst", p), IntLit(1)))


def test_atoms_require_denotation():
    rho = {"x": IntV(1)}
    assert denote(rho, Field("fst", x)) is None
    assert not satisfies(rho, IsType(Field("fst", x), TOP))
    assert not satisfies(rho, NotType(Field("fst", x), INT))
    assert not satisfies({"x": TRUE_V}, Leq(x, x))


def test_not_in_is_the_complement_on_first_order_values():
    types = [INT, BOOL, FALSE, VEC, PairT(INT, TOP), union(INT, PairT(BOOL, INT)),
             Refine("w", INT, Leq(IntLit(0), OVar("w")))]
    for v in SMALL_VALUES:
        for t in types:
            assert value_not_in(v, t) != value_type(v, t)


def test_values_agree_with_objects_and_propositions():
    """The value agrees with the object, and with the proposition its truthiness selects."""
    rng = random.Random(8)
    checked = 0
    for _ in range(300):
        e = TermGen(rng).closed(5)
        r = check(HybridEnv.empty(), e)
        if isinstance(r, Exists):
            continue
        v = evaluate({}, e)
        assert value_type(v, r.type)
        assert satisfies({}, r.else_ if v == FALSE_V else r.then)
        o = denote({}, r.obj)
        if o is not None:
            assert o == v
        checked += 1
    assert checked > 50


def test_soundness_sample():
    rng = random.Random(12)
    for _ in range(150):
        e = TermGen(rng).closed(6)
        r = check(HybridEnv.empty(), e)
        while isinstance(r, Exists):
            r = r.body
        try:
            v = evaluate({}, e)
        except FuelExhausted:
            continue
        assert value_type(v, r.type)


def test_parsed_function_type_value():
    f = run("(lambda (b : Bool) (if b 1 0))")
    assert value_type(f, parse_type("(-> (q : Bool) (Refine (r : Int) (<= 0 r)))"))
    assert isinstance(run("true"), BoolV)
