import random
from pathlib import Path

import pytest

from rtr.core import (
    BOOL, INT, TOP, TT, NULL, App, Bool, Field, Fun, Int, IntLit, IsType, Lam, Leq, Lt, OVar, Prim,
    PrimOp, Refine, Result, Var, and_, add, scale,
)
from rtr.pretty import show
from rtr.reader import (
    Annotation, Define, ExprForm, ParseError, ProveQuery, parse, parse_expr, parse_obj, parse_prop,
    parse_result, parse_type,
)

from generators import TermGen, random_prop, random_type

CORPUS = sorted((Path(__file__).parent / "corpus").glob("*.rtr"))
x, y, z = OVar("x"), OVar("y"), OVar("z")


def test_lambda():
    e = parse_expr("(lambda (x : Int) x)")
    assert isinstance(e, Lam) and e.type == INT and e.body == Var("x")


def test_refinement_range():
    t = parse_type("(Refine (z : Int) (and (<= x z) (<= y z)))")
    assert t == Refine("z", INT, and_(Leq(x, z), Leq(y, z)))


def test_greater_than_swaps_arguments():
    assert parse_prop("(>= z x)") == Leq(x, z)
    assert parse_prop("(> z x)") == Lt(x, z)


def test_unterminated_input():
    with pytest.raises(ParseError) as err:
        parse("(if x")
    assert "end of input" in err.value.message
    assert (err.value.line, err.value.col) == (1, 6)


@pytest.mark.parametrize("text, where", [
    ("(lambda (x Int) x)", (1, 9)),
    ("(define 3 4)", (1, 9)),
    ("(lambda (x : Nat) x)", (1, 14)),
    ("(if 1 2)", (1, 1)),
    ("(: f Int)\n(prove ((: x Int)) (maybe x))", (2, 20)),
    ("())", (1, 3)),
    ("(cons 1 2]", (1, 10)),
    ("(let (x#1 1) x)", (1, 7)),
])
def test_errors_point_at_the_problem(text, where):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert (err.value.line, err.value.col) == where


def test_bool_and_plain_results_desugar():
    assert parse_type("Bool") == BOOL
    assert parse_result("Int") == Result(INT, TT, TT, NULL)
    assert parse_result("(Result Int tt ff x)").obj == x


def test_objects():
    assert parse_obj("(+ x (* 2 y) 3)") == add(x, scale(2, y), IntLit(3))
    assert parse_obj("(len (fst p))") == Field("len", Field("fst", OVar("p")))
    assert parse_obj("null") is NULL


def test_application_curries():
    e = parse_expr("(f 1 2)")
    assert e == App(App(Var("f"), Int(1)), Int(2))


def test_prims_and_literals():
    assert parse_expr("vec-ref") == Prim(PrimOp.VEC_REF)
    assert parse_expr("-4") == Int(-4)
    assert parse_expr("false") == Bool(False)


def test_program_forms():
    prog = parse("""
        ; comment
        (: f (-> (x : Int) Int))
        (define f (lambda (x : Int) x))
        (f 1)
        (prove ((: x Int)) (: x Top))
    """)
    kinds = [type(f) for f in prog.forms]
    assert kinds == [Annotation, Define, ExprForm, ProveQuery]
    assert prog.forms[0].type == Fun("x", INT, Result(INT))
    assert prog.forms[3].assumptions == (IsType(x, INT),) and prog.forms[3].goal == IsType(x, TOP)


def test_spans_lie_within_the_file():
    for path in CORPUS:
        text = path.read_text()
        try:
            prog = parse(text)
        except ParseError as err:
            assert 0 <= err.offset <= len(text)
            continue
        for form in prog.forms:
            start, end = form.span
            assert 0 <= start < end <= len(text)


def _reparse(form):
    if isinstance(form, Annotation):
        return parse(f"(: {form.name} {show(form.type)})").forms[0]
    if isinstance(form, Define):
        return parse(f"(define {form.name} {show(form.expr)})").forms[0]
    if isinstance(form, ExprForm):
        return parse(show(form.expr)).forms[0]
    text = "(prove (" + " ".join(show(a) for a in form.assumptions) + f") {show(form.goal)})"
    return parse(text).forms[0]


@pytest.mark.parametrize("path", [p for p in CORPUS if p.stem != "parse_error"], ids=lambda p: p.stem)
def test_round_trip_on_corpus(path):
    for form in parse(path.read_text()).forms:
        again = _reparse(form)
        assert type(again) is type(form)
        assert {k: v for k, v in vars(again).items() if k != "span"} == {k: v for k, v in vars(form).items() if k != "span"}


def test_round_trip_on_random_syntax():
    rng = random.Random(9)
    gen = TermGen(rng)
    for _ in range(300):
        t = random_type(rng, 3, ("x", "y"))
        assert parse_type(show(t)) == t
        p = random_prop(rng, ["x", "y", "z"], 2)
        assert parse_prop(show(p)) == p
        e = gen.closed(5)
        assert parse_expr(show(e)) == e
