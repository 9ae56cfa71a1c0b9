"""Primitive operations: their dependent types and their run-time behaviour."""

from __future__ import annotations

from rtr.core import (
    BOOL,
    FALSE,
    FALSE_V,
    INT,
    TOP,
    TRUE_V,
    VEC,
    Field,
    Fun,
    IntLit,
    IntV,
    IsType,
    Leq,
    Lt,
    NotType,
    OVar,
    PairT,
    PairV,
    PrimOp,
    Refine,
    Result,
    Value,
    BoolV,
    VecV,
    add,
    and_,
    TT,
    FF,
)

__all__ = ["PrimOp", "delta_type", "delta_apply", "PrimError"]


class PrimError(Exception):
    """A primitive was applied outside its domain (only reachable from ill-typed code)."""


def _fst(name: str):
    return Field("fst", OVar(name))


def _snd(name: str):
    return Field("snd", OVar(name))


def _pred(ty) -> Fun:
    x = OVar("x")
    return Fun("x", TOP, Result(BOOL, IsType(x, ty), NotType(x, ty)))


_INT_PAIR = PairT(INT, INT)

_DELTA: dict[PrimOp, Fun] = {
    PrimOp.NOT: Fun("x", TOP, Result(BOOL, IsType(OVar("x"), FALSE), NotType(OVar("x"), FALSE))),
    PrimOp.ADD1: Fun("x", INT, Result(INT, TT, FF, add(OVar("x"), IntLit(1)))),
    PrimOp.INT_P: _pred(INT),
    PrimOp.BOOL_P: _pred(BOOL),
    PrimOp.PAIR_P: _pred(PairT(TOP, TOP)),
    PrimOp.PLUS: Fun("p", _INT_PAIR, Result(INT, TT, FF, add(_fst("p"), _snd("p")))),
    PrimOp.LEQ: Fun("p", _INT_PAIR, Result(BOOL, Leq(_fst("p"), _snd("p")), Lt(_snd("p"), _fst("p")))),
    PrimOp.LT: Fun("p", _INT_PAIR, Result(BOOL, Lt(_fst("p"), _snd("p")), Leq(_snd("p"), _fst("p")))),
    PrimOp.EQI: Fun(
        "p",
        _INT_PAIR,
        Result(BOOL, and_(Leq(_fst("p"), _snd("p")), Leq(_snd("p"), _fst("p"))), TT),
    ),
    PrimOp.LEN: Fun("v", VEC, Result(INT, TT, FF, Field("len", OVar("v")))),
    PrimOp.VEC_REF: Fun(
        "p",
        Refine(
            "q",
            PairT(VEC, INT),
            and_(Leq(IntLit(0), _snd("q")), Lt(_snd("q"), Field("len", _fst("q")))),
        ),
        Result(INT, TT, TT),
    ),
}


def delta_type(p: PrimOp) -> Fun:
    return _DELTA[PrimOp(p)]


def _ints(v: Value, op: PrimOp) -> tuple[int, int]:
    if isinstance(v, PairV) and isinstance(v.left, IntV) and isinstance(v.right, IntV):
        return v.left.value, v.right.value
    raise PrimError(f"{op.value}: expected a pair of integers, got {v}")


def delta_apply(p: PrimOp, v: Value) -> Value:
    p = PrimOp(p)
    if p is PrimOp.NOT:
        return TRUE_V if v == FALSE_V else FALSE_V
    if p is PrimOp.INT_P:
        return BoolV(isinstance(v, IntV))
    if p is PrimOp.BOOL_P:
        return BoolV(isinstance(v, BoolV))
    if p is PrimOp.PAIR_P:
        return BoolV(isinstance(v, PairV))
    if p is PrimOp.ADD1:
        if not isinstance(v, IntV):
            raise PrimError(f"add1: expected an integer, got {v}")
        return IntV(v.value + 1)
    if p is PrimOp.LEN:
        if not isinstance(v, VecV):
            raise PrimError(f"len: expected a vector, got {v}")
        return IntV(len(v.items))
    if p is PrimOp.VEC_REF:
        if not (isinstance(v, PairV) and isinstance(v.left, VecV) and isinstance(v.right, IntV)):
            raise PrimError(f"vec-ref: expected (cons vector index), got {v}")
        items, i = v.left.items, v.right.value
        if not 0 <= i < len(items):
            raise PrimError(f"vec-ref: index {i} out of range for length {len(items)}")
        return items[i]
    a, b = _ints(v, p)
    if p is PrimOp.PLUS:
        return IntV(a + b)
    if p is PrimOp.LEQ:
        return BoolV(a <= b)
    if p is PrimOp.LT:
        return BoolV(a < b)
    if p is PrimOp.EQI:
        return BoolV(a == b)
    raise AssertionError(p)
