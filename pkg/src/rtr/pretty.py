"""Render every syntactic category in the surface s-expression notation."""

from __future__ import annotations

from rtr.core import (
    BOOL,
    Absurd,
    Alias,
    And,
    App,
    Bool,
    BoolV,
    ClosureV,
    Cons,
    Exists,
    FalseT,
    Field,
    Fst,
    Fun,
    If,
    Int,
    IntLit,
    IntT,
    IntV,
    IsType,
    Lam,
    Leq,
    Let,
    Lin,
    Lt,
    NotType,
    NullObj,
    Or,
    OVar,
    PairObj,
    PairT,
    PairV,
    Prim,
    PrimV,
    Refine,
    Scale,
    Snd,
    Sum,
    Top,
    Trivial,
    TrueT,
    TT,
    Union,
    Var,
    VecLit,
    VecT,
    VecV,
)


def _obj(o) -> str:
    if isinstance(o, NullObj):
        return "null"
    if isinstance(o, OVar):
        return o.name
    if isinstance(o, IntLit):
        return str(o.value)
    if isinstance(o, Field):
        return f"({o.field} {_obj(o.obj)})"
    if isinstance(o, PairObj):
        return f"(cons {_obj(o.left)} {_obj(o.right)})"
    if isinstance(o, Scale):
        return f"(* {o.coeff} {_obj(o.obj)})"
    if isinstance(o, Sum):
        return f"(+ {_obj(o.left)} {_obj(o.right)})"
    if isinstance(o, Lin):
        parts = [_obj(b) if c == 1 else f"(* {c} {_obj(b)})" for b, c in o.terms]
        if o.const:
            parts.append(str(o.const))
        if len(parts) == 1:
            return parts[0]
        return f"(+ {' '.join(parts)})"
    raise TypeError(o)


def _type(t) -> str:
    if isinstance(t, Top):
        return "Top"
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, TrueT):
        return "True"
    if isinstance(t, FalseT):
        return "False"
    if isinstance(t, VecT):
        return "Vec"
    if t == BOOL:
        return "Bool"
    if isinstance(t, PairT):
        return f"(Pair {_type(t.left)} {_type(t.right)})"
    if isinstance(t, Union):
        return "(U" + "".join(" " + _type(m) for m in t.members) + ")"
    if isinstance(t, Fun):
        return f"(-> ({t.var} : {_type(t.dom)}) {_result(t.rng)})"
    if isinstance(t, Refine):
        return f"(Refine ({t.var} : {_type(t.base)}) {_prop(t.prop)})"
    raise TypeError(t)


def _prop(p) -> str:
    if isinstance(p, Trivial):
        return "tt"
    if isinstance(p, Absurd):
        return "ff"
    if isinstance(p, IsType):
        return f"(: {_obj(p.obj)} {_type(p.type)})"
    if isinstance(p, NotType):
        return f"(! {_obj(p.obj)} {_type(p.type)})"
    if isinstance(p, And):
        return f"(and {_prop(p.left)} {_prop(p.right)})"
    if isinstance(p, Or):
        return f"(or {_prop(p.left)} {_prop(p.right)})"
    if isinstance(p, Alias):
        return f"(== {_obj(p.left)} {_obj(p.right)})"
    if isinstance(p, Leq):
        return f"(<= {_obj(p.left)} {_obj(p.right)})"
    if isinstance(p, Lt):
        return f"(< {_obj(p.left)} {_obj(p.right)})"
    raise TypeError(p)


def _result(r) -> str:
    if isinstance(r, Exists):
        return f"(Exists ({r.var} : {_type(r.type)}) {_result(r.body)})"
    if r.then == TT and r.else_ == TT and isinstance(r.obj, NullObj):
        return _type(r.type)
    return f"(Result {_type(r.type)} {_prop(r.then)} {_prop(r.else_)} {_obj(r.obj)})"


def _expr(e) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, Prim):
        return e.op.value
    if isinstance(e, Lam):
        return f"(lambda ({e.var} : {_type(e.type)}) {_expr(e.body)})"
    if isinstance(e, App):
        return f"({_expr(e.fn)} {_expr(e.arg)})"
    if isinstance(e, If):
        return f"(if {_expr(e.test)} {_expr(e.then)} {_expr(e.else_)})"
    if isinstance(e, Let):
        return f"(let ({e.var} {_expr(e.bound)}) {_expr(e.body)})"
    if isinstance(e, Cons):
        return f"(cons {_expr(e.left)} {_expr(e.right)})"
    if isinstance(e, Fst):
        return f"(fst {_expr(e.expr)})"
    if isinstance(e, Snd):
        return f"(snd {_expr(e.expr)})"
    if isinstance(e, VecLit):
        return "(vec" + "".join(" " + _expr(x) for x in e.elems) + ")"
    raise TypeError(e)


def _value(v) -> str:
    if isinstance(v, IntV):
        return str(v.value)
    if isinstance(v, BoolV):
        return "true" if v.value else "false"
    if isinstance(v, PrimV):
        return v.op.value
    if isinstance(v, PairV):
        return f"(cons {_value(v.left)} {_value(v.right)})"
    if isinstance(v, VecV):
        return "(vec" + "".join(" " + _value(x) for x in v.items) + ")"
    if isinstance(v, ClosureV):
        return f"#<closure (lambda ({v.var} : {_type(v.type)}) ...)>"
    raise TypeError(v)


def show(x) -> str:
    from rtr.core import Expr, Obj, Prop, Type, TypeResult, Value

    if isinstance(x, Obj):
        return _obj(x)
    if isinstance(x, Type):
        return _type(x)
    if isinstance(x, Prop):
        return _prop(x)
    if isinstance(x, TypeResult):
        return _result(x)
    if isinstance(x, Expr):
        return _expr(x)
    if isinstance(x, Value):
        return _value(x)
    raise TypeError(f"cannot render {x!r}")
