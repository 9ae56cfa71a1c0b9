"""Big-step evaluation, the model relation, and typing of run-time values."""

from __future__ import annotations

from typing import Mapping

from rtr.core import (
    FALSE,
    FALSE_V,
    INT,
    TRUE,
    VEC,
    NULL,
    Absurd,
    Alias,
    And,
    App,
    Bool,
    BoolV,
    ClosureV,
    Cons,
    Expr,
    Field,
    FalseT,
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
    Obj,
    Or,
    OVar,
    PairObj,
    PairT,
    PairV,
    Prim,
    PrimV,
    Prop,
    Refine,
    Snd,
    Top,
    Trivial,
    TrueT,
    Type,
    Union,
    Value,
    Var,
    VecLit,
    VecT,
    VecV,
    Exists,
    expr_free_vars,
    free_vars,
    fresh,
    fresh_scope,
    subst,
    and_,
)
from rtr.prims import PrimError, delta_apply, delta_type

DEFAULT_FUEL = 100_000


class StuckError(Exception):
    def __init__(self, reason: str, span=None):
        super().__init__(reason)
        self.reason = reason
        self.span = span


class FuelExhausted(Exception):
    pass


# ---------------------------------------------------------------------------
# Evaluation


class _Meter:
    __slots__ = ("left",)

    def __init__(self, fuel: int):
        self.left = fuel

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted()


def evaluate(rho: Mapping[str, Value], e: Expr, fuel: int = DEFAULT_FUEL) -> Value:
    """Call-by-value big-step evaluation. Raises StuckError or FuelExhausted."""
    return _eval(dict(rho), e, _Meter(fuel))


def _eval(rho: dict[str, Value], e: Expr, meter: _Meter) -> Value:
    meter.tick()
    if isinstance(e, Int):
        return IntV(e.value)
    if isinstance(e, Bool):
        return BoolV(e.value)
    if isinstance(e, Prim):
        return PrimV(e.op)
    if isinstance(e, Var):
        if e.name not in rho:
            raise StuckError(f"unbound variable {e.name}", e.span)
        return rho[e.name]
    if isinstance(e, Lam):
        captured = tuple(sorted((x, rho[x]) for x in expr_free_vars(e) if x in rho))
        return ClosureV(captured, e.var, e.type, e.body)
    if isinstance(e, App):
        f = _eval(rho, e.fn, meter)
        a = _eval(rho, e.arg, meter)
        if isinstance(f, ClosureV):
            inner = dict(f.env)
            inner[f.var] = a
            return _eval(inner, f.body, meter)
        if isinstance(f, PrimV):
            try:
                return delta_apply(f.op, a)
            except PrimError as err:
                raise StuckError(str(err), e.span) from None
        raise StuckError(f"cannot apply {f}", e.span)
    if isinstance(e, If):
        test = _eval(rho, e.test, meter)
        return _eval(rho, e.then if test != FALSE_V else e.else_, meter)
    if isinstance(e, Let):
        v = _eval(rho, e.bound, meter)
        inner = dict(rho)
        inner[e.var] = v
        return _eval(inner, e.body, meter)
    if isinstance(e, Cons):
        return PairV(_eval(rho, e.left, meter), _eval(rho, e.right, meter))
    if isinstance(e, (Fst, Snd)):
        v = _eval(rho, e.expr, meter)
        if not isinstance(v, PairV):
            raise StuckError(f"cannot project from {v}", e.span)
        return v.left if isinstance(e, Fst) else v.right
    if isinstance(e, VecLit):
        items = tuple(_eval(rho, x, meter) for x in e.elems)
        if not all(isinstance(i, IntV) for i in items):
            raise StuckError("vector elements must be integers", e.span)
        return VecV(items)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Model relation


def denote(rho: Mapping[str, Value], o: Obj) -> Value | None:
    """Value of a symbolic object under ``rho``; None when it does not denote."""
    if isinstance(o, NullObj):
        return None
    if isinstance(o, OVar):
        return rho.get(o.name)
    if isinstance(o, IntLit):
        return IntV(o.value)
    if isinstance(o, PairObj):
        a, b = denote(rho, o.left), denote(rho, o.right)
        return None if a is None or b is None else PairV(a, b)
    if isinstance(o, Field):
        v = denote(rho, o.obj)
        if o.field == "len":
            return IntV(len(v.items)) if isinstance(v, VecV) else None
        if not isinstance(v, PairV):
            return None
        return v.left if o.field == "fst" else v.right
    if isinstance(o, Lin):
        total = o.const
        for base, k in o.terms:
            v = denote(rho, base)
            if not isinstance(v, IntV):
                return None
            total += k * v.value
        return IntV(total)
    return None


def satisfies(rho: Mapping[str, Value], p: Prop) -> bool:
    if isinstance(p, Trivial):
        return True
    if isinstance(p, Absurd):
        return False
    if isinstance(p, And):
        return satisfies(rho, p.left) and satisfies(rho, p.right)
    if isinstance(p, Or):
        return satisfies(rho, p.left) or satisfies(rho, p.right)
    if isinstance(p, IsType):
        v = denote(rho, p.obj)
        return v is not None and value_type(v, p.type, rho)
    if isinstance(p, NotType):
        v = denote(rho, p.obj)
        return v is not None and value_not_in(v, p.type, rho)
    if isinstance(p, Alias):
        a, b = denote(rho, p.left), denote(rho, p.right)
        return a is not None and a == b
    if isinstance(p, (Leq, Lt)):
        a, b = denote(rho, p.left), denote(rho, p.right)
        if not (isinstance(a, IntV) and isinstance(b, IntV)):
            return False
        return a.value <= b.value if isinstance(p, Leq) else a.value < b.value
    raise TypeError(f"not a proposition: {p!r}")


def satisfies_all(rho: Mapping[str, Value], props) -> bool:
    return all(satisfies(rho, p) for p in props)


# ---------------------------------------------------------------------------
# Value typing


def value_type(v: Value, t: Type, rho: Mapping[str, Value] | None = None) -> bool:
    """Decide ``⊢ v : t``; free variables of ``t`` are read from ``rho``."""
    rho = {} if rho is None else rho
    if isinstance(t, Top):
        return True
    if isinstance(t, IntT):
        return isinstance(v, IntV)
    if isinstance(t, TrueT):
        return v == BoolV(True)
    if isinstance(t, FalseT):
        return v == FALSE_V
    if isinstance(t, VecT):
        return isinstance(v, VecV) and all(isinstance(i, IntV) for i in v.items)
    if isinstance(t, PairT):
        return isinstance(v, PairV) and value_type(v.left, t.left, rho) and value_type(v.right, t.right, rho)
    if isinstance(t, Union):
        return any(value_type(v, m, rho) for m in t.members)
    if isinstance(t, Refine):
        if not value_type(v, t.base, rho):
            return False
        inner = dict(rho)
        inner[t.var] = v
        return satisfies(inner, t.prop)
    if isinstance(t, Fun):
        return _function_value_type(v, t, rho)
    raise TypeError(f"not a type: {t!r}")


def value_not_in(v: Value, t: Type, rho: Mapping[str, Value] | None = None) -> bool:
    """Model of ``o ∉ t``: exact complement on first-order values, conservative on functions."""
    rho = {} if rho is None else rho
    if isinstance(t, Top):
        return False
    if isinstance(t, Fun):
        return not isinstance(v, (ClosureV, PrimV))
    if isinstance(t, PairT):
        return not isinstance(v, PairV) or value_not_in(v.left, t.left, rho) or value_not_in(v.right, t.right, rho)
    if isinstance(t, Union):
        return all(value_not_in(v, m, rho) for m in t.members)
    if isinstance(t, Refine):
        if value_not_in(v, t.base, rho):
            return True
        inner = dict(rho)
        inner[t.var] = v
        return not satisfies(inner, t.prop)
    return not value_type(v, t, rho)


def value_obj(v: Value) -> Obj:
    """The symbolic object that names ``v`` directly, if there is one."""
    if isinstance(v, IntV):
        return IntLit(v.value)
    if isinstance(v, PairV):
        return PairObj(value_obj(v.left), value_obj(v.right))
    return NULL


def type_of_value(v: Value) -> Type:
    if isinstance(v, IntV):
        return INT
    if isinstance(v, BoolV):
        return TRUE if v.value else FALSE
    if isinstance(v, VecV):
        return VEC
    if isinstance(v, PairV):
        return PairT(type_of_value(v.left), type_of_value(v.right))
    if isinstance(v, PrimV):
        return delta_type(v.op)
    if isinstance(v, ClosureV):
        return closure_type(v)
    raise TypeError(v)


def value_facts(o: Obj, v: Value) -> Prop:
    """Strongest proposition we can state about ``o`` denoting ``v``."""
    facts = [IsType(o, type_of_value(v))]
    direct = value_obj(v)
    if not isinstance(direct, NullObj):
        facts.append(Alias(o, direct))
    elif isinstance(v, PairV):
        facts += [value_facts(Field("fst", o), v.left), value_facts(Field("snd", o), v.right)]
    if isinstance(v, VecV):
        n = IntLit(len(v.items))
        facts += [Leq(Field("len", o), n), Leq(n, Field("len", o))]
    return and_(*facts)


def env_of_values(rho: Mapping[str, Value]):
    from rtr.prover import HybridEnv

    env = HybridEnv.empty()
    for name in sorted(rho):
        env = env.assume(value_facts(OVar(name), rho[name]))
    return env


def _closure_parts(c: ClosureV, avoid: set[str]) -> tuple[dict[str, Value], Lam]:
    from rtr.checker import _rename

    captured = dict(c.env)
    lam = Lam(c.var, c.type, c.body)
    for name in sorted(captured):
        if name in avoid:
            new = fresh(name)
            lam = _rename(lam, name, new)
            captured[new] = captured.pop(name)
    return captured, lam


def closure_type(c: ClosureV) -> Type:
    """A closed type for a closure: its synthesized type with captured names replaced by value objects."""
    from rtr.checker import check

    with fresh_scope():
        captured, lam = _closure_parts(c, set())
        r = check(env_of_values(captured), lam, scope=captured)
        while isinstance(r, Exists):
            r = r.body
        t = r.type
        for name, v in captured.items():
            t = subst(t, name, value_obj(v))
        return t


def _function_value_type(v: Value, t: Fun, rho: Mapping[str, Value]) -> bool:
    from rtr.checker import CheckError, check_against
    from rtr.subtype import subtype

    outer = {x: rho[x] for x in free_vars(t) if x in rho}
    if isinstance(v, PrimV):
        return subtype(env_of_values(outer), delta_type(v.op), t)
    if not isinstance(v, ClosureV):
        return False
    with fresh_scope():
        captured, lam = _closure_parts(v, set(outer))
        env = env_of_values({**outer, **captured})
        try:
            check_against(env, lam, t, scope=set(outer) | set(captured))
        except CheckError:
            return False
        return True
