"""Algorithmic typing: synthesize a type-result for an expression.

Existentials produced by subterms (operands without objects, let-bound
intermediates, vector literals) are peeled into fresh names, assumed in the
environment for the rest of the derivation, and re-wrapped around the final
result.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from rtr.core import (
    BOTTOM,
    FALSE,
    FF,
    INT,
    NULL,
    TRUE,
    TT,
    VEC,
    App,
    Bool,
    Cons,
    Exists,
    Expr,
    Field,
    Fst,
    Fun,
    If,
    Int,
    IntLit,
    IsType,
    Lam,
    Leq,
    Let,
    NotType,
    NullObj,
    OVar,
    PairObj,
    PairT,
    Prim,
    Prop,
    Refine,
    Result,
    Snd,
    Span,
    Type,
    TypeResult,
    Var,
    VecLit,
    Alias,
    and_,
    as_result,
    free_vars,
    fresh,
    is_bottom,
    lift_subst,
    or_,
    peel,
    subst,
    union,
    wrap,
)
from rtr.pretty import show
from rtr.prims import delta_type
from rtr.prover import PAIR_TOP, HybridEnv, project, proves
from rtr.subtype import match_existentials, subobj, subtype

logger = logging.getLogger(__name__)

Binders = list[tuple[str, Type]]


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    span: Span | None
    message: str
    expected: str | None = None
    actual: str | None = None
    query: str | None = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "span": list(self.span) if self.span else None,
            "expected": self.expected,
            "actual": self.actual,
            "query": self.query,
            "message": self.message,
        }


class CheckError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _fail(kind: str, e: Expr | None, message: str, **extra) -> CheckError:
    return CheckError(Diagnostic(kind, getattr(e, "span", None), message, **extra))


# ---------------------------------------------------------------------------
# Environment helpers


def _scope_of(env: HybridEnv) -> frozenset[str]:
    names: set[str] = set()
    for f in env.facts:
        names |= free_vars(f)
    return frozenset(names)


def _bind(env: HybridEnv, binders: Binders) -> HybridEnv:
    for name, ty in binders:
        env = env.assume(IsType(OVar(name), ty))
    return env


def _trace(rule: str, e: Expr, r: TypeResult | None = None) -> None:
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("%s %s%s", rule, show(e), f" : {show(r)}" if r is not None else "")


def _rename(e: Expr, old: str, new: str) -> Expr:
    """Rename free occurrences of ``old`` in ``e``."""
    if isinstance(e, Var):
        return Var(new, e.span) if e.name == old else e
    if isinstance(e, Lam):
        if e.var == old:
            return e
        return Lam(e.var, e.type, _rename(e.body, old, new), e.span)
    if isinstance(e, Let):
        body = e.body if e.var == old else _rename(e.body, old, new)
        return Let(e.var, _rename(e.bound, old, new), body, e.span)
    if isinstance(e, App):
        return App(_rename(e.fn, old, new), _rename(e.arg, old, new), e.span)
    if isinstance(e, If):
        return If(_rename(e.test, old, new), _rename(e.then, old, new), _rename(e.else_, old, new), e.span)
    if isinstance(e, Cons):
        return Cons(_rename(e.left, old, new), _rename(e.right, old, new), e.span)
    if isinstance(e, Fst):
        return Fst(_rename(e.expr, old, new), e.span)
    if isinstance(e, Snd):
        return Snd(_rename(e.expr, old, new), e.span)
    if isinstance(e, VecLit):
        return VecLit(tuple(_rename(x, old, new) for x in e.elems), e.span)
    return e


def _unshadow(var: str, body: Expr, scope: frozenset[str]) -> tuple[str, Expr]:
    if var not in scope:
        return var, body
    new = fresh(var)
    return new, _rename(body, var, new)


def _fun_view(t: Type) -> Fun | None:
    while isinstance(t, Refine):
        t = t.base
    return t if isinstance(t, Fun) else None


# ---------------------------------------------------------------------------
# Acceptance: inlined subsumption that can use the result's object


def _accepts_type(env: HybridEnv, r: Result, expected: Type) -> str | None:
    """None on success, else the failed query rendered for diagnostics."""
    if not isinstance(r.obj, NullObj):
        inner = env.assume(IsType(r.obj, r.type))
        goal = IsType(r.obj, expected)
        if proves(inner, goal):
            return None
    if subtype(env, r.type, expected):
        return None
    if not isinstance(r.obj, NullObj):
        return f"{show(IsType(r.obj, r.type))} |- {show(IsType(r.obj, expected))}"
    return f"{show(r.type)} <: {show(expected)}"


def _accepts(env: HybridEnv, r: Result, q: TypeResult, introduced: Binders = ()) -> str | None:
    q = as_result(q)
    if isinstance(q, Exists):
        ok = match_existentials(env, list(introduced), r, q, lambda e, a, b: _accepts(e, a, b) is None)
        return None if ok else f"{show(r)} <: {show(q)}"
    failed = _accepts_type(env, r, q.type)
    if failed:
        return failed
    base = env.assume(IsType(r.obj, r.type)) if not isinstance(r.obj, NullObj) else env
    if not proves(base.assume(r.then), q.then):
        return f"{show(r.then)} |- {show(q.then)}"
    if not proves(base.assume(r.else_), q.else_):
        return f"{show(r.else_)} |- {show(q.else_)}"
    if not subobj(env, r.obj, q.obj):
        return f"object {show(r.obj)} <: {show(q.obj)}"
    return None


# ---------------------------------------------------------------------------
# Synthesis


def check(env: HybridEnv, e: Expr, scope: Iterable[str] | None = None) -> TypeResult:
    """Synthesize the type-result of ``e``; raises :class:`CheckError`."""
    sc = _scope_of(env) if scope is None else frozenset(scope)
    binders, r = _synth(env, e, sc)
    return wrap(binders, r)


def _synth(env: HybridEnv, e: Expr, scope: frozenset[str]) -> tuple[Binders, Result]:
    if isinstance(e, Int):
        return [], Result(INT, TT, FF, IntLit(e.value))
    if isinstance(e, Bool):
        return [], Result(TRUE, TT, FF) if e.value else Result(FALSE, FF, TT)
    if isinstance(e, Prim):
        return [], Result(delta_type(e.op), TT, FF)
    if isinstance(e, Var):
        if e.name not in scope:
            raise _fail("unbound-variable", e, f"unbound variable {e.name}")
        x = OVar(e.name)
        r = Result(env.type_of(x), NotType(x, FALSE), IsType(x, FALSE), x)
        _trace("T-Var", e, r)
        return [], r
    if isinstance(e, Lam):
        var, body = _unshadow(e.var, e.body, scope)
        inner = env.assume(IsType(OVar(var), e.type))
        b, r = _synth(inner, body, scope | {var})
        out = Result(Fun(var, e.type, wrap(b, r)), TT, FF)
        _trace("T-Abs", e, out)
        return [], out
    if isinstance(e, App):
        return _synth_app(env, e, scope)
    if isinstance(e, If):
        return _synth_if(env, e, scope, None)
    if isinstance(e, Let):
        return _synth_let(env, e, scope, None)
    if isinstance(e, Cons):
        b1, r1 = _synth(env, e.left, scope)
        env1 = _bind(env, b1)
        b2, r2 = _synth(env1, e.right, scope | {n for n, _ in b1})
        out = Result(PairT(r1.type, r2.type), TT, FF, PairObj(r1.obj, r2.obj))
        _trace("T-Cons", e, out)
        return b1 + b2, out
    if isinstance(e, (Fst, Snd)):
        return _synth_proj(env, e, scope)
    if isinstance(e, VecLit):
        binders: Binders = []
        cur = env
        for x in e.elems:
            b, r = _synth(cur, x, scope | {n for n, _ in binders})
            binders += b
            cur = _bind(cur, b)
            failed = _accepts_type(cur, r, INT)
            if failed:
                raise _fail("type-mismatch", x, "vector element is not an integer",
                            expected=show(INT), actual=show(r.type), query=failed)
        v = fresh("v")
        w = OVar("w")
        n = IntLit(len(e.elems))
        length = Field("len", w)
        ty = Refine("w", VEC, and_(Leq(length, n), Leq(n, length)))
        out = Result(VEC, TT, FF, OVar(v))
        _trace("T-Vec", e, out)
        return binders + [(v, ty)], out
    raise TypeError(f"not an expression: {e!r}")


def _synth_app(env: HybridEnv, e: App, scope: frozenset[str]) -> tuple[Binders, Result]:
    bf, rf = _synth(env, e.fn, scope)
    env1 = _bind(env, bf)
    scope1 = scope | {n for n, _ in bf}
    ba, ra = _synth(env1, e.arg, scope1)
    env2 = _bind(env1, ba)
    binders = bf + ba
    if is_bottom(rf.type) or is_bottom(ra.type):
        return binders, Result(BOTTOM, FF, FF)
    fun = _fun_view(rf.type)
    if fun is None:
        raise _fail("not-a-function", e.fn, f"cannot apply a value of type {show(rf.type)}",
                    actual=show(rf.type))
    failed = _accepts_type(env2, ra, fun.dom)
    if failed:
        raise _fail("type-mismatch", e.arg, "argument does not match the function's domain",
                    expected=show(fun.dom), actual=show(ra.type), query=failed)
    lifted = lift_subst(fun.rng, fun.var, ra.obj, ra.type)
    more, out = peel(lifted)
    _trace("T-App", e, out)
    return binders + more, out


def _synth_proj(env: HybridEnv, e: Fst | Snd, scope: frozenset[str]) -> tuple[Binders, Result]:
    fld = "fst" if isinstance(e, Fst) else "snd"
    b, r = _synth(env, e.expr, scope)
    env1 = _bind(env, b)
    if is_bottom(r.type):
        return b, Result(BOTTOM, FF, FF)
    failed = _accepts_type(env1, r, PAIR_TOP)
    if failed:
        raise _fail("not-a-pair", e.expr, f"cannot project {fld} from a value of type {show(r.type)}",
                    expected=show(PAIR_TOP), actual=show(r.type), query=failed)
    o = Field(fld, r.obj)
    if isinstance(r.obj, NullObj):
        ty = project(r.type, fld)
        out = Result(ty, TT, TT)
    else:
        ty = env1.assume(IsType(r.obj, r.type)).type_of(o)
        out = Result(ty, NotType(o, FALSE), IsType(o, FALSE), o)
    _trace("T-Fst" if fld == "fst" else "T-Snd", e, out)
    return b, out


def _live(env: HybridEnv) -> bool:
    return not env.absurd


def _synth_if(env: HybridEnv, e: If, scope: frozenset[str], expected: TypeResult | None):
    bt, rt = _synth(env, e.test, scope)
    env1 = _bind(env, bt)
    scope1 = scope | {n for n, _ in bt}
    then_env, else_env = env1.assume(rt.then), env1.assume(rt.else_)
    branches: list[tuple[Prop, Result]] = []
    binders = list(bt)
    for branch_env, test_prop, branch in ((then_env, rt.then, e.then), (else_env, rt.else_, e.else_)):
        if not _live(branch_env):
            logger.debug("dead branch %s", show(branch))
            continue
        if expected is not None:
            b, r = _check_result(branch_env, branch, scope1, expected)
        else:
            b, r = _synth(branch_env, branch, scope1)
        binders += b
        branches.append((test_prop, r))
    if not branches:
        return binders, Result(BOTTOM, FF, FF)
    if len(branches) == 1:
        test_prop, r = branches[0]
        out = Result(r.type, and_(test_prop, r.then), and_(test_prop, r.else_), r.obj)
    else:
        (p1, r1), (p2, r2) = branches
        obj = r1.obj if r1.obj == r2.obj else NULL
        out = Result(
            union(r1.type, r2.type),
            or_(and_(p1, r1.then), and_(p2, r2.then)),
            or_(and_(p1, r1.else_), and_(p2, r2.else_)),
            obj,
        )
    _trace("T-If", e, out)
    return binders, out


def _synth_let(env: HybridEnv, e: Let, scope: frozenset[str], expected: TypeResult | None):
    b1, r1 = _synth(env, e.bound, scope)
    env1 = _bind(env, b1)
    scope1 = scope | {n for n, _ in b1}
    var, body = _unshadow(e.var, e.body, scope1)
    x = OVar(var)
    body_env = env1.assume(
        and_(
            IsType(x, r1.type),
            or_(and_(IsType(x, FALSE), r1.else_), and_(NotType(x, FALSE), r1.then)),
            Alias(x, r1.obj),
        )
    )
    if expected is not None:
        b2, r2 = _check_result(body_env, body, scope1 | {var}, expected)
    else:
        b2, r2 = _synth(body_env, body, scope1 | {var})
    lifted = lift_subst(wrap(b2, r2), var, r1.obj, r1.type)
    more, out = peel(lifted)
    _trace("T-Let", e, out)
    return b1 + more, out


# ---------------------------------------------------------------------------
# Checking against an expected type


def check_against(env: HybridEnv, e: Expr, expected: Type | TypeResult,
                  scope: Iterable[str] | None = None) -> TypeResult:
    """Check ``e`` against ``expected``; returns the synthesized result or raises."""
    sc = _scope_of(env) if scope is None else frozenset(scope)
    binders, r = _check_result(env, e, sc, as_result(expected))
    return wrap(binders, r)


def _check_result(env: HybridEnv, e: Expr, scope: frozenset[str], expected: TypeResult):
    if isinstance(expected, Result):
        fun = _fun_view(expected.type)
        if isinstance(e, Lam) and fun is not None and fun == expected.type:
            return [], _check_lambda(env, e, scope, fun, expected)
        if isinstance(e, If):
            return _synth_if(env, e, scope, expected)
        if isinstance(e, Let):
            return _synth_let(env, e, scope, expected)
    binders, r = _synth(env, e, scope)
    env1 = _bind(env, binders)
    failed = _accepts(env1, r, expected, binders)
    if failed:
        exp = expected.type if isinstance(expected, Result) else expected
        raise _fail("type-mismatch", e, f"expected {show(exp)} but found {show(r.type)}",
                    expected=show(exp), actual=show(r.type), query=failed)
    return binders, r


def _check_lambda(env: HybridEnv, e: Lam, scope: frozenset[str], fun: Fun, expected: Result) -> Result:
    if not subtype(env, fun.dom, e.type):
        raise _fail("type-mismatch", e, "expected domain is not a subtype of the annotation",
                    expected=show(fun.dom), actual=show(e.type),
                    query=f"{show(fun.dom)} <: {show(e.type)}")
    var, body = _unshadow(e.var, e.body, scope)
    x = OVar(var)
    inner = env.assume(IsType(x, e.type)).assume(IsType(x, fun.dom))
    rng = subst(fun.rng, fun.var, x)
    b, r = _check_result(inner, body, scope | {var}, rng)
    out = Result(Fun(var, e.type, wrap(b, r)), TT, FF)
    failed = _accepts(env, Result(expected.type, TT, FF), expected)
    if failed:
        raise _fail("type-mismatch", e, "function result does not establish the expected propositions",
                    expected=show(expected), actual=show(out), query=failed)
    # Report the expected function type: it is what the body was verified against.
    return Result(expected.type, TT, FF)


def synth_type(env: HybridEnv, e: Expr) -> Type:
    """Convenience: the type component of ``check``."""
    r = check(env, e)
    while isinstance(r, Exists):
        r = r.body
    return r.type
