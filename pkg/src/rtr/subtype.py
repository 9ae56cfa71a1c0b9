"""Subtyping on types, objects and type-results, relative to an environment."""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from typing import Callable

from rtr.core import (
    Exists,
    Fun,
    NullObj,
    Obj,
    OVar,
    PairObj,
    PairT,
    Refine,
    Result,
    Top,
    Type,
    TypeResult,
    Union,
    IsType,
    Alias,
    as_result,
    free_vars,
    fresh,
    is_bottom,
    subst,
)
from rtr.prover import HybridEnv, proves

_MAX_DEPTH = 48
_in_progress: contextvars.ContextVar[frozenset] = contextvars.ContextVar("rtr_subtype_active", default=frozenset())
_depth: contextvars.ContextVar[int] = contextvars.ContextVar("rtr_subtype_depth", default=0)


@contextmanager
def _guard(key):
    active = _in_progress.get()
    t1 = _in_progress.set(active | {key})
    t2 = _depth.set(_depth.get() + 1)
    try:
        yield
    finally:
        _depth.reset(t2)
        _in_progress.reset(t1)


def subtype(env: HybridEnv, t: Type, s: Type) -> bool:
    """Decide ``Γ ⊢ t <: s`` (sound, incomplete)."""
    if t == s or is_bottom(t) or isinstance(s, Top) or env.absurd:
        return True
    key = (t, s)
    if key in _in_progress.get() or _depth.get() > _MAX_DEPTH:
        return False
    with _guard(key):
        return _subtype(env, t, s)


def _subtype(env: HybridEnv, t: Type, s: Type) -> bool:
    if isinstance(t, Refine):
        if subtype(env, t.base, s):
            return True
        z = fresh(t.var)
        inner = env.assume(IsType(OVar(z), t))
        if proves(inner, IsType(OVar(z), s)):
            return True
    if isinstance(t, Union):
        return all(subtype(env, m, s) for m in t.members)
    if isinstance(s, Union) and any(subtype(env, t, m) for m in s.members):
        return True
    if isinstance(s, Refine):
        z = fresh(s.var)
        inner = env.assume(IsType(OVar(z), t))
        return subtype(env, t, s.base) and proves(inner, subst(s.prop, s.var, OVar(z)))
    if isinstance(t, PairT) and isinstance(s, PairT):
        return subtype(env, t.left, s.left) and subtype(env, t.right, s.right)
    if isinstance(t, Fun) and isinstance(s, Fun):
        if not subtype(env, s.dom, t.dom):
            return False
        z = fresh(s.var)
        inner = env.assume(IsType(OVar(z), s.dom))
        return subresult(inner, subst(t.rng, t.var, OVar(z)), subst(s.rng, s.var, OVar(z)))
    return False


def subobj(env: HybridEnv, o: Obj, p: Obj) -> bool:
    """``o`` is at least as precise as ``p``; the null object is the top."""
    if isinstance(p, NullObj):
        return True
    if isinstance(o, NullObj):
        return False
    if env.canonical(o) == env.canonical(p):
        return True
    if isinstance(o, PairObj) and isinstance(p, PairObj):
        return subobj(env, o.left, p.left) and subobj(env, o.right, p.right)
    return proves(env, Alias(o, p))


def match_existentials(env: HybridEnv, candidates: list[tuple[str, Type]], r: Result,
                       q: TypeResult, accept: Callable[[HybridEnv, Result, Result], bool],
                       budget: int = 64) -> bool:
    """Decide ``r <: q`` where ``q`` may bind existentials.

    Each binder of ``q`` is instantiated with a name from ``candidates`` (binders the
    left side already introduced) whose type fits, or with the object of ``r``.
    """
    tries = [budget]

    def go(q: TypeResult) -> bool:
        if not isinstance(q, Exists):
            tries[0] -= 1
            return tries[0] >= 0 and accept(env, r, q)
        if q.var not in free_vars(q.body):
            return go(q.body)
        options: list[Obj] = [OVar(n) for n, t in candidates if subtype(env, t, q.type)]
        if not isinstance(r.obj, NullObj) and r.obj not in options:
            options.append(r.obj)
        for w in options:
            if tries[0] <= 0:
                return False
            if proves(env, IsType(w, q.type)) and go(subst(q.body, q.var, w)):
                return True
        return False

    return go(q)


def _plain_accept(env: HybridEnv, r: Result, q: Result) -> bool:
    if not subtype(env, r.type, q.type):
        return False
    if not proves(env.assume(r.then), q.then):
        return False
    if not proves(env.assume(r.else_), q.else_):
        return False
    return subobj(env, r.obj, q.obj)


def subresult(env: HybridEnv, r: TypeResult, q: TypeResult) -> bool:
    r, q = as_result(r), as_result(q)
    introduced: list[tuple[str, Type]] = []
    while isinstance(r, Exists):
        z = fresh(r.var)
        env = env.assume(IsType(OVar(z), r.type))
        introduced.append((z, r.type))
        r = subst(r.body, r.var, OVar(z))
    return match_existentials(env, introduced, r, q, _plain_accept)
