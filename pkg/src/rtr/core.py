"""Abstract syntax shared by every part of the checker.

Symbolic objects are kept in a canonical form: field projections of object
pairs are reduced, and integer arithmetic is flattened into a sorted linear
combination, so that object equality is plain structural equality.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Union as _U


# ---------------------------------------------------------------------------
# Fresh names

_supply: contextvars.ContextVar[itertools.count | None] = contextvars.ContextVar(
    "rtr_fresh_supply", default=None
)
_fallback = itertools.count()


@contextlib.contextmanager
def fresh_scope() -> Iterator[None]:
    """Number fresh names from zero inside the block (unless already nested)."""
    if _supply.get() is not None:
        yield
        return
    token = _supply.set(itertools.count())
    try:
        yield
    finally:
        _supply.reset(token)


def fresh(base: str) -> str:
    # '#' never survives the surface parser, so these cannot collide with user names.
    counter = _supply.get() or _fallback
    return f"{base.split('#')[0]}#{next(counter)}"


# ---------------------------------------------------------------------------
# Symbolic objects


class Obj:
    __slots__ = ()

    def __str__(self) -> str:
        from rtr.pretty import show

        return show(self)


@dataclass(frozen=True, repr=False)
class NullObj(Obj):
    def __repr__(self) -> str:
        return "NULL"


NULL = NullObj()


@dataclass(frozen=True)
class OVar(Obj):
    name: str


FIELDS = ("fst", "snd", "len")


@dataclass(frozen=True)
class Field(Obj):
    field: str
    obj: Obj


@dataclass(frozen=True)
class PairObj(Obj):
    left: Obj
    right: Obj


@dataclass(frozen=True)
class IntLit(Obj):
    value: int


@dataclass(frozen=True)
class Scale(Obj):
    """Raw ``n * o``; never present after normalization."""

    coeff: int
    obj: Obj


@dataclass(frozen=True)
class Sum(Obj):
    """Raw ``o + o``; never present after normalization."""

    left: Obj
    right: Obj


@dataclass(frozen=True)
class Lin(Obj):
    """Canonical linear combination ``sum(c * base) + const``."""

    terms: tuple[tuple[Obj, int], ...]
    const: int = 0


def obj_key(o: Obj) -> tuple:
    """Total order on normalized objects (used for sorting and representatives)."""
    if isinstance(o, IntLit):
        return (0, o.value)
    if isinstance(o, PairObj):
        return (1, obj_key(o.left), obj_key(o.right))
    if isinstance(o, OVar):
        return (2, o.name)
    if isinstance(o, Field):
        return (3, o.field, obj_key(o.obj))
    if isinstance(o, Lin):
        return (4, tuple((obj_key(b), c) for b, c in o.terms), o.const)
    if isinstance(o, Scale):
        return (5, o.coeff, obj_key(o.obj))
    if isinstance(o, Sum):
        return (6, obj_key(o.left), obj_key(o.right))
    return (7,)


def _linear(o: Obj) -> tuple[dict[Obj, int], int] | None:
    if isinstance(o, IntLit):
        return {}, o.value
    if isinstance(o, Scale):
        inner = _linear(o.obj)
        if inner is None:
            return None
        coeffs, const = inner
        return {b: o.coeff * c for b, c in coeffs.items()}, o.coeff * const
    if isinstance(o, Sum):
        a, b = _linear(o.left), _linear(o.right)
        if a is None or b is None:
            return None
        coeffs = dict(a[0])
        for base, c in b[0].items():
            coeffs[base] = coeffs.get(base, 0) + c
        return coeffs, a[1] + b[1]
    if isinstance(o, Lin):
        total: dict[Obj, int] = {}
        const = o.const
        for base, c in o.terms:
            part = _linear(Scale(c, base))
            if part is None:
                return None
            for b, k in part[0].items():
                total[b] = total.get(b, 0) + k
            const += part[1]
        return total, const
    n = normalize_obj(o)
    if n is NULL:
        return None
    if isinstance(n, (IntLit, Lin)):
        return _linear(n)
    return {n: 1}, 0


def _build_linear(coeffs: dict[Obj, int], const: int) -> Obj:
    terms = sorted(((b, c) for b, c in coeffs.items() if c != 0), key=lambda t: obj_key(t[0]))
    if not terms:
        return IntLit(const)
    if len(terms) == 1 and terms[0][1] == 1 and const == 0:
        return terms[0][0]
    return Lin(tuple(terms), const)


def normalize_obj(o: Obj) -> Obj:
    if isinstance(o, (NullObj, OVar, IntLit)):
        return o
    if isinstance(o, Field):
        inner = normalize_obj(o.obj)
        if inner is NULL:
            return NULL
        if isinstance(inner, PairObj) and o.field == "fst":
            return inner.left
        if isinstance(inner, PairObj) and o.field == "snd":
            return inner.right
        return Field(o.field, inner)
    if isinstance(o, PairObj):
        a, b = normalize_obj(o.left), normalize_obj(o.right)
        if a is NULL or b is NULL:
            return NULL
        return PairObj(a, b)
    lin = _linear(o)
    if lin is None:
        return NULL
    return _build_linear(*lin)


def scale(k: int, o: Obj) -> Obj:
    return normalize_obj(Scale(k, o))


def add(*objs: Obj) -> Obj:
    acc: Obj = IntLit(0)
    for o in objs:
        acc = Sum(acc, o)
    return normalize_obj(acc)


def linear_parts(o: Obj) -> tuple[dict[Obj, int], int] | None:
    """Decompose a normalized integer-valued object into (coefficients, constant)."""
    if isinstance(o, PairObj) or o is NULL:
        return None
    return _linear(o)


def split_path(o: Obj) -> tuple[Obj, list[str]]:
    """``(snd (fst x))`` -> ``(x, ["fst", "snd"])``: innermost field first."""
    path: list[str] = []
    while isinstance(o, Field):
        path.append(o.field)
        o = o.obj
    path.reverse()
    return o, path


# ---------------------------------------------------------------------------
# Types


class Type:
    __slots__ = ()

    def __str__(self) -> str:
        from rtr.pretty import show

        return show(self)


@dataclass(frozen=True)
class Top(Type):
    pass


@dataclass(frozen=True)
class IntT(Type):
    pass


@dataclass(frozen=True)
class TrueT(Type):
    pass


@dataclass(frozen=True)
class FalseT(Type):
    pass


@dataclass(frozen=True)
class VecT(Type):
    """Homogeneous vector of integers."""


@dataclass(frozen=True)
class PairT(Type):
    left: Type
    right: Type


def _member_key(t: Type) -> str:
    return repr(t)


@dataclass(frozen=True)
class Union(Type):
    members: tuple[Type, ...] = ()

    def __post_init__(self) -> None:
        flat: list[Type] = []
        for m in self.members:
            if isinstance(m, Union):
                flat.extend(m.members)
            else:
                flat.append(m)
        uniq = {_member_key(m): m for m in flat}
        object.__setattr__(self, "members", tuple(uniq[k] for k in sorted(uniq)))


@dataclass(frozen=True)
class Fun(Type):
    var: str
    dom: Type
    rng: "TypeResult"


@dataclass(frozen=True)
class Refine(Type):
    var: str
    base: Type
    prop: "Prop"


TOP = Top()
INT = IntT()
TRUE = TrueT()
FALSE = FalseT()
VEC = VecT()
BOOL = Union((TRUE, FALSE))
BOTTOM = Union(())


def union(*types: Type) -> Type:
    u = Union(tuple(types))
    if any(isinstance(m, Top) for m in u.members):
        return TOP
    if len(u.members) == 1:
        return u.members[0]
    return u


def is_bottom(t: Type) -> bool:
    return isinstance(t, Union) and not t.members


# ---------------------------------------------------------------------------
# Propositions


class Prop:
    __slots__ = ()

    def __str__(self) -> str:
        from rtr.pretty import show

        return show(self)


@dataclass(frozen=True, repr=False)
class Trivial(Prop):
    def __repr__(self) -> str:
        return "TT"


@dataclass(frozen=True, repr=False)
class Absurd(Prop):
    def __repr__(self) -> str:
        return "FF"


TT = Trivial()
FF = Absurd()


class _ObjAtom(Prop):
    """Atoms mentioning a null object are meaningless and collapse to TT."""

    __slots__ = ()
    _obj_fields: tuple[str, ...] = ()

    def __new__(cls, *args, **kwargs):
        names = cls._obj_fields
        given = dict(zip(names, args))
        given.update((k, v) for k, v in kwargs.items() if k in names)
        if any(normalize_obj(o) is NULL for o in given.values()):
            return TT
        return object.__new__(cls)

    def __post_init__(self) -> None:
        for name in self._obj_fields:
            object.__setattr__(self, name, normalize_obj(getattr(self, name)))


@dataclass(frozen=True)
class IsType(_ObjAtom):
    obj: Obj
    type: Type
    _obj_fields = ("obj",)


@dataclass(frozen=True)
class NotType(_ObjAtom):
    obj: Obj
    type: Type
    _obj_fields = ("obj",)


@dataclass(frozen=True)
class Alias(_ObjAtom):
    left: Obj
    right: Obj
    _obj_fields = ("left", "right")


@dataclass(frozen=True)
class Leq(_ObjAtom):
    left: Obj
    right: Obj
    _obj_fields = ("left", "right")


@dataclass(frozen=True)
class Lt(_ObjAtom):
    left: Obj
    right: Obj
    _obj_fields = ("left", "right")


@dataclass(frozen=True)
class And(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Or(Prop):
    left: Prop
    right: Prop


LiaAtom = _U[Leq, Lt]


def and_(*props: Prop) -> Prop:
    props = tuple(p for p in props if p != TT)
    if any(p == FF for p in props):
        return FF
    if not props:
        return TT
    acc = props[-1]
    for p in reversed(props[:-1]):
        acc = And(p, acc)
    return acc


def or_(*props: Prop) -> Prop:
    props = tuple(p for p in props if p != FF)
    if any(p == TT for p in props):
        return TT
    if not props:
        return FF
    acc = props[-1]
    for p in reversed(props[:-1]):
        acc = Or(p, acc)
    return acc


def conjuncts(p: Prop) -> list[Prop]:
    if isinstance(p, And):
        return conjuncts(p.left) + conjuncts(p.right)
    return [] if p == TT else [p]


def disjuncts(p: Prop) -> list[Prop]:
    if isinstance(p, Or):
        return disjuncts(p.left) + disjuncts(p.right)
    return [] if p == FF else [p]


def negate(p: Prop) -> Prop | None:
    """Classical negation where the proposition language can express it."""
    if p == TT:
        return FF
    if p == FF:
        return TT
    if isinstance(p, IsType):
        return NotType(p.obj, p.type)
    if isinstance(p, NotType):
        return IsType(p.obj, p.type)
    if isinstance(p, Leq):
        return Lt(p.right, p.left)
    if isinstance(p, Lt):
        return Leq(p.right, p.left)
    if isinstance(p, (And, Or)):
        a, b = negate(p.left), negate(p.right)
        if a is None or b is None:
            return None
        return or_(a, b) if isinstance(p, And) else and_(a, b)
    return None


# ---------------------------------------------------------------------------
# Type-results


class TypeResult:
    __slots__ = ()

    def __str__(self) -> str:
        from rtr.pretty import show

        return show(self)


@dataclass(frozen=True)
class Result(TypeResult):
    type: Type
    then: Prop = TT
    else_: Prop = TT
    obj: Obj = NULL

    def __post_init__(self) -> None:
        object.__setattr__(self, "obj", normalize_obj(self.obj))


@dataclass(frozen=True)
class Exists(TypeResult):
    var: str
    type: Type
    body: TypeResult


def as_result(t: Type | TypeResult) -> TypeResult:
    return Result(t) if isinstance(t, Type) else t


# ---------------------------------------------------------------------------
# Expressions and values


class PrimOp(str, enum.Enum):
    NOT = "not"
    ADD1 = "add1"
    INT_P = "int?"
    BOOL_P = "bool?"
    PAIR_P = "pair?"
    PLUS = "plus"
    LEQ = "leq"
    LT = "lt"
    EQI = "eqi"
    LEN = "len"
    VEC_REF = "vec-ref"

    def __str__(self) -> str:
        return self.value


class Expr:
    __slots__ = ()

    def __str__(self) -> str:
        from rtr.pretty import show

        return show(self)


Span = tuple[int, int]


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var(Expr):
    name: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Int(Expr):
    value: int
    span: Span | None = _span()


@dataclass(frozen=True)
class Bool(Expr):
    value: bool
    span: Span | None = _span()


@dataclass(frozen=True)
class Prim(Expr):
    op: "PrimOp"
    span: Span | None = _span()


@dataclass(frozen=True)
class Lam(Expr):
    var: str
    type: Type
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class If(Expr):
    test: Expr
    then: Expr
    else_: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Let(Expr):
    var: str
    bound: Expr
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Cons(Expr):
    left: Expr
    right: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Fst(Expr):
    expr: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class Snd(Expr):
    expr: Expr
    span: Span | None = _span()


@dataclass(frozen=True)
class VecLit(Expr):
    elems: tuple[Expr, ...]
    span: Span | None = _span()


class Value:
    __slots__ = ()

    def __str__(self) -> str:
        from rtr.pretty import show

        return show(self)


@dataclass(frozen=True)
class IntV(Value):
    value: int


@dataclass(frozen=True)
class BoolV(Value):
    value: bool


@dataclass(frozen=True)
class PrimV(Value):
    op: "PrimOp"


@dataclass(frozen=True)
class PairV(Value):
    left: Value
    right: Value


@dataclass(frozen=True)
class ClosureV(Value):
    env: tuple[tuple[str, Value], ...]
    var: str
    type: Type
    body: Expr


@dataclass(frozen=True)
class VecV(Value):
    items: tuple[IntV, ...]


TRUE_V = BoolV(True)
FALSE_V = BoolV(False)

Env = list  # declarative environment: a list of Prop
RuntimeEnv = dict  # name -> Value


# ---------------------------------------------------------------------------
# Free variables


def free_vars(t) -> set[str]:
    if isinstance(t, OVar):
        return {t.name}
    if isinstance(t, Field):
        return free_vars(t.obj)
    if isinstance(t, (PairObj, Sum)):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, Scale):
        return free_vars(t.obj)
    if isinstance(t, Lin):
        out: set[str] = set()
        for b, _ in t.terms:
            out |= free_vars(b)
        return out
    if isinstance(t, PairT):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, Union):
        out = set()
        for m in t.members:
            out |= free_vars(m)
        return out
    if isinstance(t, Fun):
        return free_vars(t.dom) | (free_vars(t.rng) - {t.var})
    if isinstance(t, Refine):
        return free_vars(t.base) | (free_vars(t.prop) - {t.var})
    if isinstance(t, (IsType, NotType)):
        return free_vars(t.obj) | free_vars(t.type)
    if isinstance(t, (Alias, Leq, Lt, And, Or)):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, Result):
        return free_vars(t.type) | free_vars(t.then) | free_vars(t.else_) | free_vars(t.obj)
    if isinstance(t, Exists):
        return free_vars(t.type) | (free_vars(t.body) - {t.var})
    return set()


def expr_free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Lam):
        return expr_free_vars(e.body) - {e.var}
    if isinstance(e, Let):
        return expr_free_vars(e.bound) | (expr_free_vars(e.body) - {e.var})
    if isinstance(e, App):
        return expr_free_vars(e.fn) | expr_free_vars(e.arg)
    if isinstance(e, If):
        return expr_free_vars(e.test) | expr_free_vars(e.then) | expr_free_vars(e.else_)
    if isinstance(e, Cons):
        return expr_free_vars(e.left) | expr_free_vars(e.right)
    if isinstance(e, (Fst, Snd)):
        return expr_free_vars(e.expr)
    if isinstance(e, VecLit):
        out: set[str] = set()
        for x in e.elems:
            out |= expr_free_vars(x)
        return out
    return set()


# ---------------------------------------------------------------------------
# Substitution


def _subst_obj(o: Obj, x: str, r: Obj) -> Obj:
    if isinstance(o, OVar):
        return r if o.name == x else o
    if isinstance(o, Field):
        return Field(o.field, _subst_obj(o.obj, x, r))
    if isinstance(o, PairObj):
        return PairObj(_subst_obj(o.left, x, r), _subst_obj(o.right, x, r))
    if isinstance(o, Scale):
        return Scale(o.coeff, _subst_obj(o.obj, x, r))
    if isinstance(o, Sum):
        return Sum(_subst_obj(o.left, x, r), _subst_obj(o.right, x, r))
    if isinstance(o, Lin):
        return Lin(tuple((_subst_obj(b, x, r), c) for b, c in o.terms), o.const)
    return o


def _binder(var: str, body, x: str, r: Obj):
    """Rename ``var`` in ``body`` if substituting ``r`` for ``x`` would capture it."""
    if var in free_vars(r) and x in free_vars(body):
        new = fresh(var)
        return new, subst(body, var, OVar(new))
    return var, body


def subst(t, x: str, o: Obj):
    """Capture-avoiding ``t[x := o]`` for objects, types, props and type-results."""
    if isinstance(t, Obj):
        return normalize_obj(_subst_obj(t, x, o))
    if isinstance(t, (Top, IntT, TrueT, FalseT, VecT)):
        return t
    if isinstance(t, PairT):
        return PairT(subst(t.left, x, o), subst(t.right, x, o))
    if isinstance(t, Union):
        return union(*(subst(m, x, o) for m in t.members))
    if isinstance(t, Fun):
        dom = subst(t.dom, x, o)
        if t.var == x:
            return Fun(t.var, dom, t.rng)
        var, rng = _binder(t.var, t.rng, x, o)
        return Fun(var, dom, subst(rng, x, o))
    if isinstance(t, Refine):
        base = subst(t.base, x, o)
        if t.var == x:
            return Refine(t.var, base, t.prop)
        var, prop = _binder(t.var, t.prop, x, o)
        return Refine(var, base, subst(prop, x, o))
    if isinstance(t, (Trivial, Absurd)):
        return t
    if isinstance(t, IsType):
        return IsType(subst(t.obj, x, o), subst(t.type, x, o))
    if isinstance(t, NotType):
        return NotType(subst(t.obj, x, o), subst(t.type, x, o))
    if isinstance(t, (Alias, Leq, Lt)):
        return type(t)(subst(t.left, x, o), subst(t.right, x, o))
    if isinstance(t, And):
        return and_(subst(t.left, x, o), subst(t.right, x, o))
    if isinstance(t, Or):
        return or_(subst(t.left, x, o), subst(t.right, x, o))
    if isinstance(t, Result):
        return Result(subst(t.type, x, o), subst(t.then, x, o), subst(t.else_, x, o), subst(t.obj, x, o))
    if isinstance(t, Exists):
        ty = subst(t.type, x, o)
        if t.var == x:
            return Exists(t.var, ty, t.body)
        var, body = _binder(t.var, t.body, x, o)
        return Exists(var, ty, subst(body, x, o))
    raise TypeError(f"cannot substitute into {t!r}")


def lift_subst(r: TypeResult, x: str, o: Obj, ty: Type) -> TypeResult:
    """Substitute ``o`` for ``x`` in ``r``, or bind ``x`` existentially if ``o`` is null."""
    if normalize_obj(o) is NULL:
        return Exists(x, ty, r)
    return subst(r, x, o)


def peel(r: TypeResult) -> tuple[list[tuple[str, Type]], Result]:
    """Strip existential binders, renaming each to a fresh name."""
    binders: list[tuple[str, Type]] = []
    while isinstance(r, Exists):
        name = fresh(r.var)
        binders.append((name, r.type))
        r = subst(r.body, r.var, OVar(name))
    return binders, r


def wrap(binders: list[tuple[str, Type]], r: TypeResult) -> TypeResult:
    for name, ty in reversed(binders):
        r = Exists(name, ty, r)
    return r


def existential_depth(r: TypeResult) -> int:
    n = 0
    while isinstance(r, Exists):
        n += 1
        r = r.body
    return n


def erase_existentials(r: TypeResult) -> Result:
    """Weaken ``∃x:τ.R`` to ``R[x := ∅]``, dropping every fact about ``x``."""
    while isinstance(r, Exists):
        r = subst(r.body, r.var, NULL)
    return r

