"""Entailment over a hybrid environment.

A :class:`HybridEnv` splits the logical environment into a map from
(representative) objects to their known positive and negative types, a
union-find over aliased objects, a store of linear-arithmetic atoms, and a
worklist of disjunctions that are case-split lazily by :func:`proves`.

Every atom is read as also asserting that its objects denote: ``(fst p) ∈ τ``
tells us ``p`` is a pair, ``x ≤ y`` that both sides are integers.
"""

from __future__ import annotations

import contextvars
import logging
import os
from contextlib import contextmanager
from typing import Iterable

from rtr import lia
from rtr.core import (
    BOTTOM,
    FF,
    INT,
    TOP,
    TT,
    VEC,
    Alias,
    And,
    Field,
    Fun,
    IntLit,
    IsType,
    Leq,
    Lin,
    Lt,
    NotType,
    Obj,
    Or,
    OVar,
    PairObj,
    PairT,
    Prop,
    Refine,
    Type,
    Union,
    disjuncts,
    free_vars,
    is_bottom,
    linear_parts,
    negate,
    normalize_obj,
    obj_key,
    and_,
    or_,
    split_path,
    subst,
    union,
    IntT,
    TrueT,
    FalseT,
    VecT,
    Top,
)

logger = logging.getLogger(__name__)

PAIR_TOP = PairT(TOP, TOP)

# Hypothetical reasoning (refutation probes) nests assume inside proves;
# this bounds how deep that can go.
_MAX_PROBE_DEPTH = 3
_probe_depth: contextvars.ContextVar[int] = contextvars.ContextVar("rtr_probe_depth", default=0)


@contextmanager
def _probing():
    token = _probe_depth.set(_probe_depth.get() + 1)
    try:
        yield
    finally:
        _probe_depth.reset(token)


def _may_probe() -> bool:
    return _probe_depth.get() < _MAX_PROBE_DEPTH


def default_split_depth() -> int:
    try:
        return int(os.environ.get("RTR_SPLIT_DEPTH", "8"))
    except ValueError:
        return 8


# ---------------------------------------------------------------------------
# Overlap, restrict, remove, update


def overlap(t: Type, s: Type) -> bool:
    """Conservative syntactic test for a possibly shared inhabitant."""
    if uninhabited(t) or uninhabited(s):
        return False
    if isinstance(t, Top) or isinstance(s, Top):
        return True
    if isinstance(t, Union):
        return any(overlap(m, s) for m in t.members)
    if isinstance(s, Union):
        return any(overlap(t, m) for m in s.members)
    if isinstance(t, Refine):
        return overlap(t.base, s)
    if isinstance(s, Refine):
        return overlap(t, s.base)
    if isinstance(t, PairT) and isinstance(s, PairT):
        return overlap(t.left, s.left) and overlap(t.right, s.right)
    if isinstance(t, Fun) and isinstance(s, Fun):
        return True
    for tag in (IntT, TrueT, FalseT, VecT):
        if isinstance(t, tag) and isinstance(s, tag):
            return True
    return False


def uninhabited(t: Type) -> bool:
    """Bottom, or built from Bottom in a way that leaves no value."""
    if isinstance(t, PairT):
        return uninhabited(t.left) or uninhabited(t.right)
    if isinstance(t, Refine):
        return uninhabited(t.base)
    if isinstance(t, Union):
        return all(uninhabited(m) for m in t.members)
    return False


def _refine(var: str, base: Type, prop: Prop) -> Type:
    return BOTTOM if is_bottom(base) else Refine(var, base, prop)


def restrict(t: Type, s: Type, env: "HybridEnv") -> Type:
    from rtr.subtype import subtype

    if not overlap(t, s):
        return BOTTOM
    # Testing t <: s first is equivalent and keeps refinements from nesting.
    if subtype(env, t, s):
        return t
    if isinstance(t, Union):
        return union(*(restrict(m, s, env) for m in t.members))
    if isinstance(t, Refine):
        return _refine(t.var, restrict(t.base, s, env), t.prop)
    return s


def remove(t: Type, s: Type, env: "HybridEnv") -> Type:
    from rtr.subtype import subtype

    if subtype(env, t, s):
        return BOTTOM
    if isinstance(t, Union):
        return union(*(remove(m, s, env) for m in t.members))
    if isinstance(t, Refine):
        return _refine(t.var, remove(t.base, s, env), t.prop)
    return t


def update(t: Type, polarity: str, path: list[str], s: Type, env: "HybridEnv") -> Type:
    """Refine ``t`` given that the field ``path`` of its value is (``+``) or is not (``-``) an ``s``.

    ``path`` lists fields innermost first, so ``[fst, snd]`` is ``(snd (fst o))``.
    """
    if not path:
        return restrict(t, s, env) if polarity == "+" else remove(t, s, env)
    head, rest = path[0], path[1:]
    if isinstance(t, Union):
        return union(*(update(m, polarity, path, s, env) for m in t.members))
    if isinstance(t, Refine):
        return _refine(t.var, update(t.base, polarity, path, s, env), t.prop)
    if isinstance(t, PairT) and head == "fst":
        return PairT(update(t.left, polarity, rest, s, env), t.right)
    if isinstance(t, PairT) and head == "snd":
        return PairT(t.left, update(t.right, polarity, rest, s, env))
    return t


def project(t: Type, fld: str) -> Type:
    """Type of ``(fld o)`` given ``o ∈ t``, or Top when ``t`` is not known to be a pair."""
    if isinstance(t, PairT):
        return t.left if fld == "fst" else t.right
    if isinstance(t, Refine):
        return project(t.base, fld)
    if isinstance(t, Union) and t.members and all(_pairish(m) for m in t.members):
        return union(*(project(m, fld) for m in t.members))
    return TOP


def _pairish(t: Type) -> bool:
    if isinstance(t, Refine):
        return _pairish(t.base)
    if isinstance(t, Union):
        return all(_pairish(m) for m in t.members)
    return isinstance(t, PairT)


def _pair_view(t: Type) -> PairT | None:
    while isinstance(t, Refine):
        t = t.base
    return t if isinstance(t, PairT) else None


# ---------------------------------------------------------------------------
# Hybrid environment


def _objects_of(p: Prop) -> list[Obj]:
    if isinstance(p, (IsType, NotType)):
        return [p.obj]
    if isinstance(p, (Alias, Leq, Lt)):
        return [p.left, p.right]
    return []


def _occurs(needle: Obj, hay: Obj) -> bool:
    if hay == needle:
        return True
    if isinstance(hay, Field):
        return _occurs(needle, hay.obj)
    if isinstance(hay, PairObj):
        return _occurs(needle, hay.left) or _occurs(needle, hay.right)
    return False


def _undefined(o: Obj) -> Prop:
    """A proposition that holds exactly when ``o`` fails to denote."""
    if isinstance(o, Field):
        need = VEC if o.field == "len" else PAIR_TOP
        return or_(_undefined(o.obj), NotType(o.obj, need))
    if isinstance(o, PairObj):
        return or_(_undefined(o.left), _undefined(o.right))
    if isinstance(o, Lin):
        return or_(*(_not_int(b) for b, _ in o.terms))
    return FF


def _not_int(o: Obj) -> Prop:
    if isinstance(o, (IntLit, Lin)) or (isinstance(o, Field) and o.field == "len"):
        return _undefined(o)
    return or_(_undefined(o), NotType(o, INT))


def _mentions_fun(t: Type) -> bool:
    if isinstance(t, Fun):
        return True
    if isinstance(t, PairT):
        return _mentions_fun(t.left) or _mentions_fun(t.right)
    if isinstance(t, Union):
        return any(_mentions_fun(m) for m in t.members)
    if isinstance(t, Refine):
        return _mentions_fun(t.base)
    return False


def negate_defined(p: Prop) -> Prop | None:
    """Negation in the model, where an atom over a non-denoting object is false.

    None when there is no exact negation: membership in a function type and
    its ``!`` form are not complements.
    """
    if isinstance(p, (IsType, NotType)) and _mentions_fun(p.type):
        return None
    if isinstance(p, IsType):
        return or_(NotType(p.obj, p.type), _undefined(p.obj))
    if isinstance(p, NotType):
        return or_(IsType(p.obj, p.type), _undefined(p.obj))
    if isinstance(p, (Leq, Lt)):
        return or_(negate(p), _not_int(p.left), _not_int(p.right))
    if isinstance(p, (And, Or)):
        a, b = negate_defined(p.left), negate_defined(p.right)
        if a is None or b is None:
            return None
        return or_(a, b) if isinstance(p, And) else and_(a, b)
    return negate(p)


def _is_numeric(o: Obj) -> bool:
    return isinstance(o, (IntLit, Lin))


class HybridEnv:
    """Algorithmic view of a proposition environment. Treat instances as values."""

    def __init__(self, split_depth: int | None = None, theory_limit: int = lia.DEFAULT_LIMIT):
        self.split_depth = default_split_depth() if split_depth is None else split_depth
        self.theory_limit = theory_limit
        self.absurd = False
        self._facts: list[Prop] = []
        self._parent: dict[Obj, Obj] = {}
        self._discharged: set[Prop] = set()
        self._replaying = False
        self._dirty = False
        self._reset_derived()

    @classmethod
    def empty(cls, split_depth: int | None = None) -> "HybridEnv":
        return cls(split_depth)

    @classmethod
    def of(cls, props: Iterable[Prop], split_depth: int | None = None) -> "HybridEnv":
        env = cls(split_depth)
        for p in props:
            env = env.assume(p)
        return env

    def _reset_derived(self) -> None:
        self._types: dict[Obj, Type] = {}
        self._negs: dict[Obj, list[Type]] = {}
        self._constraints: list[lia.Constraint] = []
        self._lia_atoms: list[Prop] = []
        self._work: list[Prop] = []
        self._unfolded: set[tuple[Obj, Type]] = set()

    def copy(self) -> "HybridEnv":
        new = object.__new__(HybridEnv)
        new.split_depth = self.split_depth
        new.theory_limit = self.theory_limit
        new.absurd = self.absurd
        new._facts = list(self._facts)
        new._parent = dict(self._parent)
        new._discharged = set(self._discharged)
        new._replaying = False
        new._dirty = False
        new._types = dict(self._types)
        new._negs = {k: list(v) for k, v in self._negs.items()}
        new._constraints = list(self._constraints)
        new._lia_atoms = list(self._lia_atoms)
        new._work = list(self._work)
        new._unfolded = set(self._unfolded)
        return new

    # -- public views -----------------------------------------------------

    @property
    def facts(self) -> tuple[Prop, ...]:
        return tuple(self._facts)

    @property
    def type_map(self) -> dict[Obj, tuple[Type, tuple[Type, ...]]]:
        keys = set(self._types) | set(self._negs)
        return {k: (self._types.get(k, TOP), tuple(self._negs.get(k, ()))) for k in keys}

    @property
    def lia_store(self) -> tuple[Prop, ...]:
        return tuple(self._lia_atoms)

    @property
    def worklist(self) -> tuple[Prop, ...]:
        return tuple(self._work)

    def representative(self, o: Obj) -> Obj:
        return self.canonical(o)

    def classes(self) -> list[set[Obj]]:
        groups: dict[Obj, set[Obj]] = {}
        for o in self._parent:
            groups.setdefault(self._find(o), {self._find(o)}).add(o)
        return list(groups.values())

    def assume(self, p: Prop) -> "HybridEnv":
        new = self.copy()
        new._add(p, record=True)
        new._propagate()
        return new

    def assume_all(self, props: Iterable[Prop]) -> "HybridEnv":
        env = self
        for p in props:
            env = env.assume(p)
        return env

    def without(self, disjunction: Prop) -> "HybridEnv":
        new = self.copy()
        new._discharged.add(disjunction)
        new._work = [w for w in new._work if w != disjunction]
        return new

    # -- objects ------------------------------------------------------------

    def _find(self, o: Obj) -> Obj:
        while o in self._parent:
            o = self._parent[o]
        return o

    def canonical(self, o: Obj) -> Obj:
        o = normalize_obj(o)
        for _ in range(64):
            if isinstance(o, Field):
                c = normalize_obj(Field(o.field, self.canonical(o.obj)))
            elif isinstance(o, PairObj):
                c = normalize_obj(PairObj(self.canonical(o.left), self.canonical(o.right)))
            elif isinstance(o, Lin):
                c = normalize_obj(Lin(tuple((self.canonical(b), k) for b, k in o.terms), o.const))
            else:
                c = o
            r = self._find(c)
            if r == o:
                return r
            o = r
        return o

    def lookup(self, o: Obj) -> Type:
        """Strongest recorded positive type of a canonical object."""
        t = self._types.get(o, TOP)
        if isinstance(o, (IntLit, Lin)):
            return self._meet(INT, t)
        if isinstance(o, PairObj):
            return self._meet(PairT(self.lookup(o.left), self.lookup(o.right)), t)
        if isinstance(o, Field):
            if o.field == "len":
                return self._meet(INT, t)
            return self._meet(project(self.lookup(o.obj), o.field), t)
        return t

    def type_of(self, o: Obj) -> Type:
        return self.lookup(self.canonical(o))

    def _meet(self, a: Type, b: Type) -> Type:
        if isinstance(a, Top):
            return b
        if isinstance(b, Top) or a == b:
            return a
        return restrict(a, b, self)

    def defined(self, o: Obj) -> bool:
        """Whether ``o`` denotes in every model of this environment."""
        from rtr.subtype import subtype

        o = self.canonical(o)
        if isinstance(o, (OVar, IntLit)):
            return True
        if isinstance(o, PairObj):
            return self.defined(o.left) and self.defined(o.right)
        if isinstance(o, Field):
            need = VEC if o.field == "len" else PAIR_TOP
            return self.defined(o.obj) and subtype(self, self.lookup(o.obj), need)
        if isinstance(o, Lin):
            return all(self.defined(b) and subtype(self, self.lookup(b), INT) for b, _ in o.terms)
        return False

    def integral(self, o: Obj) -> bool:
        from rtr.subtype import subtype

        o = self.canonical(o)
        if not self.defined(o):
            return False
        if isinstance(o, (IntLit, Lin)) or (isinstance(o, Field) and o.field == "len"):
            return True
        return subtype(self, self.lookup(o), INT)

    # -- assumption -----------------------------------------------------------

    def _add(self, p: Prop, record: bool) -> None:
        if self.absurd or p == TT:
            return
        if p == FF:
            self.absurd = True
            return
        if isinstance(p, And):
            self._add(p.left, record)
            self._add(p.right, record)
            return
        if record:
            self._facts.append(p)
        self._process(p)

    def _process(self, p: Prop) -> None:
        if self.absurd:
            return
        if isinstance(p, Or):
            if p not in self._discharged and p not in self._work:
                self._work.append(p)
            return
        for o in _objects_of(p):
            self._assume_defined(self.canonical(o))
        if self.absurd:
            return
        if isinstance(p, IsType):
            self._assume_type(self.canonical(p.obj), p.type)
        elif isinstance(p, NotType):
            self._assume_not(self.canonical(p.obj), p.type)
        elif isinstance(p, Alias):
            self._merge(p.left, p.right)
        elif isinstance(p, (Leq, Lt)):
            self._assume_lia(p)

    def _assume_defined(self, o: Obj) -> None:
        if isinstance(o, Field):
            self._assume_defined(o.obj)
            self._assume_type(self.canonical(o.obj), VEC if o.field == "len" else PAIR_TOP)
        elif isinstance(o, PairObj):
            self._assume_defined(o.left)
            self._assume_defined(o.right)
        elif isinstance(o, Lin):
            for b, _ in o.terms:
                self._assume_defined(b)
                self._assume_type(self.canonical(b), INT)

    def _assume_type(self, o: Obj, t: Type) -> None:
        if self.absurd or isinstance(t, Top):
            return
        old = self.lookup(o)
        new = restrict(old, t, self)
        for n in self._negs.get(o, ()):
            new = remove(new, n, self)
        if uninhabited(new):
            self.absurd = True
            return
        self._types[o] = new
        if new != old:
            self._propagate_type(o, t, new)
        for r in (t, new):
            if isinstance(r, Refine) and (o, r) not in self._unfolded:
                self._unfolded.add((o, r))
                self._add(subst(r.prop, r.var, o), record=False)

    def _propagate_type(self, o: Obj, t: Type, new: Type) -> None:
        root, path = split_path(o)
        if path and not isinstance(root, PairObj):
            root_t = update(self.lookup(root), "+", path, t, self)
            if uninhabited(root_t):
                self.absurd = True
                return
            self._types[root] = root_t
        view = _pair_view(new)
        if isinstance(o, PairObj):
            if view is not None:
                self._assume_type(self.canonical(o.left), view.left)
                self._assume_type(self.canonical(o.right), view.right)
        elif view is not None:
            for fld, comp in (("fst", view.left), ("snd", view.right)):
                if not isinstance(comp, Top):
                    self._assume_type(self.canonical(Field(fld, o)), comp)

    def _assume_not(self, o: Obj, t: Type) -> None:
        if self.absurd:
            return
        self._negs.setdefault(o, []).append(t)
        new = remove(self.lookup(o), t, self)
        if uninhabited(new):
            self.absurd = True
            return
        self._types[o] = new
        root, path = split_path(o)
        if path and not isinstance(root, PairObj):
            root_t = update(self.lookup(root), "-", path, t, self)
            if uninhabited(root_t):
                self.absurd = True
                return
            self._types[root] = root_t
        if isinstance(t, Refine) and (o, t) not in self._unfolded:
            self._unfolded.add((o, t))
            neg = negate_defined(subst(t.prop, t.var, o))
            if neg is not None:
                self._add(or_(NotType(o, t.base), neg), record=False)
        if isinstance(o, PairObj) and isinstance(t, PairT):
            self._add(or_(NotType(o.left, t.left), NotType(o.right, t.right)), record=False)

    def _assume_lia(self, p: Prop) -> None:
        a, b = self.canonical(p.left), self.canonical(p.right)
        for o in (a, b):
            if not _is_numeric(o):
                self._assume_type(o, INT)
        if self.absurd:
            return
        c = self._constraint(type(p)(a, b))
        if c is None:
            return
        self._lia_atoms.append(type(p)(a, b))
        self._constraints.append(c)
        if lia.unsat(self._theory_system(self._constraints), self.theory_limit):
            self.absurd = True

    def _merge(self, a: Obj, b: Obj) -> None:
        a, b = self.canonical(a), self.canonical(b)
        if a == b or self.absurd:
            return
        if isinstance(a, PairObj) and isinstance(b, PairObj):
            self._add(Alias(a.left, b.left), record=False)
            self._add(Alias(a.right, b.right), record=False)
            return
        if isinstance(a, IntLit) and isinstance(b, IntLit):
            self.absurd = True
            return
        if (isinstance(a, PairObj) and _is_numeric(b)) or (isinstance(b, PairObj) and _is_numeric(a)):
            self.absurd = True
            return
        if isinstance(a, Lin) or isinstance(b, Lin):
            self._add(Leq(a, b), record=False)
            self._add(Leq(b, a), record=False)
            return
        if _occurs(a, b) or _occurs(b, a):
            self.absurd = True
            return
        rep, other = sorted((a, b), key=obj_key)
        if isinstance(rep, IntLit):
            self._assume_type(other, INT)
        self._parent[other] = rep
        self._replay()

    def _replay(self) -> None:
        if self._replaying:
            self._dirty = True
            return
        self._replaying = True
        try:
            for _ in range(64):
                self._dirty = False
                self._reset_derived()
                for f in list(self._facts):
                    if self.absurd or self._dirty:
                        break
                    self._process(f)
                if not self._dirty:
                    break
        finally:
            self._replaying = False

    def _propagate(self) -> None:
        """Unit propagation over the pending disjunctions."""
        changed = True
        rounds = 0
        while changed and not self.absurd and rounds < 32:
            changed = False
            rounds += 1
            for orp in list(self._work):
                if orp not in self._work:
                    continue
                ds = disjuncts(orp)
                if not _may_probe():
                    continue
                with _probing():
                    if any(_direct(self, d, 0) for d in ds):
                        self._work.remove(orp)
                        self._discharged.add(orp)
                        continue
                    alive = []
                    for d in ds:
                        probe = self.copy()
                        probe._add(d, record=False)
                        probe._propagate()
                        if not probe.absurd:
                            alive.append(d)
                if len(alive) == len(ds):
                    continue
                self._work.remove(orp)
                self._discharged.add(orp)
                changed = True
                if not alive:
                    self.absurd = True
                    return
                if len(alive) == 1:
                    self._add(alive[0], record=False)
                else:
                    rest = or_(*alive)
                    if rest not in self._work:
                        self._work.append(rest)

    # -- theory ---------------------------------------------------------------

    def _constraint(self, p: Prop) -> lia.Constraint | None:
        lhs = self._linexpr(p.left)
        rhs = self._linexpr(p.right)
        if lhs is None or rhs is None:
            return None
        return lia.Constraint.leq(lhs, rhs) if isinstance(p, Leq) else lia.Constraint.lt(lhs, rhs)

    def _linexpr(self, o: Obj) -> lia.LinExpr | None:
        parts = linear_parts(self.canonical(o))
        if parts is None:
            return None
        coeffs, const = parts
        return lia.LinExpr.make(coeffs, const)

    def _theory_system(self, extra: Iterable[lia.Constraint]) -> list[lia.Constraint]:
        system = list(extra)
        for atom in lia.atoms_of(system):
            if isinstance(atom, Field) and atom.field == "len":
                system.append(lia.Constraint.make(lia.LinExpr.atom(atom) * -1))
        return system

    def theory_entails(self, goal: Prop) -> bool:
        c = self._constraint(goal)
        if c is None:
            return False
        system = self._theory_system(self._constraints + [c])
        del system[len(self._constraints)]
        return lia.entails(system, c, self.theory_limit)

    def __repr__(self) -> str:
        return f"HybridEnv(facts={[str(f) for f in self._facts]}, absurd={self.absurd})"


# ---------------------------------------------------------------------------
# Entailment


def _relevant_vars(env: HybridEnv, goal: Prop) -> set[str]:
    seen = set(free_vars(goal))
    for o in _objects_of(goal):
        seen |= free_vars(env.canonical(o))
    groups = [set(free_vars(c)) for c in env._lia_atoms] + [free_vars(w) for w in env._work]
    changed = True
    while changed:
        changed = False
        for g in groups:
            if g & seen and not g <= seen:
                seen |= g
                changed = True
    return seen


def proves(env: HybridEnv, goal: Prop, depth: int | None = None) -> bool:
    """Sound, incomplete decision of ``Γ ⊢ goal``."""
    if depth is None:
        ok = _proves(env, goal, env.split_depth)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("entails %s |- %s -> %s", " ".join(map(str, env.facts)) or "tt", goal, ok)
        return ok
    return _proves(env, goal, depth)


def _proves(env: HybridEnv, goal: Prop, depth: int) -> bool:
    if env.absurd:
        return True
    if _direct(env, goal, depth):
        return True
    if depth <= 0:
        return False
    relevant = _relevant_vars(env, goal)
    for orp in env._work:
        if free_vars(orp) & relevant:
            rest = env.without(orp)
            if all(proves(rest.assume(d), goal, depth - 1) for d in disjuncts(orp)):
                return True
            break
    for o in _goal_objects(goal):
        c = env.canonical(o)
        pos = env.lookup(c)
        if isinstance(pos, Union) and len(pos.members) > 1:
            return all(proves(env.assume(IsType(c, m)), goal, depth - 1) for m in pos.members)
    return False


def _goal_objects(p: Prop) -> list[Obj]:
    if isinstance(p, (And, Or)):
        return _goal_objects(p.left) + _goal_objects(p.right)
    return _objects_of(p)


def _direct(env: HybridEnv, goal: Prop, depth: int) -> bool:
    if env.absurd or goal == TT:
        return True
    if goal == FF:
        return False
    if isinstance(goal, And):
        return proves(env, goal.left, depth) and proves(env, goal.right, depth)
    if isinstance(goal, Or):
        return any(_direct(env, d, depth) for d in disjuncts(goal))
    if isinstance(goal, IsType):
        return _proves_type(env, env.canonical(goal.obj), goal.type, depth)
    if isinstance(goal, NotType):
        return _proves_not(env, env.canonical(goal.obj), goal.type, depth)
    if isinstance(goal, Alias):
        return _proves_alias(env, env.canonical(goal.left), env.canonical(goal.right))
    if isinstance(goal, (Leq, Lt)):
        if not (env.integral(goal.left) and env.integral(goal.right)):
            return False
        ok = env.theory_entails(goal)
        logger.debug("theory query %s -> %s", goal, ok)
        return ok
    return False


def _proves_type(env: HybridEnv, o: Obj, t: Type, depth: int) -> bool:
    from rtr.subtype import subtype

    if not env.defined(o):
        return False
    if isinstance(t, Top):
        return True
    if isinstance(t, Refine):
        return proves(env, IsType(o, t.base), depth) and proves(env, subst(t.prop, t.var, o), depth)
    if isinstance(o, PairObj) and isinstance(t, PairT):
        return proves(env, IsType(o.left, t.left), depth) and proves(env, IsType(o.right, t.right), depth)
    pos = env.lookup(o)
    if subtype(env, pos, t):
        return True
    if isinstance(t, PairT) and not isinstance(o, PairObj) and subtype(env, pos, PAIR_TOP):
        if proves(env, IsType(Field("fst", o), t.left), depth) and proves(env, IsType(Field("snd", o), t.right), depth):
            return True
    if isinstance(t, Union) and any(_proves_type(env, o, m, depth) for m in t.members):
        return True
    if depth > 0 and isinstance(pos, Union) and len(pos.members) > 1:
        return all(proves(env.assume(IsType(o, m)), IsType(o, t), depth - 1) for m in pos.members)
    return False


def _proves_not(env: HybridEnv, o: Obj, t: Type, depth: int) -> bool:
    from rtr.subtype import subtype

    if not env.defined(o):
        return False
    if not overlap(env.lookup(o), t):
        return True
    if any(subtype(env, t, n) for n in env._negs.get(o, ())):
        return True
    if isinstance(o, PairObj) and isinstance(t, PairT):
        if proves(env, NotType(o.left, t.left), depth) or proves(env, NotType(o.right, t.right), depth):
            return True
    if not _may_probe():
        return False
    with _probing():
        return env.assume(IsType(o, t)).absurd


def _proves_alias(env: HybridEnv, a: Obj, b: Obj) -> bool:
    if not (env.defined(a) and env.defined(b)):
        return False
    if a == b:
        return True
    if isinstance(a, PairObj) and isinstance(b, PairObj):
        return _proves_alias(env, env.canonical(a.left), env.canonical(b.left)) and _proves_alias(
            env, env.canonical(a.right), env.canonical(b.right)
        )
    if env.integral(a) and env.integral(b):
        return env.theory_entails(Leq(a, b)) and env.theory_entails(Leq(b, a))
    return False


def assume(env: HybridEnv, p: Prop) -> HybridEnv:
    return env.assume(p)
