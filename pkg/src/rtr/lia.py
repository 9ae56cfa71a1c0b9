"""Linear integer arithmetic by Fourier-Motzkin elimination.

Constraints are kept as ``lhs <= 0`` over integer unknowns. Strict
constraints are tightened on construction (``e < 0`` becomes ``e + 1 <= 0``),
after which elimination is exact over the rationals and therefore a sound
(but incomplete) refutation procedure over the integers.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 10_000


@dataclass(frozen=True)
class LinExpr:
    coeffs: tuple[tuple[Hashable, int], ...] = ()
    constant: int = 0

    @classmethod
    def make(cls, coeffs: Mapping[Hashable, int] | Iterable[tuple[Hashable, int]] = (), constant: int = 0):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[Hashable, int] = {}
        for atom, c in items:
            acc[atom] = acc.get(atom, 0) + c
        return cls(tuple(sorted(((a, c) for a, c in acc.items() if c), key=_atom_key)), constant)

    @classmethod
    def atom(cls, a: Hashable) -> "LinExpr":
        return cls(((a, 1),), 0)

    @classmethod
    def const(cls, n: int) -> "LinExpr":
        return cls((), n)

    def coeff(self, atom: Hashable) -> int:
        for a, c in self.coeffs:
            if a == atom:
                return c
        return 0

    def atoms(self) -> list[Hashable]:
        return [a for a, _ in self.coeffs]

    def __add__(self, other: "LinExpr") -> "LinExpr":
        return LinExpr.make(self.coeffs + other.coeffs, self.constant + other.constant)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other * -1

    def __mul__(self, k: int) -> "LinExpr":
        return LinExpr.make(((a, c * k) for a, c in self.coeffs), self.constant * k)

    def evaluate(self, assignment: Mapping[Hashable, int]) -> int:
        return sum(c * assignment[a] for a, c in self.coeffs) + self.constant

    def __str__(self) -> str:
        parts = [f"{c}*{a}" for a, c in self.coeffs]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return " + ".join(parts)


def _atom_key(item) -> tuple:
    atom = item[0] if isinstance(item, tuple) else item
    return (type(atom).__name__, str(atom))


@dataclass(frozen=True)
class Constraint:
    """``lhs <= 0``; the relation is always ``<=`` once built through ``make``."""

    lhs: LinExpr
    relation: str = "<="

    @classmethod
    def make(cls, lhs: LinExpr, relation: str = "<=") -> "Constraint":
        if relation == "<":
            return cls(lhs + LinExpr.const(1), "<=")
        if relation != "<=":
            raise ValueError(f"unknown relation {relation!r}")
        return cls(lhs, "<=")

    @classmethod
    def leq(cls, a: LinExpr, b: LinExpr) -> "Constraint":
        return cls.make(a - b, "<=")

    @classmethod
    def lt(cls, a: LinExpr, b: LinExpr) -> "Constraint":
        return cls.make(a - b, "<")

    def is_constant(self) -> bool:
        return not self.lhs.coeffs

    def is_false(self) -> bool:
        return self.is_constant() and self.lhs.constant > 0

    def holds(self, assignment: Mapping[Hashable, int]) -> bool:
        return self.lhs.evaluate(assignment) <= 0

    def negate(self) -> "Constraint":
        # not (e <= 0)  <=>  e >= 1  <=>  -e + 1 <= 0
        return Constraint(self.lhs * -1 + LinExpr.const(1), "<=")

    def __str__(self) -> str:
        return f"{self.lhs} <= 0"


ConstraintSys = list[Constraint]


def atoms_of(sys: Iterable[Constraint]) -> list[Hashable]:
    seen: dict[Hashable, None] = {}
    for c in sys:
        for a in c.lhs.atoms():
            seen.setdefault(a, None)
    return sorted(seen, key=_atom_key)


def fm_eliminate(sys: Iterable[Constraint], atom: Hashable) -> list[Constraint]:
    """Project ``atom`` out of ``sys`` by pairing each lower bound with each upper bound."""
    uppers, lowers, rest = [], [], []
    for c in sys:
        k = c.lhs.coeff(atom)
        (uppers if k > 0 else lowers if k < 0 else rest).append(c)
    out = list(rest)
    for up in uppers:
        a = up.lhs.coeff(atom)
        for lo in lowers:
            b = -lo.lhs.coeff(atom)
            out.append(Constraint(up.lhs * b + lo.lhs * a))
    return _dedup(out)


def _dedup(sys: Iterable[Constraint]) -> list[Constraint]:
    seen: dict[Constraint, None] = {}
    for c in sys:
        if c.is_constant() and not c.is_false():
            continue
        seen.setdefault(c, None)
    return list(seen)


def unsat(sys: Iterable[Constraint], limit: int = DEFAULT_LIMIT) -> bool:
    """True only if ``sys`` has no integer solution.

    Returns False ("unknown") if the intermediate system grows past ``limit``.
    """
    current = _dedup(Constraint.make(c.lhs, c.relation) for c in sys)
    while True:
        if any(c.is_false() for c in current):
            return True
        counts = Counter(a for c in current for a in c.lhs.atoms())
        if not counts:
            return False
        atom = min(counts, key=lambda a: (counts[a], _atom_key(a)))
        current = fm_eliminate(current, atom)
        if len(current) > limit:
            logger.debug("theory gave up: %d constraints", len(current))
            return False


def entails(assumptions: Iterable[Constraint], goal: Constraint, limit: int = DEFAULT_LIMIT) -> bool:
    goal = Constraint.make(goal.lhs, goal.relation)
    return unsat([*assumptions, goal.negate()], limit)
