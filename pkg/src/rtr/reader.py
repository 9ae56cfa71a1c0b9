"""S-expression reader for the surface language."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from rtr.core import (
    BOOL,
    FALSE,
    FF,
    INT,
    NULL,
    TOP,
    TRUE,
    TT,
    VEC,
    Alias,
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
    Lt,
    NotType,
    Obj,
    OVar,
    PairObj,
    PairT,
    Prim,
    PrimOp,
    Prop,
    Refine,
    Result,
    Snd,
    Span,
    Type,
    TypeResult,
    Var,
    VecLit,
    add,
    and_,
    or_,
    scale,
    union,
)


class ParseError(Exception):
    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.line, self.col = line_col(text, offset)
        super().__init__(f"{self.line}:{self.col}: {message}")
        self.message = message


def line_col(text: str, offset: int) -> tuple[int, int]:
    before = text[:offset]
    line = before.count("\n") + 1
    col = offset - (before.rfind("\n") + 1) + 1
    return line, col


# ---------------------------------------------------------------------------
# S-expressions


@dataclass(frozen=True)
class SExp:
    value: str | tuple["SExp", ...]
    start: int
    end: int

    @property
    def is_atom(self) -> bool:
        return isinstance(self.value, str)

    @property
    def span(self) -> Span:
        return (self.start, self.end)


_TOKEN = re.compile(r"\s+|;[^\n]*|[()\[\]]|[^\s()\[\];]+")
_CLOSE = {"(": ")", "[": "]"}


def read_sexps(text: str) -> list[SExp]:
    stack: list[tuple[str, int, list[SExp]]] = []
    top: list[SExp] = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok[0].isspace() or tok[0] == ";":
            continue
        if tok in _CLOSE:
            stack.append((tok, m.start(), []))
        elif tok in (")", "]"):
            if not stack:
                raise ParseError(f"unexpected '{tok}'", m.start(), text)
            opener, start, items = stack.pop()
            if _CLOSE[opener] != tok:
                raise ParseError(f"'{opener}' closed by '{tok}'", m.start(), text)
            node = SExp(tuple(items), start, m.end())
            (stack[-1][2] if stack else top).append(node)
        else:
            node = SExp(tok, m.start(), m.end())
            (stack[-1][2] if stack else top).append(node)
    if stack:
        raise ParseError("unexpected end of input", len(text), text)
    return top


# ---------------------------------------------------------------------------
# Program forms


@dataclass(frozen=True)
class Annotation:
    name: str
    type: Type
    span: Span


@dataclass(frozen=True)
class Define:
    name: str
    expr: Expr
    span: Span


@dataclass(frozen=True)
class ExprForm:
    expr: Expr
    span: Span


@dataclass(frozen=True)
class ProveQuery:
    assumptions: tuple[Prop, ...]
    goal: Prop
    span: Span


Form = Annotation | Define | ExprForm | ProveQuery


@dataclass
class SourceProgram:
    path: str
    text: str
    forms: list[Form] = field(default_factory=list)


_PRIMS = {p.value: p for p in PrimOp}
_KEYWORDS = {"lambda", "λ", "if", "let", "cons", "fst", "snd", "vec", "define", "prove", "true", "false", ":"}
_INT = re.compile(r"[-+]?\d+\Z")
_BASE_TYPES = {"Top": TOP, "Int": INT, "True": TRUE, "False": FALSE, "Bool": BOOL, "Vec": VEC}


class _Parser:
    def __init__(self, text: str):
        self.text = text

    def error(self, msg: str, node: SExp) -> ParseError:
        return ParseError(msg, node.start, self.text)

    def items(self, node: SExp, n: int | None = None, what: str = "form") -> tuple[SExp, ...]:
        if node.is_atom:
            raise self.error(f"expected a parenthesized {what}", node)
        if n is not None and len(node.value) != n:
            raise self.error(f"malformed {what}: expected {n} elements, got {len(node.value)}", node)
        return node.value

    def head(self, node: SExp) -> str | None:
        if node.is_atom or not node.value or not node.value[0].is_atom:
            return None
        return node.value[0].value

    def ident(self, node: SExp) -> str:
        if not node.is_atom:
            raise self.error("expected an identifier", node)
        name = node.value
        if _INT.match(name) or name in _KEYWORDS or name in _PRIMS or "#" in name:
            raise self.error(f"'{name}' cannot be used as a variable", node)
        return name

    def binder(self, node: SExp) -> tuple[str, Type]:
        parts = self.items(node, 3, "binder (x : T)")
        if not (parts[1].is_atom and parts[1].value == ":"):
            raise self.error("expected ':' in binder", parts[1])
        return self.ident(parts[0]), self.type(parts[2])

    # -- program ------------------------------------------------------------

    def form(self, node: SExp) -> Form:
        h = self.head(node)
        if h == ":":
            parts = self.items(node, 3, "annotation (: name T)")
            return Annotation(self.ident(parts[1]), self.type(parts[2]), node.span)
        if h == "define":
            parts = self.items(node, 3, "definition (define name e)")
            return Define(self.ident(parts[1]), self.expr(parts[2]), node.span)
        if h == "prove":
            parts = self.items(node, 3, "query (prove (P ...) P)")
            assumptions = tuple(self.prop(p) for p in self.items(parts[1], None, "assumption list"))
            return ProveQuery(assumptions, self.prop(parts[2]), node.span)
        return ExprForm(self.expr(node), node.span)

    # -- expressions --------------------------------------------------------

    def expr(self, node: SExp) -> Expr:
        sp = node.span
        if node.is_atom:
            tok = node.value
            if _INT.match(tok):
                return Int(int(tok), sp)
            if tok == "true":
                return Bool(True, sp)
            if tok == "false":
                return Bool(False, sp)
            if tok in _PRIMS:
                return Prim(_PRIMS[tok], sp)
            return Var(self.ident(node), sp)
        parts = node.value
        if not parts:
            raise self.error("empty application", node)
        h = self.head(node)
        if h in ("lambda", "λ"):
            parts = self.items(node, 3, "lambda")
            var, ty = self.binder(parts[1])
            return Lam(var, ty, self.expr(parts[2]), sp)
        if h == "if":
            parts = self.items(node, 4, "if")
            return If(self.expr(parts[1]), self.expr(parts[2]), self.expr(parts[3]), sp)
        if h == "let":
            parts = self.items(node, 3, "let")
            bind = self.items(parts[1], 2, "let binding (x e)")
            return Let(self.ident(bind[0]), self.expr(bind[1]), self.expr(parts[2]), sp)
        if h == "cons":
            parts = self.items(node, 3, "cons")
            return Cons(self.expr(parts[1]), self.expr(parts[2]), sp)
        if h in ("fst", "snd"):
            parts = self.items(node, 2, h)
            return (Fst if h == "fst" else Snd)(self.expr(parts[1]), sp)
        if h == "vec":
            return VecLit(tuple(self.expr(p) for p in parts[1:]), sp)
        if h in ("define", "prove", ":"):
            raise self.error(f"'{h}' is only allowed at top level", node)
        if len(parts) < 2:
            raise self.error("application needs an argument", node)
        acc = self.expr(parts[0])
        for arg in parts[1:]:
            acc = App(acc, self.expr(arg), (node.start, arg.end if arg is not parts[-1] else node.end))
        return acc

    # -- types ----------------------------------------------------------------

    def type(self, node: SExp) -> Type:
        if node.is_atom:
            if node.value in _BASE_TYPES:
                return _BASE_TYPES[node.value]
            raise self.error(f"unknown type '{node.value}'", node)
        h = self.head(node)
        parts = node.value
        if h == "Pair":
            parts = self.items(node, 3, "Pair type")
            return PairT(self.type(parts[1]), self.type(parts[2]))
        if h == "U":
            return union(*(self.type(p) for p in parts[1:]))
        if h == "->":
            parts = self.items(node, 3, "function type")
            var, dom = self.binder(parts[1])
            return Fun(var, dom, self.result(parts[2]))
        if h == "Refine":
            parts = self.items(node, 3, "Refine type")
            var, base = self.binder(parts[1])
            return Refine(var, base, self.prop(parts[2]))
        raise self.error("unknown type constructor", node)

    def result(self, node: SExp) -> TypeResult:
        h = self.head(node)
        if h == "Result":
            parts = self.items(node, 5, "Result")
            return Result(self.type(parts[1]), self.prop(parts[2]), self.prop(parts[3]), self.obj(parts[4]))
        if h == "Exists":
            parts = self.items(node, 3, "Exists")
            var, ty = self.binder(parts[1])
            return Exists(var, ty, self.result(parts[2]))
        return Result(self.type(node))

    # -- propositions and objects -------------------------------------------------

    def prop(self, node: SExp) -> Prop:
        if node.is_atom:
            if node.value == "tt":
                return TT
            if node.value == "ff":
                return FF
            raise self.error(f"unknown proposition '{node.value}'", node)
        h = self.head(node)
        parts = node.value
        if h in (":", "!"):
            parts = self.items(node, 3, "type proposition")
            ctor = IsType if h == ":" else NotType
            return ctor(self.obj(parts[1]), self.type(parts[2]))
        if h == "and":
            return and_(*(self.prop(p) for p in parts[1:]))
        if h == "or":
            return or_(*(self.prop(p) for p in parts[1:]))
        if h in ("==", "<=", "<", ">=", ">"):
            parts = self.items(node, 3, "comparison")
            a, b = self.obj(parts[1]), self.obj(parts[2])
            if h == "==":
                return Alias(a, b)
            if h in (">=", ">"):
                a, b = b, a
            return Leq(a, b) if h in ("<=", ">=") else Lt(a, b)
        raise self.error("unknown proposition form", node)

    def obj(self, node: SExp) -> Obj:
        if node.is_atom:
            tok = node.value
            if _INT.match(tok):
                return IntLit(int(tok))
            if tok == "null":
                return NULL
            return OVar(self.ident(node))
        h = self.head(node)
        parts = node.value
        if h in ("fst", "snd", "len"):
            parts = self.items(node, 2, "field object")
            return Field(h, self.obj(parts[1]))
        if h == "*":
            parts = self.items(node, 3, "scaled object")
            if not (parts[1].is_atom and _INT.match(parts[1].value)):
                raise self.error("the first argument of '*' must be an integer literal", parts[1])
            return scale(int(parts[1].value), self.obj(parts[2]))
        if h == "+":
            if len(parts) < 2:
                raise self.error("'+' needs at least one argument", node)
            return add(*(self.obj(p) for p in parts[1:]))
        if h == "cons":
            parts = self.items(node, 3, "pair object")
            return PairObj(self.obj(parts[1]), self.obj(parts[2]))
        raise self.error("unknown object form", node)


def parse(text: str, path: str = "<input>") -> SourceProgram:
    p = _Parser(text)
    return SourceProgram(path, text, [p.form(n) for n in read_sexps(text)])


def _single(text: str, what: str) -> SExp:
    nodes = read_sexps(text)
    if len(nodes) != 1:
        raise ParseError(f"expected exactly one {what}", 0, text)
    return nodes[0]


def parse_expr(text: str) -> Expr:
    return _Parser(text).expr(_single(text, "expression"))


def parse_type(text: str) -> Type:
    return _Parser(text).type(_single(text, "type"))


def parse_result(text: str) -> TypeResult:
    return _Parser(text).result(_single(text, "type-result"))


def parse_prop(text: str) -> Prop:
    return _Parser(text).prop(_single(text, "proposition"))


def parse_obj(text: str) -> Obj:
    return _Parser(text).obj(_single(text, "object"))
