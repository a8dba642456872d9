"""AST for the mini imperative language and its assertion sublanguage.

Program expressions and annotation formulas share one node family; the few
formula-only constructs (``Old``, ``Quant``, ``Store``, ``Ite``) are rejected
by the checker where they may not appear.  Source positions are carried on
every node but excluded from equality, so structurally equal trees compare
equal regardless of where they were parsed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple[int, int]
NOPOS: Pos = (0, 0)


class Type:
    name = "?"

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Type) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)


class _Int(Type):
    name = "int"


class _Bool(Type):
    name = "bool"


class _ArrayInt(Type):
    name = "int[]"


INT: Type = _Int()
BOOL: Type = _Bool()
ARRAY: Type = _ArrayInt()
TYPES = {"int": INT, "bool": BOOL, "int[]": ARRAY}


# --------------------------------------------------------------------------
# expressions / formulas


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Old:
    name: str
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Nondet:
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    arg: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Select:
    arr: "Expr"
    idx: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Store:
    arr: "Expr"
    idx: "Expr"
    val: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Ite:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" | "exists"
    vars: tuple[tuple[str, Type], ...]
    body: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


Expr = Union[IntLit, BoolLit, Var, Old, Nondet, Unary, Binary, Call, Select, Store, Ite, Quant]

ARITH_OPS = ("+", "-", "*", "/", "%")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("&&", "||", "==>", "<==>")

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def conj(parts) -> Expr:
    """Right-nested conjunction of ``parts`` with literal ``true`` dropped."""
    items = [p for p in parts if p != TRUE]
    if not items:
        return TRUE
    if any(p == FALSE for p in items):
        return FALSE
    out = items[-1]
    for p in reversed(items[:-1]):
        out = Binary("&&", p, out)
    return out


def disj(parts) -> Expr:
    items = [p for p in parts if p != FALSE]
    if not items:
        return FALSE
    if any(p == TRUE for p in items):
        return TRUE
    out = items[-1]
    for p in reversed(items[:-1]):
        out = Binary("||", p, out)
    return out


def neg(e: Expr) -> Expr:
    if isinstance(e, BoolLit):
        return BoolLit(not e.value)
    if isinstance(e, Unary) and e.op == "!":
        return e.arg
    return Unary("!", e)


def implies(a: Expr, b: Expr) -> Expr:
    return Binary("==>", a, b)


def eq(a: Expr, b: Expr) -> Expr:
    return Binary("==", a, b)


def conjuncts(e: Expr) -> list[Expr]:
    if isinstance(e, Binary) and e.op == "&&":
        return conjuncts(e.lhs) + conjuncts(e.rhs)
    if e == TRUE:
        return []
    return [e]


# --------------------------------------------------------------------------
# statements


@dataclass(frozen=True)
class LoopAnnot:
    invariant: Optional[Expr] = None
    summary: Optional[Expr] = None


@dataclass(frozen=True)
class Decl:
    name: str
    type: Type
    init: Optional[Expr]
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    name: str
    index: Optional[Expr]
    rhs: Expr
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Block
    other: Block
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    annot: LoopAnnot
    body: Block
    pos: Pos = field(default=NOPOS, compare=False, repr=False)
    # filled in by check(); variables assigned inside the body that outlive it
    mods: Optional[frozenset[str]] = None


@dataclass(frozen=True)
class Break:
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Assert:
    cond: Expr
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Assume:
    cond: Expr
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


Stmt = Union[Decl, Assign, Block, If, While, Break, Return, Assert, Assume]


# --------------------------------------------------------------------------
# top level


@dataclass(frozen=True)
class SpecFun:
    name: str
    params: tuple[tuple[str, Type], ...]
    ret: Type
    cases: tuple[tuple[Expr, Expr], ...]
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple[tuple[str, Type], ...]
    ret: Optional[Type]  # None for void
    body: Block
    pos: Pos = field(default=NOPOS, compare=False, repr=False)
    # filled in by check()
    mods: Optional[frozenset[str]] = None
    vartypes: tuple[tuple[str, Type], ...] = ()

    def vartype(self, name: str) -> Type:
        for n, t in self.vartypes:
            if n == name:
                return t
        raise KeyError(name)


@dataclass(frozen=True)
class Program:
    spec_funs: tuple[SpecFun, ...]
    funs: tuple[FunDef, ...]

    def fun(self, name: str) -> FunDef:
        for f in self.funs:
            if f.name == name:
                return f
        raise KeyError(name)

    def spec(self, name: str) -> Optional[SpecFun]:
        for f in self.spec_funs:
            if f.name == name:
                return f
        return None

    @property
    def main(self) -> FunDef:
        return self.fun("main")


def walk_stmts(s: Stmt):
    """Yield ``s`` and every statement nested inside it, preorder."""
    yield s
    if isinstance(s, Block):
        for c in s.stmts:
            yield from walk_stmts(c)
    elif isinstance(s, If):
        yield from walk_stmts(s.then)
        yield from walk_stmts(s.other)
    elif isinstance(s, While):
        yield from walk_stmts(s.body)


def loops_of(s: Stmt) -> list[While]:
    return [x for x in walk_stmts(s) if isinstance(x, While)]


def subexprs(e: Expr):
    yield e
    if isinstance(e, Unary):
        yield from subexprs(e.arg)
    elif isinstance(e, Binary):
        yield from subexprs(e.lhs)
        yield from subexprs(e.rhs)
    elif isinstance(e, Call):
        for a in e.args:
            yield from subexprs(a)
    elif isinstance(e, Select):
        yield from subexprs(e.arr)
        yield from subexprs(e.idx)
    elif isinstance(e, Store):
        yield from subexprs(e.arr)
        yield from subexprs(e.idx)
        yield from subexprs(e.val)
    elif isinstance(e, Ite):
        yield from subexprs(e.cond)
        yield from subexprs(e.then)
        yield from subexprs(e.other)
    elif isinstance(e, Quant):
        yield from subexprs(e.body)


def stmt_exprs(s: Stmt) -> list[Expr]:
    """Expressions directly owned by ``s`` (not its sub-statements)."""
    if isinstance(s, Decl):
        return [s.init] if s.init is not None else []
    if isinstance(s, Assign):
        return ([s.index] if s.index is not None else []) + [s.rhs]
    if isinstance(s, (If, While)):
        return [s.cond]
    if isinstance(s, Return):
        return [s.value] if s.value is not None else []
    if isinstance(s, (Assert, Assume)):
        return [s.cond]
    return []
