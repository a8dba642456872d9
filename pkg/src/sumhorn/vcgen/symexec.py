"""Path-wise symbolic execution between predicate points.

Control is a stack of frames.  A run stops at loops, at the end of a loop
body, at ``break``, ``return`` and failed assertions, and reports one exit
per path.  Calls to program functions are cut by a callback that records
the precondition obligation and returns the atom assumed afterwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from ..lang.ast import (
    FALSE, INT, Assert, Assign, Assume, Binary, Block, Break, Call, Decl, Expr, If, Ite, Nondet,
    Return, Select, Stmt, Store, Type, Unary, Var, While, conj, neg,
)
from ..lang.subst import simplify, substitute


class Unsupported(Exception):
    def __init__(self, feature: str, pos=None):
        self.feature, self.pos = feature, pos
        where = f" at {pos[0]}:{pos[1]}" if pos else ""
        super().__init__(f"unsupported: {feature}{where}")


@dataclass(frozen=True)
class Frame:
    kind: str  # "block" | "body" | "fun"
    stmts: tuple
    i: int = 0
    declared: tuple = ()
    loop: Optional[While] = None

    def advance(self) -> "Frame":
        return replace(self, i=self.i + 1)

    def declare(self, name: str) -> "Frame":
        return replace(self, declared=self.declared + (name,))


Cont = tuple  # tuple[Frame, ...], innermost last


@dataclass
class SymState:
    """Path constraint, assumed atoms, current valuation and origin terms."""

    path: tuple = ()
    atoms: tuple = ()
    val: dict = field(default_factory=dict)
    orig: dict = field(default_factory=dict)

    def copy(self) -> "SymState":
        return SymState(self.path, self.atoms, dict(self.val), dict(self.orig))

    def constraint(self) -> Expr:
        return simplify(conj(list(self.path)))

    def assume(self, c: Expr) -> Optional["SymState"]:
        c = simplify(c)
        if c == FALSE:
            return None
        s = self.copy()
        s.path = self.path + (c,)
        return s

    def drop(self, names) -> "SymState":
        s = self.copy()
        for n in names:
            s.val.pop(n, None)
            s.orig.pop(n, None)
        return s


@dataclass
class Exit:
    kind: str  # "iter" | "brk" | "ret" | "fail" | "end" | "loop"
    state: SymState
    value: Optional[Expr] = None
    loop: Optional[While] = None
    cont: Cont = ()
    site: object = None


class Fresh:
    """Deterministic fresh-name supply; records the sort of every minted name."""

    def __init__(self):
        self.counter = itertools.count(1)
        self.types: dict[str, Type] = {}

    def __call__(self, base: str, ty: Type) -> Var:
        name = f"{base}!{next(self.counter)}"
        self.types[name] = ty
        return Var(name)


CallHook = Callable[[SymState, Call, Type], Optional[tuple]]


class SymExec:
    def __init__(self, types: Callable[[str], Type], fresh: Fresh, on_call: Optional[CallHook] = None,
                 havoc: Optional[Callable[[str, Type], Expr]] = None, funs=()):
        self.types = types
        self.fresh = fresh
        self.on_call = on_call
        self.havoc = havoc or (lambda n, t: fresh(n, t))
        self.funs = {f.name: f for f in funs}

    # -- expressions -------------------------------------------------------
    def term(self, e: Expr, st: SymState) -> Expr:
        """Substitute the valuation into ``e``, minting a variable per ``nondet()``."""
        e = self._nondet(e)
        return simplify(substitute(e, st.val))

    def _nondet(self, e: Expr) -> Expr:
        if isinstance(e, Nondet):
            return self.fresh("nd", INT)
        if isinstance(e, Unary):
            return Unary(e.op, self._nondet(e.arg), e.pos)
        if isinstance(e, Binary):
            return Binary(e.op, self._nondet(e.lhs), self._nondet(e.rhs), e.pos)
        if isinstance(e, Call):
            return Call(e.name, tuple(self._nondet(a) for a in e.args), e.pos)
        if isinstance(e, Select):
            return Select(self._nondet(e.arr), self._nondet(e.idx), e.pos)
        if isinstance(e, Store):
            return Store(self._nondet(e.arr), self._nondet(e.idx), self._nondet(e.val), e.pos)
        if isinstance(e, Ite):
            return Ite(self._nondet(e.cond), self._nondet(e.then), self._nondet(e.other), e.pos)
        return e

    # -- statements --------------------------------------------------------
    def run(self, cont: Cont, st: SymState) -> list[Exit]:
        exits: list[Exit] = []
        stack = [(cont, st)]
        while stack:
            k, st = stack.pop()
            if not k:
                exits.append(Exit("end", st))
                continue
            top = k[-1]
            if top.i >= len(top.stmts):
                if top.kind == "block":
                    stack.append((k[:-1], st.drop(top.declared)))
                elif top.kind == "body":
                    exits.append(Exit("iter", st.drop(top.declared), loop=top.loop))
                else:
                    exits.append(Exit("end", st))
                continue
            s = top.stmts[top.i]
            k2 = k[:-1] + (top.advance(),)
            for item in reversed(self.step(s, k2, st)):
                if isinstance(item, Exit):
                    exits.append(item)
                else:
                    stack.append(item)
        return exits

    def step(self, s: Stmt, k: Cont, st: SymState) -> list:
        if isinstance(s, Block):
            return [(k + (Frame("block", s.stmts),), st)]
        if isinstance(s, Decl):
            k = k[:-1] + (k[-1].declare(s.name),)
            if s.init is None:
                v = self.havoc(s.name, s.type)
            elif isinstance(s.init, Call) and s.init.name in self.funs:
                r = self._call(st, s.init, s.type)
                if r is None:
                    return []
                st, v = r
            else:
                v = self.term(s.init, st)
            st = st.copy()
            st.val[s.name] = v
            st.orig[s.name] = v
            return [(k, st)]
        if isinstance(s, Assign):
            ty = self.types(s.name)
            if s.index is None:
                if isinstance(s.rhs, Call) and s.rhs.name in self.funs:
                    r = self._call(st, s.rhs, ty)
                    if r is None:
                        return []
                    st, v = r
                else:
                    v = self.term(s.rhs, st)
            else:
                v = simplify(Store(st.val[s.name], self.term(s.index, st), self.term(s.rhs, st)))
            st = st.copy()
            st.val[s.name] = v
            return [(k, st)]
        if isinstance(s, If):
            c = self.term(s.cond, st)
            out = []
            a = st.assume(c)
            if a is not None:
                out.append((k + (Frame("block", s.then.stmts),), a))
            b = st.assume(neg(c))
            if b is not None:
                out.append((k + (Frame("block", s.other.stmts),), b))
            return out
        if isinstance(s, While):
            return [Exit("loop", st, loop=s, cont=k)]
        if isinstance(s, Break):
            dropped = []
            for fr in reversed(k):
                dropped.extend(fr.declared)
                if fr.kind == "body":
                    return [Exit("brk", st.drop(dropped), loop=fr.loop)]
            raise Unsupported("break outside a loop", s.pos)
        if isinstance(s, Return):
            v = None if s.value is None else self.term(s.value, st)
            return [Exit("ret", st, value=v)]
        if isinstance(s, Assert):
            c = self.term(s.cond, st)
            out = []
            bad = st.assume(neg(c))
            if bad is not None:
                out.append(Exit("fail", bad, site=s))
            good = st.assume(c)
            if good is not None:
                out.append((k, good))
            return out
        if isinstance(s, Assume):
            a = st.assume(self.term(s.cond, st))
            return [] if a is None else [(k, a)]
        raise Unsupported(type(s).__name__, getattr(s, "pos", None))

    def _call(self, st: SymState, call: Call, ty: Type):
        if self.on_call is None:
            raise Unsupported("function call", call.pos)
        args = tuple(self.term(a, st) for a in call.args)
        return self.on_call(st, Call(call.name, args, call.pos), ty)


def fun_cont(body: Block) -> Cont:
    return (Frame("fun", body.stmts),)


def body_cont(w: While) -> Cont:
    return (Frame("body", w.body.stmts, loop=w),)
