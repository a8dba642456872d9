"""Static checks: scoping, typing, annotation placement and mod-sets."""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .ast import (
    ARITH_OPS, ARRAY, BOOL, BOOL_OPS, CMP_OPS, INT, Assert, Assign, Assume, Binary, Block,
    BoolLit, Break, Call, Decl, Expr, FunDef, If, IntLit, Ite, Nondet, Old, Pos, Program,
    Quant, Return, Select, SpecFun, Stmt, Store, Type, Unary, Var, While, subexprs, walk_stmts,
)


class CheckError(Exception):
    """Base class for static errors; carries the offending node position."""

    def __init__(self, msg: str, pos: Pos = (0, 0)):
        self.msg, self.pos = msg, pos
        super().__init__(f"{pos[0]}:{pos[1]}: {msg}")


class TypeCheckError(CheckError):
    pass


class ScopeError(CheckError):
    pass


class AnnotError(CheckError):
    pass


# --------------------------------------------------------------------------
# mod-sets


def mod_set(s: Stmt) -> frozenset[str]:
    """Variables assigned anywhere inside ``s`` (array stores count for the array)."""
    return frozenset(x.name for x in walk_stmts(s) if isinstance(x, Assign))


def declared_in(s: Stmt) -> frozenset[str]:
    return frozenset(x.name for x in walk_stmts(s) if isinstance(x, Decl))


def loop_mods(w: While) -> frozenset[str]:
    """Mod-set of a loop body restricted to variables that outlive the loop."""
    return mod_set(w.body) - declared_in(w.body)


# --------------------------------------------------------------------------
# checker


class _Ctx:
    """Expression context: what constructs are permitted where."""

    def __init__(self, annot: bool = False, old_ok: frozenset = frozenset(), allow_old: bool = False):
        self.annot = annot
        self.allow_old = allow_old
        self.old_ok = old_ok


_PROG = _Ctx()


class Checker:
    def __init__(self, prog: Program):
        self.prog = prog
        self.specs = {f.name: f for f in prog.spec_funs}
        self.funs = {f.name: f for f in prog.funs}

    # -- program -----------------------------------------------------------
    def run(self) -> Program:
        names = set()
        for f in list(self.prog.spec_funs) + list(self.prog.funs):
            if f.name in names:
                raise ScopeError(f"duplicate function {f.name!r}", f.pos)
            names.add(f.name)
        if "main" not in self.funs:
            raise ScopeError("no entry function 'main'")
        specs = tuple(self.check_spec(s) for s in self.prog.spec_funs)
        funs = tuple(self.check_fun(f) for f in self.prog.funs)
        return Program(specs, funs)

    def check_spec(self, sf: SpecFun) -> SpecFun:
        scope = self._params(sf.params, sf.pos)
        ctx = _Ctx(annot=True)
        for guard, rhs in sf.cases:
            self.expect(guard, BOOL, [scope], ctx, spec=True)
            self.expect(rhs, sf.ret, [scope], ctx, spec=True)
        return sf

    def _params(self, params, pos) -> dict:
        scope: dict[str, Type] = {}
        for name, ty in params:
            if name in scope:
                raise ScopeError(f"duplicate parameter {name!r}", pos)
            if name in self.specs or name in self.funs:
                raise ScopeError(f"parameter {name!r} shadows a function", pos)
            scope[name] = ty
        return scope

    def check_fun(self, f: FunDef) -> FunDef:
        self.fun = f
        scope = self._params(f.params, f.pos)
        self.vartypes: dict[str, Type] = dict(scope)
        body = self.block(f.body, [scope], loop_depth=0)
        if f.ret is not None and not _always_returns(body):
            raise TypeCheckError(f"function {f.name!r} may end without returning a value", f.pos)
        mods = mod_set(body) & frozenset(n for n, _ in f.params)
        return replace(f, body=body, mods=mods, vartypes=tuple(self.vartypes.items()))

    # -- statements --------------------------------------------------------
    def block(self, b: Block, scopes: list, loop_depth: int) -> Block:
        inner = scopes + [{}]
        return Block(tuple(self.stmt(s, inner, loop_depth) for s in b.stmts), b.pos)

    def declare(self, name: str, ty: Type, scopes: list, pos: Pos):
        if any(name in sc for sc in scopes):
            raise ScopeError(f"redeclaration of {name!r}", pos)
        if name in self.specs or name in self.funs:
            raise ScopeError(f"variable {name!r} shadows a function", pos)
        prev = self.vartypes.get(name)
        if prev is not None and prev != ty:
            raise ScopeError(f"{name!r} reused with a different type", pos)
        self.vartypes[name] = ty
        scopes[-1][name] = ty

    def lookup(self, name: str, scopes: list, pos: Pos) -> Type:
        for sc in reversed(scopes):
            if name in sc:
                return sc[name]
        raise ScopeError(f"undeclared variable {name!r}", pos)

    def stmt(self, s: Stmt, scopes: list, loop_depth: int) -> Stmt:
        if isinstance(s, Block):
            return self.block(s, scopes, loop_depth)
        if isinstance(s, Decl):
            if s.init is not None:
                self.rhs(s.init, s.type, scopes, s.pos)
            self.declare(s.name, s.type, scopes, s.pos)
            return s
        if isinstance(s, Assign):
            ty = self.lookup(s.name, scopes, s.pos)
            if s.index is not None:
                if ty != ARRAY:
                    raise TypeCheckError(f"{s.name!r} is not an array", s.pos)
                self.expect(s.index, INT, scopes, _PROG)
                self.expect(s.rhs, INT, scopes, _PROG)
            else:
                self.rhs(s.rhs, ty, scopes, s.pos)
            return s
        if isinstance(s, If):
            self.expect(s.cond, BOOL, scopes, _PROG)
            return If(s.cond, self.block(s.then, scopes, loop_depth),
                      self.block(s.other, scopes, loop_depth), s.pos)
        if isinstance(s, While):
            if any(isinstance(x, Nondet) for x in subexprs(s.cond)):
                raise TypeCheckError("nondet() is not allowed in a loop condition", s.cond.pos)
            self.expect(s.cond, BOOL, scopes, _PROG)
            body = self.block(s.body, scopes, loop_depth + 1)
            w = replace(s, body=body)
            mods = loop_mods(w)
            if s.annot.invariant is not None:
                self.expect(s.annot.invariant, BOOL, scopes, _Ctx(annot=True))
            if s.annot.summary is not None:
                self.expect(s.annot.summary, BOOL, scopes,
                            _Ctx(annot=True, old_ok=mods, allow_old=True))
            return replace(w, mods=mods)
        if isinstance(s, Break):
            if loop_depth == 0:
                raise ScopeError("break outside of a loop", s.pos)
            return s
        if isinstance(s, Return):
            ret = self.fun.ret
            if ret is None:
                if s.value is not None:
                    raise TypeCheckError("void function returns a value", s.pos)
            else:
                if s.value is None:
                    raise TypeCheckError("missing return value", s.pos)
                self.expect(s.value, ret, scopes, _PROG)
            return s
        if isinstance(s, (Assert, Assume)):
            self.expect(s.cond, BOOL, scopes, _PROG)
            return s
        raise TypeCheckError(f"unknown statement {type(s).__name__}", getattr(s, "pos", (0, 0)))

    def rhs(self, e: Expr, ty: Type, scopes: list, pos: Pos):
        """Right-hand side of an assignment; the only place a function call may appear."""
        if isinstance(e, Call) and e.name in self.funs:
            f = self.funs[e.name]
            if f.name == "main":
                raise ScopeError("main cannot be called", e.pos)
            if f.ret is None:
                raise TypeCheckError(f"void function {e.name!r} used as a value", e.pos)
            if f.ret != ty:
                raise TypeCheckError(f"{e.name!r} returns {f.ret}, expected {ty}", e.pos)
            self._args(e, f.params, scopes, _PROG)
            return
        self.expect(e, ty, scopes, _PROG)

    def _args(self, e: Call, params, scopes, ctx, spec=False):
        if len(e.args) != len(params):
            raise TypeCheckError(f"{e.name!r} expects {len(params)} arguments", e.pos)
        for a, (_, pty) in zip(e.args, params):
            self.expect(a, pty, scopes, ctx, spec)

    # -- expressions -------------------------------------------------------
    def expect(self, e: Expr, ty: Type, scopes: list, ctx: _Ctx, spec: bool = False):
        got = self.expr(e, scopes, ctx, spec)
        if got != ty:
            raise TypeCheckError(f"expected {ty}, got {got}", e.pos)

    def expr(self, e: Expr, scopes: list, ctx: _Ctx, spec: bool = False) -> Type:
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, Var):
            return self.lookup(e.name, scopes, e.pos)
        if isinstance(e, Old):
            if not ctx.allow_old:
                raise AnnotError("old() is only allowed in loop summaries", e.pos)
            ty = self.lookup(e.name, scopes, e.pos)
            if e.name not in ctx.old_ok:
                raise AnnotError(f"old({e.name}) refers to a variable the loop does not modify", e.pos)
            return ty
        if isinstance(e, Nondet):
            if ctx.annot or spec:
                raise AnnotError("nondet() is not allowed in annotations", e.pos)
            return INT
        if isinstance(e, Unary):
            want = INT if e.op == "-" else BOOL
            self.expect(e.arg, want, scopes, ctx, spec)
            return want
        if isinstance(e, Binary):
            if e.op in ARITH_OPS:
                self.expect(e.lhs, INT, scopes, ctx, spec)
                self.expect(e.rhs, INT, scopes, ctx, spec)
                if e.op in ("/", "%") and isinstance(e.rhs, IntLit) and e.rhs.value == 0:
                    raise TypeCheckError("division by literal zero", e.pos)
                return INT
            if e.op in BOOL_OPS:
                self.expect(e.lhs, BOOL, scopes, ctx, spec)
                self.expect(e.rhs, BOOL, scopes, ctx, spec)
                return BOOL
            if e.op in ("==", "!="):
                lt = self.expr(e.lhs, scopes, ctx, spec)
                self.expect(e.rhs, lt, scopes, ctx, spec)
                if lt == ARRAY and not ctx.annot:
                    raise TypeCheckError("array comparison outside annotations", e.pos)
                return BOOL
            if e.op in CMP_OPS:
                self.expect(e.lhs, INT, scopes, ctx, spec)
                self.expect(e.rhs, INT, scopes, ctx, spec)
                return BOOL
            raise TypeCheckError(f"unknown operator {e.op!r}", e.pos)
        if isinstance(e, Call):
            if e.name in self.specs:
                sf = self.specs[e.name]
                self._args(e, sf.params, scopes, ctx, spec)
                return sf.ret
            if e.name in self.funs:
                raise TypeCheckError(
                    f"call to {e.name!r} must be the whole right-hand side of an assignment", e.pos)
            raise ScopeError(f"unknown function {e.name!r}", e.pos)
        if isinstance(e, Select):
            self.expect(e.arr, ARRAY, scopes, ctx, spec)
            self.expect(e.idx, INT, scopes, ctx, spec)
            return INT
        if isinstance(e, Store):
            self.expect(e.arr, ARRAY, scopes, ctx, spec)
            self.expect(e.idx, INT, scopes, ctx, spec)
            self.expect(e.val, INT, scopes, ctx, spec)
            return ARRAY
        if isinstance(e, Ite):
            self.expect(e.cond, BOOL, scopes, ctx, spec)
            t = self.expr(e.then, scopes, ctx, spec)
            self.expect(e.other, t, scopes, ctx, spec)
            return t
        if isinstance(e, Quant):
            if not ctx.annot:
                raise TypeCheckError("quantifier outside annotations", e.pos)
            bound = {}
            for name, ty in e.vars:
                if name in bound or any(name in sc for sc in scopes):
                    raise ScopeError(f"bound variable {name!r} clashes with a variable in scope", e.pos)
                bound[name] = ty
            self.expect(e.body, BOOL, scopes + [bound], ctx, spec)
            return BOOL
        raise TypeCheckError(f"unknown expression {type(e).__name__}", getattr(e, "pos", (0, 0)))


def _always_returns(s: Stmt) -> bool:
    if isinstance(s, Return):
        return True
    if isinstance(s, Block):
        return any(_always_returns(c) for c in s.stmts)
    if isinstance(s, If):
        return _always_returns(s.then) and _always_returns(s.other)
    if isinstance(s, Assert):
        return s.cond == BoolLit(False)
    if isinstance(s, Assume):
        return s.cond == BoolLit(False)
    return False


def check(p: Program) -> Program:
    """Resolve names, type every expression and record mod-sets."""
    return Checker(p).run()


def check_formula(e: Expr, env: dict, prog: Optional[Program] = None, mods=frozenset(),
                  allow_old: bool = True) -> Type:
    """Type a standalone annotation formula against ``env`` (name -> Type)."""
    c = Checker(prog or Program((), ()))
    return c.expr(e, [dict(env)], _Ctx(annot=True, old_ok=frozenset(mods), allow_old=allow_old))
