"""Expression evaluation over concrete states.

Formulas are compiled to closures once and then applied to many states.
Program expressions may be nondeterministic (``nondet()``, division by zero,
undefined spec-function applications); :func:`eval_expr` returns every
possible value for those.
"""

from __future__ import annotations

import itertools
import warnings
from typing import Callable, Mapping, Optional

from ..lang.ast import (
    BOOL, CMP_OPS, Binary, BoolLit, Call, Expr, IntLit, Ite, Nondet, Old, Program, Quant, Select,
    Store, Unary, Var, subexprs,
)
from ..lang.subst import ediv, emod
from .domain import Domain


class Undefined(Exception):
    """Evaluation has no determined value (spec function diverges, index out of range...)."""


class DivByZero(Undefined):
    pass


class NondetValue(Undefined):
    pass


class SpecEval:
    """Evaluates spec-function applications by unfolding their defining cases."""

    def __init__(self, prog: Optional[Program], max_depth: int = 150):
        self.specs = {f.name: f for f in (prog.spec_funs if prog else ())}
        self.memo: dict = {}
        self.max_depth = max_depth
        self._active: set = set()
        self._compiled: dict = {}

    def _cases(self, name):
        c = self._compiled.get(name)
        if c is None:
            sf = self.specs[name]
            params = [n for n, _ in sf.params]
            c = (params, [(compile_formula(g, self), compile_formula(r, self)) for g, r in sf.cases])
            self._compiled[name] = c
        return c

    def apply(self, name: str, args: tuple):
        key = (name, args)
        if key in self.memo:
            v = self.memo[key]
            if v is Undefined:
                raise Undefined(f"{name}{args}")
            return v
        if key in self._active or len(self._active) > self.max_depth:
            raise Undefined(f"{name}{args} does not terminate")
        params, cases = self._cases(name)
        env = dict(zip(params, args))
        self._active.add(key)
        try:
            for g, r in cases:
                try:
                    if g(env, None):
                        v = r(env, None)
                        self.memo[key] = v
                        return v
                except Undefined:
                    self.memo[key] = Undefined
                    raise
            self.memo[key] = Undefined
            raise Undefined(f"no case of {name} applies to {args}")
        finally:
            self._active.discard(key)


Fn = Callable[[Mapping, Optional[Mapping]], object]


def compile_formula(e: Expr, specs: Optional[SpecEval] = None, dom: Domain = Domain(),
                     total: bool = False) -> Fn:
    """Compile a deterministic formula to ``fn(env, old_env)``.

    With ``total`` a comparison whose operands are undefined is false instead
    of raising :class:`Undefined`.
    """
    return _Compiler(specs, dom, total).c(e)


class _Compiler:
    def __init__(self, specs, dom, total=False):
        self.specs = specs
        self.dom = dom
        self.total = total

    def c(self, e: Expr) -> Fn:
        if isinstance(e, IntLit):
            v = e.value
            return lambda env, old: v
        if isinstance(e, BoolLit):
            v = e.value
            return lambda env, old: v
        if isinstance(e, Var):
            n = e.name

            def var(env, old):
                try:
                    return env[n]
                except KeyError:
                    raise Undefined(f"unbound {n}") from None
            return var
        if isinstance(e, Old):
            n = e.name

            def old_(env, old):
                if old is None:
                    raise Undefined(f"old({n}) without pre-state")
                return old[n]
            return old_
        if isinstance(e, Nondet):
            def nd(env, old):
                raise NondetValue("nondet")
            return nd
        if isinstance(e, Unary):
            a = self.c(e.arg)
            if e.op == "-":
                return lambda env, old: -a(env, old)
            return lambda env, old: not a(env, old)
        if isinstance(e, Binary):
            return self.binary(e)
        if isinstance(e, Call):
            args = [self.c(a) for a in e.args]
            name = e.name
            specs = self.specs

            def call(env, old):
                if specs is None or name not in specs.specs:
                    raise Undefined(f"unknown function {name}")
                return specs.apply(name, tuple(a(env, old) for a in args))
            return call
        if isinstance(e, Select):
            arr, idx = self.c(e.arr), self.c(e.idx)

            def sel(env, old):
                a, i = arr(env, old), idx(env, old)
                if not 0 <= i < len(a):
                    raise Undefined("index out of range")
                return a[i]
            return sel
        if isinstance(e, Store):
            arr, idx, val = self.c(e.arr), self.c(e.idx), self.c(e.val)

            def sto(env, old):
                a, i = arr(env, old), idx(env, old)
                if not 0 <= i < len(a):
                    raise Undefined("index out of range")
                lst = list(a)
                lst[i] = val(env, old)
                return tuple(lst)
            return sto
        if isinstance(e, Ite):
            c, t, o = self.c(e.cond), self.c(e.then), self.c(e.other)
            return lambda env, old: t(env, old) if c(env, old) else o(env, old)
        if isinstance(e, Quant):
            names = [n for n, _ in e.vars]
            doms = [self.dom.values(t, n) for n, t in e.vars]
            body = self.c(e.body)
            want = e.kind == "exists"

            def quant(env, old):
                local = dict(env)
                for combo in itertools.product(*doms):
                    local.update(zip(names, combo))
                    if bool(body(local, old)) == want:
                        return want
                return not want
            return quant
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    def binary(self, e: Binary) -> Fn:
        fn = self._binary(e)
        if not self.total or e.op not in CMP_OPS:
            return fn

        def atom(env, old):
            try:
                return fn(env, old)
            except Undefined:
                return False
        return atom

    def _binary(self, e: Binary) -> Fn:
        op = e.op
        l, r = self.c(e.lhs), self.c(e.rhs)
        if op == "&&":
            return lambda env, old: bool(l(env, old)) and bool(r(env, old))
        if op == "||":
            return lambda env, old: bool(l(env, old)) or bool(r(env, old))
        if op == "==>":
            return lambda env, old: (not l(env, old)) or bool(r(env, old))
        if op == "<==>":
            return lambda env, old: bool(l(env, old)) == bool(r(env, old))
        if op == "+":
            return lambda env, old: l(env, old) + r(env, old)
        if op == "-":
            return lambda env, old: l(env, old) - r(env, old)
        if op == "*":
            return lambda env, old: l(env, old) * r(env, old)
        if op in ("/", "%"):
            f = ediv if op == "/" else emod

            def div(env, old):
                b = r(env, old)
                if b == 0:
                    raise DivByZero("division by zero")
                return f(l(env, old), b)
            return div
        if op == "==":
            return lambda env, old: l(env, old) == r(env, old)
        if op == "!=":
            return lambda env, old: l(env, old) != r(env, old)
        if op == "<":
            return lambda env, old: l(env, old) < r(env, old)
        if op == "<=":
            return lambda env, old: l(env, old) <= r(env, old)
        if op == ">":
            return lambda env, old: l(env, old) > r(env, old)
        if op == ">=":
            return lambda env, old: l(env, old) >= r(env, old)
        raise TypeError(f"unknown operator {op}")


# --------------------------------------------------------------------------
# nondeterministic evaluation of program expressions


class ExprEval:
    """Set-valued evaluation with a compiled fast path for deterministic expressions."""

    def __init__(self, prog: Optional[Program], dom: Domain, specs: Optional[SpecEval] = None):
        self.dom = dom
        self.specs = specs or SpecEval(prog)
        self._cache: dict = {}

    def compiled(self, e: Expr) -> Fn:
        key = id(e)
        hit = self._cache.get(key)
        if hit is None or hit[0] is not e:
            hit = (e, compile_formula(e, self.specs, self.dom))
            self._cache[key] = hit
        return hit[1]

    def values(self, e: Expr, env: Mapping, ty=None) -> frozenset:
        try:
            return frozenset((self.compiled(e)(env, None),))
        except Undefined:
            pass
        return frozenset(self._slow(e, env))

    def _range(self):
        return set(self.dom.int_range())

    def _slow(self, e: Expr, env) -> set:
        if isinstance(e, Nondet):
            return self._range()
        if isinstance(e, (IntLit, BoolLit, Var, Old)):
            return {self.compiled(e)(env, None)}
        if isinstance(e, Unary):
            a = self._slow(e.arg, env)
            return {-v for v in a} if e.op == "-" else {not v for v in a}
        if isinstance(e, Binary):
            ls = self._slow(e.lhs, env)
            rs = self._slow(e.rhs, env)
            out = set()
            for a in ls:
                for b in rs:
                    out |= self._apply(e.op, a, b)
            return out
        if isinstance(e, Call):
            arg_sets = [sorted(self._slow(a, env), key=repr) for a in e.args]
            out = set()
            for args in itertools.product(*arg_sets):
                try:
                    out.add(self.specs.apply(e.name, tuple(args)))
                except Undefined:
                    sf = self.specs.specs.get(e.name)
                    out |= {False, True} if sf is not None and sf.ret == BOOL else self._range()
            return out
        if isinstance(e, Select):
            out = set()
            for a in self._slow(e.arr, env):
                for i in self._slow(e.idx, env):
                    if 0 <= i < len(a):
                        out.add(a[i])
            return out
        if isinstance(e, Ite):
            out = set()
            for c in self._slow(e.cond, env):
                out |= self._slow(e.then if c else e.other, env)
            return out
        return {self.compiled(e)(env, None)}

    def _apply(self, op, a, b) -> set:
        if op in ("/", "%"):
            if b == 0:
                warnings.warn("division by zero yields an unconstrained value", RuntimeWarning)
                return self._range()
            return {ediv(a, b) if op == "/" else emod(a, b)}
        return {{
            "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
            "==": lambda: a == b, "!=": lambda: a != b, "<": lambda: a < b, "<=": lambda: a <= b,
            ">": lambda: a > b, ">=": lambda: a >= b, "&&": lambda: bool(a and b),
            "||": lambda: bool(a or b), "==>": lambda: bool((not a) or b),
            "<==>": lambda: bool(a) == bool(b),
        }[op]()}


def eval_expr(e: Expr, state: Mapping, dom: Domain = Domain(), prog: Optional[Program] = None) -> frozenset:
    """All values ``e`` may take in ``state``."""
    return ExprEval(prog, dom).values(e, state)


def is_deterministic(e: Expr) -> bool:
    return not any(isinstance(x, Nondet) for x in subexprs(e))
