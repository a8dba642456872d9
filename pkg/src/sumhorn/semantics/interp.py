"""Big-step interpreter over finite domains.

Statements map an environment to a list of outcomes:

* ``("reg", env)``  normal completion
* ``("err", None)`` failed assertion
* ``("brk", env)``  ``break`` leaving the innermost loop
* ``("ret", v)``    ``return`` with value ``v`` (``None`` for void)

Assignments of values outside the domain, and array accesses outside the
index range, prune the path.  Function calls are resolved by Kleene iteration
over a call table, so recursive functions get their least-fixpoint meaning.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Optional, Sequence

from ..lang.ast import (
    INT, Assert, Assign, Assume, Block, Break, Call, Decl, Expr, FunDef, If, Program,
    Return, Stmt, Type, While, stmt_exprs, walk_stmts,
)
from ..lang.check import declared_in, mod_set
from ..lang.subst import free_vars
from .domain import Domain, StateSpace
from .evaluate import ExprEval


class Unsupported(Exception):
    pass


def envkey(env: dict) -> tuple:
    return tuple(sorted(env.items()))


def _dedupe(envs: list) -> list:
    seen, out = set(), []
    for e in envs:
        k = envkey(e)
        if k not in seen:
            seen.add(k)
            out.append(e)
    return out


class Interp:
    def __init__(self, prog: Optional[Program], dom: Domain, types: Optional[dict] = None,
                 ghosts: bool = False, origins: bool = False, collect: bool = False):
        self.prog = prog
        self.dom = dom
        self.ev = ExprEval(prog, dom)
        self.funs = {f.name: f for f in (prog.funs if prog else ())}
        self.types: dict[str, Type] = dict(types or {})
        self.ghosts, self.origins, self.collect = ghosts, origins, collect
        self.table: dict = {}
        self.dirty = False
        self.loop_cache: dict = {}
        self.collected: dict = defaultdict(set)

    # -- helpers -------------------------------------------------------------
    def record(self, tag, env):
        if self.collect:
            self.collected[tag].add(envkey(env))

    def ok(self, name: str, v) -> bool:
        ty = self.types.get(name, INT)
        return self.dom.contains(ty, name, v)

    def values(self, e: Expr, env) -> frozenset:
        return self.ev.values(e, env)

    # -- statements ----------------------------------------------------------
    def exec(self, s: Stmt, env: dict) -> list:
        if isinstance(s, Block):
            return self.exec_block(s, env)
        if isinstance(s, Decl):
            self.types[s.name] = s.type
            if s.init is None:
                vals = self.dom.values(s.type, s.name)
            elif isinstance(s.init, Call) and s.init.name in self.funs:
                return self.exec_call(s.name, s.init, env, decl=True)
            else:
                vals = self.values(s.init, env)
            return [("reg", self._bind(env, s.name, v, decl=True)) for v in vals if self.ok(s.name, v)]
        if isinstance(s, Assign):
            if s.index is None:
                if isinstance(s.rhs, Call) and s.rhs.name in self.funs:
                    return self.exec_call(s.name, s.rhs, env)
                return [("reg", self._bind(env, s.name, v)) for v in self.values(s.rhs, env)
                        if self.ok(s.name, v)]
            out = []
            arr = env[s.name]
            for i in self.values(s.index, env):
                if not 0 <= i < len(arr):
                    continue
                for v in self.values(s.rhs, env):
                    lst = list(arr)
                    lst[i] = v
                    nv = tuple(lst)
                    if self.ok(s.name, nv):
                        out.append(("reg", self._bind(env, s.name, nv)))
            return out
        if isinstance(s, If):
            out = []
            cv = self.values(s.cond, env)
            if True in cv:
                out += self.exec_block(s.then, dict(env))
            if False in cv:
                out += self.exec_block(s.other, dict(env))
            return out
        if isinstance(s, While):
            return self.exec_while(s, env)
        if isinstance(s, Break):
            return [("brk", env)]
        if isinstance(s, Return):
            if s.value is None:
                return [("ret", None)]
            return [("ret", v) for v in self.values(s.value, env)]
        if isinstance(s, Assert):
            cv = self.values(s.cond, env)
            out = []
            if False in cv:
                out.append(("err", None))
            if True in cv:
                out.append(("reg", env))
            return out
        if isinstance(s, Assume):
            return [("reg", env)] if True in self.values(s.cond, env) else []
        raise Unsupported(type(s).__name__)

    def _bind(self, env, name, v, decl=False):
        e = dict(env)
        e[name] = v
        if decl and self.origins:
            e[name + "!o"] = v
        return e

    def exec_block(self, b: Block, env: dict) -> list:
        keys0 = frozenset(env)
        cur = [env]
        finals = []
        for s in b.stmts:
            nxt = []
            for e in cur:
                for o in self.exec(s, e):
                    if o[0] == "reg":
                        nxt.append(o[1])
                    else:
                        finals.append(o)
            cur = _dedupe(nxt)
            if not cur:
                break
        out = [("reg", _restrict(e, keys0)) for e in cur]
        for o in finals:
            if o[0] == "brk":
                out.append(("brk", _restrict(o[1], keys0)))
            else:
                out.append(o)
        return out

    def exec_while(self, w: While, env: dict) -> list:
        key = (id(w), envkey(env))
        hit = self.loop_cache.get(key)
        if hit is not None:
            return [(k, dict(v) if isinstance(v, tuple) and k == "reg" else v) for k, v in hit]
        self.record(("entry", w.pos), env)
        seen = {envkey(env)}
        work = [env]
        res = set()
        while work:
            u = work.pop()
            self.record(("head", w.pos), u)
            tv = self.values(w.cond, u)
            if False in tv:
                res.add(("reg", envkey(u)))
            if True in tv:
                for o in self.exec_block(w.body, dict(u)):
                    kind = o[0]
                    if kind == "reg":
                        k = envkey(o[1])
                        if k not in seen:
                            seen.add(k)
                            work.append(o[1])
                    elif kind == "brk":
                        res.add(("reg", envkey(o[1])))
                    elif kind == "err":
                        res.add(("err", None))
                    else:
                        res.add(o)
        outs = sorted(res, key=repr)
        for k, v in outs:
            if k == "reg":
                self.record(("after", w.pos), dict(v))
        self.loop_cache[key] = outs
        return [(k, dict(v) if k == "reg" else v) for k, v in outs]

    # -- calls ---------------------------------------------------------------
    def exec_call(self, target: str, call: Call, env: dict, decl: bool = False) -> list:
        f = self.funs[call.name]
        arg_sets = [self.values(a, env) for a in call.args]
        out = []
        for args in itertools.product(*[sorted(s, key=repr) for s in arg_sets]):
            if not all(self.dom.contains(t, n, v) for (n, t), v in zip(f.params, args)):
                continue
            self.record(("call", call.name), dict(zip([n for n, _ in f.params], args)))
            for o in self.lookup_call(call.name, tuple(args)):
                if o[0] == "err":
                    out.append(("err", None))
                elif o[1] is not None and self.ok(target, o[1]):
                    out.append(("reg", self._bind(env, target, o[1], decl=decl)))
        return out

    def lookup_call(self, name: str, args: tuple) -> frozenset:
        key = (name, args)
        if key not in self.table:
            self.table[key] = frozenset()
            self.dirty = True
        return self.table[key]

    def entry_env(self, f: FunDef, args: Sequence) -> dict:
        env = dict(zip([n for n, _ in f.params], args))
        for (n, _), v in zip(f.params, args):
            if self.ghosts and f.mods and n in f.mods:
                env[n + "!e"] = v
            if self.origins:
                env[n + "!o"] = v
        return env

    def run_function(self, name: str, args: tuple) -> frozenset:
        f = self.funs[name]
        saved = self.types
        self.types = dict(f.vartypes)
        try:
            res = set()
            for o in self.exec_block(f.body, self.entry_env(f, args)):
                if o[0] == "err":
                    res.add(("err",))
                elif o[0] == "ret":
                    res.add(("ret", o[1]))
                elif o[0] == "reg":
                    res.add(("ret", None))
            return frozenset(res)
        finally:
            self.types = saved

    def solve(self, thunk):
        """Run ``thunk`` until the call table is stable; returns its last result."""
        while True:
            self.dirty = False
            self.loop_cache.clear()
            self.collected = defaultdict(set)
            result = thunk()
            changed = False
            for key in list(self.table):
                new = self.run_function(*key)
                if new != self.table[key]:
                    self.table[key] = new
                    changed = True
            if not changed and not self.dirty:
                return result


def _restrict(env: dict, keys: frozenset) -> dict:
    if len(env) == len(keys):
        return env
    return {k: v for k, v in env.items() if k in keys}


# --------------------------------------------------------------------------
# whole-program entry points


def stmt_vars(s: Stmt) -> list[str]:
    """Variables a statement reads or writes, excluding its own locals."""
    names: set[str] = set(mod_set(s))
    for x in walk_stmts(s):
        for e in stmt_exprs(x):
            names |= free_vars(e)
    return sorted(names - declared_in(s))


def run_main(prog: Program, dom: Domain, ghosts=False, origins=False, collect=True) -> Interp:
    """Execute ``main`` from every entry state; returns the interpreter with collected states."""
    it = Interp(prog, dom, ghosts=ghosts, origins=origins, collect=collect)
    main = prog.main
    space = StateSpace(main.params, dom)

    def thunk():
        it.types = dict(main.vartypes)
        outs = []
        for t in space.tuples():
            env = it.entry_env(main, t)
            outs.append((t, it.exec_block(main.body, env)))
        return outs

    it.main_outcomes = it.solve(thunk)
    return it


def function_graph(prog: Program, name: str, dom: Domain) -> dict:
    """Outcomes of ``name`` for every argument tuple in the domain."""
    it = Interp(prog, dom)
    f = prog.fun(name)
    space = StateSpace(f.params, dom)

    def thunk():
        for t in space.tuples():
            it.lookup_call(name, tuple(t))
    it.solve(thunk)
    return {t: it.table.get((name, tuple(t)), frozenset()) for t in space.tuples()}
