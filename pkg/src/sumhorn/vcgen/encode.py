"""Program to Horn clauses under the three encodings.

``inv``       one invariant predicate per loop (initiation, propagation,
              safety, break and exit clauses).
``sum``       a safe invariant per loop plus a transition predicate
              ``R(ro, m, m_n)`` constrained by the summary rules without
              invariant premises; function-level loops are entered through a
              join predicate that relates declaration-time values to the
              current state.
``combined``  as ``sum`` with the safe invariant added as a premise to the
              summary rules.

Loop-free code between predicate points is collapsed by symbolic execution.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..lang.ast import FALSE, INT, Block, Decl, FunDef, If, Program, Type, Var, While, conj, neg
from ..lang.subst import free_vars, simplify
from ..semantics.domain import base_name
from ..semantics.interp import stmt_vars
from .clauses import Atom, ClauseSystem, PredSym, make_clause
from .symexec import Exit, Fresh, SymExec, SymState, Unsupported, body_cont, fun_cont

ENCODINGS = ("inv", "sum", "combined")


@dataclass
class LoopInfo:
    w: While
    fun: FunDef
    idx: int
    scope: list  # [(name, type)] in scope at the loop head, declaration order
    ghosts: list  # parameters modified by the function (entry copies ``p!e``)
    nested: bool
    ro: list = field(default_factory=list)
    mods: list = field(default_factory=list)
    preds: dict = field(default_factory=dict)

    @property
    def tag(self) -> str:
        return f"{self.fun.name}_{self.idx}"

    @property
    def line(self) -> int:
        return self.w.pos[0] if self.w.pos else 0


def loop_scopes(f: FunDef) -> list[tuple[While, list, bool]]:
    """``(loop, scope at its head, nested?)`` in preorder."""
    out = []

    def walk(stmts, scope, depth):
        scope = list(scope)
        for s in stmts:
            if isinstance(s, Decl):
                scope.append((s.name, s.type))
            elif isinstance(s, Block):
                walk(s.stmts, scope, depth)
            elif isinstance(s, If):
                walk(s.then.stmts, scope, depth)
                walk(s.other.stmts, scope, depth)
            elif isinstance(s, While):
                out.append((s, list(scope), depth > 0))
                walk(s.body.stmts, scope, depth + 1)

    walk(f.body.stmts, list(f.params), 0)
    return out


def _summary_reads(w: While) -> set:
    names = set(stmt_vars(w))
    if w.annot.summary is not None:
        names |= free_vars(w.annot.summary)
    return names


class Encoder:
    def __init__(self, prog: Program, encoding: str = "inv", mutate_break: bool = False):
        if encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {encoding!r}")
        self.prog = prog
        self.mode = encoding
        self.mutate_break = mutate_break
        self.sys = ClauseSystem(spec_funs=prog.spec_funs, encoding=encoding)
        self.fresh = Fresh()
        self.loops: dict[int, LoopInfo] = {}
        self.queue: deque = deque()
        self.done: set = set()
        self.fun: Optional[FunDef] = None
        self._vt: dict = {}
        self._oblige = True
        self._label = ""
        self.funs = {f.name: f for f in prog.funs}
        self.fun_preds: dict = {}
        for f in prog.funs:
            if f.name == "main":
                continue
            pre = PredSym(f"pre_{f.name}", "FunPre", tuple(f.params))
            sig = tuple(f.params) + ((("ret!v", f.ret),) if f.ret is not None else ())
            self.fun_preds[f.name] = (pre, PredSym(f"post_{f.name}", "FunPost", sig))

    # -- bookkeeping -------------------------------------------------------
    def types(self, name: str) -> Type:
        if name in self.fresh.types:
            return self.fresh.types[name]
        if name == "ret!v" and self.fun is not None and self.fun.ret is not None:
            return self.fun.ret
        return self._vt.get(base_name(name), INT)

    def clause(self, body, path, head: Optional[Atom], label: str):
        c = simplify(conj(list(path)))
        if c == FALSE:
            return
        for a in body:
            self.sys.add_pred(a.pred)
        if head is not None:
            self.sys.add_pred(head.pred)
        self.sys.clauses.append(make_clause(body, c, head, self.types, label))

    def symexec(self) -> SymExec:
        return SymExec(self.types, self.fresh, self.on_call, funs=self.prog.funs)

    def on_call(self, st: SymState, call, ty: Type):
        pre, post = self.fun_preds[call.name]
        if self._oblige:
            self.clause(st.atoms, st.path, Atom(pre, call.args), f"{self._label}:call {call.name}")
        g = self.fresh("g", ty)
        s2 = st.copy()
        s2.atoms = st.atoms + (Atom(post, tuple(call.args) + (g,)),)
        return s2, g

    # -- predicates --------------------------------------------------------
    def loop_info(self, w: While) -> LoopInfo:
        return self.loops[id(w)]

    def _prepare(self, f: FunDef):
        ghosts = []
        if f.name != "main" and f.mods:
            ghosts = [(p, t) for p, t in f.params if p in f.mods]
        for k, (w, scope, nested) in enumerate(loop_scopes(f), start=1):
            info = LoopInfo(w, f, k, scope, ghosts, nested)
            mods = w.mods or frozenset()
            info.mods = [(n, t) for n, t in scope if n in mods]
            reads = _summary_reads(w)
            info.ro = [(n, t) for n, t in scope if n in reads and n not in mods]
            gsig = [(f"{p}!e", t) for p, t in ghosts]
            tag = info.tag
            p = info.preds
            if self.mode == "inv":
                p["inv"] = PredSym(f"inv_{tag}", "Inv", tuple(scope + gsig))
                p["after"] = PredSym(f"after_{tag}", "Join", tuple(scope + gsig))
            else:
                p["safe"] = PredSym(f"safe_{tag}", "SafeInv", tuple(scope + gsig))
                rsig = info.ro + info.mods + [(f"{n}!n", t) for n, t in info.mods]
                p["sum"] = PredSym(f"sum_{tag}", "Sum", tuple(rsig))
                if not nested:
                    osig = [(f"{n}!o", t) for n, t in scope]
                    p["head"] = PredSym(f"head_{tag}", "Join", tuple(osig + scope))
                    p["after"] = PredSym(f"after_{tag}", "Join", tuple(osig + scope))
            self.loops[id(w)] = info
            for role, ps in p.items():
                self.sys.meta[ps.name] = {"role": role, "loop": w, "fun": f.name, "info": info}

    def inv_atom(self, L: LoopInfo, st: SymState, key: str) -> Atom:
        args = [st.val[n] for n, _ in L.scope] + [st.orig[p] for p, _ in L.ghosts]
        return Atom(L.preds[key], tuple(args))

    def join_atom(self, L: LoopInfo, st: SymState, key: str) -> Atom:
        args = [st.orig[n] for n, _ in L.scope] + [st.val[n] for n, _ in L.scope]
        return Atom(L.preds[key], tuple(args))

    def sum_atom(self, L: LoopInfo, val: dict, final: list) -> Atom:
        args = [val[n] for n, _ in L.ro] + [val[n] for n, _ in L.mods] + list(final)
        return Atom(L.preds["sum"], tuple(args))

    def state_at(self, L: LoopInfo, orig_suffix: Optional[str] = None) -> SymState:
        """Symbolic state at the loop head named after the predicate parameters."""
        st = SymState()
        for n, _ in L.scope:
            st.val[n] = Var(n)
            st.orig[n] = Var(f"{n}!o") if orig_suffix == "o" else Var(n)
        if orig_suffix != "o":
            for p, _ in L.ghosts:
                st.orig[p] = Var(f"{p}!e")
        return st

    # -- driver ------------------------------------------------------------
    def encode(self) -> ClauseSystem:
        for f in self.prog.funs:
            self._prepare(f)
        for f in self.prog.funs:
            self.fun = f
            self._vt = dict(f.vartypes)
            for n, t in f.params:
                self._vt.setdefault(n, t)
            st = SymState()
            for p, _ in f.params:
                st.val[p] = Var(p)
                st.orig[p] = Var(p)
            if f.name != "main":
                pre, _ = self.fun_preds[f.name]
                st.atoms = (Atom.of(pre),)
            self.flow(fun_cont(f.body), st, ("fun", None), f"{f.name}")
            while self.queue:
                job = self.queue.popleft()
                job()
        self.sys.meta["loops"] = list(self.loops.values())
        return self.sys

    def schedule(self, key, job):
        if key not in self.done:
            self.done.add(key)
            self.queue.append(job)

    # ctx: ("fun", None) | ("inv", L) | ("safe", L) | ("sum", (L, start_val, final))
    def flow(self, cont, st: SymState, ctx, label: str):
        work = [(cont, st)]
        while work:
            cont, st = work.pop(0)
            self._oblige = ctx[0] != "sum"
            self._label = label
            for ex in self.symexec().run(cont, st):
                nxt = self.dispatch(ex, ctx, label)
                if nxt is not None:
                    work.append(nxt)

    def dispatch(self, ex: Exit, ctx, label: str):
        kind, st = ex.kind, ex.state
        mode = ctx[0]
        if kind == "fail":
            if mode != "sum":
                self.clause(st.atoms, st.path, None, f"{label}:assert")
            return None
        if kind in ("ret", "end"):
            f = self.fun
            if mode == "sum" or f.name == "main":
                return None
            _, post = self.fun_preds[f.name]
            args = [st.orig.get(p, st.val.get(p)) for p, _ in f.params]
            if f.ret is not None:
                if ex.value is None:
                    return None
                args.append(ex.value)
            self.clause(st.atoms, st.path, Atom(post, tuple(args)), f"{label}:return")
            return None
        if kind == "iter":
            L = self.loop_info(ex.loop)
            if mode == "inv":
                self.clause(st.atoms, st.path, self.inv_atom(L, st, "inv"), f"{label}:step")
            elif mode == "safe":
                self.clause(st.atoms, st.path, self.inv_atom(L, st, "safe"), f"{label}:step")
            else:
                _, start, final = ctx[1]
                prem = self.sum_atom(L, st.val, final)
                self.clause(st.atoms + (prem,), st.path, self.sum_atom(L, start, final), f"{label}:step")
            return None
        if kind == "brk":
            L = self.loop_info(ex.loop)
            if mode == "inv":
                self.clause(st.atoms, st.path, self.inv_atom(L, st, "after"), f"{label}:break")
            elif mode == "sum":
                _, start, _ = ctx[1]
                target = start if self.mutate_break else st.val
                final = [target[n] for n, _ in L.mods]
                self.clause(st.atoms, st.path, self.sum_atom(L, start, final), f"{label}:break")
            return None
        if kind == "loop":
            L = self.loop_info(ex.loop)
            if mode in ("fun", "inv") and self.mode == "inv":
                self.clause(st.atoms, st.path, self.inv_atom(L, st, "inv"), f"inv_{L.tag}:init")
                outer = ctx if mode == "inv" else ("fun", None)
                self.schedule(id(L.w), lambda: self.inv_loop(L, ex.cont, outer))
                return None
            if mode == "fun":
                self.clause(st.atoms, st.path, self.join_atom(L, st, "head"), f"head_{L.tag}:enter")
                self.schedule(id(L.w), lambda: self.sum_toplevel(L, ex.cont))
                return None
            # nested loop under the summary encodings: inline its summary
            self.schedule(id(L.w), lambda: self.loop_groups(L))
            if mode == "safe":
                self.clause(st.atoms, st.path, self.inv_atom(L, st, "safe"), f"safe_{L.tag}:init")
            st2 = st.copy()
            final = [self.fresh(n, t) for n, t in L.mods]
            st2.atoms = st.atoms + (self.sum_atom(L, st.val, final),)
            for (n, _), v in zip(L.mods, final):
                st2.val[n] = v
            return (ex.cont, st2)
        raise Unsupported(f"exit {kind}")

    # -- per-loop clause groups ---------------------------------------------
    def inv_loop(self, L: LoopInfo, after_cont, outer):
        st = self.state_at(L)
        inv = self.inv_atom(L, st, "inv")
        t = self.symexec().term(L.w.cond, st)
        lab = f"inv_{L.tag}"
        self.clause((inv,), [neg(t)], self.inv_atom(L, st, "after"), f"{lab}:exit")
        body = st.copy()
        body.atoms = (inv,)
        body.path = (t,)
        self.flow(body_cont(L.w), body, ("inv", L), lab)
        a = self.state_at(L)
        a.atoms = (self.inv_atom(L, a, "after"),)
        self.flow(after_cont, a, outer, f"after_{L.tag}")

    def sum_toplevel(self, L: LoopInfo, after_cont):
        lab = f"head_{L.tag}"
        st = self.state_at(L, "o")
        head = self.join_atom(L, st, "head")
        g = self.state_at(L, "o")
        for p, _ in L.ghosts:
            g.orig[p] = Var(f"{p}!o")
        self.clause((head,), [], self.inv_atom(L, g, "safe"), f"{lab}:safe-init")
        final = [Var(f"{n}!n") for n, _ in L.mods]
        post = st.copy()
        for (n, _), v in zip(L.mods, final):
            post.val[n] = v
        self.clause((head, self.sum_atom(L, st.val, final)), [], self.join_atom(L, post, "after"),
                    f"{lab}:use")
        self.loop_groups(L)
        a = self.state_at(L, "o")
        a.atoms = (self.join_atom(L, a, "after"),)
        self.flow(after_cont, a, ("fun", None), f"after_{L.tag}")

    def loop_groups(self, L: LoopInfo):
        key = ("groups", id(L.w))
        if key in self.done:
            return
        self.done.add(key)
        sx = self.symexec()
        # safe invariant: propagation and safety
        st = self.state_at(L)
        safe = self.inv_atom(L, st, "safe")
        t = sx.term(L.w.cond, st)
        body = st.copy()
        body.atoms = (safe,)
        body.path = (t,)
        self.flow(body_cont(L.w), body, ("safe", L), f"safe_{L.tag}")
        # summary rules
        lab = f"sum_{L.tag}"
        start = {n: Var(n) for n, _ in L.ro + L.mods}
        final = [Var(f"{n}!n") for n, _ in L.mods]
        prem = (safe,) if self.mode == "combined" else ()
        rs = SymState(val=dict(start), orig={})
        t = sx.term(L.w.cond, rs)
        self.clause(prem, [neg(t)], self.sum_atom(L, start, [start[n] for n, _ in L.mods]), f"{lab}:exit")
        rs.atoms = prem
        rs.path = (t,)
        self.flow(body_cont(L.w), rs, ("sum", (L, start, final)), lab)


def encode(prog: Program, encoding: str = "inv", mutate_break: bool = False) -> ClauseSystem:
    return Encoder(prog, encoding, mutate_break).encode()


def encode_inv(prog: Program) -> ClauseSystem:
    return encode(prog, "inv")


def encode_sum(prog: Program, mutate_break: bool = False) -> ClauseSystem:
    return encode(prog, "sum", mutate_break)


def encode_combined(prog: Program) -> ClauseSystem:
    return encode(prog, "combined")
