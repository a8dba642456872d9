"""Verification conditions for annotated loops via specification statements.

A loop ``while (t) invariant I; summary R; B`` is checked through three
groups of obligations and replaced by the statement ``[mods : I, R]`` in its
context:

* entry: the context establishes ``I``; the continuation sees ``R`` with
  ``old`` bound to the entry values;
* exit: ``I ∧ ¬t`` gives ``R`` with ``old(x)`` read as ``x``;
* step: per body path from ``I ∧ t``, ``I`` holds again before the
  recursive spec statement and its ``R`` propagates back to the iteration
  entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ..lang.ast import (
    FALSE, INT, NOPOS, TRUE, Assert, Assign, Assume, Binary, Block, Break, Call, Decl, Expr, If, Ite,
    Nondet, Program, Return, Select, Store, Stmt, Type, Unary, Var, While, conj, implies, neg, subexprs,
)
from ..lang.check import loop_mods
from ..lang.pretty import pp_expr
from ..lang.subst import free_vars, old_vars, simplify, substitute


class MissingAnnot(Exception):
    pass


class NestedUnannotated(MissingAnnot):
    pass


class Unsupported(Exception):
    pass


@dataclass(frozen=True)
class SpecStatement:
    """``[mods : pre, post]``; ``post`` may mention ``old(x)`` for ``x`` in ``mods``."""

    mods: tuple
    pre: Expr = TRUE
    post: Expr = TRUE

    def __post_init__(self):
        extra = old_vars(self.post) - set(self.mods)
        if extra:
            raise ValueError(f"old() of unmodified {', '.join(sorted(extra))}")


def fresh_name(base: str, avoid) -> str:
    name = f"{base}0"
    k = 1
    while name in avoid:
        name = f"{base}0_{k}"
        k += 1
    return name


def spec_post(st: SpecStatement, avoid=frozenset()):
    """``(post, hypothesis, binding)``: ``post`` with ``old(x)`` as fresh ``x0``.

    ``hypothesis`` is the precondition over the same fresh names and
    ``binding`` maps each modified variable to its fresh name.
    """
    avoid = set(avoid) | free_vars(st.pre) | free_vars(st.post)
    binding = {}
    for x in st.mods:
        binding[x] = fresh_name(x, avoid)
        avoid.add(binding[x])
    to0 = {x: Var(n) for x, n in binding.items()}
    return substitute(st.post, {}, to0), substitute(st.pre, to0), binding


@dataclass
class VC:
    name: str
    hypotheses: list
    goal: Expr
    origin: tuple = NOPOS
    types: dict = field(default_factory=dict, repr=False)

    @property
    def formula(self) -> Expr:
        return implies(conj(self.hypotheses), self.goal)

    @property
    def premise(self) -> str:
        """``entry``, ``use``, ``exit``, ``inv``, ``sum`` or ``assert``."""
        return self.name.rsplit(":", 1)[-1].split("@")[0]

    @property
    def group(self) -> str:
        """Rule premise: 1 (context), 2 (exit), 3 (body), or ``assert``."""
        return {"entry": "1", "use": "1", "exit": "2", "inv": "3", "sum": "3"}.get(self.premise, "assert")

    def consts(self) -> tuple:
        return tuple((n, self.types.get(n, INT)) for n in sorted(free_vars(self.formula)))

    def __str__(self) -> str:
        hyps = " && ".join(pp_expr(h) for h in self.hypotheses) or "true"
        return f"[{self.name}] {hyps} ==> {pp_expr(self.goal)}"


@dataclass
class _State:
    sigma: dict
    hyps: list

    def copy(self) -> "_State":
        return _State(dict(self.sigma), list(self.hyps))


class VCGen:
    """Forward symbolic execution that replaces annotated loops by spec statements."""

    def __init__(self, prog: Optional[Program] = None, types: Optional[dict] = None):
        self.prog = prog
        self.types = dict(types or {})
        self.vcs: list[VC] = []
        self.counter = itertools.count(1)
        self.loops = 0
        self.specs = {f.name for f in prog.spec_funs} if prog else set()

    # -- terms ---------------------------------------------------------------
    def mint(self, base: str, ty: Type) -> Var:
        name = f"{base}!{next(self.counter)}"
        self.types[name] = ty
        return Var(name)

    def term(self, e: Expr, st: _State) -> Expr:
        for x in subexprs(e):
            if isinstance(x, Call) and x.name not in self.specs:
                raise Unsupported(f"call to {x.name} in Hoare mode")
        if any(isinstance(x, Nondet) for x in subexprs(e)):
            e = self._nondet(e)
        return substitute(e, st.sigma)

    def _nondet(self, e: Expr) -> Expr:
        if isinstance(e, Nondet):
            return self.mint("nd", INT)
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

    def emit(self, name: str, st: _State, goal: Expr, pos=NOPOS):
        self.vcs.append(VC(name, list(st.hyps), goal, pos, self.types))

    # -- statements ----------------------------------------------------------
    def run(self, stmts, st: _State, ctx: str, in_loop: bool = False) -> list[_State]:
        states = [st]
        for s in stmts:
            nxt = []
            for cur in states:
                nxt += self.stmt(s, cur, ctx, in_loop)
            states = nxt
        return states

    def stmt(self, s: Stmt, st: _State, ctx: str, in_loop: bool) -> list[_State]:
        if isinstance(s, Block):
            return self.run(s.stmts, st, ctx, in_loop)
        if isinstance(s, Decl):
            self.types.setdefault(s.name, s.type)
            st.sigma[s.name] = self.mint(s.name, s.type) if s.init is None else self.term(s.init, st)
            return [st]
        if isinstance(s, Assign):
            rhs = self.term(s.rhs, st)
            if s.index is not None:
                rhs = Store(st.sigma.get(s.name, Var(s.name)), self.term(s.index, st), rhs)
            st.sigma[s.name] = rhs
            return [st]
        if isinstance(s, Assume):
            st.hyps.append(self.term(s.cond, st))
            return [st]
        if isinstance(s, Assert):
            c = self.term(s.cond, st)
            self.emit(f"{ctx}:assert@{s.pos[0] if s.pos else 0}", st, c, s.pos)
            st.hyps.append(c)
            return [st]
        if isinstance(s, If):
            c = self.term(s.cond, st)
            out = []
            for cond, blk in ((c, s.then), (neg(c), s.other)):
                if simplify(cond) == FALSE:
                    continue
                br = st.copy()
                br.hyps.append(cond)
                out += self.run(blk.stmts, br, ctx, in_loop)
            return out
        if isinstance(s, Break):
            raise Unsupported("break is not supported in Hoare mode")
        if isinstance(s, Return):
            if in_loop:
                raise Unsupported("return inside a loop is not supported in Hoare mode")
            return []
        if isinstance(s, While):
            return self.loop(s, st, in_loop)
        raise TypeError(f"unknown statement {type(s).__name__}")

    def spec_statement(self, st: _State, spec: SpecStatement, name: str, pos) -> _State:
        """Assert ``pre``, havoc ``mods``, assume ``post`` with ``old`` at the pre-state."""
        pre = substitute(spec.pre, st.sigma)
        self.emit(name, st, pre, pos)
        post, hyp, binding = spec_post(spec, set(st.sigma) | set(self.types))
        out = st.copy()
        pre_vals = {binding[x]: st.sigma.get(x, Var(x)) for x in spec.mods}
        for x in spec.mods:
            out.sigma[x] = self.mint(x, self.types.get(x, INT))
        sigma = dict(out.sigma)
        sigma.update(pre_vals)
        out.hyps.append(substitute(hyp, sigma))
        out.hyps.append(substitute(post, sigma))
        return out

    def loop(self, w, st: _State, nested: bool, trailing: Optional[Stmt] = None) -> list[_State]:
        self.loops += 1
        tag = f"loop{self.loops}"
        I, R = w.annot.invariant, w.annot.summary
        if I is None or R is None:
            missing = "invariant" if I is None else "summary"
            cls = NestedUnannotated if nested else MissingAnnot
            raise cls(f"loop at line {w.pos[0] if w.pos else 0} has no {missing}")
        mods = tuple(sorted(loop_mods(w)))
        spec = SpecStatement(mods, I, R)
        self.premises(w, tag, spec, set(st.sigma), trailing)
        return [self.spec_statement(st, spec, f"{tag}:entry", w.pos)]

    def premises(self, w, tag: str, spec: SpecStatement, scope, trailing: Optional[Stmt] = None):
        ident = {x: Var(x) for x in scope}
        back = {x: Var(x) for x in spec.mods}
        # exit: I ∧ ¬t, then the trailing command (skip by default), gives R at the entry values
        st = _State(dict(ident), [spec.pre, neg(w.cond)])
        ends = [st] if trailing is None else self.run([trailing], st, f"{tag}:exit", True)
        for end in ends:
            goal = substitute(spec.post, {x: end.sigma[x] for x in spec.mods}, back)
            self.emit(f"{tag}:exit", end, goal, w.pos)
        # step: per body path, re-establish I, then propagate R backwards
        if simplify(w.cond) == FALSE:
            return
        st = _State(dict(ident), [spec.pre, w.cond])
        for k, end in enumerate(self.run(w.body.stmts, st, f"{tag}:body", True), start=1):
            after = self.spec_statement(end, spec, f"{tag}:path{k}:inv", w.pos)
            goal = substitute(spec.post, {x: after.sigma[x] for x in spec.mods}, back)
            self.emit(f"{tag}:path{k}:sum", after, goal, w.pos)


def _freshen(vcs: list[VC], counter) -> list[VC]:
    """Give every VC its own copies of minted variables."""
    out = []
    for vc in vcs:
        minted = sorted(n for n in free_vars(vc.formula) if "!" in n)
        ren = {n: f"{n.split('!')[0]}!{next(counter)}" for n in minted}
        sub = {n: Var(m) for n, m in ren.items()}
        types = dict(vc.types)
        for n, m in ren.items():
            types[m] = vc.types.get(n, INT)
        out.append(VC(vc.name, [substitute(h, sub) for h in vc.hypotheses], substitute(vc.goal, sub),
                      vc.origin, types))
    return out


def gen_summary_vcs(w, P: Expr = TRUE, Q: Expr = TRUE, prog: Optional[Program] = None, types=None,
                    trailing: Optional[Stmt] = None) -> list[VC]:
    """Obligations of one annotated loop in the context ``assume P; loop; assert Q``.

    ``trailing`` replaces the skip of the exit premise.
    """
    g = VCGen(prog, types)
    scope = set(g.types) | free_vars(P) | free_vars(Q) | free_vars(w.cond) | set(loop_mods(w))
    st = _State({x: Var(x) for x in scope}, [P] if P != TRUE else [])
    entry = dict(st.sigma)
    for end in g.loop(w, st, False, trailing):
        g.emit(f"loop{g.loops}:use", end, substitute(Q, end.sigma, entry), w.pos)
    return _freshen(g.vcs, g.counter)


def program_vcs(prog: Program, fun: str = "main") -> list[VC]:
    """All obligations of ``fun`` with every loop replaced by its spec statement."""
    f = prog.fun(fun)
    g = VCGen(prog, dict(f.vartypes))
    st = _State({x: Var(x) for x, _ in f.params}, [])
    g.run(f.body.stmts, st, fun)
    return _freshen(g.vcs, g.counter)
