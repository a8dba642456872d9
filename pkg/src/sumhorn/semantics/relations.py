"""Transition relations over finite state spaces and the loop-proof conditions.

A :class:`Rel` maps every state of a :class:`StateSpace` to a set of
outcomes.  Predicates are numpy bool vectors and binary relations are numpy
bool matrices over the same space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from ..lang.ast import INT, Block, Expr, Program, Stmt
from . import kernels
from .domain import Broke, Domain, Error, Regular, StateSpace
from .evaluate import ExprEval
from .interp import Interp, Unsupported, stmt_vars


def _csr(rows: list) -> tuple:
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    flat: list = []
    for i, r in enumerate(rows):
        flat.extend(sorted(r))
        ptr[i + 1] = len(flat)
    return ptr, np.asarray(flat, dtype=np.int64)


class Rel:
    """Outcome relation ``S x (S + {Error} + Broke(S))`` stored as CSR arrays."""

    def __init__(self, space: StateSpace, reg_ptr, reg_idx, brk_ptr=None, brk_idx=None, err=None):
        n = space.size
        self.space = space
        self.reg_ptr = np.asarray(reg_ptr, dtype=np.int64)
        self.reg_idx = np.asarray(reg_idx, dtype=np.int64)
        if brk_ptr is None:
            brk_ptr, brk_idx = np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
        self.brk_ptr = np.asarray(brk_ptr, dtype=np.int64)
        self.brk_idx = np.asarray(brk_idx, dtype=np.int64)
        self.err = np.zeros(n, dtype=np.uint8) if err is None else np.asarray(err, dtype=np.uint8)

    @classmethod
    def from_sets(cls, space: StateSpace, reg: list, brk: Optional[list] = None, err=None) -> "Rel":
        rp, ri = _csr(reg)
        bp, bi = _csr(brk) if brk is not None else (None, None)
        return cls(space, rp, ri, bp, bi, err)

    @classmethod
    def from_pairs(cls, space: StateSpace, pairs: Iterable) -> "Rel":
        n = space.size
        reg: list = [set() for _ in range(n)]
        brk: list = [set() for _ in range(n)]
        err = np.zeros(n, dtype=np.uint8)
        for s, o in pairs:
            i = space.index(s)
            if o is Error:
                err[i] = 1
            elif isinstance(o, Broke):
                brk[i].add(space.index(o.state))
            else:
                reg[i].add(space.index(o.state if isinstance(o, Regular) else o))
        return cls.from_sets(space, reg, brk, err)

    def reg_of(self, i: int) -> np.ndarray:
        return self.reg_idx[self.reg_ptr[i]:self.reg_ptr[i + 1]]

    def brk_of(self, i: int) -> np.ndarray:
        return self.brk_idx[self.brk_ptr[i]:self.brk_ptr[i + 1]]

    def pairs(self):
        sp = self.space
        for i in range(sp.size):
            s = sp.state(i)
            for j in self.reg_of(i):
                yield s, Regular(sp.state(int(j)))
            for j in self.brk_of(i):
                yield s, Broke(sp.state(int(j)))
            if self.err[i]:
                yield s, Error

    def pair_set(self) -> frozenset:
        return frozenset(self.pairs())

    def __len__(self) -> int:
        return len(self.reg_idx) + len(self.brk_idx) + int(self.err.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, Rel) and self.space == other.space and self.pair_set() == other.pair_set()

    def __repr__(self) -> str:
        return f"Rel({self.space!r}, {len(self)} pairs)"

    def regular(self) -> np.ndarray:
        """Regular-outcome restriction as a dense bool matrix."""
        n = self.space.size
        m = np.zeros((n, n), dtype=bool)
        for i in range(n):
            m[i, self.reg_of(i)] = True
        return m

    def has_break(self) -> bool:
        return len(self.brk_idx) > 0

    def has_error(self) -> bool:
        return bool(self.err.any())


# --------------------------------------------------------------------------
# relations of statements and loops


def space_for(b: Stmt, dom: Domain, types: Optional[dict] = None) -> StateSpace:
    types = types or {}
    return StateSpace([(n, types.get(n, INT)) for n in stmt_vars(b)], dom)


def step_rel(b: Stmt, dom: Domain, space: Optional[StateSpace] = None, prog: Optional[Program] = None,
             types: Optional[dict] = None) -> Rel:
    """Big-step relation of ``b`` over every state of ``space``."""
    if space is None:
        space = space_for(b, dom, types)
    it = Interp(prog, dom, types=dict(space.vars))
    block = b if isinstance(b, Block) else Block((b,))

    def thunk():
        it.types.update(dict(space.vars))
        return [it.exec_block(block, space.env(i)) for i in range(space.size)]

    results = it.solve(thunk)
    n = space.size
    reg: list = [set() for _ in range(n)]
    brk: list = [set() for _ in range(n)]
    err = np.zeros(n, dtype=np.uint8)
    for i, outs in enumerate(results):
        for kind, v in outs:
            if kind == "err":
                err[i] = 1
            elif kind == "ret":
                raise Unsupported("return inside a loop body")
            else:
                j = space.index(v)
                if j is None:
                    continue
                (reg if kind == "reg" else brk)[i].add(j)
    return Rel.from_sets(space, reg, brk, err)


Test = Union[Expr, bool, np.ndarray, tuple]


def test_masks(t: Test, space: StateSpace, prog: Optional[Program] = None) -> tuple:
    """``(tt, ff)``: states where the loop test may be true / may be false."""
    n = space.size
    if isinstance(t, bool):
        v = np.full(n, t, dtype=np.uint8)
        return v, (1 - v).astype(np.uint8)
    if isinstance(t, tuple):
        return np.asarray(t[0], dtype=np.uint8), np.asarray(t[1], dtype=np.uint8)
    if isinstance(t, np.ndarray):
        v = t.astype(np.uint8)
        return v, (1 - v).astype(np.uint8)
    ev = ExprEval(prog, space.dom)
    tt = np.zeros(n, dtype=np.uint8)
    ff = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        vals = ev.values(t, space.env(i))
        tt[i] = True in vals
        ff[i] = False in vals
    return tt, ff


def loop_rel(t: Test, body_rel: Rel, dom: Optional[Domain] = None, prog: Optional[Program] = None) -> Rel:
    """Least relation closed under the four loop rules."""
    tt, ff = test_masks(t, body_rel.space, prog)
    ptr, idx, werr = kernels.loop_outcomes(tt, ff, body_rel.reg_ptr, body_rel.reg_idx,
                                           body_rel.brk_ptr, body_rel.brk_idx, body_rel.err)
    return Rel(body_rel.space, ptr, idx, None, None, werr)


def holds_triple(P, C: Rel, Q) -> bool:
    P = np.asarray(P, dtype=bool)
    Q = np.asarray(Q, dtype=bool)
    for i in np.flatnonzero(P):
        if C.err[i] or len(C.brk_of(i)):
            return False
        if not Q[C.reg_of(i)].all():
            return False
    return True


def triple_witness(P, C: Rel, Q):
    """First ``(state, outcome)`` violating the triple, or None."""
    P = np.asarray(P, dtype=bool)
    Q = np.asarray(Q, dtype=bool)
    sp = C.space
    for i in np.flatnonzero(P):
        if C.err[i]:
            return sp.state(i), Error
        for j in C.brk_of(i):
            return sp.state(i), Broke(sp.state(int(j)))
        for j in C.reg_of(i):
            if not Q[j]:
                return sp.state(i), Regular(sp.state(int(j)))
    return None


# --------------------------------------------------------------------------
# invariant and summary conditions


@dataclass
class Condition:
    name: str
    ok: bool
    witness: object = None


@dataclass
class InvariantReport:
    conditions: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> Condition:
        return self.conditions[name]

    @property
    def inductive(self) -> bool:
        return self["init"].ok and self["propagation"].ok

    @property
    def safe(self) -> bool:
        return self.inductive and self["safety"].ok

    @property
    def correct(self) -> bool:
        return self.safe and self["break"].ok and self["exit"].ok

    @property
    def kind(self) -> str:
        if self.correct:
            return "correct"
        if self.safe:
            return "safe"
        if self.inductive:
            return "inductive"
        return "none"

    def failures(self) -> list:
        return [c for c in self.conditions.values() if not c.ok]


@dataclass
class SummaryReport:
    conditions: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> Condition:
        return self.conditions[name]

    @property
    def summary(self) -> bool:
        return self["exit"].ok and self["break"].ok and self["step"].ok

    @property
    def correct(self) -> bool:
        return self.summary and self["correctness"].ok

    def failures(self) -> list:
        return [c for c in self.conditions.values() if not c.ok]


def _first(mask):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if len(idx) else None


def check_invariant(I, P, Q, t: Test, body_rel: Rel, prog: Optional[Program] = None) -> InvariantReport:
    sp = body_rel.space
    I = np.asarray(I, dtype=bool)
    P = np.asarray(P, dtype=bool)
    Q = np.asarray(Q, dtype=bool)
    tt, ff = test_masks(t, sp, prog)
    rep = InvariantReport()

    w = _first(P & ~I)
    rep.conditions["init"] = Condition("init", w is None, None if w is None else sp.state(w))

    live = np.flatnonzero(I & tt.astype(bool))
    prop = safety = brk = None
    for i in live:
        if prop is None:
            for j in body_rel.reg_of(i):
                if not I[j]:
                    prop = (sp.state(int(i)), sp.state(int(j)))
                    break
        if safety is None and body_rel.err[i]:
            safety = sp.state(int(i))
        if brk is None:
            for j in body_rel.brk_of(i):
                if not Q[j]:
                    brk = (sp.state(int(i)), sp.state(int(j)))
                    break
    rep.conditions["propagation"] = Condition("propagation", prop is None, prop)
    rep.conditions["safety"] = Condition("safety", safety is None, safety)
    rep.conditions["break"] = Condition("break", brk is None, brk)
    w = _first(I & ff.astype(bool) & ~Q)
    rep.conditions["exit"] = Condition("exit", w is None, None if w is None else sp.state(w))
    return rep


def check_summary(R, P, Q, t: Test, body_rel: Rel, prog: Optional[Program] = None) -> SummaryReport:
    sp = body_rel.space
    R = np.asarray(R, dtype=bool)
    P = np.asarray(P, dtype=bool)
    Q = np.asarray(Q, dtype=bool)
    tt, ff = test_masks(t, sp, prog)
    rep = SummaryReport()

    diag = np.diagonal(R)
    w = _first(ff.astype(bool) & ~diag)
    rep.conditions["exit"] = Condition("exit", w is None, None if w is None else sp.state(w))

    brk = step = None
    for i in np.flatnonzero(tt):
        if brk is None:
            for j in body_rel.brk_of(i):
                if not R[i, j]:
                    brk = (sp.state(int(i)), sp.state(int(j)))
                    break
        if step is None:
            for j in body_rel.reg_of(i):
                bad = _first(R[j] & ~R[i])
                if bad is not None:
                    step = (sp.state(int(i)), sp.state(int(j)), sp.state(bad))
                    break
    rep.conditions["break"] = Condition("break", brk is None, brk)
    rep.conditions["step"] = Condition("step", step is None, step)

    corr = None
    for i in np.flatnonzero(P):
        bad = _first(R[i] & ~Q)
        if bad is not None:
            corr = (sp.state(int(i)), sp.state(bad))
            break
    rep.conditions["correctness"] = Condition("correctness", corr is None, corr)
    return rep


def strongest_invariant(P, t: Test, body_rel: Rel, prog: Optional[Program] = None) -> np.ndarray:
    tt, _ = test_masks(t, body_rel.space, prog)
    out = kernels.closure(np.asarray(P, dtype=np.uint8), tt, body_rel.reg_ptr, body_rel.reg_idx)
    return out.astype(bool)


def i_star(t: Test, body_rel: Rel, prog: Optional[Program] = None) -> np.ndarray:
    """Least fixpoint of the two I* rules (regular iterations only, no break, no error)."""
    sp = body_rel.space
    tt, ff = test_masks(t, sp, prog)
    empty_ptr = np.zeros(sp.size + 1, dtype=np.int64)
    empty_idx = np.zeros(0, dtype=np.int64)
    no_err = np.zeros(sp.size, dtype=np.uint8)
    ptr, idx, _ = kernels.loop_outcomes(tt, ff, body_rel.reg_ptr, body_rel.reg_idx,
                                        empty_ptr, empty_idx, no_err)
    return Rel(sp, ptr, idx).regular()


def r_star(t: Test, body_rel: Rel, prog: Optional[Program] = None) -> np.ndarray:
    """Least fixpoint of the three R* rules, with the break rule taken literally."""
    tt, ff = test_masks(t, body_rel.space, prog)
    return kernels.r_star(tt, ff, body_rel.reg_ptr, body_rel.reg_idx,
                          body_rel.brk_ptr, body_rel.brk_idx).astype(bool)


def witness_invariant(P, t: Test, body_rel: Rel, prog: Optional[Program] = None) -> np.ndarray:
    """The candidate ``{s | exists s0 in P. I*(s0, s)}``, for comparison with reachability."""
    Istar = i_star(t, body_rel, prog)
    P = np.asarray(P, dtype=bool)
    if not P.any():
        return np.zeros(body_rel.space.size, dtype=bool)
    return Istar[P].any(axis=0)
