"""Clause-system rewrites: relational spec functions and predicate elimination."""

from __future__ import annotations

import itertools
from dataclasses import replace

from ..lang.ast import (
    FALSE, Binary, Call, Expr, Ite, Quant, Select, Store, Unary, Var, conj, eq, implies, neg, subexprs,
)
from ..lang.subst import free_vars, simplify, substitute
from ..vcgen.clauses import Atom, ClauseSystem, HornClause, PredSym


class NotEliminable(Exception):
    def __init__(self, preds):
        self.preds = sorted(preds)
        super().__init__(f"recursive predicates without definitions: {', '.join(self.preds)}")


# -- spec functions as graph predicates ---------------------------------------


def graph_pred(f) -> PredSym:
    return PredSym(f"{f.name}_graph", "Spec", tuple(f.params) + ((f"{f.name}!r", f.ret),))


class _Lift:
    """Replaces spec applications by fresh variables constrained through graph atoms."""

    def __init__(self, specs: dict, counter):
        self.specs = specs
        self.counter = counter
        self.atoms: list[Atom] = []
        self.vars: list = []

    def __call__(self, e: Expr) -> Expr:
        if isinstance(e, Call) and e.name in self.specs:
            args = tuple(self(a) for a in e.args)
            f = self.specs[e.name]
            v = f"{e.name}!v{next(self.counter)}"
            self.vars.append((v, f.ret))
            self.atoms.append(Atom(graph_pred(f), args + (Var(v),)))
            return Var(v)
        if isinstance(e, Unary):
            return Unary(e.op, self(e.arg), e.pos)
        if isinstance(e, Binary):
            return Binary(e.op, self(e.lhs), self(e.rhs), e.pos)
        if isinstance(e, Call):
            return Call(e.name, tuple(self(a) for a in e.args), e.pos)
        if isinstance(e, Select):
            return Select(self(e.arr), self(e.idx), e.pos)
        if isinstance(e, Store):
            return Store(self(e.arr), self(e.idx), self(e.val), e.pos)
        if isinstance(e, Ite):
            return Ite(self(e.cond), self(e.then), self(e.other), e.pos)
        if isinstance(e, Quant):
            if any(isinstance(x, Call) and x.name in self.specs for x in _calls(e.body)):
                raise ValueError("spec function applied under a quantifier")
            return e
        return e


def _calls(e):
    return (x for x in subexprs(e) if isinstance(x, Call))


def relationalize(sys: ClauseSystem) -> ClauseSystem:
    """Pure HORN system: each spec function becomes a graph predicate defined by its cases."""
    if not sys.spec_funs:
        return sys
    specs = {f.name: f for f in sys.spec_funs}
    counter = itertools.count(1)
    out = ClauseSystem(list(sys.preds), [], (), dict(sys.meta), sys.encoding, dict(sys.definitions))
    for f in sys.spec_funs:
        gp = out.add_pred(graph_pred(f))
        for k, (g, r) in enumerate(f.cases, start=1):
            lift = _Lift(specs, counter)
            g2, r2 = lift(g), lift(r)
            head = Atom(gp, tuple(Var(n) for n, _ in f.params) + (r2,))
            vs = tuple(f.params) + tuple(lift.vars)
            out.clauses.append(HornClause(vs, tuple(lift.atoms), g2, head, f"{f.name}:case{k}"))
    for c in sys.clauses:
        lift = _Lift(specs, counter)
        body = [Atom(a.pred, tuple(lift(x) for x in a.args)) for a in c.body]
        constraint = lift(c.constraint)
        head = None if c.head is None else Atom(c.head.pred, tuple(lift(x) for x in c.head.args))
        out.clauses.append(HornClause(c.vars + tuple(lift.vars), tuple(body + lift.atoms), constraint,
                                      head, c.label))
    return out


# -- resolution ----------------------------------------------------------------


def _rename(c: HornClause, suffix: str) -> HornClause:
    sigma = {n: Var(f"{n}{suffix}") for n, _ in c.vars}
    sub = lambda e: substitute(e, sigma)  # noqa: E731
    return HornClause(tuple((f"{n}{suffix}", t) for n, t in c.vars),
                      tuple(Atom(a.pred, tuple(sub(x) for x in a.args)) for a in c.body),
                      sub(c.constraint),
                      None if c.head is None else Atom(c.head.pred, tuple(sub(x) for x in c.head.args)),
                      c.label)


def resolve(c: HornClause, i: int, d: HornClause, suffix: str) -> HornClause:
    """Resolvent of body atom ``i`` of ``c`` with the head of ``d``."""
    d = _rename(d, suffix)
    target = c.body[i]
    sigma: dict = {}
    eqs = []
    dvars = {n for n, _ in d.vars}
    for h, a in zip(d.head.args, target.args):
        if isinstance(h, Var) and h.name in dvars and h.name not in sigma:
            sigma[h.name] = a
        else:
            eqs.append(eq(h, a))
    sub = lambda e: substitute(e, sigma)  # noqa: E731
    body = list(c.body[:i]) + [Atom(a.pred, tuple(sub(x) for x in a.args)) for a in d.body] + list(c.body[i + 1:])
    constraint = simplify(conj([sub(x) for x in eqs] + [sub(d.constraint), c.constraint]))
    used = set()
    for a in body:
        for x in a.args:
            used |= free_vars(x)
    used |= free_vars(constraint)
    if c.head is not None:
        for x in c.head.args:
            used |= free_vars(x)
    vs = [(n, t) for n, t in c.vars + d.vars if n in used and n not in sigma]
    label = f"{d.label} + {c.label}" if d.label and c.label else c.label or d.label
    return HornClause(tuple(vs), tuple(body), constraint, c.head, label)


def eliminate(sys: ClauseSystem, keep) -> ClauseSystem:
    """Resolve away every predicate outside ``keep``; raises on recursion through them."""
    keep = set(keep)
    clauses = list(sys.clauses)
    counter = itertools.count(1)
    while True:
        todo = {p.name for c in clauses for p in c.preds()} - keep
        if not todo:
            break
        pick = None
        for name in sorted(todo, key=lambda n: _first_use(clauses, n)):
            if not any(c.head is not None and c.head.pred.name == name and
                       any(a.pred.name == name for a in c.body) for c in clauses):
                pick = name
                break
        if pick is None:
            raise NotEliminable(todo)
        defs = [c for c in clauses if c.head is not None and c.head.pred.name == pick]
        rest = [c for c in clauses if not (c.head is not None and c.head.pred.name == pick)]
        out = []
        for c in rest:
            pending = [c]
            while pending:
                cur = pending.pop()
                idx = next((i for i, a in enumerate(cur.body) if a.pred.name == pick), None)
                if idx is None:
                    if simplify(cur.constraint) != FALSE:
                        out.append(cur)
                    continue
                for d in defs:
                    pending.append(resolve(cur, idx, d, f"!r{next(counter)}"))
        clauses = out
    res = ClauseSystem([p for p in sys.preds if p.name in keep], clauses, sys.spec_funs, dict(sys.meta),
                       sys.encoding, dict(sys.definitions))
    return res


def _first_use(clauses, name):
    for i, c in enumerate(clauses):
        if any(p.name == name for p in c.preds()):
            return i
    return len(clauses)


def instantiate(sys: ClauseSystem, defs: dict) -> ClauseSystem:
    """Replace every predicate in ``defs`` by its formula; defined heads become queries."""
    def apply(a):
        params = a.pred.params
        return substitute(defs[a.pred.name], dict(zip(params, a.args)))

    out = ClauseSystem([p for p in sys.preds if p.name not in defs], [], sys.spec_funs, dict(sys.meta),
                       sys.encoding, {})
    for c in sys.clauses:
        body = [a for a in c.body if a.pred.name not in defs]
        parts = [apply(a) for a in c.body if a.pred.name in defs] + [c.constraint]
        head = c.head
        if head is not None and head.pred.name in defs:
            parts.append(neg(apply(head)))
            head = None
        out.clauses.append(HornClause(c.vars, tuple(body), simplify(conj(parts)), head, c.label))
    return out


# -- interpretation ------------------------------------------------------------


def clause_formula(c: HornClause, interp) -> Expr:
    """``body ∧ constraint ⟹ head`` with atoms replaced through ``interp(name, args)``."""
    prem = conj([interp(a.pred.name, a.args) for a in c.body] + [c.constraint])
    concl = FALSE if c.head is None else interp(c.head.pred.name, c.head.args)
    return implies(prem, concl)


def strip_labels(clauses):
    return [replace(c, label="") for c in clauses]
