"""Finite-domain evaluation of Horn clauses under concrete interpretations.

Oracle interpretations come from executing the program over a small domain:
loop-head states for invariants, the regular part of the loop relation for
summaries, entry/exit states (with declaration-time origins) for join
predicates, and call tables for function predicates.  Each clause is then
checked on every instance that the body atoms admit.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from ..lang.ast import Program, Var
from ..lang.subst import free_vars
from ..semantics.domain import Domain, StateSpace
from ..semantics.evaluate import SpecEval, Undefined, compile_formula
from ..semantics.interp import run_main
from ..semantics.relations import loop_rel, step_rel
from ..vcgen.clauses import ClauseSystem, HornClause

# a predicate is either a finite set of value tuples or a test on value tuples
Interp = Union[set, frozenset, Callable]


@dataclass
class ClauseResult:
    label: str
    checked: int = 0
    violated: int = 0
    skipped: int = 0
    truncated: bool = False
    witness: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.violated == 0


@dataclass
class CrossReport:
    results: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def satisfied(self) -> int:
        return sum(1 for r in self.results if r.ok)

    @property
    def fraction(self) -> float:
        return self.satisfied / len(self.results) if self.results else 1.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            mark = "ok" if r.ok else "VIOLATED"
            extra = f" witness {r.witness}" if r.witness else ""
            trunc = " (truncated)" if r.truncated else ""
            out.append(f"{mark:8} {r.label}: {r.checked} instances, {r.skipped} skipped{trunc}{extra}")
        return out


class _Compiled:
    def __init__(self, specs, dom):
        self.specs, self.dom = specs, dom
        self.cache: dict = {}

    def __call__(self, e):
        fn = self.cache.get(e)
        if fn is None:
            fn = compile_formula(e, self.specs, self.dom)
            self.cache[e] = fn
        return fn


def check_clause(c: HornClause, interp: dict, dom: Domain, specs: SpecEval, cap: int = 200_000,
                 comp: Optional[_Compiled] = None) -> ClauseResult:
    """Count instances of ``c`` and the ones that violate it under ``interp``."""
    comp = comp or _Compiled(specs, dom)
    res = ClauseResult(c.label or str(c))
    gens = [a for a in c.body if not callable(interp.get(a.pred.name))]
    tests = [a for a in c.body if callable(interp.get(a.pred.name))]
    # static plan: which argument positions bind, which are keys, which are checked afterwards
    bound: set = set()
    plans = []
    for a in gens:
        binds, keys, later = [], [], []
        for k, x in enumerate(a.args):
            if isinstance(x, Var) and x.name not in bound:
                binds.append((k, x.name))
                bound.add(x.name)
            elif free_vars(x) <= bound:
                keys.append((k, comp(x)))
            else:
                later.append((k, x))
        plans.append((a, binds, keys, later))
    rest = [(n, t) for n, t in c.vars if n not in bound]
    indexes: dict = {}

    def rows(i, env):
        a, binds, keys, _ = plans[i]
        rel = interp.get(a.pred.name, ())
        if not keys:
            return rel
        kpos = tuple(k for k, _ in keys)
        idx = indexes.get(i)
        if idx is None:
            idx = {}
            for tup in rel:
                idx.setdefault(tuple(tup[k] for k in kpos), []).append(tup)
            indexes[i] = idx
        try:
            key = tuple(fn(env, None) for _, fn in keys)
        except Undefined:
            return ()
        return idx.get(key, ())

    constraint = comp(c.constraint)
    head_args = None if c.head is None else [comp(x) for x in c.head.args]
    head_sp = None if c.head is None else _space_like(c.head.pred, dom)
    test_fns = [(interp[a.pred.name], [comp(x) for x in a.args]) for a in tests]
    rest_vals = [dom.values(t, n) for n, t in rest]
    budget = [cap]

    def finish(env, later):
        for combo in itertools.product(*rest_vals):
            if budget[0] <= 0:
                res.truncated = True
                return
            budget[0] -= 1
            full = dict(env)
            full.update(zip((n for n, _ in rest), combo))
            try:
                if any(comp(x)(full, None) != v for x, v in later):
                    continue
                if any(not f(tuple(g(full, None) for g in gs)) for f, gs in test_fns):
                    continue
                if not constraint(full, None):
                    continue
                res.checked += 1
                if c.head is None:
                    ok = False
                else:
                    vals = tuple(g(full, None) for g in head_args)
                    h = interp.get(c.head.pred.name, ())
                    if callable(h):
                        ok = bool(h(vals))
                    elif head_sp.encode(vals) is None:
                        res.checked -= 1
                        res.skipped += 1
                        continue
                    else:
                        ok = vals in h
            except Undefined:
                res.skipped += 1
                continue
            if not ok:
                res.violated += 1
                if res.witness is None:
                    res.witness = {n: full[n] for n, _ in c.vars if n in full}

    def walk(i, env, later):
        if i == len(plans):
            finish(env, later)
            return
        a, binds, keys, lat = plans[i]
        for tup in rows(i, env):
            env2 = dict(env)
            for k, n in binds:
                env2[n] = tup[k]
            walk(i + 1, env2, later + [(x, tup[k]) for k, x in lat])
            if res.truncated:
                return

    walk(0, {}, [])
    return res


def _space_like(pred, dom):
    return StateSpace(pred.sig, dom, check_budget=False)


def check_clauses(sys: ClauseSystem, interp: dict, dom: Domain, prog: Optional[Program] = None,
                  cap: int = 200_000) -> CrossReport:
    start = time.perf_counter()
    specs = SpecEval(prog)
    comp = _Compiled(specs, dom)
    rep = CrossReport()
    for c in sys.clauses:
        rep.results.append(check_clause(c, interp, dom, specs, cap, comp))
    rep.elapsed = time.perf_counter() - start
    return rep


# -- oracle interpretations ----------------------------------------------------


def _rows(envs, names):
    out = set()
    for key in envs:
        env = dict(key)
        if all(n in env for n in names):
            out.add(tuple(env[n] for n in names))
    return out


def summary_relation(L, dom: Domain, prog: Program) -> set:
    """Regular part of the loop relation over ``(ro, mods, mods!n)`` tuples."""
    space = StateSpace(L.ro + L.mods, dom)
    body = step_rel(L.w.body, dom, space, prog)
    rel = loop_rel(L.w.cond, body, prog=prog)
    k = len(L.ro)
    out = set()
    for i in range(space.size):
        s = space.decode(i)
        for j in rel.reg_of(i):
            out.add(s + space.decode(int(j))[k:])
    return out


def oracle_interpretation(prog: Program, sys: ClauseSystem, dom: Domain) -> dict:
    """Predicate name to the tuple set computed by execution over ``dom``."""
    it = run_main(prog, dom, ghosts=True, origins=True, collect=True)
    col = it.collected
    out: dict = {}
    for p in sys.preds:
        meta = sys.meta.get(p.name)
        if p.kind == "FunPre":
            fname = p.name[len("pre_"):]
            out[p.name] = _rows(col.get(("call", fname), ()), p.params)
        elif p.kind == "FunPost":
            fname = p.name[len("post_"):]
            rows = set()
            for (name, args), outs in it.table.items():
                if name != fname:
                    continue
                for o in outs:
                    if o[0] != "ret":
                        continue
                    rows.add(tuple(args) + ((o[1],) if p.arity > len(args) else ()))
            out[p.name] = rows
        elif meta is None:
            continue
        else:
            L = meta["info"]
            pos = L.w.pos
            role = meta["role"]
            if role in ("inv", "safe"):
                out[p.name] = _rows(col.get(("head", pos), ()), p.params)
            elif role == "head":
                out[p.name] = _rows(col.get(("entry", pos), ()), p.params)
            elif role == "after":
                out[p.name] = _rows(col.get(("after", pos), ()), p.params)
            elif role == "sum":
                out[p.name] = summary_relation(L, dom, prog)
    return out


def crosscheck(prog: Program, sys: ClauseSystem, dom: Domain = Domain(), cap: int = 200_000) -> CrossReport:
    """Oracle interpretation substituted into every clause of ``sys``."""
    start = time.perf_counter()
    interp = oracle_interpretation(prog, sys, dom)
    rep = check_clauses(sys, interp, dom, prog, cap)
    rep.elapsed = time.perf_counter() - start
    return rep
