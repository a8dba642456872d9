"""Formula-level lift (invariant from safe invariant and summary) and lower."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..lang.ast import (
    TRUE, Binary, Expr, Old, Program, Quant, Var, conj, conjuncts, eq, implies,
)
from ..lang.check import AnnotError, loop_mods
from ..lang.subst import free_vars, old_vars, simplify, substitute
from ..vcgen.encode import loop_scopes

S0, SN = "!s0", "!sn"


@dataclass
class LoopSpec:
    P: Expr = TRUE
    Q: Expr = TRUE
    J: Optional[Expr] = None
    I: Optional[Expr] = None
    R: Optional[Expr] = None
    # loop state: modified variables and the read-only rest of the scope
    mods: tuple = ()
    ro: tuple = ()

    def __post_init__(self):
        if self.R is not None:
            extra = old_vars(self.R) - set(self.mod_names)
            if extra:
                raise AnnotError(f"summary uses old() of non-modified {', '.join(sorted(extra))}")

    @property
    def mod_names(self) -> list[str]:
        return [n for n, _ in self.mods]


def loop_spec(prog: Program, index: int = 0, fun: str = "main", pre: Expr = TRUE, post: Expr = TRUE,
              inv: Optional[Expr] = None, summary: Optional[Expr] = None) -> LoopSpec:
    """LoopSpec for the ``index``-th loop (preorder) of ``fun``; annotations fill J, I and R."""
    f = prog.fun(fun)
    scopes = loop_scopes(f)
    if not 0 <= index < len(scopes):
        raise IndexError(f"{fun} has {len(scopes)} loops")
    w, scope, _ = scopes[index]
    mods = loop_mods(w)
    J = inv if inv is not None else w.annot.invariant
    R = summary if summary is not None else w.annot.summary
    return LoopSpec(pre, post, J, J, R, tuple((n, t) for n, t in scope if n in mods),
                    tuple((n, t) for n, t in scope if n not in mods))


def collapse_shape(R: Expr, mods) -> Optional[dict]:
    """``{m: f(old vars)}`` when R is a conjunction of ``m == f`` over distinct mods, else None."""
    mods = set(mods)
    out: dict = {}
    for c in conjuncts(R):
        if not (isinstance(c, Binary) and c.op == "=="):
            return None
        for lhs, rhs in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
            if isinstance(lhs, Var) and lhs.name in mods and lhs.name not in out and not free_vars(rhs) & mods:
                out[lhs.name] = rhs
                break
        else:
            return None
    return out


def one_point(bound, body: Expr):
    """Drop ``v == e`` conjuncts for bound ``v`` by substitution; returns ``(bound, body)``."""
    bound = list(bound)
    parts = conjuncts(body)
    changed = True
    while changed:
        changed = False
        names = {n for n, _ in bound}
        for k, c in enumerate(parts):
            if not (isinstance(c, Binary) and c.op == "=="):
                continue
            for v, e in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
                if isinstance(v, Var) and v.name in names and v.name not in free_vars(e):
                    rest = parts[:k] + parts[k + 1:]
                    parts = [substitute(p, {v.name: e}) for p in rest]
                    bound = [(n, t) for n, t in bound if n != v.name]
                    changed = True
                    break
            if changed:
                break
    return bound, simplify(conj(parts))


def lift(spec: LoopSpec) -> Expr:
    """Invariant from a safe invariant J and a correct summary R under precondition P.

    ``∃ s0. P[s := s0] ∧ J ∧ ∀ sn. R(s, sn) ⟹ R(s0, sn)`` over the loop mods; the
    universal part collapses to ``f(s) == f(s0)`` when R is a set of equations
    ``m == f(old mods)``.  Equalities on the existential variables are then
    eliminated.
    """
    mods = spec.mods
    names = spec.mod_names
    J = spec.J if spec.J is not None else TRUE
    R = spec.R if spec.R is not None else TRUE
    s0 = {n: Var(n + S0) for n in names}
    pre0 = substitute(spec.P, s0)
    here = {n: Var(n) for n in names}
    shape = collapse_shape(R, names)
    if shape is not None:
        third = conj([eq(substitute(f, {}, here), substitute(f, {}, s0)) for f in shape.values()])
    else:
        plain = [(n, t) for n, t in mods if n in free_vars(R)]
        sn = {n: Var(n + SN) for n, _ in plain}
        at_s = substitute(R, sn, here)
        at_s0 = substitute(R, sn, s0)
        body = simplify(implies(at_s, at_s0))
        third = body if not plain or body == TRUE else Quant("forall", tuple((n + SN, t) for n, t in plain), body)
    bound = [(n + S0, t) for n, t in mods]
    inner = [pre0, third]
    bound, body = one_point(bound, conj(inner))
    used = free_vars(body)
    bound = [(n, t) for n, t in bound if n in used]
    ex = body if not bound else Quant("exists", tuple(bound), body)
    return simplify(conj([J, ex]))


def lower(spec: LoopSpec) -> Expr:
    """Canonical summary ``I[mods := old(mods)] ⟹ Q``."""
    I = spec.I if spec.I is not None else TRUE
    olds = {n: Old(n) for n in spec.mod_names}
    return implies(substitute(I, olds), spec.Q)
