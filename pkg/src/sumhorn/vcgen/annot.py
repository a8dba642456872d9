"""Loop annotations as definitions of the unknown predicates."""

from __future__ import annotations

from ..lang.ast import Program, Var
from ..lang.check import AnnotError
from ..lang.subst import free_vars, old_vars, substitute
from .clauses import ClauseSystem


def _require_scope(e, names, what, w):
    extra = (free_vars(e) | old_vars(e)) - set(names)
    if extra:
        raise AnnotError(f"{what} mentions {', '.join(sorted(extra))} outside the loop scope", w.pos)


def annotations_to_constraints(p: Program, sys: ClauseSystem) -> ClauseSystem:
    """Copy of ``sys`` whose ``definitions`` fix every annotated loop predicate.

    Invariants define ``Inv`` and ``SafeInv`` predicates over the loop scope.
    A summary defines the ``Sum`` predicate with ``old(m)`` read as the
    iteration-entry value and a plain ``m`` as the exit value ``m!n``.
    """
    out = sys.copy()
    for L in sys.meta.get("loops", []):
        inv, summ = L.w.annot.invariant, L.w.annot.summary
        scope = [n for n, _ in L.scope]
        for role, ps in L.preds.items():
            if role in ("inv", "safe") and inv is not None:
                _require_scope(inv, scope, "invariant", L.w)
                out.definitions[ps.name] = inv
            elif role == "sum" and summ is not None:
                _require_scope(summ, scope, "summary", L.w)
                mods = [n for n, _ in L.mods]
                sigma = {m: Var(f"{m}!n") for m in mods}
                old = {n: Var(n) for n in scope}
                out.definitions[ps.name] = substitute(summ, sigma, old)
    return out
