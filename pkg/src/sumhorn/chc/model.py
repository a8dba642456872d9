"""Solver models: predicate name to a defining formula over its parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lang.ast import BOOL, FALSE, Expr, Var
from ..lang.pretty import pp_expr
from ..lang.subst import free_vars, substitute
from .sexpr import ModelParseError, read_all, rename_params, show, to_expr, to_sort


@dataclass
class Model:
    defs: dict = field(default_factory=dict)  # name -> (params, formula)

    def __contains__(self, name: str) -> bool:
        return name in self.defs

    def formula(self, name: str) -> Expr:
        return self.defs[name][1]

    def apply(self, name: str, args) -> Expr:
        """The definition instantiated at ``args``."""
        params, body = self.defs[name]
        return substitute(body, {p: a for p, a in zip(params, args)})

    def missing(self, sys) -> list[str]:
        return [p.name for p in sys.used_preds() if p.name not in self.defs]

    def lines(self) -> list[str]:
        return [f"{n}({', '.join(ps)}) := {pp_expr(f)}" for n, (ps, f) in self.defs.items()]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _define_funs(items):
    for it in items:
        if isinstance(it, list) and it:
            if it[0] == "define-fun":
                yield it
            else:
                yield from _define_funs(it)


def parse_model(text: str, preds=(), spec_funs=()) -> Model:
    """Collect ``define-fun`` blocks with Bool codomain.

    When ``preds`` is given, parameters are renamed to the predicate
    parameter names and each definition is checked against the signature.
    """
    known = {p.name: p for p in preds}
    funs = frozenset(f.name for f in spec_funs)
    m = Model()
    for d in _define_funs(read_all(text)):
        if len(d) != 5:
            raise ModelParseError(show(d), "malformed define-fun")
        _, name, params, ret, body = d
        if to_sort(ret) != BOOL:
            continue
        names = [p[0] for p in params]
        sorts = [to_sort(p[1]) for p in params]
        f = to_expr(body, funs)
        if name in known:
            p = known[name]
            if tuple(sorts) != p.sorts:
                raise ModelParseError(show(d), f"signature mismatch for {name}")
            f = rename_params(f, names, p.params)
            names = list(p.params)
        stray = free_vars(f) - set(names)
        if stray:
            raise ModelParseError(show(d), f"free symbols {sorted(stray)}")
        m.defs[name] = (tuple(names), f)
    for name, p in known.items():
        # absent predicates read as false; validation exposes a wrong reading
        m.defs.setdefault(name, (p.params, FALSE))
    return m


def from_definitions(sys) -> Model:
    """Model built from annotation definitions (predicates without one are absent)."""
    return Model({p.name: (p.params, sys.definitions[p.name]) for p in sys.preds if p.name in sys.definitions})


def var_args(p) -> tuple:
    return tuple(Var(n) for n in p.params)
