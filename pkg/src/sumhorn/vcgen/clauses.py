"""Horn clause systems over the shared formula AST."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..lang.ast import TRUE, Expr, SpecFun, Type, Var, conj
from ..lang.pretty import pp_expr
from ..lang.subst import free_vars

KINDS = ("Inv", "Sum", "SafeInv", "Join", "FunPre", "FunPost", "Spec")


@dataclass(frozen=True)
class PredSym:
    name: str
    kind: str
    sig: tuple[tuple[str, Type], ...]

    @property
    def arity(self) -> int:
        return len(self.sig)

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.sig)

    @property
    def sorts(self) -> tuple[Type, ...]:
        return tuple(t for _, t in self.sig)


@dataclass(frozen=True)
class Atom:
    pred: PredSym
    args: tuple[Expr, ...]

    def __str__(self) -> str:
        return f"{self.pred.name}({', '.join(pp_expr(a) for a in self.args)})"

    @classmethod
    def of(cls, pred: PredSym) -> "Atom":
        """The atom applied to its own parameter names."""
        return cls(pred, tuple(Var(n) for n in pred.params))


@dataclass(frozen=True)
class HornClause:
    vars: tuple[tuple[str, Type], ...]
    body: tuple[Atom, ...]
    constraint: Expr
    head: Optional[Atom]
    label: str = ""

    @property
    def is_query(self) -> bool:
        return self.head is None

    def preds(self) -> list[PredSym]:
        out = [a.pred for a in self.body]
        if self.head is not None:
            out.append(self.head.pred)
        return out

    def __str__(self) -> str:
        parts = [str(a) for a in self.body]
        if self.constraint != TRUE or not parts:
            parts.append(pp_expr(self.constraint))
        head = str(self.head) if self.head is not None else "false"
        return f"{' && '.join(parts)} ==> {head}"


@dataclass
class ClauseSystem:
    preds: list[PredSym] = field(default_factory=list)
    clauses: list[HornClause] = field(default_factory=list)
    spec_funs: tuple[SpecFun, ...] = ()
    meta: dict = field(default_factory=dict)
    encoding: str = ""
    # predicate name -> formula over its parameters (annotation-derived definitions)
    definitions: dict = field(default_factory=dict)

    def pred(self, name: str) -> PredSym:
        for p in self.preds:
            if p.name == name:
                return p
        raise KeyError(name)

    def preds_of_kind(self, kind: str) -> list[PredSym]:
        return [p for p in self.preds if p.kind == kind]

    def add_pred(self, p: PredSym) -> PredSym:
        for q in self.preds:
            if q.name == p.name:
                if q != p:
                    raise ValueError(f"predicate {p.name} redeclared with a different signature")
                return q
        self.preds.append(p)
        return p

    def used_preds(self) -> list[PredSym]:
        """Predicates in order of first use in the clause list."""
        seen, out = set(), []
        for c in self.clauses:
            for p in c.preds():
                if p.name not in seen:
                    seen.add(p.name)
                    out.append(p)
        return out

    def copy(self) -> "ClauseSystem":
        return ClauseSystem(list(self.preds), list(self.clauses), self.spec_funs, dict(self.meta),
                            self.encoding, dict(self.definitions))

    def __str__(self) -> str:
        return "\n".join(f"[{c.label}] {c}" for c in self.clauses)


def make_clause(body, constraint: Expr, head: Optional[Atom], types, label: str = "") -> HornClause:
    """Build a clause, binding every free symbol with a sort from ``types(name)``."""
    names: list[str] = []
    seen: set = set()

    def add(e):
        for n in sorted(free_vars(e)):
            if n not in seen:
                seen.add(n)
                names.append(n)

    for a in body:
        for x in a.args:
            add(x)
    add(constraint)
    if head is not None:
        for x in head.args:
            add(x)
    return HornClause(tuple((n, types(n)) for n in names), tuple(body), constraint, head, label)


def clause_constraint(parts) -> Expr:
    return conj(list(parts))
