"""Checking solver models (or annotation definitions) clause by clause."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..lang.ast import FALSE, Program, Quant, subexprs
from ..lang.pretty import pp_expr
from ..semantics.domain import Domain
from ..oracle.crosscheck import check_clauses
from ..semantics.evaluate import SpecEval, Undefined, compile_formula
from ..vcgen.clauses import ClauseSystem, HornClause
from .model import Model
from .solver import validity
from .transform import clause_formula


@dataclass
class ClauseCheck:
    label: str
    status: str  # "valid" | "invalid" | "unknown"
    witness: dict = field(default_factory=dict)
    reason: str = ""
    formula: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    finite: Optional[object] = None

    @property
    def status(self) -> str:
        """``valid``, ``invalid`` or ``validated-with-gaps``."""
        if any(c.status == "invalid" for c in self.checks):
            return "invalid"
        if self.finite is not None and not self.finite.ok:
            return "invalid"
        if any(c.status == "unknown" for c in self.checks):
            return "validated-with-gaps"
        return "valid"

    def counts(self) -> dict:
        out = {"valid": 0, "invalid": 0, "unknown": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            extra = f" witness {c.witness}" if c.witness else ""
            why = f" ({c.reason})" if c.reason and c.status == "unknown" else ""
            out.append(f"{c.status:8} {c.label}{why}{extra}")
        return out


def _interp(model: Model):
    def f(name, args):
        if name not in model:
            raise KeyError(name)
        return model.apply(name, args)
    return f


def check_clause(c: HornClause, model: Model, spec_funs=(), timeout: float = 30) -> ClauseCheck:
    try:
        phi = clause_formula(c, _interp(model))
    except KeyError as e:
        return ClauseCheck(c.label, "unknown", reason=f"no definition for {e.args[0]}")
    r = validity(phi, c.vars, spec_funs, timeout)
    return ClauseCheck(c.label, r.status, r.values if r.status == "invalid" else {}, r.reason, pp_expr(phi))


def validate_model(sys: ClauseSystem, model: Model, timeout: float = 30, dom: Optional[Domain] = None,
                   prog: Optional[Program] = None, workers: int = 4) -> ValidationReport:
    """Per-clause validity of ``model``; with ``dom``, also every finite instance."""
    rep = ValidationReport()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        rep.checks = list(ex.map(lambda c: check_clause(c, model, sys.spec_funs, timeout), sys.clauses))
    if dom is not None:
        rep.finite = finite_check(sys, model, dom, prog)
    return rep


def finite_check(sys: ClauseSystem, model: Model, dom: Domain, prog: Optional[Program] = None):
    """Enumerate clause instances over ``dom`` with the model formulas as predicate tests."""
    specs = SpecEval(prog)
    interp = {}
    for p in sys.preds:
        if p.name not in model:
            continue
        params, body = model.defs[p.name]
        if any(isinstance(x, Quant) for x in subexprs(body)):
            # quantifiers would range over the finite domain only
            interp[p.name] = _undetermined
        else:
            interp[p.name] = _tester(compile_formula(body, specs, dom), params)
    return check_clauses(sys, interp, dom, prog)


def _tester(fn, params):
    return lambda vals: bool(fn(dict(zip(params, vals)), None))


def _undetermined(vals):
    raise Undefined("quantified definition")


def corrupt(model: Model, name: str, formula=FALSE) -> Model:
    """Copy of ``model`` with one definition replaced (for negative tests)."""
    m = Model(dict(model.defs))
    params = m.defs[name][0] if name in m.defs else ()
    m.defs[name] = (params, formula)
    return m
