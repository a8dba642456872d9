"""SMT-LIB 2 printing of formulas and Horn clause systems."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..lang.ast import (
    ARRAY, BOOL, INT, TRUE, Binary, BoolLit, Call, Expr, IntLit, Ite, Old, Quant, Select, SpecFun, Store,
    Type, Unary, Var, conj, conjuncts,
)
from ..vcgen.clauses import Atom, ClauseSystem, HornClause, PredSym
from .sexpr import ModelParseError, read_all, show, to_expr, to_sort

_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*$")
_RESERVED = {"let", "forall", "exists", "par", "_", "!", "as", "NUMERAL", "DECIMAL", "STRING"}

_OPS = {"+": "+", "-": "-", "*": "*", "/": "div", "%": "mod", "==": "=", "!=": "distinct",
        "<": "<", "<=": "<=", ">": ">", ">=": ">=", "==>": "=>", "<==>": "="}


def symbol(name: str) -> str:
    if _SIMPLE.match(name) and name not in _RESERVED:
        return name
    return f"|{name}|"


def sort(t: Type) -> str:
    if t == INT:
        return "Int"
    if t == BOOL:
        return "Bool"
    if t == ARRAY:
        return "(Array Int Int)"
    raise ValueError(f"no SMT sort for {t}")


def term(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return symbol(e.name)
    if isinstance(e, Unary):
        return f"({'not' if e.op == '!' else '-'} {term(e.arg)})"
    if isinstance(e, Binary):
        if e.op in ("&&", "||"):
            parts = _flatten(e, e.op)
            return f"({'and' if e.op == '&&' else 'or'} {' '.join(term(p) for p in parts)})"
        return f"({_OPS[e.op]} {term(e.lhs)} {term(e.rhs)})"
    if isinstance(e, Call):
        if not e.args:
            return symbol(e.name)
        return f"({symbol(e.name)} {' '.join(term(a) for a in e.args)})"
    if isinstance(e, Select):
        return f"(select {term(e.arr)} {term(e.idx)})"
    if isinstance(e, Store):
        return f"(store {term(e.arr)} {term(e.idx)} {term(e.val)})"
    if isinstance(e, Ite):
        return f"(ite {term(e.cond)} {term(e.then)} {term(e.other)})"
    if isinstance(e, Quant):
        return f"({e.kind} ({binders(e.vars)}) {term(e.body)})"
    if isinstance(e, Old):
        raise ValueError(f"old({e.name}) has no SMT rendering; substitute it first")
    raise TypeError(f"cannot print {type(e).__name__}")


def _flatten(e: Expr, op: str) -> list:
    if isinstance(e, Binary) and e.op == op:
        return _flatten(e.lhs, op) + _flatten(e.rhs, op)
    return [e]


def binders(vs) -> str:
    return " ".join(f"({symbol(n)} {sort(t)})" for n, t in vs)


def atom(a: Atom) -> str:
    if not a.args:
        return symbol(a.pred.name)
    return f"({symbol(a.pred.name)} {' '.join(term(x) for x in a.args)})"


def clause(c: HornClause) -> str:
    parts = [atom(a) for a in c.body] + [term(x) for x in conjuncts(c.constraint)]
    head = atom(c.head) if c.head is not None else "false"
    if not parts:
        body = head
    else:
        pre = parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})"
        body = f"(=> {pre} {head})"
    if c.vars:
        body = f"(forall ({binders(c.vars)}) {body})"
    return f"(assert {body})"


def declare_spec(f: SpecFun) -> str:
    return f"(declare-fun {symbol(f.name)} ({' '.join(sort(t) for _, t in f.params)}) {sort(f.ret)})"


def spec_axioms(f: SpecFun) -> list[str]:
    """One guarded equation per defining case."""
    out = []
    app = Call(f.name, tuple(Var(n) for n, _ in f.params))
    for g, r in f.cases:
        eqn = f"(= {term(app)} {term(r)})"
        body = eqn if g == TRUE else f"(=> {term(g)} {eqn})"
        out.append(f"(assert (forall ({binders(f.params)}) {body}))" if f.params else f"(assert {body})")
    return out


def define_spec_rec(f: SpecFun) -> list[str]:
    """Recursive definition: the first case whose guard holds, else an unconstrained default."""
    params = tuple(Var(n) for n, _ in f.params)
    default = f"({symbol(f.name + '!else')} {' '.join(term(a) for a in params)})" if params else \
        symbol(f.name + "!else")
    body = default
    for g, r in reversed(f.cases):
        body = term(r) if g == TRUE and body == default else f"(ite {term(g)} {term(r)} {body})"
    decl = f"(declare-fun {symbol(f.name + '!else')} ({' '.join(sort(t) for _, t in f.params)}) {sort(f.ret)})"
    return [decl, f"(define-fun-rec {symbol(f.name)} ({binders(f.params)}) {sort(f.ret)} {body})"]


def declare_pred(p: PredSym) -> str:
    return f"(declare-fun {symbol(p.name)} ({' '.join(sort(t) for t in p.sorts)}) Bool)"


@dataclass
class SmtScript:
    logic: str = "HORN"
    declarations: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    commands: list = field(default_factory=list)
    header: list = field(default_factory=list)

    @property
    def text(self) -> str:
        lines = [f"; {h}" for h in self.header]
        lines.append(f"(set-logic {self.logic})")
        lines += self.declarations + self.assertions + self.commands
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return self.text


def emit(sys: ClauseSystem, get_model: bool = True, header=()) -> SmtScript:
    """Serialize ``sys``; predicates by first use, clauses in construction order."""
    s = SmtScript(header=list(header))
    for f in sys.spec_funs:
        s.declarations.append(declare_spec(f))
    for p in sys.used_preds():
        s.declarations.append(declare_pred(p))
    for f in sys.spec_funs:
        s.assertions += spec_axioms(f)
    for c in sys.clauses:
        s.assertions.append(clause(c))
    s.commands.append("(check-sat)")
    if get_model:
        s.commands.append("(get-model)")
    return s


def parse_script(text: str, preds=()) -> ClauseSystem:
    """Read back an emitted script; ``preds`` supplies predicate kinds when known."""
    known = {p.name: p for p in preds}
    out = ClauseSystem()
    spec_names: set = set()
    for cmd in read_all(text):
        if not isinstance(cmd, list) or not cmd:
            raise ModelParseError(show(cmd), "expected a command")
        op = cmd[0]
        if op == "declare-fun":
            name, args, ret = cmd[1], cmd[2], cmd[3]
            if ret == "Bool":
                sig = tuple((f"a{i}", to_sort(t)) for i, t in enumerate(args))
                p = known.get(name) or PredSym(name, "Inv", sig)
                out.add_pred(p)
            else:
                spec_names.add(name)
        elif op == "assert":
            c = _read_clause(cmd[1], {p.name: p for p in out.preds}, spec_names)
            if c is not None:
                out.clauses.append(c)
    return out


def _read_clause(s, preds, spec_names):
    vs: tuple = ()
    if isinstance(s, list) and s and s[0] == "forall":
        vs = tuple((n, to_sort(t)) for n, t in s[1])
        s = s[2]
    if isinstance(s, list) and s and s[0] == "=>":
        pre, head = s[1], s[2]
    else:
        pre, head = "true", s
    parts = pre[1:] if isinstance(pre, list) and pre and pre[0] == "and" else [pre]
    body, rest = [], []
    for x in parts:
        a = _atom(x, preds, spec_names)
        if a is not None:
            body.append(a)
        else:
            rest.append(to_expr(x, spec_names))
    h = None if head == "false" else _atom(head, preds, spec_names)
    if head != "false" and h is None:
        return None  # a spec axiom, not a clause
    return HornClause(vs, tuple(body), conj(rest), h)


def _atom(x, preds, spec_names):
    name = x if isinstance(x, str) else (x[0] if x and isinstance(x[0], str) else None)
    if name not in preds:
        return None
    args = () if isinstance(x, str) else tuple(to_expr(a, spec_names) for a in x[1:])
    return Atom(preds[name], args)
