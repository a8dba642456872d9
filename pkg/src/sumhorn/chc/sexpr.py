"""S-expression reader and SMT-LIB term conversion into the formula AST."""

from __future__ import annotations

import re
from typing import Union

from ..lang.ast import (
    ARRAY, BOOL, FALSE, INT, TRUE, Binary, BoolLit, Call, Expr, IntLit, Ite, Quant, Select, Store, Type,
    Unary, Var, conj, disj, neg,
)
from ..lang.subst import substitute

SExp = Union[str, list]

_TOKEN = re.compile(r'\s+|;[^\n]*|\|[^|]*\||"(?:[^"]|"")*"|[()]|[^\s()|";]+')


class ModelParseError(Exception):
    def __init__(self, fragment: str, msg: str = "cannot parse"):
        self.fragment = fragment
        super().__init__(f"{msg}: {fragment[:120]}")


def tokens(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ModelParseError(text[pos:pos + 40], "bad token")
        tok = m.group(0)
        pos = m.end()
        if tok[0].isspace() or tok[0] == ";":
            continue
        yield tok


def read_all(text: str) -> list[SExp]:
    """Every top-level s-expression in ``text``."""
    out: list = []
    stack: list = []
    for tok in tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ModelParseError(text, "unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            if tok.startswith("|"):
                tok = tok[1:-1]
            (stack[-1] if stack else out).append(tok)
    if stack:
        raise ModelParseError(text[-80:], "unbalanced '('")
    return out


def read(text: str) -> SExp:
    items = read_all(text)
    if len(items) != 1:
        raise ModelParseError(text, "expected one s-expression")
    return items[0]


def show(s: SExp) -> str:
    if isinstance(s, str):
        return s
    return "(" + " ".join(show(x) for x in s) + ")"


def to_sort(s: SExp) -> Type:
    if s == "Int":
        return INT
    if s == "Bool":
        return BOOL
    if s == ["Array", "Int", "Int"]:
        return ARRAY
    raise ModelParseError(show(s), "unsupported sort")


_CHAIN = {"<": "<", "<=": "<=", ">": ">", ">=": ">="}
_ARITH = {"+": "+", "*": "*", "div": "/", "mod": "%"}


def to_expr(s: SExp, funs=frozenset(), env=None) -> Expr:
    """Convert an SMT-LIB term; ``let`` is inlined and Boolean ``ite`` expanded.

    ``funs`` names the uninterpreted functions allowed as applications.
    """
    env = env or {}
    if isinstance(s, str):
        if s in env:
            return env[s]
        if s == "true":
            return TRUE
        if s == "false":
            return FALSE
        if s.isdigit():
            return IntLit(int(s))
        return Var(s)
    if not s:
        raise ModelParseError("()", "empty application")
    head, args = s[0], s[1:]
    if isinstance(head, list):
        raise ModelParseError(show(s), "unsupported application")
    if head == "let":
        bound = dict(env)
        for name, val in args[0]:
            bound[name] = to_expr(val, funs, env)
        return to_expr(args[1], funs, bound)
    if head in ("forall", "exists"):
        vs = tuple((n, to_sort(t)) for n, t in args[0])
        inner = {k: v for k, v in env.items() if k not in {n for n, _ in vs}}
        return Quant(head, vs, to_expr(args[1], funs, inner))
    if head == "!":
        return to_expr(args[0], funs, env)
    xs = [to_expr(a, funs, env) for a in args]
    if head == "and":
        return conj(xs)
    if head == "or":
        return disj(xs)
    if head == "not":
        return neg(xs[0])
    if head == "=>":
        out = xs[-1]
        for a in reversed(xs[:-1]):
            out = Binary("==>", a, out)
        return out
    if head == "=":
        return conj([_eq(a, b) for a, b in zip(xs, xs[1:])])
    if head == "distinct":
        return conj([Binary("!=", a, b) for i, a in enumerate(xs) for b in xs[i + 1:]])
    if head in _CHAIN:
        return conj([Binary(head, a, b) for a, b in zip(xs, xs[1:])])
    if head == "-":
        if len(xs) == 1:
            x = xs[0]
            return IntLit(-x.value) if isinstance(x, IntLit) else Unary("-", x)
        return _fold("-", xs)
    if head in _ARITH:
        return _fold(_ARITH[head], xs)
    if head == "abs":
        return Ite(Binary(">=", xs[0], IntLit(0)), xs[0], Unary("-", xs[0]))
    if head == "ite":
        c, a, b = xs
        if _is_bool(a) or _is_bool(b):
            return disj([conj([c, a]), conj([neg(c), b])])
        return Ite(c, a, b)
    if head == "select":
        return Select(xs[0], xs[1])
    if head == "store":
        return Store(xs[0], xs[1], xs[2])
    if head in funs:
        return Call(head, tuple(xs))
    raise ModelParseError(show(s), f"unknown operator {head}")


def _fold(op, xs):
    out = xs[0]
    for x in xs[1:]:
        out = Binary(op, out, x)
    return out


def _is_bool(e: Expr) -> bool:
    if isinstance(e, BoolLit):
        return True
    if isinstance(e, Unary):
        return e.op == "!"
    if isinstance(e, Binary):
        return e.op not in ("+", "-", "*", "/", "%")
    return isinstance(e, Quant)


def _eq(a: Expr, b: Expr) -> Expr:
    if _is_bool(a) or _is_bool(b):
        return Binary("<==>", a, b)
    return Binary("==", a, b)


def rename_params(body: Expr, params, names) -> Expr:
    """Simultaneously rename solver parameter names to predicate parameter names."""
    return substitute(body, {p: Var(n) for p, n in zip(params, names) if p != n})
