"""Substitution, free variables and light constant folding on formulas."""

from __future__ import annotations

import itertools
from typing import Mapping, Optional

from .ast import (
    BOOL_OPS, Binary, BoolLit, Call, Expr, IntLit, Ite, Nondet, Old, Quant, Select, Store,
    Unary, Var, FALSE, TRUE,
)


class UnboundSubstitution(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no image for old({name})")


def ediv(a: int, b: int) -> int:
    """Euclidean division (remainder always non-negative), as in SMT-LIB Ints."""
    return (a - a % abs(b)) // b


def emod(a: int, b: int) -> int:
    return a % abs(b)


def free_vars(e: Expr) -> set[str]:
    out: set[str] = set()
    _fv(e, frozenset(), out)
    return out


def _fv(e, bound, out):
    if isinstance(e, Var):
        if e.name not in bound:
            out.add(e.name)
    elif isinstance(e, Unary):
        _fv(e.arg, bound, out)
    elif isinstance(e, Binary):
        _fv(e.lhs, bound, out)
        _fv(e.rhs, bound, out)
    elif isinstance(e, Call):
        for a in e.args:
            _fv(a, bound, out)
    elif isinstance(e, Select):
        _fv(e.arr, bound, out)
        _fv(e.idx, bound, out)
    elif isinstance(e, Store):
        _fv(e.arr, bound, out)
        _fv(e.idx, bound, out)
        _fv(e.val, bound, out)
    elif isinstance(e, Ite):
        _fv(e.cond, bound, out)
        _fv(e.then, bound, out)
        _fv(e.other, bound, out)
    elif isinstance(e, Quant):
        _fv(e.body, bound | {n for n, _ in e.vars}, out)


def old_vars(e: Expr) -> set[str]:
    from .ast import subexprs
    return {x.name for x in subexprs(e) if isinstance(x, Old)}


def calls_in(e: Expr) -> set[str]:
    from .ast import subexprs
    return {x.name for x in subexprs(e) if isinstance(x, Call)}


def has_nondet(e: Expr) -> bool:
    from .ast import subexprs
    return any(isinstance(x, Nondet) for x in subexprs(e))


_fresh_counter = itertools.count()


def substitute(f: Expr, sigma: Optional[Mapping[str, Expr]] = None,
               old_sigma: Optional[Mapping[str, Expr]] = None, eliminate_old: bool = False) -> Expr:
    """Capture-free simultaneous substitution.

    Plain variables are replaced through ``sigma`` and ``old(x)`` through
    ``old_sigma``.  With ``eliminate_old`` every ``old`` occurrence must have
    an image, otherwise :class:`UnboundSubstitution` is raised.
    """
    return _subst(f, dict(sigma or {}), dict(old_sigma or {}), eliminate_old)


def _image_fvs(sigma, old_sigma) -> set[str]:
    out: set[str] = set()
    for t in list(sigma.values()) + list(old_sigma.values()):
        out |= free_vars(t)
    return out


def _subst(e, sigma, old_sigma, elim):
    if isinstance(e, Var):
        return sigma.get(e.name, e)
    if isinstance(e, Old):
        if e.name in old_sigma:
            return old_sigma[e.name]
        if elim:
            raise UnboundSubstitution(e.name)
        return e
    if isinstance(e, (IntLit, BoolLit, Nondet)):
        return e
    if isinstance(e, Unary):
        a = _subst(e.arg, sigma, old_sigma, elim)
        return e if a is e.arg else Unary(e.op, a, e.pos)
    if isinstance(e, Binary):
        l = _subst(e.lhs, sigma, old_sigma, elim)
        r = _subst(e.rhs, sigma, old_sigma, elim)
        return e if (l is e.lhs and r is e.rhs) else Binary(e.op, l, r, e.pos)
    if isinstance(e, Call):
        args = tuple(_subst(a, sigma, old_sigma, elim) for a in e.args)
        return e if all(a is b for a, b in zip(args, e.args)) else Call(e.name, args, e.pos)
    if isinstance(e, Select):
        return Select(_subst(e.arr, sigma, old_sigma, elim), _subst(e.idx, sigma, old_sigma, elim), e.pos)
    if isinstance(e, Store):
        return Store(_subst(e.arr, sigma, old_sigma, elim), _subst(e.idx, sigma, old_sigma, elim),
                     _subst(e.val, sigma, old_sigma, elim), e.pos)
    if isinstance(e, Ite):
        return Ite(_subst(e.cond, sigma, old_sigma, elim), _subst(e.then, sigma, old_sigma, elim),
                   _subst(e.other, sigma, old_sigma, elim), e.pos)
    if isinstance(e, Quant):
        names = {n for n, _ in e.vars}
        inner = {k: v for k, v in sigma.items() if k not in names}
        clash = names & _image_fvs(inner, old_sigma)
        new_vars = []
        for n, ty in e.vars:
            if n in clash:
                avoid = clash | _image_fvs(inner, old_sigma) | free_vars(e.body)
                m = n
                while m in avoid:
                    m = f"{n}!q{next(_fresh_counter)}"
                inner[n] = Var(m)
                new_vars.append((m, ty))
            else:
                new_vars.append((n, ty))
        body = _subst(e.body, inner, old_sigma, elim)
        return Quant(e.kind, tuple(new_vars), body, e.pos)
    raise TypeError(f"cannot substitute into {type(e).__name__}")


# --------------------------------------------------------------------------
# constant folding


def simplify(e: Expr) -> Expr:
    """Bottom-up folding of literal arithmetic and boolean identities."""
    if isinstance(e, Unary):
        a = simplify(e.arg)
        if e.op == "!":
            if isinstance(a, BoolLit):
                return BoolLit(not a.value)
            if isinstance(a, Unary) and a.op == "!":
                return a.arg
        elif isinstance(a, IntLit):
            return IntLit(-a.value)
        return Unary(e.op, a, e.pos)
    if isinstance(e, Binary):
        l, r = simplify(e.lhs), simplify(e.rhs)
        op = e.op
        if isinstance(l, IntLit) and isinstance(r, IntLit):
            a, b = l.value, r.value
            if op == "+":
                return IntLit(a + b)
            if op == "-":
                return IntLit(a - b)
            if op == "*":
                return IntLit(a * b)
            if op == "/" and b != 0:
                return IntLit(ediv(a, b))
            if op == "%" and b != 0:
                return IntLit(emod(a, b))
            if op in ("==", "!=", "<", "<=", ">", ">="):
                return BoolLit({"==": a == b, "!=": a != b, "<": a < b, "<=": a <= b,
                                ">": a > b, ">=": a >= b}[op])
        if op in ("==", "<=", ">=") and l == r and not _has_partial(l):
            return TRUE
        if op in ("!=", "<", ">") and l == r and not _has_partial(l):
            return FALSE
        if op == "==" and isinstance(l, BoolLit) and isinstance(r, BoolLit):
            return BoolLit(l.value == r.value)
        if op in BOOL_OPS:
            return _fold_bool(op, l, r, e.pos)
        if op == "+" and r == IntLit(0):
            return l
        if op == "+" and l == IntLit(0):
            return r
        if op == "-" and r == IntLit(0):
            return l
        return Binary(op, l, r, e.pos)
    if isinstance(e, Call):
        return Call(e.name, tuple(simplify(a) for a in e.args), e.pos)
    if isinstance(e, Select):
        arr, idx = simplify(e.arr), simplify(e.idx)
        if isinstance(arr, Store) and isinstance(idx, IntLit) and isinstance(arr.idx, IntLit):
            if arr.idx == idx:
                return arr.val
            return simplify(Select(arr.arr, idx))
        return Select(arr, idx, e.pos)
    if isinstance(e, Store):
        return Store(simplify(e.arr), simplify(e.idx), simplify(e.val), e.pos)
    if isinstance(e, Ite):
        c = simplify(e.cond)
        if isinstance(c, BoolLit):
            return simplify(e.then if c.value else e.other)
        t, o = simplify(e.then), simplify(e.other)
        if t == o:
            return t
        return Ite(c, t, o, e.pos)
    if isinstance(e, Quant):
        body = simplify(e.body)
        if isinstance(body, BoolLit):
            return body
        used = free_vars(body)
        vs = tuple(v for v in e.vars if v[0] in used)
        if not vs:
            return body
        return Quant(e.kind, vs, body, e.pos)
    return e


def _has_partial(e: Expr) -> bool:
    from .ast import subexprs
    return any(isinstance(x, Nondet) for x in subexprs(e))


def _fold_bool(op, l, r, pos):
    if op == "&&":
        if l == FALSE or r == FALSE:
            return FALSE
        if l == TRUE:
            return r
        if r == TRUE:
            return l
        if l == r:
            return l
    elif op == "||":
        if l == TRUE or r == TRUE:
            return TRUE
        if l == FALSE:
            return r
        if r == FALSE:
            return l
        if l == r:
            return l
    elif op == "==>":
        if l == FALSE or r == TRUE:
            return TRUE
        if l == TRUE:
            return r
        if r == FALSE:
            return Unary("!", l) if not (isinstance(l, Unary) and l.op == "!") else l.arg
        if l == r:
            return TRUE
    elif op == "<==>":
        if l == TRUE:
            return r
        if r == TRUE:
            return l
        if l == r:
            return TRUE
    return Binary(op, l, r, pos)
