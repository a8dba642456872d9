"""Pretty printer producing re-parseable ``.imp`` text."""

from __future__ import annotations

from .ast import (
    Assert, Assign, Assume, Binary, Block, BoolLit, Break, Call, Decl, Expr, FunDef, If,
    IntLit, Ite, Nondet, Old, Program, Quant, Return, Select, SpecFun, Stmt, Store, Unary, Var,
    While,
)

_PREC = {
    "<==>": 1, "==>": 2, "||": 3, "&&": 4, "==": 5, "!=": 5,
    "<": 6, "<=": 6, ">": 6, ">=": 6, "+": 7, "-": 7, "*": 8, "/": 8, "%": 8,
}
_UNARY = 9
_ATOM = 11


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Quant):
        return 0
    if isinstance(e, Unary) or (isinstance(e, IntLit) and e.value < 0):
        return _UNARY
    if isinstance(e, (Store, Ite)):
        return _ATOM
    return _ATOM


def pp_expr(e: Expr, need: int = 0) -> str:
    s = _pp(e)
    return f"({s})" if _prec(e) < need else s


def _pp(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Old):
        return f"old({e.name})"
    if isinstance(e, Nondet):
        return "nondet()"
    if isinstance(e, Unary):
        arg = pp_expr(e.arg, _UNARY)
        if arg.startswith("-") and e.op == "-":
            arg = f"({arg})"
        return f"{e.op}{arg}"
    if isinstance(e, Binary):
        p = _PREC[e.op]
        if e.op == "==>":
            return f"{pp_expr(e.lhs, p + 1)} {e.op} {pp_expr(e.rhs, p)}"
        return f"{pp_expr(e.lhs, p)} {e.op} {pp_expr(e.rhs, p + 1)}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(pp_expr(a) for a in e.args)})"
    if isinstance(e, Select):
        return f"{pp_expr(e.arr, _ATOM)}[{pp_expr(e.idx)}]"
    if isinstance(e, Store):
        # not part of the surface grammar; printed SMT-style for diagnostics
        return f"store({pp_expr(e.arr)}, {pp_expr(e.idx)}, {pp_expr(e.val)})"
    if isinstance(e, Ite):
        return f"ite({pp_expr(e.cond)}, {pp_expr(e.then)}, {pp_expr(e.other)})"
    if isinstance(e, Quant):
        vs = ", ".join(f"{t} {n}" for n, t in e.vars)
        return f"{e.kind} {vs} :: {pp_expr(e.body)}"
    raise TypeError(type(e).__name__)


def pp_stmt(s: Stmt, indent: int = 0) -> str:
    pad = "    " * indent
    if isinstance(s, Block):
        inner = "".join(pp_stmt(c, indent + 1) for c in s.stmts)
        return f"{pad}{{\n{inner}{pad}}}\n"
    if isinstance(s, Decl):
        init = f" = {pp_expr(s.init)}" if s.init is not None else ""
        return f"{pad}{s.type} {s.name}{init};\n"
    if isinstance(s, Assign):
        idx = f"[{pp_expr(s.index)}]" if s.index is not None else ""
        return f"{pad}{s.name}{idx} = {pp_expr(s.rhs)};\n"
    if isinstance(s, If):
        out = f"{pad}if ({pp_expr(s.cond)}) {_block_tail(s.then, indent)}"
        if s.other.stmts:
            out = out.rstrip("\n") + f" else {_block_tail(s.other, indent)}"
        return out
    if isinstance(s, While):
        out = f"{pad}while ({pp_expr(s.cond)})\n"
        if s.annot.invariant is not None:
            out += f"{pad}    invariant {pp_expr(s.annot.invariant)};\n"
        if s.annot.summary is not None:
            out += f"{pad}    summary {pp_expr(s.annot.summary)};\n"
        return out + f"{pad}{_block_tail(s.body, indent)}"
    if isinstance(s, Break):
        return f"{pad}break;\n"
    if isinstance(s, Return):
        return f"{pad}return;\n" if s.value is None else f"{pad}return {pp_expr(s.value)};\n"
    if isinstance(s, Assert):
        return f"{pad}assert({pp_expr(s.cond)});\n"
    if isinstance(s, Assume):
        return f"{pad}assume({pp_expr(s.cond)});\n"
    raise TypeError(type(s).__name__)


def _block_tail(b: Block, indent: int) -> str:
    return pp_stmt(b, indent).lstrip()


def _params(ps) -> str:
    return ", ".join(f"{t} {n}" for n, t in ps)


def pp_program(p: Program) -> str:
    parts = []
    for sf in p.spec_funs:
        cases = "".join(f"    case {pp_expr(g)} -> {pp_expr(r)};\n" for g, r in sf.cases)
        parts.append(f"spec {sf.ret} {sf.name}({_params(sf.params)}) {{\n{cases}}}\n")
    for f in p.funs:
        ret = "void" if f.ret is None else str(f.ret)
        parts.append(f"{ret} {f.name}({_params(f.params)}) {_block_tail(f.body, 0)}")
    return "\n".join(parts)


def pretty(node) -> str:
    if isinstance(node, Program):
        return pp_program(node)
    if isinstance(node, (SpecFun, FunDef)):
        return pp_program(Program((node,), ()) if isinstance(node, SpecFun) else Program((), (node,)))
    if isinstance(node, (Block, Decl, Assign, If, While, Break, Return, Assert, Assume)):
        return pp_stmt(node)
    return pp_expr(node)
