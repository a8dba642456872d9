"""Recursive-descent parser for ``.imp`` sources."""

from __future__ import annotations

import re
from typing import Optional

from .ast import (
    ARRAY, BOOL, INT, Assert, Assign, Assume, Binary, Block, BoolLit, Break, Call, Decl,
    FunDef, If, IntLit, LoopAnnot, Nondet, Old, Pos, Program, Quant, Return, Select,
    SpecFun, Stmt, Type, Unary, Var, While,
)


class ParseError(Exception):
    """Malformed source text."""

    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line, self.col, self.expected, self.found = line, col, expected, found
        msg = f"{line}:{col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


KEYWORDS = {
    "spec", "case", "int", "bool", "void", "if", "else", "while", "invariant", "summary",
    "break", "return", "assert", "assume", "true", "false", "old", "nondet", "forall",
    "exists",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><==>|==>|->|::|==|!=|<=|>=|&&|\|\||\+\+|--|\+=|-=|\*=|[-+*/%<>=!(){}\[\];,])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: Pos):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.pos})"


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ParseError(line, col, "token", src[i])
        text = m.group()
        kind = m.lastgroup
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, text, (line, col)))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    toks.append(Token("eof", "", (line, col)))
    return toks


# binary operators by precedence level, lowest first
_LEVELS: list[tuple[str, ...]] = [
    ("<==>",),
    ("==>",),
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]
_RIGHT_ASSOC = {"==>"}


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    # -- token helpers -----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            self.fail(repr(text))
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.fail("identifier")
        self.i += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        raise ParseError(t.pos[0], t.pos[1], expected, t.text or "end of input")

    # -- top level ----------------------------------------------------------
    def program(self) -> Program:
        specs, funs = [], []
        while self.tok.kind != "eof":
            if self.at("spec"):
                specs.append(self.specfun())
            else:
                funs.append(self.fundef())
        return Program(tuple(specs), tuple(funs))

    def at_type(self) -> bool:
        return self.at("int") or self.at("bool")

    def type_(self) -> Type:
        if self.accept("bool"):
            return BOOL
        self.expect("int")
        if self.at("[") and self.peek().text == "]":
            self.i += 2
            return ARRAY
        return INT

    def params(self) -> tuple[tuple[str, Type], ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                ty = self.type_()
                out.append((self.ident().text, ty))
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(out)

    def specfun(self) -> SpecFun:
        start = self.expect("spec").pos
        ret = self.type_()
        name = self.ident().text
        params = self.params()
        self.expect("{")
        cases = []
        while self.accept("case"):
            guard = self.expr()
            self.expect("->")
            rhs = self.expr()
            self.expect(";")
            cases.append((guard, rhs))
        if not cases:
            self.fail("'case'")
        self.expect("}")
        return SpecFun(name, params, ret, tuple(cases), start)

    def fundef(self) -> FunDef:
        start = self.tok.pos
        if self.accept("void"):
            ret = None
        elif self.at_type():
            ret = self.type_()
        else:
            self.fail("function or spec definition")
        name = self.ident().text
        params = self.params()
        body = self.block()
        return FunDef(name, params, ret, body, start)

    # -- statements --------------------------------------------------------
    def block(self) -> Block:
        start = self.expect("{").pos
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("'}'")
            stmts.append(self.stmt())
        self.expect("}")
        return Block(tuple(stmts), start)

    def body(self) -> Block:
        """A braced block, or a single statement wrapped as one."""
        if self.at("{"):
            return self.block()
        s = self.stmt()
        return Block((s,), s.pos)

    def stmt(self) -> Stmt:
        t = self.tok
        pos = t.pos
        if self.at("{"):
            return self.block()
        if self.at_type():
            ty = self.type_()
            name = self.ident().text
            init = self.expr() if self.accept("=") else None
            self.expect(";")
            return Decl(name, ty, init, pos)
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.body()
            if self.accept("else"):
                other = self.body()
            else:
                other = Block((), self.tok.pos)
            return If(cond, then, other, pos)
        if self.accept("while"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            inv = summ = None
            while self.at("invariant") or self.at("summary"):
                kw = self.tok.text
                self.i += 1
                f = self.expr()
                self.expect(";")
                if kw == "invariant":
                    if inv is not None:
                        self.fail("at most one invariant")
                    inv = f
                else:
                    if summ is not None:
                        self.fail("at most one summary")
                    summ = f
            body = self.body()
            return While(cond, LoopAnnot(inv, summ), body, pos)
        if self.accept("break"):
            self.expect(";")
            return Break(pos)
        if self.accept("return"):
            val = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(val, pos)
        if self.accept("assert"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect(";")
            return Assert(cond, pos)
        if self.accept("assume"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect(";")
            return Assume(cond, pos)
        if t.kind == "ident":
            name = self.ident().text
            index = None
            if self.accept("["):
                index = self.expr()
                self.expect("]")
            target = Select(Var(name, pos), index, pos) if index is not None else Var(name, pos)
            if self.accept("++") or (self.at("--") and self.accept("--")):
                op = "+" if self.toks[self.i - 1].text == "++" else "-"
                self.expect(";")
                return Assign(name, index, Binary(op, target, IntLit(1, pos), pos), pos)
            for sugar, op in (("+=", "+"), ("-=", "-"), ("*=", "*")):
                if self.accept(sugar):
                    rhs = self.expr()
                    self.expect(";")
                    return Assign(name, index, Binary(op, target, rhs, pos), pos)
            self.expect("=")
            rhs = self.expr()
            self.expect(";")
            return Assign(name, index, rhs, pos)
        self.fail("statement")

    # -- expressions -------------------------------------------------------
    def expr(self):
        if self.at("forall") or self.at("exists"):
            return self.quant()
        return self.binary(0)

    def quant(self):
        t = self.tok
        self.i += 1
        vs = []
        while True:
            ty = self.type_()
            vs.append((self.ident().text, ty))
            if not self.accept(","):
                break
        self.expect("::")
        body = self.expr()
        return Quant(t.text, tuple(vs), body, t.pos)

    def binary(self, level: int):
        if level == len(_LEVELS):
            return self.unary()
        ops = _LEVELS[level]
        lhs = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in ops:
            op_tok = self.tok
            self.i += 1
            if op_tok.text in _RIGHT_ASSOC:
                rhs = self.binary(level)
                return Binary(op_tok.text, lhs, rhs, op_tok.pos)
            if self.at("forall") or self.at("exists"):
                rhs = self.quant()
            else:
                rhs = self.binary(level + 1)
            lhs = Binary(op_tok.text, lhs, rhs, op_tok.pos)
        return lhs

    def unary(self):
        t = self.tok
        if self.accept("-"):
            arg = self.unary()
            if isinstance(arg, IntLit) and arg.value >= 0 and not isinstance(arg, bool):
                return IntLit(-arg.value, t.pos)
            return Unary("-", arg, t.pos)
        if self.accept("!"):
            return Unary("!", self.unary(), t.pos)
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while self.at("["):
            t = self.expect("[")
            idx = self.expr()
            self.expect("]")
            e = Select(e, idx, t.pos)
        return e

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return IntLit(int(t.text), t.pos)
        if self.accept("true"):
            return BoolLit(True, t.pos)
        if self.accept("false"):
            return BoolLit(False, t.pos)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("old"):
            self.expect("(")
            name = self.ident().text
            self.expect(")")
            return Old(name, t.pos)
        if self.accept("nondet"):
            self.expect("(")
            self.expect(")")
            return Nondet(t.pos)
        if t.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return Call(t.text, tuple(args), t.pos)
            return Var(t.text, t.pos)
        self.fail("expression")


def parse(source: str) -> Program:
    """Parse ``.imp`` source text into an unchecked :class:`Program`."""
    return Parser(source).program()


def parse_expr(source: str):
    p = Parser(source)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail("end of expression")
    return e


def parse_stmt(source: str) -> Block:
    """Parse a statement sequence into a block (for tests and the oracle)."""
    p = Parser(source)
    stmts = []
    while p.tok.kind != "eof":
        stmts.append(p.stmt())
    return Block(tuple(stmts))
