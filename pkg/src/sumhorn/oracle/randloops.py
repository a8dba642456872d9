"""Seeded random loops over a single integer variable."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..lang.ast import Block, Expr, If, LoopAnnot, While
from ..lang.parser import parse_expr, parse_stmt
from ..lang.pretty import pp_expr, pp_stmt

_TERMS = ("0", "1", "2", "x", "x + 1", "x - 1", "2 - x", "x * 2", "x % 2", "nondet()")
_CMPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class RandomLoop:
    seed: int
    test: Expr
    body: Block

    def source(self) -> str:
        return pp_stmt(While(self.test, LoopAnnot(), self.body))

    def __str__(self) -> str:
        return self.source()


def _cond(rng: random.Random) -> str:
    r = rng.random()
    if r < 0.08:
        return rng.choice(("true", "false"))
    return f"x {rng.choice(_CMPS)} {rng.randint(0, 2)}"


def _stmt(rng: random.Random, depth: int) -> str:
    r = rng.random()
    if r < 0.45:
        return f"x = {rng.choice(_TERMS)};"
    if r < 0.60 and depth > 0:
        then = _stmts(rng, depth - 1)
        if rng.random() < 0.5:
            return f"if ({_cond(rng)}) {{ {then} }}"
        return f"if ({_cond(rng)}) {{ {then} }} else {{ {_stmts(rng, depth - 1)} }}"
    if r < 0.72:
        return "break;"
    if r < 0.84:
        return f"assert({_cond(rng)});"
    return f"assume({_cond(rng)});"


def _stmts(rng: random.Random, depth: int) -> str:
    return " ".join(_stmt(rng, depth) for _ in range(rng.randint(1, 3)))


def random_loop(seed: int) -> RandomLoop:
    rng = random.Random(seed)
    return RandomLoop(seed, parse_expr(_cond(rng)), parse_stmt(_stmts(rng, 2)))


def random_loops(count: int = 200, seed: int = 0) -> list[RandomLoop]:
    rng = random.Random(seed)
    return [random_loop(rng.randrange(2**32)) for _ in range(count)]


def deletions(body: Block):
    """Bodies with exactly one statement removed (recursively into branches)."""
    stmts = list(body.stmts)
    for i in range(len(stmts)):
        yield Block(tuple(stmts[:i] + stmts[i + 1:]))
    for i, s in enumerate(stmts):
        if isinstance(s, If):
            for t in deletions(s.then):
                yield Block(tuple(stmts[:i] + [If(s.cond, t, s.other, s.pos)] + stmts[i + 1:]))
            for o in deletions(s.other):
                yield Block(tuple(stmts[:i] + [If(s.cond, s.then, o, s.pos)] + stmts[i + 1:]))


def minimize(loop: RandomLoop, failing) -> RandomLoop:
    """Greedy statement deletion while ``failing(loop)`` stays true."""
    cur = loop
    progress = True
    while progress:
        progress = False
        for b in deletions(cur.body):
            cand = RandomLoop(cur.seed, cur.test, b)
            if failing(cand):
                cur = cand
                progress = True
                break
    return cur


def describe(loop: RandomLoop) -> str:
    return f"seed {loop.seed}: while ({pp_expr(loop.test)}) " + pp_stmt(loop.body).strip()
