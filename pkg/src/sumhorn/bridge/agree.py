"""Agreement of the formula transforms with their set-level counterparts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lang.ast import Program
from ..lang.pretty import pp_expr
from ..semantics.domain import Domain, StateSpace
from ..vcgen.encode import loop_scopes
from .semantic import frame_matrix, lift_semantic, lower_semantic, pred_of_formula, rel_of_formula
from .syntactic import LoopSpec, lift, loop_spec, lower


@dataclass
class Agreement:
    name: str
    agree: bool
    semantic: int
    syntactic: int
    formula: str

    def line(self) -> str:
        mark = "ok" if self.agree else "MISMATCH"
        return f"{mark:8} {self.name}: {self.semantic} vs {self.syntactic} states  {self.formula}"


def _space(spec: LoopSpec, dom: Domain):
    sp = StateSpace(spec.mods + spec.ro, dom)
    return sp, frame_matrix(sp, [n for n, _ in spec.ro])


def lift_agreement(prog: Program, spec: LoopSpec, dom: Domain = Domain(), name: str = "lift") -> Agreement:
    """Compare ``lift(spec)`` with ``lift_semantic`` on every state of the loop scope."""
    sp, fr = _space(spec, dom)
    P = pred_of_formula(sp, spec.P, prog)
    J = pred_of_formula(sp, spec.J, prog)
    R = rel_of_formula(sp, spec.R, prog, fr)
    sem = lift_semantic(P, J, R, fr)
    I = lift(spec)
    syn = pred_of_formula(sp, I, prog)
    return Agreement(name, bool((sem == syn).all()), int(sem.sum()), int(syn.sum()), pp_expr(I))


def lower_agreement(prog: Program, spec: LoopSpec, dom: Domain = Domain(), name: str = "lower") -> Agreement:
    """Compare ``lower(spec)`` with ``lower_semantic`` on frame-compatible pairs."""
    sp, fr = _space(spec, dom)
    I = pred_of_formula(sp, spec.I, prog)
    Q = pred_of_formula(sp, spec.Q, prog)
    sem = lower_semantic(I, Q) & fr
    R = lower(spec)
    syn = rel_of_formula(sp, R, prog, fr)
    return Agreement(name, bool(np.array_equal(sem, syn)), int(sem.sum()), int(syn.sum()), pp_expr(R))


def annotated_loops(prog: Program):
    """``(fun, index)`` of every loop carrying both an invariant and a summary."""
    for f in prog.funs:
        for k, (w, _, _) in enumerate(loop_scopes(f)):
            if w.annot.invariant is not None and w.annot.summary is not None:
                yield f.name, k


def program_agreement(prog: Program, dom: Domain = Domain(), label: str = "") -> list[Agreement]:
    """Lift under ``P = true`` and ``P = J`` for every annotated loop, plus lower."""
    out = []
    for fun, k in annotated_loops(prog):
        tag = f"{label}:{fun}:loop{k + 1}" if label else f"{fun}:loop{k + 1}"
        spec = loop_spec(prog, k, fun)
        out.append(lift_agreement(prog, spec, dom, f"{tag}:lift"))
        spec = loop_spec(prog, k, fun, pre=spec.J)
        out.append(lift_agreement(prog, spec, dom, f"{tag}:lift-under-J"))
        out.append(lower_agreement(prog, spec, dom, f"{tag}:lower"))
    return out
