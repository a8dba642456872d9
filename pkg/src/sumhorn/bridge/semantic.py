"""Set-level lift and lower over a finite state space (the oracle forms)."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..lang.ast import Expr
from ..semantics.domain import StateSpace
from ..semantics.evaluate import SpecEval, Undefined, compile_formula


def lift_semantic(P, J, R, frame: Optional[np.ndarray] = None) -> np.ndarray:
    """``{s | J(s) ∧ ∃ s0 ∈ P. R(s, ·) ⊆ R(s0, ·)}``.

    ``frame[s, s0]`` restricts the choice of ``s0`` (e.g. to states that agree
    with ``s`` on read-only variables); by default every state is allowed.
    """
    P = np.asarray(P, dtype=bool)
    J = np.asarray(J, dtype=bool)
    R = np.asarray(R, dtype=bool)
    # excess[s, s0] = |R(s) \ R(s0)|
    excess = R.astype(np.int64) @ (~R).astype(np.int64).T
    ok = (excess == 0) & P[None, :]
    if frame is not None:
        ok &= frame
    return J & ok.any(axis=1)


def lower_semantic(I, Q) -> np.ndarray:
    """``{(s, sn) | I(s) ⟹ Q(sn)}``."""
    I = np.asarray(I, dtype=bool)
    Q = np.asarray(Q, dtype=bool)
    return ~I[:, None] | Q[None, :]


def frame_matrix(space: StateSpace, names) -> np.ndarray:
    """``[s, t]`` true when ``s`` and ``t`` agree on ``names``."""
    pos = [space.names.index(n) for n in names]
    ids: dict = {}
    key = np.array([ids.setdefault(tuple(space.decode(i)[k] for k in pos), len(ids)) for i in range(space.size)])
    return key[:, None] == key[None, :]


def pred_of_formula(space: StateSpace, e: Expr, prog=None) -> np.ndarray:
    """States satisfying ``e``; comparisons over undefined terms are false."""
    fn = compile_formula(e, SpecEval(prog), space.dom, total=True)
    out = np.zeros(space.size, dtype=bool)
    for i in range(space.size):
        try:
            out[i] = bool(fn(dict(zip(space.names, space.decode(i))), None))
        except Undefined:
            pass
    return out


def rel_of_formula(space: StateSpace, e: Expr, prog=None, frame: Optional[np.ndarray] = None) -> np.ndarray:
    """Pairs ``(s, sn)`` with ``old`` read from ``s`` and plain variables from ``sn``."""
    fn = compile_formula(e, SpecEval(prog), space.dom, total=True)
    n = space.size
    envs = [dict(zip(space.names, space.decode(i))) for i in range(n)]
    out = np.zeros((n, n), dtype=bool)
    for i in range(n):
        cols = range(n) if frame is None else np.flatnonzero(frame[i])
        for j in cols:
            try:
                out[i, j] = bool(fn(envs[j], envs[i]))
            except Undefined:
                pass
    return out
