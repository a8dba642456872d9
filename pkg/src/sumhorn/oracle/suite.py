"""Property suites for the loop-proof results on random finitized loops.

The exhaustive sweep enumerates every P, Q, I, J and every relation R on
loops with at most three states.  The completeness checks use the canonical
witnesses: reachability for invariants and the regular part of the loop
relation for summaries.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..semantics import kernels
from ..semantics.domain import Domain, StateSpace
from ..lang.ast import INT
from ..semantics.relations import (
    Rel, check_invariant, check_summary, holds_triple, loop_rel, step_rel, strongest_invariant,
    test_masks, witness_invariant, r_star,
)
from .randloops import RandomLoop, describe, minimize, random_loops

VIOLATION_KEYS = ("inv_sound", "sum_sound", "lift_correct", "lower_fwd", "lower_bwd", "exists_fwd", "exists_bwd",
                  "inv_complete", "sum_complete")


@dataclass
class LoopCase:
    loop: RandomLoop
    space: StateSpace
    body: Rel
    tt: np.ndarray
    ff: np.ndarray
    wrel: Rel

    def masks(self):
        n = self.space.size
        reg = [_bits(self.body.reg_of(s)) for s in range(n)]
        brk = [_bits(self.body.brk_of(s)) for s in range(n)]
        wreg = [_bits(self.wrel.reg_of(s)) for s in range(n)]
        return (n, _bits(np.flatnonzero(self.tt)), _bits(np.flatnonzero(self.ff)), reg, brk,
                [int(e) for e in self.body.err], wreg, [int(e) for e in self.wrel.err])


def _bits(idx) -> int:
    m = 0
    for i in idx:
        m |= 1 << int(i)
    return m


def finitize(loop: RandomLoop, dom: Domain = Domain()) -> LoopCase:
    space = StateSpace([("x", INT)], dom)
    body = step_rel(loop.body, dom, space)
    tt, ff = test_masks(loop.test, space)
    return LoopCase(loop, space, body, tt, ff, loop_rel((tt, ff), body))


@dataclass
class SuiteReport:
    counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    elapsed: float = 0.0
    backend: str = kernels.BACKEND

    @property
    def total_violations(self) -> int:
        return sum(self.counts.get(k, 0) for k in VIOLATION_KEYS)

    @property
    def ok(self) -> bool:
        return self.total_violations == 0

    def lines(self) -> list[str]:
        out = [f"{k}: {self.counts.get(k, 0)}" for k in VIOLATION_KEYS]
        out += [f"{k}: {v}" for k, v in self.notes.items()]
        for key, loop in self.violations:
            out.append(f"violation {key}: {describe(loop)}")
        return out


def sweep_case(case: LoopCase) -> dict:
    arr = kernels.sweep(*case.masks())
    return dict(zip(kernels.SWEEP_KEYS, (int(v) for v in arr)))


def completeness_case(case: LoopCase) -> dict:
    """Canonical witnesses on every (P, Q) with a valid triple."""
    sp = case.space
    n = sp.size
    t = (case.tt, case.ff)
    reg_part = case.wrel.regular()
    Rs = r_star(t, case.body)
    c = {"inv_complete": 0, "sum_complete": 0, "istar_witness_fails": 0, "rstar_fails": 0, "valid": 0}
    for P_bits in range(1 << n):
        P = np.array([bool(P_bits >> i & 1) for i in range(n)])
        reach = strongest_invariant(P, t, case.body)
        wit = witness_invariant(P, t, case.body)
        for Q_bits in range(1 << n):
            Q = np.array([bool(Q_bits >> i & 1) for i in range(n)])
            if not holds_triple(P, case.wrel, Q):
                continue
            c["valid"] += 1
            if not check_invariant(reach, P, Q, t, case.body).correct:
                c["inv_complete"] += 1
            if not check_summary(reg_part, P, Q, t, case.body).correct:
                c["sum_complete"] += 1
            if not check_invariant(wit, P, Q, t, case.body).correct:
                c["istar_witness_fails"] += 1
            if not check_summary(Rs, P, Q, t, case.body).correct:
                c["rstar_fails"] += 1
    return c


def run_suite(count: int = 200, seed: int = 0, dom: Domain = Domain(), minimize_failures: bool = True,
              loops=None) -> SuiteReport:
    """Exhaustive sweep plus completeness witnesses on ``count`` seeded loops."""
    start = time.perf_counter()
    rep = SuiteReport()
    rep.counts = dict.fromkeys(kernels.SWEEP_KEYS, 0)
    rep.counts.update(dict.fromkeys(("inv_complete", "sum_complete"), 0))
    rep.notes = {"istar_witness_fails": 0, "rstar_fails": 0, "valid": 0}
    loops = random_loops(count, seed) if loops is None else loops
    for loop in loops:
        case = finitize(loop, dom)
        res = sweep_case(case) if case.space.size <= 3 else {}
        res.update(completeness_case(case))
        for k, v in res.items():
            if k in rep.counts:
                rep.counts[k] += v
            else:
                rep.notes[k] = rep.notes.get(k, 0) + v
        for k in VIOLATION_KEYS:
            if res.get(k):
                bad = loop
                if minimize_failures:
                    bad = minimize(loop, lambda l, k=k: _fails(l, k, dom))
                rep.violations.append((k, bad))
    rep.elapsed = time.perf_counter() - start
    return rep


def _fails(loop: RandomLoop, key: str, dom: Domain) -> bool:
    case = finitize(loop, dom)
    res = sweep_case(case) if case.space.size <= 3 else {}
    res.update(completeness_case(case))
    return bool(res.get(key))


def sampled_soundness(count: int = 50, seed: int = 1, dom: Domain = Domain(hi=4), samples: int = 64) -> dict:
    """Randomly drawn candidates on a larger domain: soundness of both disciplines."""
    rng = np.random.default_rng(seed)
    c = {"checked_I": 0, "checked_JR": 0, "inv_sound": 0, "sum_sound": 0}
    for loop in random_loops(count, seed):
        case = finitize(loop, dom)
        n = case.space.size
        t = (case.tt, case.ff)
        for _ in range(samples):
            P, Q, I = (rng.random(n) < 0.5 for _ in range(3))
            R = rng.random((n, n)) < 0.5
            valid = holds_triple(P, case.wrel, Q)
            rep = check_invariant(I, P, Q, t, case.body)
            c["checked_I"] += 1
            if rep.correct and not valid:
                c["inv_sound"] += 1
            # bias towards passing candidates
            J = strongest_invariant(P | I, t, case.body)
            R = R | case.wrel.regular()
            if check_invariant(J, P, Q, t, case.body).safe and check_summary(R, P, Q, t, case.body).correct:
                c["checked_JR"] += 1
                if not valid:
                    c["sum_sound"] += 1
    return c
