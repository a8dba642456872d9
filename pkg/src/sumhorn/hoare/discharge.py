"""Discharging verification conditions with an SMT backend."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..chc.solver import executable, validity
from .vcs import VC

STATUS = {"valid": "valid", "invalid": "invalid", "unknown": "undecided"}


@dataclass
class VCResult:
    vc: VC
    status: str  # "valid" | "invalid" | "undecided"
    time_ms: int = 0
    witness: dict = field(default_factory=dict)
    note: str = ""

    @property
    def name(self) -> str:
        return self.vc.name


@dataclass
class HoareReport:
    results: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.status == "valid" for r in self.results)

    @property
    def invalid(self) -> list:
        return [r for r in self.results if r.status == "invalid"]

    def by_group(self) -> dict:
        out: dict = {}
        for r in self.results:
            d = out.setdefault(r.vc.group, {"valid": 0, "invalid": 0, "undecided": 0})
            d[r.status] += 1
        return out

    def lines(self) -> list[str]:
        width = max((len(r.name) for r in self.results), default=4)
        out = [f"{'vc'.ljust(width)}  verdict    time_ms  witness"]
        for r in self.results:
            extra = ""
            if r.witness:
                extra = " ".join(f"{k}={v}" for k, v in sorted(r.witness.items()))
            elif r.note:
                extra = f"({r.note})"
            out.append(f"{r.name.ljust(width)}  {r.status:9}  {r.time_ms:7}  {extra}".rstrip())
        for g, d in sorted(self.by_group().items()):
            label = f"group {g}" if g != "assert" else "asserts"
            out.append(f"{label}: {d['valid']} valid, {d['invalid']} invalid, {d['undecided']} undecided")
        return out


def discharge_one(vc: VC, spec_funs=(), timeout: float = 30) -> VCResult:
    start = time.perf_counter()
    r = validity(vc.formula, vc.consts(), spec_funs, timeout)
    ms = int((time.perf_counter() - start) * 1000)
    status = STATUS[r.status]
    note = r.reason if status == "undecided" else ""
    return VCResult(vc, status, ms, r.values if status == "invalid" else {}, note)


def discharge(vcs, backend: str = "z3", timeout: float = 30, spec_funs=(), workers: int = 4) -> HoareReport:
    """Negate each VC and check it with the spec-function axioms; results keep VC order."""
    start = time.perf_counter()
    rep = HoareReport()
    if backend != "z3" or executable("z3") is None:
        # single queries need a first-order SMT solver; the HORN-only backend cannot answer them
        note = f"{backend} cannot decide first-order queries" if backend != "z3" else "z3 unavailable"
        rep.results = [VCResult(vc, "undecided", 0, {}, note) for vc in vcs]
        return rep
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        rep.results = list(ex.map(lambda vc: discharge_one(vc, spec_funs, timeout), vcs))
    rep.elapsed = time.perf_counter() - start
    return rep
