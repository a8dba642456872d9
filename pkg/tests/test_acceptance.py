"""End-to-end acceptance checks, one per criterion.

Each test prints a single ``PASS`` or ``FAIL`` line.  Run the file directly
(``python tests/test_acceptance.py``) for the seven lines without pytest.
"""

import functools
import os
import subprocess
import sys
import time

import pytest

from sumhorn import corpus
from sumhorn.bridge import lift, loop_spec, program_agreement
from sumhorn.chc.solver import Crash, executable, run_solver, validity
from sumhorn.driver import REFUTED, VERIFIED, RunConfig, verify
from sumhorn.hoare import discharge, program_vcs
from sumhorn.lang import load, parse_expr
from sumhorn.lang.ast import INT, conj, implies
from sumhorn.oracle.crosscheck import crosscheck
from sumhorn.oracle.suite import run_suite
from sumhorn.semantics import Domain
from sumhorn.vcgen import ENCODINGS, encode

sys.path.insert(0, os.path.dirname(__file__))
from test_golden import ALL as GOLDEN_CASES, golden_path, render, z3_parse_errors  # noqa: E402
from test_hoare import EUCLID, EUCLID_MUTANT  # noqa: E402

TASK_LIMIT_S = 60


def announce(num, ok, detail):
    print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


@functools.lru_cache(maxsize=None)
def corpus_run():
    cfg = RunConfig(corpus.names(), encoding="both", timeout=TASK_LIMIT_S, validate_model=True, workers=4)
    return verify(cfg)


# -- 1: corpus verification --------------------------------------------------------

def criterion_1():
    vs = [v for v in corpus_run() if v.encoding in ("inv", "sum")]
    bad = []
    for v in vs:
        want = VERIFIED if v.task in corpus.safe_names() else REFUTED
        if v.verdict != want or v.time_ms > TASK_LIMIT_S * 1000:
            bad.append(f"{v.task}/{v.encoding}={v.verdict}@{v.time_ms}ms")
    n_safe = len(corpus.safe_names())
    ok = n_safe >= 10 and not bad and len(vs) == 2 * len(corpus.names())
    slowest = max(v.time_ms for v in vs)
    return announce(1, ok, f"{n_safe} safe and {len(corpus.bug_names())} buggy programs, inv and sum, "
                           f"slowest {slowest} ms" + (f"; wrong: {', '.join(bad)}" if bad else ""))


# -- 2: clauses against the oracle -------------------------------------------------

def criterion_2():
    start = time.perf_counter()
    total = passed = 0
    bad = []
    for name in corpus.safe_names():
        p = load(corpus.source(name))
        for enc in ENCODINGS:
            rep = crosscheck(p, encode(p, enc), Domain())
            total += len(rep.results)
            passed += sum(r.ok for r in rep.results)
            if not rep.ok:
                bad.append(f"{name}/{enc}")
    elapsed = time.perf_counter() - start
    ok = passed == total and elapsed < 60
    return announce(2, ok, f"{passed}/{total} clauses hold on 0..2 in {elapsed:.1f} s"
                           + (f"; failing: {', '.join(bad)}" if bad else ""))


# -- 3: theorem suite --------------------------------------------------------------

def criterion_3():
    rep = run_suite(200, seed=0)
    ok = rep.ok and rep.elapsed < 300
    return announce(3, ok, f"{rep.total_violations} violations on 200 loops in {rep.elapsed:.1f} s "
                           f"({rep.backend} kernels)")


# -- 4: model validation -----------------------------------------------------------

def criterion_4():
    vs = [v for v in corpus_run() if v.verdict == VERIFIED and v.model]
    statuses = {}
    for v in vs:
        statuses[v.validated] = statuses.get(v.validated, 0) + 1
    bad = [f"{v.task}/{v.encoding}" for v in vs if v.validated == "invalid"]
    ok = bool(vs) and not bad and set(statuses) <= {"valid", "validated-with-gaps"}
    summary = ", ".join(f"{k}: {n}" for k, n in sorted(statuses.items()))
    return announce(4, ok, f"{len(vs)} models checked ({summary})" + (f"; invalid: {', '.join(bad)}" if bad else ""))


# -- 5: Hoare mode -----------------------------------------------------------------

def criterion_5():
    p = load(EUCLID)
    start = time.perf_counter()
    rep = discharge(program_vcs(p), timeout=30, spec_funs=p.spec_funs)
    elapsed = time.perf_counter() - start
    m = load(EUCLID_MUTANT)
    mrep = discharge(program_vcs(m), timeout=30, spec_funs=m.spec_funs)
    shown = [r for r in mrep.invalid if r.witness]
    ok = rep.ok and elapsed <= 30 and bool(shown)
    cex = shown[0].name + " " + " ".join(f"{k}={v}" for k, v in sorted(shown[0].witness.items())) if shown else "none"
    return announce(5, ok, f"{sum(r.status == 'valid' for r in rep.results)}/{len(rep.results)} VCs valid "
                           f"in {elapsed:.2f} s; mutant counterexample: {cex}")


# -- 6: bridge agreement -----------------------------------------------------------

def euclid_lift_equivalent() -> str:
    p = load(corpus.source("euclid"))
    spec = loop_spec(p, pre=parse_expr("x == x0 && y == y0 && x0 > 0 && y0 > 0"), inv=parse_expr("x > 0 && y > 0"))
    I = lift(spec)
    T = parse_expr("gcd(x, y) == gcd(x0, y0) && x > 0 && y > 0")
    H = parse_expr("x0 > 0 && y0 > 0")
    consts = tuple((n, INT) for n in ("x", "y", "x0", "y0"))
    return validity(implies(H, conj([implies(I, T), implies(T, I)])), consts, p.spec_funs, 60).status


def criterion_6():
    rows = []
    for name in corpus.names():
        rows += program_agreement(load(corpus.source(name)), Domain(), name)
    bad = [a.name for a in rows if not a.agree]
    equiv = euclid_lift_equivalent()
    ok = bool(rows) and not bad and equiv == "valid"
    return announce(6, ok, f"{len(rows) - len(bad)}/{len(rows)} lift/lower checks agree; Euclid lift equivalence: "
                           f"{equiv}" + (f"; mismatches: {', '.join(bad)}" if bad else ""))


# -- 7: emitter stability ----------------------------------------------------------

def eldarica_accepts(path) -> str:
    r = run_solver(open(path).read(), backend="eldarica", timeout=10)
    if executable("eldarica") is None:
        return "unavailable"
    if isinstance(r, Crash) or "error" in r.stdout.lower():
        return "rejected"
    return "ok"


def criterion_7():
    stable = all(render(*c) == open(golden_path(*c)).read() == render(*c) for c in GOLDEN_CASES)
    z3_ok = executable("z3") is not None and all(not z3_parse_errors(golden_path(*c)) for c in GOLDEN_CASES)
    eld = {eldarica_accepts(golden_path(*c)) for c in GOLDEN_CASES}
    ok = stable and z3_ok and eld == {"ok"}
    return announce(7, ok, f"{len(GOLDEN_CASES)} golden files {'stable' if stable else 'CHANGED'}; "
                           f"z3 {'accepts' if z3_ok else 'rejects'}; eldarica {'/'.join(sorted(eld))}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("num", range(1, 8))
def test_criterion(num, capsys):
    with capsys.disabled():
        ok = CRITERIA[num - 1]()
    assert ok


def test_cli_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "sumhorn.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "oracle-check" in out.stdout


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
