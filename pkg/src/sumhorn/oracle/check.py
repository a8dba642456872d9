"""The oracle-check batch: property suite, clause cross-checks, transform agreement and a mutant."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .. import corpus
from ..bridge.agree import program_agreement
from ..lang import load
from ..lang.ast import INT
from ..semantics.domain import BudgetExceeded, Domain, StateSpace
from ..vcgen.encode import ENCODINGS, encode
from .crosscheck import crosscheck
from .suite import run_suite

OK, VIOLATION, BUDGET = "ok", "violation", "budget"

# the loop updates before it breaks, so a break clause that records the
# iteration's start state instead of its final state is observable
MUTANT_SOURCE = """\
int main() {
    int n;
    assume(n >= 0);
    int i = 0;
    while (true) {
        i = i + 1;
        if (i >= n) break;
    }
    assert(i >= n);
    return 0;
}
"""


@dataclass
class TaskResult:
    name: str
    status: str
    detail: list = field(default_factory=list)
    elapsed: float = 0.0

    def line(self) -> str:
        return f"{self.status:9} {self.name} ({self.elapsed:.1f}s)"


@dataclass
class OracleReport:
    tasks: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [t for t in self.tasks if t.status == VIOLATION]

    @property
    def budget_exceeded(self) -> list:
        return [t for t in self.tasks if t.status == BUDGET]

    @property
    def ok(self) -> bool:
        return all(t.status == OK for t in self.tasks)

    def exit_code(self) -> int:
        """0 clean, 1 on any violation, 3 when tasks only ran out of budget."""
        if self.violations:
            return 1
        return 3 if self.budget_exceeded else 0

    def lines(self, verbose: bool = False) -> list[str]:
        out = []
        for t in self.tasks:
            out.append(t.line())
            if verbose or t.status != OK:
                out += ["    " + d for d in t.detail]
        out.append(f"{len(self.tasks)} tasks: {len(self.violations)} with violations, "
                   f"{len(self.budget_exceeded)} over budget")
        return out


def _check_budget(prog, dom: Domain):
    """Raise BudgetExceeded when some function's state space is too large to enumerate."""
    for f in prog.funs:
        StateSpace(list(dict(f.vartypes).items()), dom)


def _timed(name: str, fn) -> TaskResult:
    start = time.perf_counter()
    try:
        status, detail = fn()
    except BudgetExceeded as e:
        status, detail = BUDGET, [str(e)]
    return TaskResult(name, status, detail, time.perf_counter() - start)


def suite_task(count: int, seed: int, dom: Domain):
    def run():
        # the random loops range over a single variable x
        StateSpace([("x", INT)], dom)
        rep = run_suite(count, seed, dom)
        lines = rep.lines() + [f"loops: {count}, seed: {seed}"]
        return (OK if rep.ok else VIOLATION), lines
    return run


def cross_task(prog, encoding: str, dom: Domain, mutate: bool = False):
    def run():
        sys = encode(prog, encoding, mutate_break=mutate)
        _check_budget(prog, dom)
        rep = crosscheck(prog, sys, dom)
        return (OK if rep.ok else VIOLATION), rep.lines()
    return run


def mutant_task(dom: Domain):
    """The mutant must be caught: a violation is the expected outcome."""
    prog = load(MUTANT_SOURCE)

    def run():
        sys = encode(prog, "sum", mutate_break=True)
        _check_budget(prog, dom)
        rep = crosscheck(prog, sys, dom)
        if rep.ok:
            return VIOLATION, ["mutated break clause survived the cross-check"] + rep.lines()
        return OK, ["mutant caught"] + [l for l in rep.lines() if l.startswith("VIOLATED")]
    return run


def bridge_task(prog, dom: Domain):
    def run():
        _check_budget(prog, dom)
        res = program_agreement(prog, dom)
        return (OK if all(a.agree for a in res) else VIOLATION), [a.line() for a in res]
    return run


def oracle_check(seed: int = 0, count: int = 200, dom: Domain = Domain(), programs: Optional[list] = None,
                 encodings=ENCODINGS, mutant: bool = True, bridge: bool = True) -> OracleReport:
    """Run every oracle task; each task reports on its own and none aborts the batch."""
    rep = OracleReport()
    rep.tasks.append(_timed("suite", suite_task(count, seed, dom)))
    names = corpus.safe_names() if programs is None else programs
    for name in names:
        src = corpus.source(name) if name in corpus.names() else open(name).read()
        prog = load(src)
        for enc in encodings:
            rep.tasks.append(_timed(f"crosscheck:{name}:{enc}", cross_task(prog, enc, dom)))
        if bridge:
            rep.tasks.append(_timed(f"bridge:{name}", bridge_task(prog, dom)))
    if mutant:
        rep.tasks.append(_timed("mutant:break-clause", mutant_task(dom)))
    return rep
