"""Backend processes: HORN solving and single SMT queries."""

from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from ..lang.ast import Expr, neg
from .model import parse_model
from .sexpr import ModelParseError, read_all, show
from .smtlib import SmtScript, declare_spec, define_spec_rec, spec_axioms, symbol, term, sort

BACKENDS = ("z3", "eldarica")
GRACE_S = 2.0
# z3 configurations raced against each other; the first decisive answer wins
Z3_PORTFOLIO = (
    (),
    ("fp.xform.inline_eager=false", "fp.xform.inline_linear=false"),
    ("fp.spacer.global=true",),
)
_VERDICT = re.compile(r"^(sat|unsat|unknown|timeout)\s*$", re.M)


@dataclass
class SolverOutcome:
    backend: str = ""
    time_ms: int = 0
    stdout: str = field(default="", repr=False)

    verdict = "unknown"


@dataclass
class Sat(SolverOutcome):
    model: Optional[object] = None
    model_error: str = ""
    verdict = "sat"


@dataclass
class Unsat(SolverOutcome):
    verdict = "unsat"


@dataclass
class Unknown(SolverOutcome):
    reason: str = "unknown"
    verdict = "unknown"


@dataclass
class Crash(SolverOutcome):
    stderr: str = ""
    verdict = "crash"


def executable(backend: str) -> Optional[str]:
    if backend == "z3":
        return os.environ.get("SUMHORN_Z3") or shutil.which("z3")
    if backend == "eldarica":
        return os.environ.get("SUMHORN_ELDARICA") or shutil.which("eld") or shutil.which("eldarica")
    raise ValueError(f"unknown backend {backend!r}")


def command(backend: str, exe: str, path: str, timeout: float, options=()) -> list[str]:
    secs = max(1, int(timeout + 0.999))
    if backend == "z3":
        return [exe, "-smt2", f"-T:{secs}", *options, path]
    return [exe, "-ssol", f"-t:{secs}", *options, path]


def run_process(cmd: list[str], timeout: float, cancel: Optional[threading.Event] = None) -> tuple:
    """``(returncode, stdout, stderr, timed_out)``.

    The process is killed ``GRACE_S`` after the deadline, or as soon as
    ``cancel`` is set.
    """
    proc = subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
                            start_new_session=True)
    deadline = time.monotonic() + timeout + GRACE_S
    while True:
        try:
            out, err = proc.communicate(timeout=0.05)
            return proc.returncode, out, err, False
        except subprocess.TimeoutExpired:
            if time.monotonic() >= deadline or (cancel is not None and cancel.is_set()):
                proc.kill()
                out, err = proc.communicate()
                return proc.returncode, out or "", err or "", True


def run_solver(script, backend: str = "z3", timeout: float = 900, workdir: Optional[str] = None,
               name: str = "query", preds=(), spec_funs=(), options=(),
               cancel: Optional[threading.Event] = None) -> SolverOutcome:
    """Solve one HORN script.  The script file is kept when ``workdir`` is given."""
    text = script.text if isinstance(script, SmtScript) else str(script)
    exe = executable(backend)
    if exe is None:
        return Unknown(backend, 0, "", "unavailable")
    tmp = None
    if workdir is None:
        tmp = tempfile.TemporaryDirectory(prefix="sumhorn-")
        workdir = tmp.name
    os.makedirs(workdir, exist_ok=True)
    path = os.path.join(workdir, f"{name}.{backend}.smt2")
    with open(path, "w") as fh:
        fh.write(text)
    start = time.perf_counter()
    try:
        code, out, err, timed_out = run_process(command(backend, exe, path, timeout, options), timeout, cancel)
    except OSError as e:
        return Crash(backend, 0, "", str(e))
    finally:
        if tmp is not None:
            tmp.cleanup()
    ms = int((time.perf_counter() - start) * 1000)
    if timed_out:
        return Unknown(backend, ms, out, "cancelled" if cancel is not None and cancel.is_set() else "timeout")
    m = _VERDICT.search(out)
    if m is None:
        if code != 0:
            return Crash(backend, ms, out, (err or out).strip()[-400:])
        return Unknown(backend, ms, out, "no verdict")
    v = m.group(1)
    if v == "unsat":
        return Unsat(backend, ms, out)
    if v == "sat":
        rest = out[m.end():]
        if "define-fun" not in rest:
            return Sat(backend, ms, out)
        try:
            return Sat(backend, ms, out, parse_model(rest, preds, spec_funs))
        except ModelParseError as e:
            return Sat(backend, ms, out, None, str(e))
    return Unknown(backend, ms, out, "timeout" if v == "timeout" else "unknown")


def solve(script, backend: str = "z3", timeout: float = 900, workdir: Optional[str] = None,
          name: str = "query", preds=(), spec_funs=(), portfolio: bool = True) -> SolverOutcome:
    """Race the backend configurations; the first sat/unsat answer wins."""
    configs = Z3_PORTFOLIO if backend == "z3" and portfolio else ((),)
    if len(configs) == 1:
        return run_solver(script, backend, timeout, workdir, name, preds, spec_funs, configs[0])
    text = script.text if isinstance(script, SmtScript) else str(script)
    if workdir is not None:
        os.makedirs(workdir, exist_ok=True)
        with open(os.path.join(workdir, f"{name}.{backend}.smt2"), "w") as fh:
            fh.write(text)
    cancel = threading.Event()
    results: list = [None] * len(configs)
    done = threading.Condition()

    def work(k):
        r = run_solver(text, backend, timeout, None, f"{name}-{k}", preds, spec_funs, configs[k], cancel)
        with done:
            results[k] = r
            if r.verdict in ("sat", "unsat"):
                cancel.set()
            done.notify_all()

    threads = [threading.Thread(target=work, args=(k,), daemon=True) for k in range(len(configs))]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        if r.verdict in ("sat", "unsat"):
            return r
    for r in results:
        if isinstance(r, Crash):
            return r
    return max(results, key=lambda r: r.time_ms)


# -- single satisfiability queries -------------------------------------------


@dataclass
class QueryResult:
    status: str  # "sat" | "unsat" | "unknown"
    values: dict = field(default_factory=dict)
    time_ms: int = 0
    reason: str = ""


def query_text(formula: Expr, consts, spec_funs=(), get_values: bool = True, spec_mode: str = "rec") -> str:
    """Single query; spec functions as recursive definitions or as quantified axioms."""
    lines = ["(set-option :produce-models true)"]
    if spec_mode == "rec":
        for f in spec_funs:
            lines += define_spec_rec(f)
    else:
        lines += [declare_spec(f) for f in spec_funs]
        for f in spec_funs:
            lines += spec_axioms(f)
    lines += [f"(declare-fun {symbol(n)} () {sort(t)})" for n, t in consts]
    lines.append(f"(assert {term(formula)})")
    lines.append("(check-sat)")
    if get_values and consts:
        lines.append(f"(get-value ({' '.join(symbol(n) for n, _ in consts)}))")
    return "\n".join(lines) + "\n"


def check_sat(formula: Expr, consts, spec_funs=(), timeout: float = 30, spec_mode: str = "rec") -> QueryResult:
    """Satisfiability of a ground formula with z3; values of ``consts`` when sat."""
    exe = executable("z3")
    if exe is None:
        return QueryResult("unknown", reason="unavailable")
    text = query_text(formula, consts, spec_funs, spec_mode=spec_mode)
    start = time.perf_counter()
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write(text)
        path = fh.name
    try:
        code, out, err, timed_out = run_process(command("z3", exe, path, timeout), timeout)
    finally:
        os.unlink(path)
    ms = int((time.perf_counter() - start) * 1000)
    if timed_out:
        return QueryResult("unknown", time_ms=ms, reason="timeout")
    m = _VERDICT.search(out)
    if m is None:
        return QueryResult("unknown", time_ms=ms, reason=(err or out).strip()[-200:] or "no verdict")
    v = m.group(1)
    if v != "sat":
        return QueryResult(v if v == "unsat" else "unknown", time_ms=ms, reason="" if v == "unsat" else v)
    return QueryResult("sat", parse_values(out[m.end():]), ms)


def parse_values(text: str) -> dict:
    """``((x 1) (y (- 2)))`` to ``{"x": 1, "y": -2}``; non-integer values kept as text."""
    try:
        items = read_all(text)
    except ModelParseError:
        return {}
    out = {}
    for item in items:
        if not isinstance(item, list):
            continue
        for pair in item:
            if isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str):
                out[pair[0]] = _value(pair[1])
    return out


def _value(v):
    if isinstance(v, str):
        if v.isdigit():
            return int(v)
        if v in ("true", "false"):
            return v == "true"
        return v
    if len(v) == 2 and v[0] == "-" and isinstance(v[1], str) and v[1].isdigit():
        return -int(v[1])
    return show(v)


def validity(formula: Expr, consts, spec_funs=(), timeout: float = 30, spec_mode: str = "rec") -> QueryResult:
    """Validity of ``formula`` over ``consts``: ``valid``, ``invalid`` with witness, or ``unknown``."""
    r = check_sat(neg(formula), consts, spec_funs, timeout, spec_mode)
    status = {"unsat": "valid", "sat": "invalid"}.get(r.status, "unknown")
    return QueryResult(status, r.values, r.time_ms, r.reason)
