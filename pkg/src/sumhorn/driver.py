"""Batch verification: parse, encode, solve, validate, report."""

from __future__ import annotations

import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import corpus
from .chc.model import Model, from_definitions
from .chc.smtlib import emit
from .chc.solver import BACKENDS, Crash, Sat, Unsat, executable, solve
from .chc.transform import NotEliminable, eliminate, instantiate, relationalize
from .chc.validate import validate_model
from .lang import CheckError, ParseError, load
from .semantics.domain import Domain
from .vcgen import ENCODINGS, annotations_to_constraints, encode

VERIFIED, REFUTED, UNKNOWN = "Verified", "Refuted", "Unknown"
EXIT_VERIFIED, EXIT_REFUTED, EXIT_UNKNOWN = 0, 10, 20
COLUMNS = ("task", "encoding", "backend", "verdict", "time_ms", "validated")
ANNOTATION_MODES = ("auto", "check", "ignore")


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    encoding: str = "both"
    backend: str = "z3"
    timeout: float = 900.0
    emit_chc: Optional[str] = None
    validate_model: bool = False
    domain_bound: Optional[int] = None
    annotations: str = "auto"
    # share of the budget given to inference before annotations are consulted
    infer_slice: float = 5.0
    query_timeout: float = 30.0
    workers: int = 4
    output: str = "human"

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.encoding not in ENCODINGS + ("both",):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.backend not in BACKENDS + ("all",):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.annotations not in ANNOTATION_MODES:
            raise ValueError(f"unknown annotation mode {self.annotations!r}")

    @property
    def encodings(self) -> tuple:
        return ENCODINGS if self.encoding == "both" else (self.encoding,)

    @property
    def backends(self) -> tuple:
        return BACKENDS if self.backend == "all" else (self.backend,)

    @property
    def domain(self) -> Optional[Domain]:
        return None if self.domain_bound is None else Domain(hi=self.domain_bound)


@dataclass
class Verdict:
    task: str
    encoding: str
    backend: str
    verdict: str = UNKNOWN
    time_ms: int = 0
    validated: str = "-"
    route: str = ""
    reason: str = ""
    caveat: str = ""
    model: list = field(default_factory=list)

    def row(self) -> dict:
        out = {k: getattr(self, k) for k in COLUMNS}
        out.update(route=self.route, reason=self.reason, caveat=self.caveat, model=self.model)
        return out


@dataclass
class Task:
    name: str
    source: str
    path: str = ""


def load_tasks(inputs) -> list[Task]:
    """Files, directories of ``*.imp`` files, or bundled corpus names."""
    out = []
    for item in inputs:
        if os.path.isdir(item):
            for f in sorted(os.listdir(item)):
                if f.endswith(".imp"):
                    p = os.path.join(item, f)
                    out.append(Task(f[:-4], open(p).read(), p))
        elif os.path.isfile(item):
            base = os.path.basename(item)
            out.append(Task(base[:-4] if base.endswith(".imp") else base, open(item).read(), item))
        elif item in corpus.names():
            out.append(Task(item, corpus.source(item), corpus.path(item)))
        else:
            out.append(Task(item, "", item))
    return out


# -- one run -------------------------------------------------------------------


class _Clock:
    def __init__(self, budget: float):
        self.start = time.perf_counter()
        self.budget = budget

    def left(self) -> float:
        return self.budget - (time.perf_counter() - self.start)

    def ms(self) -> int:
        return int((time.perf_counter() - self.start) * 1000)


def _infer(sys, rsys, name, backend, timeout, workdir):
    return solve(emit(rsys), backend, timeout, workdir, f"{name}.infer", rsys.preds, ())


def _from_outcome(v: Verdict, out, route: str) -> bool:
    """Fill ``v`` from a solver outcome; True when decisive."""
    v.route = route
    if isinstance(out, Sat):
        v.verdict = VERIFIED
        if out.model is not None:
            v.model = out.model.lines()
        elif out.model_error:
            v.reason = f"model not parsed: {out.model_error}"
        return True
    if isinstance(out, Unsat):
        v.verdict = REFUTED
        v.caveat = "relative to encoding"
        return True
    v.verdict = UNKNOWN
    v.reason = f"crash: {out.stderr}" if isinstance(out, Crash) else out.reason
    return False


def _validate(v: Verdict, sys, model: Optional[Model], cfg: RunConfig, prog, clock):
    if not cfg.validate_model:
        return
    if model is None:
        v.validated = "no-model"
        return
    m = Model({p.name: model.defs[p.name] for p in sys.preds if p.name in model})
    rep = validate_model(sys, m, max(1.0, min(cfg.query_timeout, clock.left())), cfg.domain, prog, cfg.workers)
    v.validated = rep.status


def check_annotated(prog, sys, backend: str, timeout: float, workdir=None, name: str = "task",
                    query_timeout: float = 30.0, workers: int = 4):
    """Annotation route: annotated predicates are fixed, the rest is solved for.

    Returns ``(status, model, detail)`` with status ``valid`` (a solution
    exists that extends the annotations), ``failed`` or ``undecided``.  When
    every predicate is defined or eliminated, the model is ``None``: the
    per-clause validity check is itself the validation.
    """
    start = time.perf_counter()
    s = annotations_to_constraints(prog, sys)
    if not s.definitions:
        return "undecided", None, "no annotations"
    defs = from_definitions(s)
    inst = instantiate(s, s.definitions)
    try:
        inst = eliminate(inst, ())
    except NotEliminable:
        pass
    if not inst.used_preds():
        rep = validate_model(inst, Model({}), min(query_timeout, timeout), None, None, workers)
        if rep.status == "valid":
            return "valid", None, "all annotation conditions valid"
        bad = [c.label for c in rep.checks if c.status != "valid"]
        status = "failed" if rep.status == "invalid" else "undecided"
        return status, None, f"annotation conditions {rep.status}: {', '.join(bad)}"
    rinst = relationalize(inst)
    left = timeout - (time.perf_counter() - start)
    out = solve(emit(rinst), backend, max(1.0, left), workdir, f"{name}.annot", rinst.preds, ())
    if isinstance(out, Sat):
        model = Model(dict(defs.defs))
        if out.model is not None:
            model.defs.update(out.model.defs)
            return "valid", model, "annotations extended by the solver"
        return "valid", None, "annotations extended by the solver"
    if isinstance(out, Unsat):
        return "failed", None, "annotations admit no solution"
    return "undecided", None, getattr(out, "reason", "crash")


def run_one(prog, task: str, enc: str, backend: str, cfg: RunConfig, workdir: Optional[str] = None) -> Verdict:
    clock = _Clock(cfg.timeout)
    v = Verdict(task, enc, backend)
    sys = encode(prog, enc)
    rsys = relationalize(sys)
    name = f"{task}.{enc}"
    if cfg.emit_chc:
        write_chc(cfg.emit_chc, name, sys, rsys)
    if executable(backend) is None:
        v.reason = "unavailable"
        return v
    try:
        has_annot = cfg.annotations != "ignore" and bool(annotations_to_constraints(prog, sys).definitions)
    except CheckError:
        has_annot = False
    notes = []

    if has_annot and cfg.annotations == "auto" and cfg.infer_slice > 0:
        out = _infer(sys, rsys, name, backend, min(cfg.infer_slice, clock.left()), workdir)
        if _from_outcome(v, out, "infer"):
            _validate(v, sys, getattr(out, "model", None), cfg, prog, clock)
            v.time_ms = clock.ms()
            return v
        notes.append(f"infer: {v.reason}")
    if has_annot:
        status, model, detail = check_annotated(prog, sys, backend, max(1.0, clock.left()), workdir, name,
                                                cfg.query_timeout, cfg.workers)
        if status == "valid":
            v.verdict, v.route, v.reason = VERIFIED, "check", detail
            if model is not None:
                v.model = model.lines()
                _validate(v, sys, model, cfg, prog, clock)
            else:
                v.model = from_definitions(annotations_to_constraints(prog, sys)).lines()
                if cfg.validate_model:
                    v.validated = "valid"
            v.time_ms = clock.ms()
            return v
        notes.append(f"check: {detail}")
        if cfg.annotations == "check":
            v.verdict, v.route, v.reason = UNKNOWN, "check", "; ".join(notes)
            v.time_ms = clock.ms()
            return v
    if clock.left() > 0.5:
        out = _infer(sys, rsys, name, backend, clock.left(), workdir)
        if _from_outcome(v, out, "infer"):
            _validate(v, sys, getattr(out, "model", None), cfg, prog, clock)
        else:
            notes.append(f"infer: {v.reason}")
            v.reason = "; ".join(notes)
    else:
        v.verdict, v.route, v.reason = UNKNOWN, v.route or "check", "; ".join(notes + ["timeout"])
    v.time_ms = clock.ms()
    return v


def write_chc(directory: str, name: str, sys, rsys=None):
    """``name.smt2`` with spec-function axioms; ``name.horn.smt2`` when relational form differs."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, f"{name}.smt2"), "w") as fh:
        fh.write(emit(sys).text)
    if rsys is not None and rsys is not sys:
        with open(os.path.join(directory, f"{name}.horn.smt2"), "w") as fh:
            fh.write(emit(rsys).text)


def verify(cfg: RunConfig) -> list[Verdict]:
    """Every task × encoding × backend; rows ordered by task, then encoding, then backend."""
    jobs = []
    for t in load_tasks(cfg.inputs):
        try:
            if not t.source:
                raise FileNotFoundError(f"no such file or benchmark: {t.path}")
            prog = load(t.source)
            err = None
        except (ParseError, CheckError, OSError) as e:
            prog, err = None, f"error: {e}"
        for enc in cfg.encodings:
            for b in cfg.backends:
                jobs.append((t.name, prog, err, enc, b))

    def work(job):
        name, prog, err, enc, b = job
        if err is not None:
            return Verdict(name, enc, b, UNKNOWN, 0, "-", "", err)
        try:
            if cfg.emit_chc:
                return run_one(prog, name, enc, b, cfg, cfg.emit_chc)
            with tempfile.TemporaryDirectory(prefix="sumhorn-run-") as d:
                return run_one(prog, name, enc, b, cfg, d)
        except Exception as e:  # one task must not abort the batch
            return Verdict(name, enc, b, UNKNOWN, 0, "-", "", f"error: {type(e).__name__}: {e}")

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as ex:
        return list(ex.map(work, jobs))


def exit_code(verdicts) -> int:
    if all(v.verdict == VERIFIED for v in verdicts):
        return EXIT_VERIFIED
    if any(v.verdict == REFUTED for v in verdicts):
        return EXIT_REFUTED
    return EXIT_UNKNOWN


def tallies(verdicts) -> dict:
    """Per encoding: counts of each verdict."""
    out: dict = {}
    for v in verdicts:
        d = out.setdefault(v.encoding, {VERIFIED: 0, REFUTED: 0, UNKNOWN: 0})
        d[v.verdict] += 1
    return out


def report(verdicts, fmt: str = "human") -> str:
    if not verdicts:
        return ""
    if fmt == "json":
        return "\n".join(json.dumps(v.row()) for v in verdicts)
    rows = [COLUMNS] + [tuple(str(getattr(v, k)) for k in COLUMNS) for v in verdicts]
    widths = [max(len(r[i]) for r in rows) for i in range(len(COLUMNS))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    for v in verdicts:
        if v.reason and v.verdict != VERIFIED:
            lines.append(f"  {v.task}/{v.encoding}/{v.backend}: {v.reason}")
    for enc, d in tallies(verdicts).items():
        lines.append(f"{enc}: " + ", ".join(f"{d[k]} {k}" for k in (VERIFIED, REFUTED, UNKNOWN)))
    return "\n".join(lines)
