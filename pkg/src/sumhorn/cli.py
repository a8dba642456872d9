"""Command line: ``sumhorn verify|prove|bridge|oracle-check``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import corpus
from .chc.solver import BACKENDS
from .driver import ANNOTATION_MODES, RunConfig, exit_code, report, verify
from .lang import load, parse_expr
from .lang.pretty import pp_expr
from .semantics.domain import Domain
from .vcgen.encode import ENCODINGS

# prove and bridge failures that are not verdicts
EXIT_USAGE = 2


def _source(item: str) -> str:
    if os.path.isfile(item):
        with open(item) as fh:
            return fh.read()
    if item in corpus.names():
        return corpus.source(item)
    raise SystemExit(f"sumhorn: no such file or corpus program: {item}")


def _expr(text):
    return None if text is None else parse_expr(text)


def cmd_verify(args) -> int:
    inputs = list(args.inputs)
    if args.corpus:
        inputs += corpus.names()
    cfg = RunConfig(inputs=inputs, encoding=args.encoding, backend=args.backend, timeout=args.timeout,
                    emit_chc=args.emit_chc, validate_model=args.validate_model, domain_bound=args.domain_bound,
                    annotations=args.annotations, workers=args.workers,
                    output="json" if args.json else "human")
    verdicts = verify(cfg)
    text = report(verdicts, cfg.output)
    if text:
        print(text)
    return exit_code(verdicts)


def cmd_prove(args) -> int:
    from .hoare import MissingAnnot, Unsupported, discharge, program_vcs

    prog = load(_source(args.file))
    try:
        vcs = program_vcs(prog, args.fun)
    except (MissingAnnot, Unsupported) as e:
        print(f"sumhorn: {e}", file=sys.stderr)
        return EXIT_USAGE
    rep = discharge(vcs, args.backend, args.timeout, prog.spec_funs, args.workers)
    if args.json:
        for r in rep.results:
            print(json.dumps({"vc": r.name, "group": r.vc.group, "verdict": r.status, "time_ms": r.time_ms,
                              "witness": r.witness, "note": r.note}))
    else:
        print("\n".join(rep.lines()))
        if args.verbose:
            for vc in vcs:
                print(vc)
    if rep.ok:
        return 0
    return 10 if rep.invalid else 20


def cmd_bridge(args) -> int:
    from .bridge import lift, loop_spec, lower

    prog = load(_source(args.file))
    pre = _expr(args.pre)
    post = _expr(args.post)
    try:
        spec = loop_spec(prog, args.loop, args.fun, pre if pre is not None else parse_expr("true"),
                         post if post is not None else parse_expr("true"), _expr(args.inv), _expr(args.summary))
    except (IndexError, ValueError) as e:
        print(f"sumhorn: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.direction == "lift":
        if spec.J is None or spec.R is None:
            print("sumhorn: lift needs a safe invariant and a summary", file=sys.stderr)
            return EXIT_USAGE
        print(pp_expr(lift(spec)))
    else:
        if spec.I is None:
            print("sumhorn: lower needs an invariant", file=sys.stderr)
            return EXIT_USAGE
        print(pp_expr(lower(spec)))
    return 0


def cmd_oracle_check(args) -> int:
    from .oracle.check import oracle_check

    dom = Domain(hi=args.domain_bound, budget=args.budget)
    rep = oracle_check(args.seed, args.count, dom, args.inputs or None, bridge=not args.no_bridge)
    if args.json:
        for t in rep.tasks:
            print(json.dumps({"task": t.name, "status": t.status, "elapsed": round(t.elapsed, 3),
                              "detail": t.detail}))
    else:
        print("\n".join(rep.lines(args.verbose)))
    return rep.exit_code()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sumhorn", description="Loop invariants and loop summaries as Horn clauses.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="encode, solve and report")
    v.add_argument("inputs", nargs="*", help="files, directories or bundled program names")
    v.add_argument("--corpus", action="store_true", help="add every bundled program")
    v.add_argument("--encoding", choices=ENCODINGS + ("both",), default="both",
                   help="inv, sum, combined, or both (all three)")
    v.add_argument("--backend", choices=BACKENDS + ("all",), default="z3")
    v.add_argument("--timeout", type=float, default=900.0, help="seconds per run")
    v.add_argument("--emit-chc", metavar="DIR", help="write the clause systems to DIR")
    v.add_argument("--validate-model", action="store_true", help="check returned models clause by clause")
    v.add_argument("--domain-bound", type=int, metavar="N", help="also check models on values 0..N")
    v.add_argument("--annotations", choices=ANNOTATION_MODES, default="auto")
    v.add_argument("--workers", type=int, default=4)
    v.add_argument("--json", action="store_true", help="JSON lines output")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("prove", help="discharge the Hoare verification conditions of a program")
    p.add_argument("file")
    p.add_argument("--fun", default="main")
    p.add_argument("--backend", choices=BACKENDS, default="z3")
    p.add_argument("--timeout", type=float, default=30.0, help="seconds per VC")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--json", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true", help="print every VC")
    p.set_defaults(func=cmd_prove)

    b = sub.add_parser("bridge", help="turn a summary into an invariant (lift) or back (lower)")
    b.add_argument("direction", choices=("lift", "lower"))
    b.add_argument("file")
    b.add_argument("--loop", type=int, default=0, help="loop index in preorder")
    b.add_argument("--fun", default="main")
    b.add_argument("--pre", help="precondition at the loop head")
    b.add_argument("--post", help="postcondition after the loop")
    b.add_argument("--inv", help="override the loop invariant")
    b.add_argument("--summary", help="override the loop summary")
    b.set_defaults(func=cmd_bridge)

    o = sub.add_parser("oracle-check", help="finite-domain property suite and clause cross-checks")
    o.add_argument("inputs", nargs="*", help="programs to cross-check (default: the safe corpus)")
    o.add_argument("--count", type=int, default=200, help="random loops in the suite")
    o.add_argument("--domain-bound", type=int, default=2, metavar="N", help="values range over 0..N")
    o.add_argument("--budget", type=int, default=10**6, help="largest state space to enumerate")
    o.add_argument("--no-bridge", action="store_true", help="skip the lift/lower agreement tasks")
    o.add_argument("--json", action="store_true")
    o.add_argument("-v", "--verbose", action="store_true")
    o.set_defaults(func=cmd_oracle_check)

    for sp in (v, p, b, o):
        sp.add_argument("--seed", type=int, default=0, help="random seed")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"sumhorn: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
