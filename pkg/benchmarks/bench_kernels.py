"""Time the fixpoint kernels: compiled extension against the pure-Python twin.

    python benchmarks/bench_kernels.py --states 200 --repeat 5
"""

import argparse
import timeit

import numpy as np

from sumhorn.lang.ast import INT
from sumhorn.oracle.randloops import random_loops
from sumhorn.oracle.suite import finitize
from sumhorn.semantics import Domain, StateSpace
from sumhorn.semantics import _kernels_py as pyk
from sumhorn.semantics.relations import Rel

try:
    from sumhorn.semantics import _kernels as cyk
except ImportError:
    cyk = None


def random_rel(n, density, seed):
    rng = np.random.default_rng(seed)
    sp = StateSpace([("x", INT)], Domain(lo=0, hi=n - 1))
    reg = [set(np.flatnonzero(rng.random(n) < density).tolist()) for _ in range(n)]
    brk = [set(np.flatnonzero(rng.random(n) < density / 4).tolist()) for _ in range(n)]
    err = (rng.random(n) < 0.05).astype(np.uint8)
    tt = (rng.random(n) < 0.8).astype(np.uint8)
    ff = (rng.random(n) < 0.3).astype(np.uint8)
    return Rel.from_sets(sp, reg, brk, err), tt, ff


def cases(n, density, seed, loops):
    r, tt, ff = random_rel(n, density, seed)
    start = np.zeros(n, dtype=np.uint8)
    start[0] = 1
    masks = [finitize(l).masks() for l in random_loops(loops, seed)]
    return {
        "loop_outcomes": lambda k: k.loop_outcomes(tt, ff, r.reg_ptr, r.reg_idx, r.brk_ptr, r.brk_idx, r.err),
        "closure": lambda k: k.closure(start, tt, r.reg_ptr, r.reg_idx),
        "r_star": lambda k: k.r_star(tt, ff, r.reg_ptr, r.reg_idx, r.brk_ptr, r.brk_idx),
        f"sweep x{loops}": lambda k: [k.sweep(*m) for m in masks],
    }


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=200, help="states in the random relation")
    ap.add_argument("--density", type=float, default=0.05, help="chance of each successor edge")
    ap.add_argument("--loops", type=int, default=50, help="random loops for the sweep")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    impls = [("python", pyk)] + ([("cython", cyk)] if cyk is not None else [])
    print(f"{'kernel':16}" + "".join(f"{name:>12}" for name, _ in impls) + ("     speedup" if cyk else ""))
    for label, fn in cases(args.states, args.density, args.seed, args.loops).items():
        times = [best(lambda k=k: fn(k), args.repeat) for _, k in impls]
        row = f"{label:16}" + "".join(f"{t * 1000:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)
    if cyk is None:
        print("compiled kernels not built; only the pure-Python times are shown")


if __name__ == "__main__":
    main()
