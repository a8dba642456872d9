"""Pure-Python fixpoint kernels.

Relations are passed in CSR form: successors of state ``s`` are
``idx[ptr[s]:ptr[s + 1]]``.  ``tt[s]`` / ``ff[s]`` say whether the loop test
may be true / false in ``s``.  The Cython module ``_kernels`` has the same API.
"""

import numpy as np

SWEEP_KEYS = (
    "loops", "inv_sound", "sum_sound", "lift_correct", "lower_fwd", "lower_bwd", "exists_fwd", "exists_bwd",
    "checked_I", "checked_JR",
)


def _succ(ptr, idx, s):
    return idx[ptr[s]:ptr[s + 1]]


def loop_outcomes(tt, ff, reg_ptr, reg_idx, brk_ptr, brk_idx, err):
    """Least loop relation: per source, the regular exits and whether an error is reachable."""
    n = len(tt)
    reg_ptr, reg_idx = reg_ptr.tolist(), reg_idx.tolist()
    brk_ptr, brk_idx = brk_ptr.tolist(), brk_idx.tolist()
    tt, ff, err = tt.tolist(), ff.tolist(), err.tolist()
    out_ptr = [0]
    out_idx: list = []
    werr = [0] * n
    for s in range(n):
        seen = {s}
        stack = [s]
        exits = set()
        e = 0
        while stack:
            u = stack.pop()
            if ff[u]:
                exits.add(u)
            if tt[u]:
                if err[u]:
                    e = 1
                exits.update(brk_idx[brk_ptr[u]:brk_ptr[u + 1]])
                for v in reg_idx[reg_ptr[u]:reg_ptr[u + 1]]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
        out_idx.extend(sorted(exits))
        out_ptr.append(len(out_idx))
        werr[s] = e
    return (np.asarray(out_ptr, dtype=np.int64), np.asarray(out_idx, dtype=np.int64),
            np.asarray(werr, dtype=np.uint8))


def closure(start, tt, reg_ptr, reg_idx):
    """Smallest superset of ``start`` closed under regular iterations."""
    reg_ptr, reg_idx, tt = reg_ptr.tolist(), reg_idx.tolist(), tt.tolist()
    out = start.astype(np.uint8).copy()
    stack = [int(s) for s in np.flatnonzero(out)]
    while stack:
        u = stack.pop()
        if not tt[u]:
            continue
        for v in reg_idx[reg_ptr[u]:reg_ptr[u + 1]]:
            if not out[v]:
                out[v] = 1
                stack.append(v)
    return out


def r_star(tt, ff, reg_ptr, reg_idx, brk_ptr, brk_idx):
    """Least fixpoint of the three R* rules, rows kept as integer bitsets."""
    n = len(tt)
    reg_ptr, reg_idx = reg_ptr.tolist(), reg_idx.tolist()
    brk_ptr, brk_idx = brk_ptr.tolist(), brk_idx.tolist()
    tt, ff = tt.tolist(), ff.tolist()
    rows = [(1 << s) if ff[s] else 0 for s in range(n)]
    brk_bits = [0] * n
    for s in range(n):
        if tt[s]:
            for v in brk_idx[brk_ptr[s]:brk_ptr[s + 1]]:
                brk_bits[s] |= 1 << v
    tmask = sum(1 << s for s in range(n) if tt[s])
    changed = True
    while changed:
        changed = False
        for s0 in range(n):
            r = rows[s0]
            live = r & tmask
            add = 0
            while live:
                low = live & -live
                add |= brk_bits[low.bit_length() - 1]
                live ^= low
            if add & ~r:
                rows[s0] = r | add
                changed = True
        for s in range(n):
            if not tt[s]:
                continue
            r = rows[s]
            for v in reg_idx[reg_ptr[s]:reg_ptr[s + 1]]:
                r |= rows[v]
            if r != rows[s]:
                rows[s] = r
                changed = True
    out = np.zeros((n, n), dtype=np.uint8)
    for s in range(n):
        r = rows[s]
        while r:
            low = r & -r
            out[s, low.bit_length() - 1] = 1
            r ^= low
    return out


# --------------------------------------------------------------------------
# exhaustive sweep over tiny state spaces (n <= 3)


def _sub(a, b):
    return a & ~b == 0


def sweep(n, tmask, fmask, reg, brk, err, wreg, werr):
    """Count violations of the soundness/completeness/bridge results on one loop.

    States are bits ``0..n-1``.  ``reg``/``brk``/``wreg`` are per-state successor
    masks, ``err``/``werr`` per-state flags.  Every P, Q, I, J (all subsets) and
    every R (all subsets of S x S) is enumerated.
    """
    full = (1 << n) - 1
    nrel = 1 << (n * n)
    c = dict.fromkeys(SWEEP_KEYS, 0)
    c["loops"] = 1
    tstates = [s for s in range(n) if tmask >> s & 1]
    fstates = [s for s in range(n) if fmask >> s & 1]

    def rows(R):
        return [(R >> (n * s)) & full for s in range(n)]

    post = [0] * (full + 1)
    errs = [False] * (full + 1)
    brks = [0] * (full + 1)
    for X in range(full + 1):
        for s in tstates:
            if X >> s & 1:
                post[X] |= reg[s]
                brks[X] |= brk[s]
                errs[X] = errs[X] or bool(err[s])

    # summary conditions 1-3 do not depend on P, Q
    summaries = []
    for R in range(nrel):
        rw = rows(R)
        if any(not (rw[s] >> s & 1) for s in fstates):
            continue
        if any(not _sub(brk[s], rw[s]) for s in tstates):
            continue
        ok = True
        for s in tstates:
            m = reg[s]
            while m:
                low = m & -m
                if not _sub(rw[low.bit_length() - 1], rw[s]):
                    ok = False
                    break
                m ^= low
            if not ok:
                break
        if ok:
            summaries.append(rw)

    for P in range(full + 1):
        valid_for = [True] * (full + 1)
        for Q in range(full + 1):
            v = True
            for s in range(n):
                if P >> s & 1 and (werr[s] or not _sub(wreg[s], Q)):
                    v = False
                    break
            valid_for[Q] = v
        inductive = [X for X in range(full + 1) if _sub(P, X) and _sub(post[X], X)]
        safe = [X for X in inductive if not errs[X]]

        # lifted conjunct: states whose remaining behaviour is subsumed by some P-state
        lifts: dict = {}
        for rw in summaries:
            L = 0
            for s in range(n):
                for s0 in range(n):
                    if P >> s0 & 1 and _sub(rw[s], rw[s0]):
                        L |= 1 << s
                        break
            key = (L, tuple(rw[s0] for s0 in range(n) if P >> s0 & 1))
            lifts[key] = lifts.get(key, 0) + 1

        for Q in range(full + 1):
            def correct(X):
                return _sub(brks[X], Q) and _sub(X & fmask, Q)

            correct_invs = [X for X in safe if correct(X)]
            c["checked_I"] += full + 1
            if not valid_for[Q]:
                c["inv_sound"] += len(correct_invs)

            n_correct_R = 0
            for (L, prow), cnt in lifts.items():
                if all(_sub(r, Q) for r in prow):
                    n_correct_R += cnt
                    for J in safe:
                        I = J & L
                        ok = _sub(P, I) and _sub(post[I], I) and not errs[I] and correct(I)
                        if not ok:
                            c["lift_correct"] += cnt
            c["checked_JR"] += len(safe) * n_correct_R
            if not valid_for[Q]:
                c["sum_sound"] += len(safe) * n_correct_R

            for X in range(full + 1):
                is_correct = X in correct_invs
                is_safe = X in safe
                # lowered summary R(s, sn) := X(s) ==> Q(sn)
                lr = [Q if X >> s & 1 else full for s in range(n)]
                low_ok = (all(lr[s] >> s & 1 for s in fstates)
                          and all(_sub(brk[s], lr[s]) for s in tstates)
                          and all(_sub(lr[v], lr[s]) for s in tstates for v in range(n) if reg[s] >> v & 1)
                          and all(_sub(lr[s0], Q) for s0 in range(n) if P >> s0 & 1))
                if is_correct and not (is_safe and low_ok):
                    c["lower_fwd"] += 1
                if is_safe and low_ok and not is_correct:
                    c["lower_bwd"] += 1

            has_I = bool(correct_invs)
            has_JR = bool(safe) and n_correct_R > 0
            if has_I and not has_JR:
                c["exists_fwd"] += 1
            if has_JR and not has_I:
                c["exists_bwd"] += 1
    return np.asarray([c[k] for k in SWEEP_KEYS], dtype=np.int64)
