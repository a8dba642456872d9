# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled fixpoint kernels; same API as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector

cnp.import_array()

SWEEP_KEYS = (
    "loops", "inv_sound", "sum_sound", "lift_correct", "lower_fwd", "lower_bwd", "exists_fwd", "exists_bwd",
    "checked_I", "checked_JR",
)


def loop_outcomes(const unsigned char[:] tt, const unsigned char[:] ff,
                  const long long[:] reg_ptr, const long long[:] reg_idx,
                  const long long[:] brk_ptr, const long long[:] brk_idx,
                  const unsigned char[:] err):
    cdef Py_ssize_t n = tt.shape[0]
    cdef vector[long long] out_idx
    cdef vector[long long] stack
    cdef vector[long long] exits
    cdef long long[:] seen = np.full(n, -1, dtype=np.int64)
    cdef long long[:] exit_mark = np.full(n, -1, dtype=np.int64)
    out_ptr = np.zeros(n + 1, dtype=np.int64)
    werr = np.zeros(n, dtype=np.uint8)
    cdef long long[:] optr = out_ptr
    cdef unsigned char[:] we = werr
    cdef Py_ssize_t s, k
    cdef long long u, v
    cdef unsigned char e
    for s in range(n):
        stack.clear()
        exits.clear()
        stack.push_back(s)
        seen[s] = s
        e = 0
        while stack.size() > 0:
            u = stack.back()
            stack.pop_back()
            if ff[u] and exit_mark[u] != s:
                exit_mark[u] = s
                exits.push_back(u)
            if tt[u]:
                if err[u]:
                    e = 1
                for k in range(brk_ptr[u], brk_ptr[u + 1]):
                    v = brk_idx[k]
                    if exit_mark[v] != s:
                        exit_mark[v] = s
                        exits.push_back(v)
                for k in range(reg_ptr[u], reg_ptr[u + 1]):
                    v = reg_idx[k]
                    if seen[v] != s:
                        seen[v] = s
                        stack.push_back(v)
        _sort(exits)
        for k in range(<Py_ssize_t>exits.size()):
            out_idx.push_back(exits[k])
        optr[s + 1] = out_idx.size()
        we[s] = e
    idx = np.empty(out_idx.size(), dtype=np.int64)
    cdef long long[:] iv = idx
    for k in range(<Py_ssize_t>out_idx.size()):
        iv[k] = out_idx[k]
    return out_ptr, idx, werr


cdef void _sort(vector[long long]& v):
    # insertion sort; exit sets are small
    cdef Py_ssize_t i, j
    cdef long long x
    for i in range(1, <Py_ssize_t>v.size()):
        x = v[i]
        j = i - 1
        while j >= 0 and v[j] > x:
            v[j + 1] = v[j]
            j -= 1
        v[j + 1] = x


def closure(start, const unsigned char[:] tt, const long long[:] reg_ptr, const long long[:] reg_idx):
    out = np.ascontiguousarray(start, dtype=np.uint8).copy()
    cdef unsigned char[:] o = out
    cdef Py_ssize_t n = tt.shape[0]
    cdef vector[long long] stack
    cdef Py_ssize_t s, k
    cdef long long u, v
    for s in range(n):
        if o[s]:
            stack.push_back(s)
    while stack.size() > 0:
        u = stack.back()
        stack.pop_back()
        if not tt[u]:
            continue
        for k in range(reg_ptr[u], reg_ptr[u + 1]):
            v = reg_idx[k]
            if not o[v]:
                o[v] = 1
                stack.push_back(v)
    return out


def r_star(const unsigned char[:] tt, const unsigned char[:] ff,
           const long long[:] reg_ptr, const long long[:] reg_idx,
           const long long[:] brk_ptr, const long long[:] brk_idx):
    cdef Py_ssize_t n = tt.shape[0]
    out = np.zeros((n, n), dtype=np.uint8)
    cdef unsigned char[:, :] R = out
    cdef Py_ssize_t s0, s, k, j
    cdef long long v
    cdef bint changed = True
    for s in range(n):
        if ff[s]:
            R[s, s] = 1
    while changed:
        changed = False
        for s0 in range(n):
            for s in range(n):
                if R[s0, s] and tt[s]:
                    for k in range(brk_ptr[s], brk_ptr[s + 1]):
                        v = brk_idx[k]
                        if not R[s0, v]:
                            R[s0, v] = 1
                            changed = True
        for s in range(n):
            if not tt[s]:
                continue
            for k in range(reg_ptr[s], reg_ptr[s + 1]):
                v = reg_idx[k]
                for j in range(n):
                    if R[v, j] and not R[s, j]:
                        R[s, j] = 1
                        changed = True
    return out


cdef inline bint _sub(unsigned int a, unsigned int b):
    return (a & ~b) == 0


def sweep(int n, unsigned int tmask, unsigned int fmask, reg_in, brk_in, err_in, wreg_in, werr_in):
    cdef unsigned int full = (1u << n) - 1
    cdef unsigned int nrel = 1u << (n * n)
    cdef unsigned int reg[3]
    cdef unsigned int brk[3]
    cdef unsigned int wreg[3]
    cdef bint err[3]
    cdef bint werr[3]
    cdef unsigned int post[8]
    cdef unsigned int brks[8]
    cdef bint errs[8]
    cdef unsigned int rw[3]
    cdef unsigned int lr[3]
    cdef long long c[10]
    cdef int s, s0, v, i
    cdef unsigned int X, R, P, Q, J, I, L, m
    cdef bint ok, valid, is_safe, is_correct, low_ok, has_I, has_JR
    cdef long long n_correct_R, cnt
    for i in range(10):
        c[i] = 0
    c[0] = 1
    for s in range(n):
        reg[s] = reg_in[s]
        brk[s] = brk_in[s]
        err[s] = err_in[s]
        wreg[s] = wreg_in[s]
        werr[s] = werr_in[s]
    for X in range(full + 1):
        post[X] = 0
        brks[X] = 0
        errs[X] = False
        for s in range(n):
            if (X >> s) & 1 and (tmask >> s) & 1:
                post[X] |= reg[s]
                brks[X] |= brk[s]
                errs[X] = errs[X] or err[s]

    # summaries satisfying conditions 1-3, packed rows
    cdef vector[unsigned int] summaries
    for R in range(nrel):
        for s in range(n):
            rw[s] = (R >> (n * s)) & full
        ok = True
        for s in range(n):
            if (fmask >> s) & 1 and not ((rw[s] >> s) & 1):
                ok = False
            if (tmask >> s) & 1:
                if not _sub(brk[s], rw[s]):
                    ok = False
                for v in range(n):
                    if (reg[s] >> v) & 1 and not _sub(rw[v], rw[s]):
                        ok = False
        if ok:
            summaries.push_back(R)

    cdef bint safe_set[8]
    cdef bint correct_set[8]
    cdef bint valid_for[8]
    cdef Py_ssize_t ri
    cdef unsigned int Ls[512]
    for P in range(full + 1):
        for Q in range(full + 1):
            valid = True
            for s in range(n):
                if (P >> s) & 1 and (werr[s] or not _sub(wreg[s], Q)):
                    valid = False
            valid_for[Q] = valid
        for X in range(full + 1):
            safe_set[X] = _sub(P, X) and _sub(post[X], X) and not errs[X]
        for ri in range(<Py_ssize_t>summaries.size()):
            R = summaries[ri]
            for s in range(n):
                rw[s] = (R >> (n * s)) & full
            L = 0
            for s in range(n):
                for s0 in range(n):
                    if (P >> s0) & 1 and _sub(rw[s], rw[s0]):
                        L |= 1u << s
                        break
            Ls[ri] = L
        for Q in range(full + 1):
            has_I = False
            for X in range(full + 1):
                correct_set[X] = safe_set[X] and _sub(brks[X], Q) and _sub(X & fmask, Q)
                c[8] += 1
                if correct_set[X]:
                    has_I = True
                    if not valid_for[Q]:
                        c[1] += 1
            n_correct_R = 0
            for ri in range(<Py_ssize_t>summaries.size()):
                R = summaries[ri]
                ok = True
                for s0 in range(n):
                    if (P >> s0) & 1 and not _sub((R >> (n * s0)) & full, Q):
                        ok = False
                if not ok:
                    continue
                n_correct_R += 1
                L = Ls[ri]
                for J in range(full + 1):
                    if not safe_set[J]:
                        continue
                    c[9] += 1
                    if not valid_for[Q]:
                        c[2] += 1
                    I = J & L
                    if not (_sub(P, I) and _sub(post[I], I) and not errs[I]
                            and _sub(brks[I], Q) and _sub(I & fmask, Q)):
                        c[3] += 1
            for X in range(full + 1):
                is_safe = safe_set[X]
                is_correct = correct_set[X]
                for s in range(n):
                    lr[s] = Q if (X >> s) & 1 else full
                low_ok = True
                for s in range(n):
                    if (fmask >> s) & 1 and not ((lr[s] >> s) & 1):
                        low_ok = False
                    if (tmask >> s) & 1:
                        if not _sub(brk[s], lr[s]):
                            low_ok = False
                        for v in range(n):
                            if (reg[s] >> v) & 1 and not _sub(lr[v], lr[s]):
                                low_ok = False
                    if (P >> s) & 1 and not _sub(lr[s], Q):
                        low_ok = False
                if is_correct and not (is_safe and low_ok):
                    c[4] += 1
                if is_safe and low_ok and not is_correct:
                    c[5] += 1
            has_JR = False
            if n_correct_R > 0:
                for J in range(full + 1):
                    if safe_set[J]:
                        has_JR = True
            if has_I and not has_JR:
                c[6] += 1
            if has_JR and not has_I:
                c[7] += 1
    return np.asarray([c[i] for i in range(10)], dtype=np.int64)
