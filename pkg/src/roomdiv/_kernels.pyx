# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics match ``_kernels_py`` exactly."""

import numpy as np

cimport cython
from libc.stdint cimport int8_t, int32_t, int64_t


def first_blocking(const int8_t[:] color, const int32_t[:, :] rank, const int32_t[:] cur, int s, bint strong):
    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t i
    cdef int j, sr, sb, wr, wb, here, there
    cdef bint usable
    for j in range(s + 1):
        sr = sb = wr = wb = 0
        for i in range(n):
            here = rank[i, cur[i]]
            there = rank[i, j]
            if there < here:
                if color[i]:
                    sr += 1
                else:
                    sb += 1
            if there <= here:
                if color[i]:
                    wr += 1
                else:
                    wb += 1
        if strong:
            usable = (j >= 1 and sr > 0) or (j <= s - 1 and sb > 0)
            if wr >= j and wb >= s - j and usable:
                return j
        elif sr >= j and sb >= s - j:
            return j
    return -1


def first_exchange(const int8_t[:] color, const int32_t[:, :] rank, const int32_t[:] room,
                   const int32_t[:] theta, const int32_t[:] dim, bint same_type, bint strong):
    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t a, b
    cdef int here_a, new_b, here_b
    cdef int32_t[:] cur = np.empty(n, dtype=np.int32)
    for a in range(n):
        cur[a] = theta[room[a]]
    for a in range(n):
        here_a = rank[a, cur[a]]
        for b in range(n):
            if room[a] == room[b] or dim[a] != dim[b]:
                continue
            if same_type and color[a] != color[b]:
                continue
            if rank[a, cur[b] + color[a] - color[b]] >= here_a:
                continue
            new_b = rank[b, cur[a] + color[b] - color[a]]
            here_b = rank[b, cur[b]]
            if new_b < here_b or (strong and new_b == here_b):
                return a, b
    return -1, -1


def first_envy(const int8_t[:] color, const int32_t[:, :] rank, const int32_t[:] room,
               const int32_t[:] theta, bint same_type):
    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t a, b
    cdef int here_a
    cdef int32_t[:] cur = np.empty(n, dtype=np.int32)
    for a in range(n):
        cur[a] = theta[room[a]]
    for a in range(n):
        here_a = rank[a, cur[a]]
        for b in range(n):
            if room[a] == room[b]:
                continue
            if same_type and color[a] != color[b]:
                continue
            if rank[a, cur[b] + color[a] - color[b]] < here_a:
                return a, b
    return -1, -1


cdef inline int64_t floordiv(int64_t x, int64_t d) nogil:
    # d > 0 and x >= 0 at every call site, so C division is floor division
    return x // d


cdef int tighten(Py_ssize_t c, int64_t[:] lo, int64_t[:] hi, const int64_t[:] ptr, const int64_t[:] var,
                 const int64_t[:] coef, const int64_t[:] const_, const int8_t[:] eq) nogil:
    cdef int64_t mn = const_[c]
    cdef int64_t mx = const_[c]
    cdef int64_t a, slack, nb
    cdef Py_ssize_t t, v
    cdef int changed = 0
    for t in range(ptr[c], ptr[c + 1]):
        v = var[t]
        a = coef[t]
        if a > 0:
            mn += a * lo[v]
            mx += a * hi[v]
        else:
            mn += a * hi[v]
            mx += a * lo[v]
    if mn > 0 or (eq[c] and mx < 0):
        return -1
    slack = -mn
    for t in range(ptr[c], ptr[c + 1]):
        v = var[t]
        a = coef[t]
        if a > 0:
            nb = lo[v] + floordiv(slack, a)
            if nb < hi[v]:
                hi[v] = nb
                changed = 1
        else:
            nb = hi[v] - floordiv(slack, -a)
            if nb > lo[v]:
                lo[v] = nb
                changed = 1
        if lo[v] > hi[v]:
            return -1
    if eq[c]:
        slack = mx
        for t in range(ptr[c], ptr[c + 1]):
            v = var[t]
            a = coef[t]
            if a > 0:
                nb = hi[v] - floordiv(slack, a)
                if nb > lo[v]:
                    lo[v] = nb
                    changed = 1
            else:
                nb = lo[v] + floordiv(slack, -a)
                if nb < hi[v]:
                    hi[v] = nb
                    changed = 1
            if lo[v] > hi[v]:
                return -1
    return changed


cdef bint possible(Py_ssize_t c, int64_t[:] lo, int64_t[:] hi, const int64_t[:] ptr, const int64_t[:] var,
                   const int64_t[:] coef, const int64_t[:] const_, const int8_t[:] eq) nogil:
    cdef int64_t mn = const_[c]
    cdef int64_t mx = const_[c]
    cdef int64_t a
    cdef Py_ssize_t t, v
    for t in range(ptr[c], ptr[c + 1]):
        v = var[t]
        a = coef[t]
        if a > 0:
            mn += a * lo[v]
            mx += a * hi[v]
        else:
            mn += a * hi[v]
            mx += a * lo[v]
    return mn <= 0 and (not eq[c] or mx >= 0)


cdef bint fixpoint(int64_t[:] lo, int64_t[:] hi, const int64_t[:] hard, const int64_t[:] ptr,
                   const int64_t[:] var, const int64_t[:] coef, const int64_t[:] const_, const int8_t[:] eq,
                   const int64_t[:] grp_ptr, const int64_t[:] br_ptr, const int64_t[:] br_cons,
                   int8_t[:] alive) nogil:
    cdef Py_ssize_t ngroups = grp_ptr.shape[0] - 1
    cdef Py_ssize_t g, br, t, last, h
    cdef int live, res, changed
    cdef bint ok_branch
    while True:
        changed = 0
        for h in range(hard.shape[0]):
            res = tighten(hard[h], lo, hi, ptr, var, coef, const_, eq)
            if res < 0:
                return False
            changed |= res
        for g in range(ngroups):
            live = 0
            last = -1
            for br in range(grp_ptr[g], grp_ptr[g + 1]):
                if not alive[br]:
                    continue
                ok_branch = True
                for t in range(br_ptr[br], br_ptr[br + 1]):
                    if not possible(br_cons[t], lo, hi, ptr, var, coef, const_, eq):
                        ok_branch = False
                        break
                if ok_branch:
                    live += 1
                    last = br
                else:
                    alive[br] = 0
            if live == 0:
                return False
            if live == 1:
                for t in range(br_ptr[last], br_ptr[last + 1]):
                    res = tighten(br_cons[t], lo, hi, ptr, var, coef, const_, eq)
                    if res < 0:
                        return False
                    changed |= res
        if not changed:
            return True


def propagate(int64_t[:] lo, int64_t[:] hi, const int64_t[:] hard, const int64_t[:] ptr,
              const int64_t[:] var, const int64_t[:] coef, const int64_t[:] const_, const int8_t[:] eq,
              const int64_t[:] grp_ptr, const int64_t[:] br_ptr, const int64_t[:] br_cons, int8_t[:] alive):
    cdef bint ok
    with nogil:
        ok = fixpoint(lo, hi, hard, ptr, var, coef, const_, eq, grp_ptr, br_ptr, br_cons, alive)
    return ok
