# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int32_t idx_t

cdef int PERMS3[6][3]
PERMS3[0][:] = [0, 1, 2]
PERMS3[1][:] = [0, 2, 1]
PERMS3[2][:] = [1, 0, 2]
PERMS3[3][:] = [1, 2, 0]
PERMS3[4][:] = [2, 0, 1]
PERMS3[5][:] = [2, 1, 0]


cdef inline int _flags(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I,
                       idx_t a1, idx_t b1, idx_t c1, idx_t a2, idx_t b2, idx_t c2) noexcept nogil:
    # bit 0: strict Pappus, bit 1: relaxed
    cdef idx_t c3 = M[J[a1, b2], J[a2, b1]]
    cdef idx_t b3 = M[J[a1, c2], J[a2, c1]]
    cdef idx_t a3 = M[J[b1, c2], J[b2, c1]]
    if a3 == b3 or a3 == c3 or b3 == c3:
        return 2
    if I[c3, J[a3, b3]]:
        return 3
    return 0


cdef inline bint _ok(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I,
                     idx_t a1, idx_t b1, idx_t c1, idx_t a2, idx_t b2, idx_t c2, int relaxed) noexcept nogil:
    cdef int f = _flags(J, M, I, a1, b1, c1, a2, b2, c2)
    if relaxed:
        return (f & 2) != 0
    return (f & 1) != 0


cdef bint _complete_3p1(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I,
                        const idx_t[::1] P, const idx_t[::1] Q, Py_ssize_t i, Py_ssize_t j,
                        Py_ssize_t k, Py_ssize_t u, int relaxed, idx_t* out) noexcept nogil:
    cdef idx_t tri[3]
    cdef idx_t a1, b1, c1, a2 = Q[u]
    cdef Py_ssize_t n = Q.shape[0], x, b, c
    tri[0] = P[i]; tri[1] = P[j]; tri[2] = P[k]
    for x in range(3):
        a1 = tri[x]
        if x == 0:
            b1 = tri[1]; c1 = tri[2]
        elif x == 1:
            b1 = tri[0]; c1 = tri[2]
        else:
            b1 = tri[0]; c1 = tri[1]
        for b in range(n):
            if b == u:
                continue
            for c in range(n):
                if c == u or c == b:
                    continue
                if _ok(J, M, I, a1, b1, c1, a2, Q[b], Q[c], relaxed):
                    out[0] = a1; out[1] = b1; out[2] = c1
                    out[3] = a2; out[4] = Q[b]; out[5] = Q[c]
                    return True
    return False


cdef bint _complete_3p2(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I,
                        const idx_t[::1] P, const idx_t[::1] Q, Py_ssize_t i, Py_ssize_t j,
                        Py_ssize_t k, Py_ssize_t u, Py_ssize_t v, int relaxed, idx_t* out) noexcept nogil:
    cdef idx_t tri[3]
    cdef Py_ssize_t n = Q.shape[0], p, w
    cdef idx_t a1, b1, c1
    tri[0] = P[i]; tri[1] = P[j]; tri[2] = P[k]
    for p in range(6):
        a1 = tri[PERMS3[p][0]]; b1 = tri[PERMS3[p][1]]; c1 = tri[PERMS3[p][2]]
        for w in range(n):
            if w == u or w == v:
                continue
            if _ok(J, M, I, a1, b1, c1, Q[u], Q[v], Q[w], relaxed):
                out[0] = a1; out[1] = b1; out[2] = c1
                out[3] = Q[u]; out[4] = Q[v]; out[5] = Q[w]
                return True
    return False


cdef bint _complete_2p0(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I,
                        const idx_t[::1] P, const idx_t[::1] Q, Py_ssize_t i, Py_ssize_t j,
                        int relaxed, idx_t* out) noexcept nogil:
    cdef Py_ssize_t n = P.shape[0], k, u, v, w
    for k in range(n):
        if k == i or k == j:
            continue
        for u in range(n):
            for v in range(n):
                if v == u:
                    continue
                for w in range(n):
                    if w == u or w == v:
                        continue
                    if _ok(J, M, I, P[i], P[j], P[k], Q[u], Q[v], Q[w], relaxed):
                        out[0] = P[i]; out[1] = P[j]; out[2] = P[k]
                        out[3] = Q[u]; out[4] = Q[v]; out[5] = Q[w]
                        return True
    return False


def _arr(x):
    return np.ascontiguousarray(x, dtype=np.int32)


cdef object _six(idx_t* out):
    return tuple(int(out[t]) for t in range(6))


def pappus_flags(join, meet, inc, six):
    cdef int f = _flags(join, meet, inc, six[0], six[1], six[2], six[3], six[4], six[5])
    return (f & 1) != 0, (f & 2) != 0


def complete_3p1(join, meet, inc, P, Q, Py_ssize_t i, Py_ssize_t j, Py_ssize_t k, Py_ssize_t u, relaxed=False):
    cdef idx_t out[6]
    if _complete_3p1(join, meet, inc, _arr(P), _arr(Q), i, j, k, u, relaxed, out):
        return _six(out)
    return None


def complete_3p2(join, meet, inc, P, Q, Py_ssize_t i, Py_ssize_t j, Py_ssize_t k, Py_ssize_t u, Py_ssize_t v,
                 relaxed=False):
    cdef idx_t out[6]
    if _complete_3p2(join, meet, inc, _arr(P), _arr(Q), i, j, k, u, v, relaxed, out):
        return _six(out)
    return None


def complete_2p0(join, meet, inc, P, Q, Py_ssize_t i, Py_ssize_t j, relaxed=False):
    cdef idx_t out[6]
    if _complete_2p0(join, meet, inc, _arr(P), _arr(Q), i, j, relaxed, out):
        return _six(out)
    return None


def search_3p3(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I, P_, Q_,
               Py_ssize_t lo, Py_ssize_t hi, bint relaxed=False):
    cdef const idx_t[::1] P = _arr(P_)
    cdef const idx_t[::1] Q = _arr(Q_)
    cdef Py_ssize_t n = P.shape[0], i, j, k, u, v, w, p
    cdef long long checked = 0
    cdef idx_t tri2[3]
    cdef idx_t out[6]
    cdef bint found = False
    with nogil:
        for i in range(lo, hi):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for u in range(n):
                        for v in range(u + 1, n):
                            for w in range(v + 1, n):
                                tri2[0] = Q[u]; tri2[1] = Q[v]; tri2[2] = Q[w]
                                for p in range(6):
                                    checked += 1
                                    if not _ok(J, M, I, P[i], P[j], P[k], tri2[PERMS3[p][0]],
                                               tri2[PERMS3[p][1]], tri2[PERMS3[p][2]], relaxed):
                                        out[0] = P[i]; out[1] = P[j]; out[2] = P[k]
                                        out[3] = tri2[PERMS3[p][0]]; out[4] = tri2[PERMS3[p][1]]
                                        out[5] = tri2[PERMS3[p][2]]
                                        found = True
                                        break
                                if found: break
                            if found: break
                        if found: break
                    if found: break
                if found: break
            if found: break
    return checked, (_six(out) if found else None)


def search_3p0(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I, P_, Q_,
               Py_ssize_t lo, Py_ssize_t hi, bint relaxed=False):
    cdef const idx_t[::1] P = _arr(P_)
    cdef const idx_t[::1] Q = _arr(Q_)
    cdef Py_ssize_t n = P.shape[0], i, j, k, u, v, w, p
    cdef long long checked = 0
    cdef idx_t tri2[3]
    cdef idx_t out[6]
    cdef bint found = False
    with nogil:
        for i in range(lo, hi):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for u in range(n):
                        for v in range(u + 1, n):
                            for w in range(v + 1, n):
                                tri2[0] = Q[u]; tri2[1] = Q[v]; tri2[2] = Q[w]
                                for p in range(6):
                                    checked += 1
                                    if _ok(J, M, I, P[i], P[j], P[k], tri2[PERMS3[p][0]],
                                           tri2[PERMS3[p][1]], tri2[PERMS3[p][2]], relaxed):
                                        out[0] = P[i]; out[1] = P[j]; out[2] = P[k]
                                        out[3] = tri2[PERMS3[p][0]]; out[4] = tri2[PERMS3[p][1]]
                                        out[5] = tri2[PERMS3[p][2]]
                                        found = True
                                        break
                                if found: break
                            if found: break
                        if found: break
                    if found: break
                if found: break
            if found: break
    return checked, (_six(out) if found else None)


def search_3p2(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I, P_, Q_,
               Py_ssize_t lo, Py_ssize_t hi, bint relaxed=False):
    cdef const idx_t[::1] P = _arr(P_)
    cdef const idx_t[::1] Q = _arr(Q_)
    cdef Py_ssize_t n = P.shape[0], i, j, k, u, v
    cdef long long instances = 0
    cdef idx_t out[6]
    cdef idx_t fail[5]
    cdef bint failed = False
    with nogil:
        for i in range(lo, hi):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for u in range(n):
                        for v in range(u + 1, n):
                            instances += 1
                            if not _complete_3p2(J, M, I, P, Q, i, j, k, u, v, relaxed, out):
                                fail[0] = P[i]; fail[1] = P[j]; fail[2] = P[k]
                                fail[3] = Q[u]; fail[4] = Q[v]
                                failed = True
                                break
                        if failed: break
                    if failed: break
                if failed: break
            if failed: break
    return instances, (tuple(int(fail[t]) for t in range(5)) if failed else None)


def search_3p1(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I, P_, Q_,
               Py_ssize_t lo, Py_ssize_t hi, bint relaxed=False, bint count_all=False):
    cdef const idx_t[::1] P = _arr(P_)
    cdef const idx_t[::1] Q = _arr(Q_)
    cdef Py_ssize_t n = P.shape[0], i, j, k, u
    cdef long long instances = 0, failures = 0
    cdef idx_t out[6]
    cdef idx_t fail[4]
    cdef bint stop = False
    with nogil:
        for i in range(lo, hi):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for u in range(n):
                        instances += 1
                        if not _complete_3p1(J, M, I, P, Q, i, j, k, u, relaxed, out):
                            failures += 1
                            if failures == 1:
                                fail[0] = P[i]; fail[1] = P[j]; fail[2] = P[k]; fail[3] = Q[u]
                            if not count_all:
                                stop = True
                                break
                    if stop: break
                if stop: break
            if stop: break
    first = tuple(int(fail[t]) for t in range(4)) if failures else None
    return instances, failures, first


def search_2p0(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I, P_, Q_,
               Py_ssize_t lo, Py_ssize_t hi, bint relaxed=False):
    cdef const idx_t[::1] P = _arr(P_)
    cdef const idx_t[::1] Q = _arr(Q_)
    cdef Py_ssize_t n = P.shape[0], i, j
    cdef long long instances = 0
    cdef idx_t out[6]
    cdef idx_t fail[2]
    cdef bint failed = False
    with nogil:
        for i in range(lo, hi):
            for j in range(i + 1, n):
                instances += 1
                if not _complete_2p0(J, M, I, P, Q, i, j, relaxed, out):
                    fail[0] = P[i]; fail[1] = P[j]
                    failed = True
                    break
            if failed: break
    return instances, ((int(fail[0]), int(fail[1])) if failed else None)


def count_pappus(const idx_t[:, ::1] J, const idx_t[:, ::1] M, const cnp.uint8_t[:, ::1] I, P_, Q_,
                 Py_ssize_t lo, Py_ssize_t hi):
    cdef const idx_t[::1] P = _arr(P_)
    cdef const idx_t[::1] Q = _arr(Q_)
    cdef Py_ssize_t n = P.shape[0], i, j, k, u, v, w, p
    cdef long long strict = 0, loose = 0, total = 0, sextuples = 0
    cdef int f, hit
    cdef idx_t tri2[3]
    with nogil:
        for i in range(lo, hi):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for u in range(n):
                        for v in range(u + 1, n):
                            for w in range(v + 1, n):
                                tri2[0] = Q[u]; tri2[1] = Q[v]; tri2[2] = Q[w]
                                hit = 0
                                for p in range(6):
                                    f = _flags(J, M, I, P[i], P[j], P[k], tri2[PERMS3[p][0]],
                                               tri2[PERMS3[p][1]], tri2[PERMS3[p][2]])
                                    total += 1
                                    strict += f & 1
                                    loose += (f >> 1) & 1
                                    hit |= f & 1
                                sextuples += hit
    return strict, loose, total, sextuples
