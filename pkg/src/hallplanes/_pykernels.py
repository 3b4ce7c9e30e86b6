"""Pure-Python search kernels.

Mirror of ``_ckernels.pyx``: same arguments, same iteration order, same
results.  ``P`` and ``Q`` are the point ids of l1 and l2 with their common
point removed.  Loops over l1 triples ``i < j < k`` take the outer index
from ``range(lo, hi)`` so callers can split the work.

Labelled sextuples are ``(A1, B1, C1, A2, B2, C2)``; the cross points are
``C3 = A1B2 . A2B1``, ``B3 = A1C2 . A2C1`` and ``A3 = B1C2 . B2C1``.
"""

from itertools import permutations

_PERMS3 = list(permutations(range(3)))
_cache = {}


def _lists(join, meet, inc):
    key = (id(join), id(meet), id(inc))
    hit = _cache.get(key)
    if hit is None or hit[0] is not join:
        hit = (join, join.tolist(), meet.tolist(), inc.tolist())
        _cache.clear()
        _cache[key] = hit
    return hit[1], hit[2], hit[3]


def _flags(J, M, I, a1, b1, c1, a2, b2, c2):
    c3 = M[J[a1][b2]][J[a2][b1]]
    b3 = M[J[a1][c2]][J[a2][c1]]
    a3 = M[J[b1][c2]][J[b2][c1]]
    if a3 == b3 or a3 == c3 or b3 == c3:
        return False, True
    col = I[c3][J[a3][b3]] == 1
    return col, col


def _ok(J, M, I, six, relaxed):
    strict, loose = _flags(J, M, I, *six)
    return loose if relaxed else strict


def cross_points(join, meet, a1, b1, c1, a2, b2, c2):
    c3 = int(meet[join[a1, b2], join[a2, b1]])
    b3 = int(meet[join[a1, c2], join[a2, c1]])
    a3 = int(meet[join[b1, c2], join[b2, c1]])
    return a3, b3, c3


def pappus_flags(join, meet, inc, six):
    J, M, I = _lists(join, meet, inc)
    return _flags(J, M, I, *[int(x) for x in six])


def _complete_3p1(J, M, I, P, Q, i, j, k, u, relaxed):
    tri = (P[i], P[j], P[k])
    a2 = Q[u]
    n = len(Q)
    for x in range(3):
        a1 = tri[x]
        b1, c1 = [tri[y] for y in range(3) if y != x]
        for b in range(n):
            if b == u:
                continue
            b2 = Q[b]
            for c in range(n):
                if c == u or c == b:
                    continue
                six = (a1, b1, c1, a2, b2, Q[c])
                if _ok(J, M, I, six, relaxed):
                    return six
    return None


def _complete_3p2(J, M, I, P, Q, i, j, k, u, v, relaxed):
    tri = (P[i], P[j], P[k])
    n = len(Q)
    for perm in _PERMS3:
        a1, b1, c1 = tri[perm[0]], tri[perm[1]], tri[perm[2]]
        for w in range(n):
            if w == u or w == v:
                continue
            six = (a1, b1, c1, Q[u], Q[v], Q[w])
            if _ok(J, M, I, six, relaxed):
                return six
    return None


def _complete_2p0(J, M, I, P, Q, i, j, relaxed):
    n = len(P)
    a1, b1 = P[i], P[j]
    for k in range(n):
        if k == i or k == j:
            continue
        c1 = P[k]
        for u in range(n):
            for v in range(n):
                if v == u:
                    continue
                for w in range(n):
                    if w == u or w == v:
                        continue
                    six = (a1, b1, c1, Q[u], Q[v], Q[w])
                    if _ok(J, M, I, six, relaxed):
                        return six
    return None


def complete_3p1(join, meet, inc, P, Q, i, j, k, u, relaxed=False):
    J, M, I = _lists(join, meet, inc)
    return _complete_3p1(J, M, I, list(map(int, P)), list(map(int, Q)), i, j, k, u, relaxed)


def complete_3p2(join, meet, inc, P, Q, i, j, k, u, v, relaxed=False):
    J, M, I = _lists(join, meet, inc)
    return _complete_3p2(J, M, I, list(map(int, P)), list(map(int, Q)), i, j, k, u, v, relaxed)


def complete_2p0(join, meet, inc, P, Q, i, j, relaxed=False):
    J, M, I = _lists(join, meet, inc)
    return _complete_2p0(J, M, I, list(map(int, P)), list(map(int, Q)), i, j, relaxed)


def search_3p3(join, meet, inc, P, Q, lo, hi, relaxed=False):
    """First non-Pappus labelled sextuple; returns (checked, sextuple or None)."""
    J, M, I = _lists(join, meet, inc)
    P, Q = list(map(int, P)), list(map(int, Q))
    n = len(P)
    checked = 0
    for i in range(lo, hi):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for u in range(n):
                    for v in range(u + 1, n):
                        for w in range(v + 1, n):
                            tri2 = (Q[u], Q[v], Q[w])
                            for perm in _PERMS3:
                                six = (P[i], P[j], P[k], tri2[perm[0]], tri2[perm[1]], tri2[perm[2]])
                                checked += 1
                                if not _ok(J, M, I, six, relaxed):
                                    return checked, six
    return checked, None


def search_3p2(join, meet, inc, P, Q, lo, hi, relaxed=False):
    """First (triple, pair) with no completion: (instances, (i, j, k, u, v) ids or None)."""
    J, M, I = _lists(join, meet, inc)
    P, Q = list(map(int, P)), list(map(int, Q))
    n = len(P)
    instances = 0
    for i in range(lo, hi):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for u in range(n):
                    for v in range(u + 1, n):
                        instances += 1
                        if _complete_3p2(J, M, I, P, Q, i, j, k, u, v, relaxed) is None:
                            return instances, (P[i], P[j], P[k], Q[u], Q[v])
    return instances, None


def search_3p1(join, meet, inc, P, Q, lo, hi, relaxed=False, count_all=False):
    """Returns (instances, failures, first failing (i, j, k, u) ids or None)."""
    J, M, I = _lists(join, meet, inc)
    P, Q = list(map(int, P)), list(map(int, Q))
    n = len(P)
    instances = failures = 0
    first = None
    for i in range(lo, hi):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for u in range(n):
                    instances += 1
                    if _complete_3p1(J, M, I, P, Q, i, j, k, u, relaxed) is None:
                        failures += 1
                        if first is None:
                            first = (P[i], P[j], P[k], Q[u])
                        if not count_all:
                            return instances, failures, first
    return instances, failures, first


def search_3p0(join, meet, inc, P, Q, lo, hi, relaxed=False):
    """First Pappus labelled sextuple: (checked, sextuple or None)."""
    J, M, I = _lists(join, meet, inc)
    P, Q = list(map(int, P)), list(map(int, Q))
    n = len(P)
    checked = 0
    for i in range(lo, hi):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for u in range(n):
                    for v in range(u + 1, n):
                        for w in range(v + 1, n):
                            tri2 = (Q[u], Q[v], Q[w])
                            for perm in _PERMS3:
                                six = (P[i], P[j], P[k], tri2[perm[0]], tri2[perm[1]], tri2[perm[2]])
                                checked += 1
                                if _ok(J, M, I, six, relaxed):
                                    return checked, six
    return checked, None


def search_2p0(join, meet, inc, P, Q, lo, hi, relaxed=False):
    """First pair on l1 with no completion: (instances, (a, b) ids or None)."""
    J, M, I = _lists(join, meet, inc)
    P, Q = list(map(int, P)), list(map(int, Q))
    n = len(P)
    instances = 0
    for i in range(lo, hi):
        for j in range(i + 1, n):
            instances += 1
            if _complete_2p0(J, M, I, P, Q, i, j, relaxed) is None:
                return instances, (P[i], P[j])
    return instances, None


def count_pappus(join, meet, inc, P, Q, lo, hi):
    """(strict, relaxed, total, sextuples) over unordered triples and the six matchings.

    ``sextuples`` counts triple pairs with at least one strict Pappus matching.
    """
    J, M, I = _lists(join, meet, inc)
    P, Q = list(map(int, P)), list(map(int, Q))
    n = len(P)
    strict = loose = total = sextuples = 0
    for i in range(lo, hi):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for u in range(n):
                    for v in range(u + 1, n):
                        for w in range(v + 1, n):
                            tri2 = (Q[u], Q[v], Q[w])
                            hit = False
                            for perm in _PERMS3:
                                s, r = _flags(J, M, I, P[i], P[j], P[k], tri2[perm[0]], tri2[perm[1]], tri2[perm[2]])
                                total += 1
                                strict += s
                                loose += r
                                hit = hit or s
                            sextuples += hit
    return strict, loose, total, sextuples
