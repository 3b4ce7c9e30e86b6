"""Finite fields and the Hall quasifield built on top of them.

Elements of F_q are integer indices ``0..q-1``: the index of
``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` is ``sum(c_i * p**i)``, so index 0 is
zero and index 1 is one.  A Hall element ``(a1, a2)`` has index
``a1 + q * a2``; the basefield embeds as the indices below ``q``.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

DEFAULT_MAX_ORDER = 16


class HallPlaneError(Exception):
    """Base class for errors raised by this package."""


class NonPrime(HallPlaneError, ValueError):
    pass


class UnsupportedSize(HallPlaneError, ValueError):
    pass


class ZeroDivisor(HallPlaneError, ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


# --------------------------------------------------------------------------
# polynomials over F_p as little-endian coefficient lists


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _poly_trim(a)
    m = _poly_trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        a = _poly_trim(a)
    return a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _monic_polys(p, degree):
    for low in itertools.product(range(p), repeat=degree):
        yield list(low) + [1]


def _is_irreducible(f, p):
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(f, g, p):
                return False
    return True


def lexicographically_least_irreducible(p: int, k: int) -> list[int]:
    """Monic irreducible of degree k with the smallest index value.

    Candidates are ranked by ``sum(c_i * p**i)`` over the non-leading
    coefficients, i.e. compared from the highest coefficient down.
    """
    for value in range(p**k):
        low = [(value // p**i) % p for i in range(k)]
        f = low + [1]
        if _is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class PrimePowerField:
    """F_q with dense lookup tables.

    ``add_table``, ``mul_table`` are ``q x q``; ``neg_table`` and
    ``inv_table`` have length ``q`` (``inv_table[0]`` is 0 and must not be
    used as an inverse).
    """

    def __init__(self, p: int, k: int, modulus: list[int]):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = list(modulus)
        q = self.q
        polys = [self._to_poly(i) for i in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for i in range(q):
            for j in range(q):
                add[i, j] = self._to_index([(a + b) % p for a, b in zip(polys[i], polys[j])])
                if k == 1:
                    mul[i, j] = (i * j) % p
                else:
                    prod = _poly_mod(_poly_mul(_poly_trim(polys[i]), _poly_trim(polys[j]), p), modulus, p)
                    mul[i, j] = self._to_index(prod)
        self.add_table = add
        self.mul_table = mul
        self.neg_table = np.array([int(np.nonzero(add[i] == 0)[0][0]) for i in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for i in range(1, q):
            inv[i] = int(np.nonzero(mul[i] == 1)[0][0])
        self.inv_table = inv
        self.sub_table = add[:, self.neg_table]
        for t in (self.add_table, self.mul_table, self.neg_table, self.inv_table, self.sub_table):
            t.setflags(write=False)

    def _to_poly(self, index):
        return [(index // self.p**i) % self.p for i in range(self.k)]

    def _to_index(self, coeffs):
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        return sum(c * self.p**i for i, c in enumerate(coeffs))

    def __repr__(self):
        return f"PrimePowerField(p={self.p}, k={self.k})"

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisor("0 has no inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q."""
        return n % self.p

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisor("0 has no multiplicative order")
        x, n = a, 1
        while x != 1:
            x = self.mul(x, a)
            n += 1
        return n

    def primitive_element(self) -> int:
        for a in range(1, self.q):
            if self.multiplicative_order(a) == self.q - 1:
                return a
        raise AssertionError("multiplicative group is not cyclic")  # pragma: no cover


def build_field(p: int, k: int = 1, max_order: int = DEFAULT_MAX_ORDER) -> PrimePowerField:
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if k < 1 or p**k > max_order:
        raise UnsupportedSize(f"p^k = {p}^{k} outside 2..{max_order}")
    modulus = lexicographically_least_irreducible(p, k) if k > 1 else [0, 1]
    return PrimePowerField(p, k, modulus)


def quadratic_has_root(F: PrimePowerField, r: int, s: int) -> bool:
    """True if x^2 - r x - s vanishes somewhere on F."""
    for x in F.elements:
        if F.sub(F.sub(F.mul(x, x), F.mul(r, x)), s) == 0:
            return True
    return False


def find_defining_quadratic(F: PrimePowerField) -> tuple[int, int]:
    """Lexicographically least (r, s) with x^2 - r x - s rootless on F."""
    for r in F.elements:
        for s in F.elements:
            if not quadratic_has_root(F, r, s):
                return r, s
    raise AssertionError("no irreducible quadratic")  # pragma: no cover


class HallElement(NamedTuple):
    a1: int
    a2: int

    @property
    def in_basefield(self) -> bool:
        return self.a2 == 0


class CoordinateSystem:
    """Shared machinery for the Hall quasifield and its field twin.

    Subclasses fill ``mul_table`` (``n x n`` over element indices); the
    addition of F_q^2 is common to both.
    """

    kind = "abstract"

    def __init__(self, basefield: PrimePowerField, r: int | None = None, s: int | None = None):
        F = basefield
        if r is None or s is None:
            r, s = find_defining_quadratic(F)
        if quadratic_has_root(F, r, s):
            raise ValueError(f"x^2 - {r}x - {s} has a root in F_{F.q}")
        self.basefield = F
        self.r = r
        self.s = s
        q = F.q
        self.q = q
        self.order = self.n = q * q
        idx = np.arange(self.n)
        self._c1 = idx % q
        self._c2 = idx // q
        a1, b1 = np.meshgrid(self._c1, self._c1, indexing="ij")
        a2, b2 = np.meshgrid(self._c2, self._c2, indexing="ij")
        self.add_table = F.add_table[a1, b1] + q * F.add_table[a2, b2]
        self.neg_table = F.neg_table[self._c1] + q * F.neg_table[self._c2]
        self.sub_table = self.add_table[:, self.neg_table]
        self.mul_table = self._build_mul(a1, a2, b1, b2)
        # rdiv_table[a, b] = m with a*m = b; row 0 is meaningless
        rdiv = np.zeros((self.n, self.n), dtype=np.int64)
        for a in range(1, self.n):
            row = self.mul_table[a]
            rdiv[a, row] = idx
        self.rdiv_table = rdiv
        for t in (self.add_table, self.neg_table, self.sub_table, self.mul_table, self.rdiv_table):
            t.setflags(write=False)

    def _build_mul(self, a1, a2, b1, b2):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(q={self.q}, r={self.r}, s={self.s})"

    def f(self, x: int) -> int:
        """Defining polynomial x^2 - r x - s evaluated on F."""
        F = self.basefield
        return F.sub(F.sub(F.mul(x, x), F.mul(self.r, x)), self.s)

    # index <-> pair
    def index(self, a) -> int:
        if isinstance(a, (int, np.integer)):
            return int(a)
        return int(a[0]) + self.q * int(a[1])

    def element(self, i: int) -> HallElement:
        return HallElement(int(i) % self.q, int(i) // self.q)

    def in_basefield(self, i: int) -> bool:
        return int(i) < self.q

    def scalar(self, c: int, x: int) -> int:
        """F-scalar multiple c*x of the vector x (equal to x*c)."""
        F = self.basefield
        e = self.element(x)
        return F.mul(c, e.a1) + self.q * F.mul(c, e.a2)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def solve_right_factor(self, a: int, b: int) -> int:
        """The unique m with a*m = b."""
        if a == 0:
            raise ZeroDivisor("left factor is zero")
        return int(self.rdiv_table[a, b])


class HallSystem(CoordinateSystem):
    """F_q^2 with Hall multiplication for f(x) = x^2 - r x - s."""

    kind = "hall"

    def _build_mul(self, a1, a2, b1, b2):
        F, q = self.basefield, self.q
        A, M, S, inv = F.add_table, F.mul_table, F.sub_table, F.inv_table
        # M1: b in F
        m1_first = M[a1, b1]
        m1_second = M[a2, b1]
        # M2: (a1 b1 - a2 b2^-1 f(b1), a1 b2 - a2 b1 + a2 r)
        fb1 = np.array([self.f(int(x)) for x in range(q)], dtype=np.int64)[b1]
        m2_first = S[M[a1, b1], M[M[a2, inv[b2]], fb1]]
        m2_second = A[S[M[a1, b2], M[a2, b1]], M[a2, self.r]]
        first = np.where(b2 == 0, m1_first, m2_first)
        second = np.where(b2 == 0, m1_second, m2_second)
        return first + q * second


class QuadraticExtension(CoordinateSystem):
    """F_q[alpha] with alpha^2 = r alpha + s: the field F_{q^2} in Hall coordinates.

    Used as the classical comparison plane; elements below q are the subfield.
    """

    kind = "field"

    def _build_mul(self, a1, a2, b1, b2):
        F, q = self.basefield, self.q
        A, M = F.add_table, F.mul_table
        t = M[a2, b2]
        first = A[M[a1, b1], M[self.s, t]]
        second = A[A[M[a1, b2], M[a2, b1]], M[self.r, t]]
        return first + q * second


def hall_add(H: CoordinateSystem, a, b) -> HallElement:
    return H.element(H.add(H.index(a), H.index(b)))


def hall_mul(H: CoordinateSystem, a, b) -> HallElement:
    return H.element(H.mul(H.index(a), H.index(b)))


def solve_right_factor(H: CoordinateSystem, a, b) -> HallElement:
    return H.element(H.solve_right_factor(H.index(a), H.index(b)))


def _first_true(mask: np.ndarray):
    hits = np.argwhere(mask)
    return None if len(hits) == 0 else tuple(int(v) for v in hits[0])


def field_axiom_report(F: PrimePowerField) -> dict:
    """Exhaustive field axioms over all triples of F."""
    A, M = F.add_table, F.mul_table
    e = np.arange(F.q)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    nonzero = e[1:]
    return {
        "add_associative": bool((A[A[a, b], c] == A[a, A[b, c]]).all()),
        "mul_associative": bool((M[M[a, b], c] == M[a, M[b, c]]).all()),
        "add_commutative": bool((A == A.T).all()),
        "mul_commutative": bool((M == M.T).all()),
        "distributive": bool((M[a, A[b, c]] == A[M[a, b], M[a, c]]).all()),
        "identities": bool((A[0] == e).all() and (M[1] == e).all()),
        "additive_inverses": bool((A[e, F.neg_table] == 0).all()),
        "multiplicative_inverses": bool((M[nonzero, F.inv_table[nonzero]] == 1).all()),
        "cyclic_multiplicative_group": F.multiplicative_order(F.primitive_element()) == F.q - 1,
    }


def quasifield_report(H: CoordinateSystem) -> dict:
    """Exhaustive quasifield checks and the first witness of each failing law.

    Witnesses are index tuples in ascending lexicographic order, or None.
    """
    A, M = H.add_table, H.mul_table
    e = np.arange(H.n)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    one = H.index((1, 0))
    rows_bijective = all(len(np.unique(M[x])) == H.n for x in range(1, H.n))
    solve_ok = all((H.rdiv_table[x, M[x]] == e).all() for x in range(1, H.n))
    report = {
        "kind": H.kind,
        "r": H.r,
        "s": H.s,
        "f_rootless": not quadratic_has_root(H.basefield, H.r, H.s),
        "identity": bool((M[one] == e).all() and (M[:, one] == e).all()),
        "right_distributive": bool((M[A[a, b], c] == A[M[a, c], M[b, c]]).all()),
        "left_multiplication_bijective": rows_bijective,
        "solve_right_factor_inverts": solve_ok,
        "non_commutative_witness": _first_true(M != M.T),
        "non_associative_witness": _first_true(M[M[a, b], c] != M[a, M[b, c]]),
        "non_left_distributive_witness": _first_true(M[a, A[b, c]] != A[M[a, b], M[a, c]]),
    }
    for key in ("non_commutative_witness", "non_associative_witness", "non_left_distributive_witness"):
        w = report[key]
        if w is not None:
            report[key] = [list(H.element(i)) for i in w]
    return report
