"""Translations, autotopisms and linear maps of the Hall plane.

Every collineation acts on point ids and line ids of a
:class:`~hallplanes.plane.PlaneTables`.  Affine points move by the
coordinate formulas; lines move by the closed-form line actions; infinite
points follow the parallel class of their lines, and the line at infinity is
fixed.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .coordsys import CoordinateSystem, HallPlaneError
from .plane import BF, INFINITY, NBF, PlaneTables


class SingularMatrix(HallPlaneError, ValueError):
    pass


class InfinityLineUnsupported(HallPlaneError, ValueError):
    pass


@dataclass(frozen=True)
class Translation:
    """(x, y) -> (x + a, y + b) for Hall elements a, b."""

    a: int
    b: int


@dataclass(frozen=True)
class Autotopism:
    """(x, y) -> (xS, yS); S is stored row-major as (s00, s01, s10, s11)."""

    S: tuple

    def __post_init__(self):
        if len(self.S) != 4:
            raise ValueError("S must have four entries")


@dataclass(frozen=True)
class Linear:
    """(x, y) -> ((-ar+b)x + a y, as x + b y) for a, b in F, not both zero."""

    a: int
    b: int

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("lambda_{0,0} is not a collineation")


@dataclass(frozen=True)
class Composite:
    """Apply ``parts`` left to right."""

    parts: tuple = ()


Collineation = Union[Translation, Autotopism, Linear, Composite]

IDENTITY = Composite(())


def compose(*cs: Collineation) -> Composite:
    """The collineation applying ``cs[0]`` first, then ``cs[1]`` and so on."""
    parts = []
    for c in cs:
        parts.extend(c.parts if isinstance(c, Composite) else (c,))
    return Composite(tuple(parts))


# --------------------------------------------------------------------------
# 2x2 matrices over F


def mat_det(F, S):
    s00, s01, s10, s11 = S
    return F.sub(F.mul(s00, s11), F.mul(s01, s10))


def mat_inv(F, S):
    d = mat_det(F, S)
    if d == 0:
        raise SingularMatrix(f"det {S} = 0")
    di = F.inv(d)
    s00, s01, s10, s11 = S
    return (F.mul(s11, di), F.neg(F.mul(s01, di)), F.neg(F.mul(s10, di)), F.mul(s00, di))


def vec_mat(H: CoordinateSystem, x: int, S) -> int:
    """Row vector x (a Hall element) times the matrix S."""
    F = H.basefield
    x1, x2 = H.element(x)
    s00, s01, s10, s11 = S
    return F.add(F.mul(x1, s00), F.mul(x2, s10)) + H.q * F.add(F.mul(x1, s01), F.mul(x2, s11))


def _vec_mat_array(H, xs, S):
    F, q = H.basefield, H.q
    A, M = F.add_table, F.mul_table
    c1, c2 = xs % q, xs // q
    s00, s01, s10, s11 = S
    return A[M[c1, s00], M[c2, s10]] + q * A[M[c1, s01], M[c2, s11]]


def _scale_array(H, c, xs):
    M, q = H.basefield.mul_table, H.q
    return M[c, xs % q] + q * M[c, xs // q]


def general_linear_group(F) -> list:
    out = []
    for S in itertools.product(range(F.q), repeat=4):
        if mat_det(F, S) != 0:
            out.append(S)
    return out


# --------------------------------------------------------------------------
# actions on ids


def _line_image_generator(plane: PlaneTables, g, lid: int) -> int:
    H = plane.coords
    F = H.basefield
    n = plane.n
    if lid == plane.infinity_line:
        return lid
    vertical = lid < n
    if vertical:
        c = lid
    else:
        m, k = divmod(lid - n, n)
    if isinstance(g, Translation):
        if vertical:
            return H.add(c, g.a)
        # [m, k] -> [m, k - a m + b]
        return n + m * n + H.add(H.sub(k, H.mul(g.a, m)), g.b)
    if isinstance(g, Autotopism):
        if vertical:
            return vec_mat(H, c, g.S)
        a_prime = vec_mat(H, 1, mat_inv(F, g.S))  # 1 S^-1
        m2 = vec_mat(H, H.mul(a_prime, m), g.S)
        return n + m2 * n + vec_mat(H, k, g.S)
    if isinstance(g, Linear):
        a, b, r, s = g.a, g.b, H.r, H.s
        # b^2 - abr - a^2 s
        disc = F.sub(F.sub(F.mul(b, b), F.mul(F.mul(a, b), r)), F.mul(F.mul(a, a), s))
        if vertical:
            if a == 0:
                return H.scalar(b, c)
            slope = F.div(b, a)
            return n + slope * n + H.scalar(F.neg(F.div(disc, a)), c)
        if H.in_basefield(m):
            m1 = m
            if a == 0:
                return n + m * n + H.scalar(b, k)
            if m1 == F.sub(r, F.div(b, a)):
                return H.scalar(a, k)
            den = F.add(F.sub(F.mul(a, m1), F.mul(a, r)), b)
            slope = F.div(F.add(F.mul(a, s), F.mul(m1, b)), den)
            return n + slope * n + H.scalar(F.div(disc, den), k)
        # [m, -a k m + b k]
        k2 = H.add(H.scalar(F.neg(a), H.mul(k, m)), H.scalar(b, k))
        return n + m * n + k2
    raise TypeError(g)


def _affine_images_generator(plane: PlaneTables, g) -> np.ndarray:
    H = plane.coords
    F = H.basefield
    n = plane.n
    pts = np.arange(n * n)
    x, y = pts // n, pts % n
    if isinstance(g, Translation):
        nx, ny = H.add_table[x, g.a], H.add_table[y, g.b]
    elif isinstance(g, Autotopism):
        if mat_det(F, g.S) == 0:
            raise SingularMatrix(f"det {g.S} = 0")
        nx, ny = _vec_mat_array(H, x, g.S), _vec_mat_array(H, y, g.S)
    elif isinstance(g, Linear):
        a, b = g.a, g.b
        c11 = F.add(F.neg(F.mul(a, H.r)), b)
        nx = H.add_table[_scale_array(H, c11, x), _scale_array(H, a, y)]
        ny = H.add_table[_scale_array(H, F.mul(a, H.s), x), _scale_array(H, b, y)]
    else:
        raise TypeError(g)
    return nx * n + ny


def _infinite_point_of(plane: PlaneTables, lid: int) -> int:
    n = plane.n
    if lid < n:
        return plane.vertical_infinity
    return n * n + (lid - n) // n


def generator_permutations(plane: PlaneTables, g) -> tuple[np.ndarray, np.ndarray]:
    """(point permutation, line permutation) of a single generator."""
    n, N = plane.n, plane.num_points
    lp = np.array([_line_image_generator(plane, g, l) for l in range(N)], dtype=np.int64)
    pp = np.empty(N, dtype=np.int64)
    pp[: n * n] = _affine_images_generator(plane, g)
    # infinite points follow the images of [m, 0] and [0]
    for m in range(n):
        pp[n * n + m] = _infinite_point_of(plane, lp[n + m * n])
    pp[plane.vertical_infinity] = _infinite_point_of(plane, lp[0])
    return pp, lp


def permutations(plane: PlaneTables, c: Collineation) -> tuple[np.ndarray, np.ndarray]:
    N = plane.num_points
    if isinstance(c, Composite):
        pp = np.arange(N)
        lp = np.arange(N)
        for g in c.parts:
            gp, gl = permutations(plane, g)
            pp, lp = gp[pp], gl[lp]
        return pp, lp
    cache = plane.__dict__.setdefault("_perm_cache", {})
    if c not in cache:
        cache[c] = generator_permutations(plane, c)
    return cache[c]


def point_image(plane: PlaneTables, c: Collineation, pid: int) -> int:
    return int(permutations(plane, c)[0][pid])


def line_image(plane: PlaneTables, c: Collineation, lid: int) -> int:
    return int(permutations(plane, c)[1][lid])


def apply_point(plane: PlaneTables, c: Collineation, P):
    return plane.point(point_image(plane, c, plane.point_id(P)))


def apply_line(plane: PlaneTables, c: Collineation, l):
    return plane.line(line_image(plane, c, plane.line_id(l)))


def line_action_matches_points(plane: PlaneTables, c: Collineation) -> bool:
    """True if the closed-form line action equals the pointwise image of every line."""
    pp, lp = permutations(plane, c)
    images = np.sort(pp[plane.line_points], axis=1)
    return bool(np.array_equal(images, plane.line_points[lp]))


# --------------------------------------------------------------------------
# subgroups and generators


def translations(plane) -> list:
    n = plane.n
    return [Translation(a, b) for a in range(n) for b in range(n)]


def autotopisms(plane) -> list:
    return [Autotopism(S) for S in general_linear_group(plane.coords.basefield)]


def linear_maps(plane) -> list:
    q = plane.q
    return [Linear(a, b) for a in range(q) for b in range(q) if (a, b) != (0, 0)]


def _additive_basis(F):
    return [F.p**i for i in range(F.k)]


def translation_generators(plane) -> list:
    F, q = plane.coords.basefield, plane.q
    basis = _additive_basis(F) + [q * e for e in _additive_basis(F)]
    return [Translation(e, 0) for e in basis] + [Translation(0, e) for e in basis]


def autotopism_generators(plane) -> list:
    """Elementary transvections (generate SL_2) and diag(w, 1)."""
    F = plane.coords.basefield
    gens = []
    for t in _additive_basis(F):
        gens.append(Autotopism((1, t, 0, 1)))
        gens.append(Autotopism((1, 0, t, 1)))
    gens.append(Autotopism((F.primitive_element(), 0, 0, 1)))
    return gens


def linear_generators(plane) -> list:
    """A single lambda_{a,b} generating LNR (cyclic of order q^2 - 1)."""
    target = plane.q**2 - 1
    for g in linear_maps(plane):
        if permutation_order(permutations(plane, g)[0]) == target:
            return [g]
    raise AssertionError("LNR is not cyclic")  # pragma: no cover


def permutation_order(perm: np.ndarray) -> int:
    ident = np.arange(len(perm))
    cur, k = perm, 1
    while not np.array_equal(cur, ident):
        cur = perm[cur]
        k += 1
    return k


def distinct_maps(plane, cs: Iterable[Collineation]) -> int:
    """Number of distinct point permutations among ``cs``."""
    return len({permutations(plane, c)[0].tobytes() for c in cs})


def orbit_labels(perms: Sequence[np.ndarray], size: int) -> np.ndarray:
    """Connected-component labels of ``i ~ perm[i]`` over all ``perms``."""
    rows = np.concatenate([np.arange(size)] * len(perms))
    cols = np.concatenate(list(perms))
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def orbits_of(perms: Sequence[np.ndarray], items: Iterable[int], size: int) -> list[list[int]]:
    labels = orbit_labels(perms, size)
    groups: dict[int, list[int]] = {}
    for i in items:
        groups.setdefault(int(labels[i]), []).append(int(i))
    return sorted(groups.values(), key=lambda g: g[0])


def group_generators(plane, which: str = "TR+ATP+LNR") -> list:
    gens = []
    if "TR" in which:
        gens += translation_generators(plane)
    if "ATP" in which:
        gens += autotopism_generators(plane)
    if "LNR" in which:
        gens += linear_generators(plane)
    return gens


def verify_group_propositions(plane: PlaneTables) -> dict:
    """Check the transitivity and orbit statements for TR, ATP and LNR.

    Exhaustive group enumeration is used for the subgroup orders; orbits are
    computed from generating sets.  Every entry of the returned dict carries
    an ``ok`` flag.
    """
    n, q, N = plane.n, plane.q, plane.num_points
    affine_pts = range(n * n)
    affine_lines = range(plane.num_affine_lines)
    bf = [l for l in affine_lines if plane.line_class[l] == BF]
    nbf = [l for l in affine_lines if plane.line_class[l] == NBF]
    verticals = list(range(n))
    type2 = nbf
    slope_pts_F = [n * n + m for m in range(q)]
    slope_pts_notF = [n * n + m for m in range(q, n)]
    report: dict = {}

    def perms(gens, which):
        return [permutations(plane, g)[which] for g in gens]

    tr_all = translations(plane)
    tr_count = distinct_maps(plane, tr_all)
    origin_orbit = {point_image(plane, t, 0) for t in tr_all}
    tr_fixes_classes = all(
        np.array_equal(permutations(plane, t)[0][n * n :], np.arange(n * n, N)) for t in tr_all
    )
    tr_gens = translation_generators(plane)
    tr_line_orbits = orbits_of(perms(tr_gens, 1), affine_lines, N)
    classes = [sorted(c) for c in plane.parallel_classes().values()]
    report["TR"] = {
        "order": tr_count,
        "expected_order": n * n,
        "origin_orbit": len(origin_orbit),
        "sharply_transitive": tr_count == n * n and len(origin_orbit) == n * n,
        "fixes_parallel_classes": tr_fixes_classes,
        "transitive_in_each_class": sorted(tr_line_orbits) == sorted(classes),
    }
    report["TR"]["ok"] = (
        report["TR"]["sharply_transitive"]
        and report["TR"]["fixes_parallel_classes"]
        and report["TR"]["transitive_in_each_class"]
    )

    atp_all = autotopisms(plane)
    atp_count = distinct_maps(plane, atp_all)
    atp_gens = autotopism_generators(plane)
    atp_pts = orbits_of(perms(atp_gens, 0), range(N), N)
    atp_lines = orbits_of(perms(atp_gens, 1), verticals, N)
    fixes_type1 = all(any(o == [p] for o in atp_pts) for p in slope_pts_F)
    transitive_type2 = any(sorted(o) == slope_pts_notF for o in atp_pts)
    report["ATP"] = {
        "order": atp_count,
        "expected_order": (q * q - 1) * (q * q - q),
        "fixes_type1_classes": fixes_type1,
        "transitive_on_type2_classes": transitive_type2,
        "vertical_orbits": sorted(len(o) for o in atp_lines),
        "zero_line_alone": [0] in atp_lines,
    }
    report["ATP"]["ok"] = (
        atp_count == report["ATP"]["expected_order"]
        and fixes_type1
        and transitive_type2
        and len(atp_lines) == 2
        and report["ATP"]["zero_line_alone"]
    )

    lnr_all = linear_maps(plane)
    lnr_count = distinct_maps(plane, lnr_all)
    lnr_gens = linear_generators(plane)
    lnr_pts = orbits_of(perms(lnr_all, 0), range(N), N)
    fixes_nbf = all(any(o == [p] for o in lnr_pts) for p in slope_pts_notF)
    bf_class_pts = sorted(slope_pts_F + [plane.vertical_infinity])
    transitive_bf = any(sorted(o) == bf_class_pts for o in lnr_pts)
    orders = [permutation_order(permutations(plane, g)[0]) for g in lnr_all]
    report["LNR"] = {
        "order": lnr_count,
        "expected_order": q * q - 1,
        "fixes_nbf_classes": fixes_nbf,
        "transitive_on_bf_classes": transitive_bf,
        "cyclic_generator": repr(lnr_gens[0]),
        "element_orders_divide": all((q * q - 1) % o == 0 for o in orders),
    }
    report["LNR"]["ok"] = (
        lnr_count == q * q - 1 and fixes_nbf and transitive_bf and report["LNR"]["element_orders_divide"]
    )

    # <TR, ATP>: separately transitive on type 2 lines and on verticals
    ta = orbits_of(perms(tr_gens + atp_gens, 1), affine_lines, N)
    on_type2 = any(sorted(o) == sorted(type2) for o in ta)
    on_verticals = any(sorted(o) == verticals for o in ta)
    on_union = any(sorted(o) == sorted(type2 + verticals) for o in ta)
    report["TR+ATP"] = {
        "transitive_on_type2": on_type2,
        "transitive_on_verticals": on_verticals,
        "transitive_on_union": on_union,
        "nbf_orbit_size": max((len(o) for o in ta if o[0] in set(type2) or o[-1] in set(type2)), default=0),
    }
    report["TR+ATP"]["ok"] = on_type2 and on_verticals

    tl = orbits_of(perms(tr_gens + lnr_gens, 1), affine_lines, N)
    bf_orbit = [o for o in tl if o[0] in set(bf)]
    report["TR+LNR"] = {
        "transitive_on_bf": any(sorted(o) == sorted(bf) for o in tl),
        "bf_orbit_size": max(len(o) for o in bf_orbit),
    }
    report["TR+LNR"]["ok"] = report["TR+LNR"]["transitive_on_bf"]

    full = orbits_of(perms(group_generators(plane), 1), affine_lines, N)
    report["TR+ATP+LNR"] = {
        "affine_line_orbits": sorted(len(o) for o in full),
        "expected": sorted([len(bf), len(nbf)]),
    }
    report["TR+ATP+LNR"]["ok"] = sorted(map(sorted, full)) == sorted([sorted(bf), sorted(nbf)])
    report["ok"] = all(v["ok"] for v in report.values() if isinstance(v, dict))
    return report


# --------------------------------------------------------------------------
# stabilizers of the origin


def stabilizer_matrix(H: CoordinateSystem, y: int, z: int) -> tuple:
    """S with yS = z that also fixes the parallel class of slope (0, 1)."""
    if y == 0 or z == 0:
        raise ValueError("y and z must be nonzero")
    F, r, s = H.basefield, H.r, H.s
    y1, y2 = H.element(y)
    z1, z2 = H.element(z)
    mul, add, sub = F.mul, F.add, F.sub
    den = sub(add(mul(y1, y1), mul(r, mul(y1, y2))), mul(s, mul(y2, y2)))
    cross = add(F.neg(mul(y2, z1)), mul(y1, z2))
    s00 = sub(add(mul(y1, z1), mul(r, mul(y2, z1))), mul(s, mul(y2, z2)))
    s11 = sub(add(mul(y1, z1), mul(r, mul(y1, z2))), mul(s, mul(y2, z2)))
    di = F.inv(den)
    return (mul(s00, di), mul(cross, di), mul(mul(s, cross), di), mul(s11, di))


def stabilizer_matrix_ok(H: CoordinateSystem, y: int, z: int, S) -> bool:
    F = H.basefield
    if mat_det(F, S) == 0:
        return False
    a = vec_mat(H, 1, mat_inv(F, S))
    e01 = H.index((0, 1))
    return vec_mat(H, y, S) == z and vec_mat(H, H.mul(a, e01), S) == e01


def slope_to_e01_matrix(H: CoordinateSystem, m: int) -> tuple:
    """S whose autotopism sends slope m (not in F) to (0, 1): S = [[1,0],[m1,m2]]^-1."""
    m1, m2 = H.element(m)
    if m2 == 0:
        raise ValueError("slope lies in the basefield")
    return mat_inv(H.basefield, (1, 0, m1, m2))


def _solve_span(H: CoordinateSystem, u: int, v: int, w: int):
    """(c1, c2) in F^2 with c1 u + c2 v = w, or None."""
    F = H.basefield
    for c1 in F.elements:
        for c2 in F.elements:
            if H.add(H.scalar(c1, u), H.scalar(c2, v)) == w:
                return c1, c2
    return None


def transitive_stabilizer_witness(plane: PlaneTables, lid: int, P: int, Q: int) -> Collineation:
    """A collineation fixing the origin and line ``lid``, sending P to Q.

    ``lid`` must pass through the origin; P and Q are non-origin affine
    points on it.
    """
    H, n = plane.coords, plane.n
    if not (plane.inc[0, lid] and plane.inc[P, lid] and plane.inc[Q, lid]):
        raise ValueError("line must contain the origin, P and Q")
    if P == 0 or Q == 0 or not plane.is_affine_point(P) or not plane.is_affine_point(Q):
        raise ValueError("P and Q must be affine and differ from the origin")
    if P == Q:
        return IDENTITY
    if lid == 0:
        return Autotopism(stabilizer_matrix(H, P % n, Q % n))
    m = (lid - n) // n
    if H.in_basefield(m):
        return Autotopism(stabilizer_matrix(H, P // n, Q // n))
    v, w = P // n, Q // n
    c1, c2 = _solve_span(H, v, H.mul(v, m), w)
    F = H.basefield
    return Linear(c2, F.add(c1, F.mul(c2, H.r)))


# --------------------------------------------------------------------------
# canonical pairs

BF_BF_INTERSECTING = "BF/BF-intersecting"
BF_BF_PARALLEL = "BF/BF-parallel"
NBF_NBF_INTERSECTING = "NBF/NBF-intersecting"
NBF_NBF_PARALLEL = "NBF/NBF-parallel"
NBF_BF = "NBF/BF"
BF_NBF = "BF/NBF"
INVOLVES_INFINITY = "involves-infinity"

AFFINE_CASES = (BF_BF_INTERSECTING, BF_BF_PARALLEL, NBF_NBF_INTERSECTING, NBF_NBF_PARALLEL, NBF_BF, BF_NBF)


@dataclass(frozen=True)
class CanonicalPairForm:
    case: str
    l1: int
    l2: int
    params: tuple = ()
    marked_point: int | None = None
    fallback_used: bool = field(default=False, compare=False)


def pair_case(plane: PlaneTables, l1: int, l2: int) -> str:
    if plane.infinity_line in (l1, l2):
        return INVOLVES_INFINITY
    c1, c2 = plane.line_class[l1], plane.line_class[l2]
    parallel = plane.meet_table[l1, l2] >= plane.num_affine_points
    if c1 == BF and c2 == BF:
        return BF_BF_PARALLEL if parallel else BF_BF_INTERSECTING
    if c1 == NBF and c2 == NBF:
        return NBF_NBF_PARALLEL if parallel else NBF_NBF_INTERSECTING
    return NBF_BF if c1 == NBF else BF_NBF


def _slanted(plane, m, k):
    return plane.n + m * plane.n + k


def canonical_shape(plane: PlaneTables, case: str, l1: int, l2: int, A1: int | None):
    """Residual parameters if (l1, l2, A1) has the canonical shape of ``case``, else None."""
    H, n, q = plane.coords, plane.n, plane.q
    e01 = H.index((0, 1))
    x01 = e01  # Hall element (0, 1) used as an x-coordinate
    slope_e01_line = _slanted(plane, e01, 0)

    def marked_ok(expected):
        return A1 is None or A1 == expected

    if case == BF_BF_INTERSECTING:
        if l2 != 0 or l1 < n:
            return None
        m, k = divmod(l1 - n, n)
        if k != 0 or not H.in_basefield(m):
            return None
        return (m,) if marked_ok(x01 * n + H.mul(x01, m)) else None
    if case == BF_BF_PARALLEL:
        if l2 != _slanted(plane, 0, 0) or l1 < n:
            return None
        m, kappa = divmod(l1 - n, n)
        if m != 0 or kappa == 0:
            return None
        return (kappa,) if marked_ok(x01 * n + kappa) else None
    if case == NBF_NBF_INTERSECTING:
        if l2 != slope_e01_line or l1 < n:
            return None
        m, k = divmod(l1 - n, n)
        if k != 0 or H.in_basefield(m) or m == e01:
            return None
        return H.element(m) if marked_ok(x01 * n + H.mul(x01, m)) else None
    if case == NBF_NBF_PARALLEL:
        if l2 != slope_e01_line or l1 < n:
            return None
        m, kappa = divmod(l1 - n, n)
        if m != e01 or kappa == 0:
            return None
        return (kappa,) if marked_ok(x01 * n + H.add(H.mul(x01, e01), kappa)) else None
    if case == NBF_BF:
        if l1 != slope_e01_line or l2 != 0:
            return None
        return () if marked_ok(x01 * n + H.mul(x01, e01)) else None
    if case == BF_NBF:
        if l1 != 0 or l2 != slope_e01_line:
            return None
        return () if marked_ok(e01) else None
    return None


def _to_origin(plane, l1, l2):
    """Translation moving the intersection (or a point of l2) to the origin."""
    H, n = plane.coords, plane.n
    O = int(plane.meet_table[l1, l2])
    if O < n * n:
        x, y = divmod(O, n)
        return Translation(H.neg(x), H.neg(y))
    if l2 < n:
        return Translation(H.neg(l2), 0)
    k = (l2 - n) % n
    return Translation(0, H.neg(k))


def _bf_class_to_vertical(plane, lid) -> Collineation:
    """lambda_{1, r - m1} sends the BF slope m1 to the vertical class."""
    H, n = plane.coords, plane.n
    if lid < n:
        return IDENTITY
    m = (lid - n) // n
    return Linear(1, H.basefield.sub(H.r, m))


def _bf_class_to_horizontal(plane, lid) -> Collineation:
    H, n = plane.coords, plane.n
    F = H.basefield
    if lid < n:
        return Linear(1, 0)
    m = (lid - n) // n
    if m == 0:
        return IDENTITY
    return Linear(1, F.neg(F.div(H.s, m)))


def _constructive(plane: PlaneTables, case: str, l1: int, l2: int, A1: int | None) -> Collineation:
    H, n = plane.coords, plane.n
    e01 = H.index((0, 1))
    steps: list = []

    def cur():
        c = compose(*steps)
        return line_image(plane, c, l1), line_image(plane, c, l2), (
            None if A1 is None else point_image(plane, c, A1)
        )

    if case in (BF_BF_INTERSECTING, NBF_BF, BF_NBF, NBF_NBF_INTERSECTING):
        steps.append(_to_origin(plane, l1, l2))
        m1, m2, A = cur()
        if case == BF_BF_INTERSECTING:
            steps.append(_bf_class_to_vertical(plane, m2))
            m1, m2, A = cur()
            if A is not None:
                steps.append(Autotopism(stabilizer_matrix(H, A // n, e01)))
        elif case == NBF_BF:
            steps.append(_bf_class_to_vertical(plane, m2))
            m1, m2, A = cur()
            steps.append(Autotopism(slope_to_e01_matrix(H, (m1 - n) // n)))
            m1, m2, A = cur()
            if A is not None:
                steps.append(Autotopism(stabilizer_matrix(H, A // n, e01)))
        elif case == BF_NBF:
            steps.append(_bf_class_to_vertical(plane, m1))
            m1, m2, A = cur()
            steps.append(Autotopism(slope_to_e01_matrix(H, (m2 - n) // n)))
            m1, m2, A = cur()
            if A is not None:
                steps.append(Autotopism(stabilizer_matrix(H, A % n, e01)))
        else:
            steps.append(Autotopism(slope_to_e01_matrix(H, (m2 - n) // n)))
            m1, m2, A = cur()
            if A is not None:
                target = e01 * n + H.mul(e01, (m1 - n) // n)
                steps.append(transitive_stabilizer_witness(plane, m1, A, target))
    elif case == BF_BF_PARALLEL:
        steps.append(_bf_class_to_horizontal(plane, l2))
        m1, m2, A = cur()
        steps.append(_to_origin(plane, m1, m2))
        m1, m2, A = cur()
        if A is not None:
            steps.append(Translation(H.sub(e01, A // n), 0))
    elif case == NBF_NBF_PARALLEL:
        steps.append(_to_origin(plane, l1, l2))
        m1, m2, A = cur()
        steps.append(Autotopism(slope_to_e01_matrix(H, (m2 - n) // n)))
        m1, m2, A = cur()
        if A is not None:
            t = H.sub(e01, A // n)
            steps.append(Translation(t, H.mul(t, e01)))
    else:
        raise InfinityLineUnsupported(case)
    return compose(*steps)


def _word_search(plane, case, l1, l2, A1, max_length=6):
    """Breadth-first search over generator words for a canonicalizing map."""
    gens = group_generators(plane)
    start = (l1, l2, A1)
    seen = {start: IDENTITY}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        c = seen[state]
        if canonical_shape(plane, case, *state) is not None:
            return c
        if len(c.parts) >= max_length:
            continue
        for g in gens:
            pp, lp = permutations(plane, g)
            nxt = (int(lp[state[0]]), int(lp[state[1]]), None if A1 is None else int(pp[state[2]]))
            if nxt not in seen:
                seen[nxt] = compose(c, g)
                queue.append(nxt)
    return None


def canonicalize_pair(plane: PlaneTables, l1: int, l2: int, A1: int | None = None):
    """Map (l1, l2) and the marked point A1 on l1 to their canonical form.

    Returns ``(collineation, CanonicalPairForm)``.  The collineation is built
    step by step (translation, linear map, autotopisms); if the result is
    not canonical a bounded generator-word search is used instead and the
    form is flagged with ``fallback_used``.
    """
    if l1 == l2:
        raise ValueError("lines must be distinct")
    case = pair_case(plane, l1, l2)
    if case == INVOLVES_INFINITY:
        raise InfinityLineUnsupported("pairs with the line at infinity are searched directly")
    if A1 is not None:
        if not plane.inc[A1, l1]:
            raise ValueError("marked point is not on l1")
        if A1 == plane.meet_table[l1, l2] or not plane.is_affine_point(A1):
            raise ValueError("marked point must be an affine point off l2")
    c = _constructive(plane, case, l1, l2, A1)
    img = (line_image(plane, c, l1), line_image(plane, c, l2), None if A1 is None else point_image(plane, c, A1))
    params = canonical_shape(plane, case, *img)
    fallback = False
    if params is None:
        fallback = True
        c = _word_search(plane, case, l1, l2, A1)
        if c is None:
            raise AssertionError(f"no canonical form found for {case} pair {(l1, l2)}")
        img = (line_image(plane, c, l1), line_image(plane, c, l2), None if A1 is None else point_image(plane, c, A1))
        params = canonical_shape(plane, case, *img)
    return c, CanonicalPairForm(case, img[0], img[1], tuple(params), img[2], fallback)


def canonical_pair_representatives(plane: PlaneTables, all_parameters: bool = False) -> list:
    """Representative ordered pairs per canonical case.

    With ``all_parameters`` every residual parameter value is listed, so the
    result meets every orbit of affine pairs.  Pairs with the line at
    infinity come last, tagged ``involves-infinity``.
    """
    H, n, q = plane.coords, plane.n, plane.q
    e01 = H.index((0, 1))
    v0 = 0
    h0 = _slanted(plane, 0, 0)
    l_e01 = _slanted(plane, e01, 0)
    out = []

    def take(values):
        values = list(values)
        return values if all_parameters else values[:1]

    for mu in take(range(q)):
        out.append((_slanted(plane, mu, 0), v0, BF_BF_INTERSECTING, (mu,)))
    for kappa in take(range(1, n)):
        out.append((_slanted(plane, 0, kappa), h0, BF_BF_PARALLEL, (kappa,)))
    for m in take(m for m in range(q, n) if m != e01):
        out.append((_slanted(plane, m, 0), l_e01, NBF_NBF_INTERSECTING, tuple(H.element(m))))
    for kappa in take(range(1, n)):
        out.append((_slanted(plane, e01, kappa), l_e01, NBF_NBF_PARALLEL, (kappa,)))
    out.append((l_e01, v0, NBF_BF, ()))
    out.append((v0, l_e01, BF_NBF, ()))
    inf = plane.infinity_line
    out.append((inf, v0, INVOLVES_INFINITY, ("inf", BF)))
    out.append((inf, l_e01, INVOLVES_INFINITY, ("inf", NBF)))
    out.append((v0, inf, INVOLVES_INFINITY, (BF, "inf")))
    out.append((l_e01, inf, INVOLVES_INFINITY, (NBF, "inf")))
    return out


def pair_orbit_labels(plane: PlaneTables, gens: Sequence[Collineation] | None = None) -> np.ndarray:
    """``labels[l1, l2]``: orbit label of the ordered line pair under the group."""
    N = plane.num_lines
    if gens is None:
        gens = group_generators(plane)
    lps = [permutations(plane, g)[1] for g in gens]
    ids = np.arange(N * N)
    l1, l2 = ids // N, ids % N
    perms = [lp[l1] * N + lp[l2] for lp in lps]
    return orbit_labels(perms, N * N).reshape(N, N)


def pair_orbits(plane: PlaneTables, gens: Sequence[Collineation] | None = None) -> list[dict]:
    """Orbits of ordered pairs of distinct lines under the generated group.

    Each entry has ``rep`` (the orbit's smallest pair id as (l1, l2)),
    ``size`` and ``case``.  Pairs with the line at infinity are included.
    """
    N = plane.num_lines
    labels = pair_orbit_labels(plane, gens).ravel()
    ids = np.arange(N * N)
    l1, l2 = ids // N, ids % N
    offdiag = l1 != l2
    labs = labels[offdiag]
    pair_ids = ids[offdiag]
    order = np.lexsort((pair_ids, labs))
    labs, pair_ids = labs[order], pair_ids[order]
    starts = np.nonzero(np.r_[True, labs[1:] != labs[:-1]])[0]
    sizes = np.diff(np.r_[starts, len(labs)])
    out = []
    for st, size in zip(starts, sizes):
        pid = int(pair_ids[st])
        a, b = divmod(pid, N)
        out.append({"rep": (a, b), "size": int(size), "case": pair_case(plane, a, b)})
    out.sort(key=lambda o: o["rep"])
    return out


# --------------------------------------------------------------------------
# suite checks


def verify_stabilizers(H: CoordinateSystem, sample: int | None = None, seed: int = 0) -> dict:
    """stabilizer_matrix postconditions over all (or ``sample`` random) nonzero pairs."""
    n = H.n
    if sample is None:
        pairs = [(y, z) for y in range(1, n) for z in range(1, n)]
    else:
        rng = np.random.default_rng(seed)
        pairs = [tuple(map(int, t)) for t in rng.integers(1, n, size=(sample, 2))]
    bad = [(y, z) for y, z in pairs if not stabilizer_matrix_ok(H, y, z, stabilizer_matrix(H, y, z))]
    return {"pairs_checked": len(pairs), "exhaustive": sample is None, "failures": len(bad),
            "first_failure": list(bad[0]) if bad else None, "ok": not bad}


def verify_canonicalization(plane: PlaneTables, sample: int | None = None, seed: int = 0) -> dict:
    """Canonicalize ordered affine line pairs with a marked point and check the result.

    The marked point is the smallest affine point of l1 off l2.  Each
    collineation is applied to the point sets of l1, l2 and the marked point
    independently of the line action, and the images must have the
    canonical shape of the pair's case.
    """
    A = plane.num_affine_lines
    if sample is None:
        pairs = [(a, b) for a in range(A) for b in range(A) if a != b]
    else:
        rng = np.random.default_rng(seed)
        pairs = []
        while len(pairs) < sample:
            a, b = map(int, rng.integers(0, A, size=2))
            if a != b:
                pairs.append((a, b))
    per_case: dict = {}
    fallbacks = 0
    bad = []
    for a, b in pairs:
        O = plane.meet_table[a, b]
        A1 = next(int(x) for x in plane.line_points[a] if x != O and plane.is_affine_point(int(x)))
        c, form = canonicalize_pair(plane, a, b, A1)
        pp, _ = permutations(plane, c)
        img1 = np.sort(pp[plane.line_points[a]])
        img2 = np.sort(pp[plane.line_points[b]])
        good = (
            form.case == pair_case(plane, a, b)
            and np.array_equal(img1, plane.line_points[form.l1])
            and np.array_equal(img2, plane.line_points[form.l2])
            and int(pp[A1]) == form.marked_point
            and canonical_shape(plane, form.case, form.l1, form.l2, form.marked_point) == form.params
        )
        per_case[form.case] = per_case.get(form.case, 0) + 1
        fallbacks += form.fallback_used
        if not good:
            bad.append((a, b))
    return {"pairs_checked": len(pairs), "exhaustive": sample is None, "per_case": dict(sorted(per_case.items())),
            "fallbacks": fallbacks, "failures": len(bad), "first_failure": list(bad[0]) if bad else None,
            "ok": not bad}


def verify_line_stabilizers(plane: PlaneTables, sample: int | None = None, seed: int = 0) -> dict:
    """transitive_stabilizer_witness on every line through the origin and point pair on it."""
    items = []
    for lid in plane.point_lines[0]:
        lid = int(lid)
        if lid == plane.infinity_line:
            continue
        pts = [int(p) for p in plane.line_points[lid] if p != 0 and plane.is_affine_point(int(p))]
        items.extend((lid, P, Q) for P in pts for Q in pts)
    if sample is not None and sample < len(items):
        rng = np.random.default_rng(seed)
        items = [items[i] for i in sorted(rng.choice(len(items), size=sample, replace=False))]
    bad = []
    for lid, P, Q in items:
        c = transitive_stabilizer_witness(plane, lid, P, Q)
        pp, lp = permutations(plane, c)
        if not (pp[0] == 0 and lp[lid] == lid and pp[P] == Q):
            bad.append((lid, P, Q))
    return {"triples_checked": len(items), "exhaustive": sample is None, "failures": len(bad),
            "first_failure": list(bad[0]) if bad else None, "ok": not bad}
