"""The affine plane over a coordinate system and its projective completion.

Point ids: affine ``(x, y)`` is ``x*n + y``; the slope point of ``m`` is
``n^2 + m``; the vertical infinite point is ``n^2 + n``.
Line ids: ``[c]`` is ``c``; ``[m, k]`` is ``n + m*n + k``; the line at
infinity is ``n^2 + n``.  Here ``n = q^2`` is the order of the plane.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, TextIO, Union

import numpy as np

from .coordsys import CoordinateSystem, HallPlaneError

BF, NBF, INFINITY = "BF", "NBF", "infinity"


class CoincidentPoints(HallPlaneError, ValueError):
    pass


class CoincidentLines(HallPlaneError, ValueError):
    pass


@dataclass(frozen=True)
class Affine:
    x: int
    y: int


@dataclass(frozen=True)
class SlopePoint:
    m: int


@dataclass(frozen=True)
class VerticalInfinity:
    pass


@dataclass(frozen=True)
class Vertical:
    c: int


@dataclass(frozen=True)
class Slanted:
    m: int
    k: int


@dataclass(frozen=True)
class LineAtInfinity:
    pass


Point = Union[Affine, SlopePoint, VerticalInfinity]
Line = Union[Vertical, Slanted, LineAtInfinity]


class PlaneTables:
    """Incidence, join and meet tables of a projective plane of order q^2.

    All arrays are read-only once built.
    """

    def __init__(self, coords: CoordinateSystem):
        self.coords = coords
        self.kind = coords.kind
        n = self.n = coords.n
        self.q = coords.q
        N = self.num_points = self.num_lines = n * n + n + 1
        self.num_affine_points = n * n
        self.num_affine_lines = n * n + n
        self.infinity_line = n * n + n
        self.vertical_infinity = n * n + n

        xs = np.arange(n)
        line_points = np.empty((N, n + 1), dtype=np.int64)
        for c in range(n):
            line_points[c, :n] = c * n + xs
            line_points[c, n] = self.vertical_infinity
        # slanted [m, k]: points (x, x m + k) and the slope point of m
        xm = coords.mul_table.T  # xm[m, x] = x*m
        for m in range(n):
            ys = coords.add_table[xm[m]]  # ys[x, k] = x*m + k
            base = n + m * n
            line_points[base : base + n, :n] = (xs[:, None] * n + ys).T
            line_points[base : base + n, n] = n * n + m
        line_points[N - 1, :n] = n * n + xs
        line_points[N - 1, n] = self.vertical_infinity
        line_points.sort(axis=1)
        self.line_points = line_points

        inc = np.zeros((N, N), dtype=np.uint8)
        inc[line_points, np.arange(N)[:, None]] = 1
        self.inc = inc
        self.point_lines = np.sort(np.nonzero(inc)[1].reshape(N, n + 1), axis=1)

        join = np.full((N, N), -1, dtype=np.int32)
        lines = np.arange(N)[:, None, None]
        join[line_points[:, :, None], line_points[:, None, :]] = np.broadcast_to(lines, (N, n + 1, n + 1))
        np.fill_diagonal(join, -1)
        meet = np.full((N, N), -1, dtype=np.int32)
        pts = np.arange(N)[:, None, None]
        pl = self.point_lines
        meet[pl[:, :, None], pl[:, None, :]] = np.broadcast_to(pts, (N, n + 1, n + 1))
        np.fill_diagonal(meet, -1)
        self.join_table = join
        self.meet_table = meet

        cls = np.empty(N, dtype=object)
        cls[:n] = BF
        slopes = (np.arange(n, N - 1) - n) // n
        cls[n : N - 1] = np.where(slopes < self.q, BF, NBF)
        cls[N - 1] = INFINITY
        self.line_class = cls
        for t in (self.line_points, self.inc, self.point_lines, self.join_table, self.meet_table):
            t.setflags(write=False)

    def __repr__(self):
        return f"PlaneTables(kind={self.kind!r}, q={self.q}, order={self.n})"

    # -- ids ---------------------------------------------------------------

    def point_id(self, P: Point) -> int:
        n = self.n
        if isinstance(P, Affine):
            return P.x * n + P.y
        if isinstance(P, SlopePoint):
            return n * n + P.m
        if isinstance(P, VerticalInfinity):
            return n * n + n
        raise TypeError(P)

    def point(self, pid: int) -> Point:
        n = self.n
        pid = int(pid)
        if pid < n * n:
            return Affine(pid // n, pid % n)
        if pid < n * n + n:
            return SlopePoint(pid - n * n)
        return VerticalInfinity()

    def line_id(self, l: Line) -> int:
        n = self.n
        if isinstance(l, Vertical):
            return l.c
        if isinstance(l, Slanted):
            return n + l.m * n + l.k
        if isinstance(l, LineAtInfinity):
            return n * n + n
        raise TypeError(l)

    def line(self, lid: int) -> Line:
        n = self.n
        lid = int(lid)
        if lid < n:
            return Vertical(lid)
        if lid < n + n * n:
            return Slanted((lid - n) // n, (lid - n) % n)
        return LineAtInfinity()

    def affine_line_ids(self) -> range:
        return range(self.num_affine_lines)

    def is_affine_point(self, pid: int) -> bool:
        return pid < self.num_affine_points

    def classify(self, lid: int) -> str:
        return self.line_class[lid]

    def points_on(self, lid: int) -> np.ndarray:
        return self.line_points[lid]

    def parallel_classes(self) -> dict:
        """Affine lines keyed by slope (``"vertical"`` for the verticals)."""
        n = self.n
        classes = {"vertical": list(range(n))}
        for m in range(n):
            classes[m] = list(range(n + m * n, n + (m + 1) * n))
        return classes

    # -- pointwise helpers -------------------------------------------------

    def join_ids(self, p: int, q: int) -> int:
        if p == q:
            raise CoincidentPoints(f"point {p} twice")
        return int(self.join_table[p, q])

    def meet_ids(self, a: int, b: int) -> int:
        if a == b:
            raise CoincidentLines(f"line {a} twice")
        return int(self.meet_table[a, b])


def build_plane(coords: CoordinateSystem) -> PlaneTables:
    return PlaneTables(coords)


def incident(tables: PlaneTables, P: Point, l: Line) -> bool:
    H = tables.coords
    if isinstance(P, Affine):
        if isinstance(l, Vertical):
            return P.x == l.c
        if isinstance(l, Slanted):
            return P.y == H.add(H.mul(P.x, l.m), l.k)
        return False
    if isinstance(P, SlopePoint):
        return isinstance(l, LineAtInfinity) or (isinstance(l, Slanted) and l.m == P.m)
    return isinstance(l, (Vertical, LineAtInfinity))


def join(tables: PlaneTables, P: Point, Q: Point) -> Line:
    """The line through two distinct points, solved in coordinates."""
    if P == Q:
        raise CoincidentPoints(f"{P} twice")
    H = tables.coords
    if isinstance(Q, Affine) and not isinstance(P, Affine):
        P, Q = Q, P
    if isinstance(P, Affine):
        if isinstance(Q, Affine):
            if P.x == Q.x:
                return Vertical(P.x)
            # right distributivity: (xP - xQ) m = yP - yQ
            m = H.solve_right_factor(H.sub(P.x, Q.x), H.sub(P.y, Q.y))
            return Slanted(m, H.sub(P.y, H.mul(P.x, m)))
        if isinstance(Q, SlopePoint):
            return Slanted(Q.m, H.sub(P.y, H.mul(P.x, Q.m)))
        return Vertical(P.x)
    return LineAtInfinity()


def meet(tables: PlaneTables, l: Line, m: Line) -> Point:
    """The common point of two distinct lines; slanted pairs by x-scan."""
    if l == m:
        raise CoincidentLines(f"{l} twice")
    H = tables.coords
    if isinstance(m, Vertical) and isinstance(l, Slanted):
        l, m = m, l
    if isinstance(l, LineAtInfinity):
        l, m = m, l
    if isinstance(m, LineAtInfinity):
        return SlopePoint(l.m) if isinstance(l, Slanted) else VerticalInfinity()
    if isinstance(l, Vertical):
        if isinstance(m, Vertical):
            return VerticalInfinity()
        return Affine(l.c, H.add(H.mul(l.c, m.m), m.k))
    if l.m == m.m:
        return SlopePoint(l.m)
    xs = np.arange(tables.n)
    lhs = H.add_table[H.mul_table[xs, l.m], l.k]
    rhs = H.add_table[H.mul_table[xs, m.m], m.k]
    hits = np.nonzero(lhs == rhs)[0]
    if len(hits) != 1:
        raise AssertionError(f"{l} and {m} meet in {len(hits)} affine points")
    x = int(hits[0])
    return Affine(x, int(lhs[x]))


def export_incidence(tables: PlaneTables, sink: TextIO) -> None:
    """Write ``"<points> <lines>"`` then one row of ascending point ids per line."""
    sink.write(f"{tables.num_points} {tables.num_lines}\n")
    for row in tables.line_points:
        sink.write(" ".join(str(int(p)) for p in row))
        sink.write("\n")


def incidence_text(tables: PlaneTables) -> str:
    buf = io.StringIO()
    export_incidence(tables, buf)
    return buf.getvalue()


def parse_incidence(lines: Iterable[str]) -> tuple[int, int, list[list[int]]]:
    it = iter(lines)
    header = next(it).split()
    num_points, num_lines = int(header[0]), int(header[1])
    rows = [[int(tok) for tok in line.split()] for line in it if line.strip()]
    if len(rows) != num_lines:
        raise ValueError(f"expected {num_lines} rows, got {len(rows)}")
    return num_points, num_lines, rows


def axiom_report(tables: PlaneTables, sample: int | None = None, seed: int = 0) -> dict:
    """Counts, projective axioms, and agreement of the tables with coordinate geometry.

    The coordinate cross-check of ``join``/``meet`` is exhaustive unless
    ``sample`` caps the number of random pairs checked.
    """
    T = tables
    n, q, N = T.n, T.q, T.num_points
    inc = T.inc.astype(np.int64)
    pp = inc @ inc.T
    ll = inc.T @ inc
    off = ~np.eye(N, dtype=bool)
    classes = T.parallel_classes()
    bf = int((T.line_class == BF).sum())
    nbf = int((T.line_class == NBF).sum())

    # parallel affine lines are exactly the ones meeting at infinity
    aff = np.arange(T.num_affine_lines)
    slope = np.where(aff < n, -1, (aff - n) // n)
    same_class = slope[:, None] == slope[None, :]
    at_inf = T.meet_table[np.ix_(aff, aff)] >= T.num_affine_points
    np.fill_diagonal(at_inf, same_class.diagonal())

    rng = np.random.default_rng(seed)
    pairs = [(a, b) for a in range(N) for b in range(a + 1, N)] if sample is None else [
        tuple(int(x) for x in rng.choice(N, size=2, replace=False)) for _ in range(sample)
    ]
    join_ok = meet_ok = True
    for a, b in pairs:
        if T.line_id(join(T, T.point(a), T.point(b))) != T.join_table[a, b]:
            join_ok = False
        if T.point_id(meet(T, T.line(a), T.line(b))) != T.meet_table[a, b]:
            meet_ok = False

    # meet(join(P,Q), join(P,R)) = P on non-collinear triples (sampled)
    inverse_ok = True
    for _ in range(2000):
        P, Q, R = (int(x) for x in rng.choice(N, size=3, replace=False))
        l1, l2 = T.join_table[P, Q], T.join_table[P, R]
        if l1 != l2 and T.meet_table[l1, l2] != P:
            inverse_ok = False

    return {
        "kind": T.kind,
        "q": q,
        "order": n,
        "points": N,
        "lines": T.num_lines,
        "affine_lines": T.num_affine_lines,
        "bf_lines": bf,
        "nbf_lines": nbf,
        "counts_ok": T.num_affine_lines == q**4 + q**2 and bf == q**3 + q**2 and nbf == q**4 - q**3
        and N == n * n + n + 1,
        "points_per_line_ok": bool((inc.sum(axis=0) == n + 1).all()),
        "lines_per_point_ok": bool((inc.sum(axis=1) == n + 1).all()),
        "two_points_one_line": bool((pp[off] == 1).all()),
        "two_lines_one_point": bool((ll[off] == 1).all()),
        "parallel_classes_ok": len(classes) == n + 1 and all(len(v) == n for v in classes.values())
        and sorted(x for v in classes.values() for x in v) == list(range(T.num_affine_lines)),
        "parallel_iff_same_slope": bool((at_inf == same_class).all()),
        "join_matches_coordinates": join_ok,
        "meet_matches_coordinates": meet_ok,
        "join_meet_inverse": inverse_ok,
        "coordinate_pairs_checked": len(pairs),
    }
