"""Pappus and Desargues configurations, and the k+m questions.

A question is asked on an ordered pair of distinct lines.  The candidate
points are the points of each line other than their common point; in the
default ``"affine"`` regime only affine points are used on affine lines,
while cross points and the Pappus line may lie at infinity.  The
``"projective"`` regime uses every point of the completion.

A *Pappus configuration* on six points needs the three cross points to be
pairwise distinct and collinear (``mode="nondegenerate"``).  The
``"relaxed"`` mode also accepts coinciding cross points.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .collineations import (
    INVOLVES_INFINITY,
    canonicalize_pair,
    group_generators,
    line_action_matches_points,
    pair_case,
    pair_orbits,
)
from .coordsys import HallPlaneError
from .plane import PlaneTables

QUESTIONS = ("3p3", "3p2", "3p1", "3p0", "2p0", "count")
MODES = ("nondegenerate", "relaxed")
REGIMES = ("affine", "projective")


class DegenerateSextuple(HallPlaneError, ValueError):
    pass


class NotFound(HallPlaneError, LookupError):
    pass


@dataclass(frozen=True)
class Sextuple:
    l1: int
    l2: int
    A1: int
    B1: int
    C1: int
    A2: int
    B2: int
    C2: int

    @property
    def points(self) -> tuple:
        return (self.A1, self.B1, self.C1, self.A2, self.B2, self.C2)

    @classmethod
    def from_points(cls, plane: PlaneTables, six: Sequence[int]) -> "Sextuple":
        six = [int(p) for p in six]
        return cls(plane.join_ids(six[0], six[1]), plane.join_ids(six[3], six[4]), *six)


@dataclass(frozen=True)
class PappusOutcome:
    A3: int
    B3: int
    C3: int
    pappus_line: int | None
    is_pappus: bool
    is_ninety_three: bool
    collinear_relaxed: bool


@dataclass
class QuestionVerdict:
    question: str
    pair: tuple
    case: str
    affirmed: bool | None
    witness: dict | None = None
    instances: int = 0
    failures: int = 0
    exhaustive: bool = True
    mode: str = "nondegenerate"
    points: str = "affine"
    orbit_size: int | None = None
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pair"] = list(self.pair)
        return d


# --------------------------------------------------------------------------
# the predicate


def candidate_points(plane: PlaneTables, l1: int, l2: int, points: str = "affine"):
    """Points of l1 and of l2 other than their common point, ascending."""
    if points not in REGIMES:
        raise ValueError(f"points must be one of {REGIMES}")
    O = plane.meet_ids(l1, l2)

    def keep(lid):
        pts = plane.line_points[lid]
        mask = pts != O
        if points == "affine" and lid != plane.infinity_line:
            mask &= pts < plane.num_affine_points
        return np.ascontiguousarray(pts[mask], dtype=np.int32)

    return keep(l1), keep(l2)


def validate_sextuple(plane: PlaneTables, s: Sextuple) -> None:
    if s.l1 == s.l2:
        raise DegenerateSextuple("lines coincide")
    pts = s.points
    if len(set(pts)) != 6:
        raise DegenerateSextuple(f"repeated point in {pts}")
    O = plane.meet_table[s.l1, s.l2]
    if O in pts:
        raise DegenerateSextuple("a point is the intersection of the two lines")
    for p in pts[:3]:
        if not plane.inc[p, s.l1]:
            raise DegenerateSextuple(f"point {p} is not on l1")
    for p in pts[3:]:
        if not plane.inc[p, s.l2]:
            raise DegenerateSextuple(f"point {p} is not on l2")


def pappus_check(plane: PlaneTables, s: Sextuple) -> PappusOutcome:
    validate_sextuple(plane, s)
    J, M, I = plane.join_table, plane.meet_table, plane.inc
    A1, B1, C1, A2, B2, C2 = s.points
    cross = {
        "C3": (int(J[A1, B2]), int(J[A2, B1])),
        "B3": (int(J[A1, C2]), int(J[A2, C1])),
        "A3": (int(J[B1, C2]), int(J[B2, C1])),
    }
    C3 = int(M[cross["C3"]])
    B3 = int(M[cross["B3"]])
    A3 = int(M[cross["A3"]])
    distinct = len({A3, B3, C3}) == 3
    line = int(J[A3, B3]) if distinct else None
    is_pappus = distinct and bool(I[C3, line])
    relaxed = (not distinct) or is_pappus
    if not is_pappus:
        return PappusOutcome(A3, B3, C3, None, False, False, relaxed)
    nine = s.points + (A3, B3, C3)
    lines = {
        s.l1: (A1, B1, C1),
        s.l2: (A2, B2, C2),
        cross["C3"][0]: (A1, B2, C3),
        cross["C3"][1]: (A2, B1, C3),
        cross["B3"][0]: (A1, C2, B3),
        cross["B3"][1]: (A2, C1, B3),
        cross["A3"][0]: (B1, C2, A3),
        cross["A3"][1]: (B2, C1, A3),
        line: (A3, B3, C3),
    }
    ninety_three = (
        len(set(nine)) == 9 and len(lines) == 9 and all(all(I[p, l] for p in pts) for l, pts in lines.items())
    )
    return PappusOutcome(A3, B3, C3, line, True, ninety_three, True)


# --------------------------------------------------------------------------
# chunked kernel execution


def _chunks(n: int, jobs: int) -> list[tuple[int, int]]:
    """Split the outer index range into contiguous, balanced-by-work pieces."""
    if jobs <= 1 or n < 2:
        return [(0, n)]
    # work for outer index i of a triple loop ~ C(n-1-i, 2)
    weights = np.array([comb(n - 1 - i, 2) + 1 for i in range(n)], dtype=float)
    cuts = np.searchsorted(np.cumsum(weights), np.linspace(0, weights.sum(), jobs + 1)[1:-1])
    bounds = [0] + sorted(set(int(c) + 1 for c in cuts if 0 < int(c) + 1 < n)) + [n]
    return list(zip(bounds[:-1], bounds[1:]))


def _run_chunked(fn, args, n, jobs, stop_on, extra=()):
    """Run ``fn(*args, lo, hi, *extra)`` per chunk; merge in chunk order.

    ``stop_on(result)`` marks a chunk that ended early; later chunks are then
    discarded so the merged result equals a serial run.
    """
    pieces = _chunks(n, jobs)
    if len(pieces) == 1:
        return [fn(*args, 0, n, *extra)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *args, lo, hi, *extra) for lo, hi in pieces]
        results = [f.result() for f in futures]
    out = []
    for r in results:
        out.append(r)
        if stop_on(r):
            break
    return out


def _pair_inputs(plane, pair, points):
    l1, l2 = pair
    if l1 == l2:
        raise ValueError("a question needs two distinct lines")
    P, Q = candidate_points(plane, l1, l2, points)
    if len(P) != len(Q):
        raise AssertionError("both lines must offer the same number of candidates")
    return (plane.join_table, plane.meet_table, plane.inc), P, Q


def _budget_hi(n, budget, per_outer):
    """Largest outer bound whose instance count stays within ``budget``."""
    if budget is None:
        return n
    total = 0
    for i in range(n):
        total += per_outer(i)
        if total > budget:
            return max(i, 1)
    return n


def _tables_note(P, Q):
    return {"l1_points": len(P), "l2_points": len(Q)}


def question_3p3(plane, pair, mode="nondegenerate", points="affine", jobs=1, budget=None, backend=None):
    """Pappian-pair test: every labelled sextuple on the pair is Pappus."""
    K = kernels.get(backend)
    t0 = time.perf_counter()
    tabs, P, Q = _pair_inputs(plane, pair, points)
    n = len(P)
    relaxed = mode == "relaxed"
    hi = _budget_hi(n, budget, lambda i: comb(n - 1 - i, 2) * comb(len(Q), 3) * 6)
    res = _run_chunked(K.search_3p3, (*tabs, P, Q), hi, jobs, lambda r: r[1] is not None, (relaxed,))
    checked = sum(r[0] for r in res)
    fail = next((r[1] for r in res if r[1] is not None), None)
    witness = None if fail is None else {"non_pappus_sextuple": list(fail)}
    affirmed = fail is None
    return QuestionVerdict("3p3", tuple(pair), pair_case(plane, *pair), affirmed, witness, checked,
                           0 if affirmed else 1, hi == n or not affirmed, mode, points,
                           elapsed=time.perf_counter() - t0)


def question_3p2(plane, pair, mode="nondegenerate", points="affine", jobs=1, budget=None, backend=None):
    K = kernels.get(backend)
    t0 = time.perf_counter()
    tabs, P, Q = _pair_inputs(plane, pair, points)
    n, relaxed = len(P), mode == "relaxed"
    hi = _budget_hi(n, budget, lambda i: comb(n - 1 - i, 2) * comb(len(Q), 2))
    res = _run_chunked(K.search_3p2, (*tabs, P, Q), hi, jobs, lambda r: r[1] is not None, (relaxed,))
    inst = sum(r[0] for r in res)
    fail = next((r[1] for r in res if r[1] is not None), None)
    if fail is None:
        idx = _first_instance(P, Q, 3, 2)
        done = K.complete_3p2(*tabs, P, Q, *idx, relaxed) if idx else None
        witness = {"first_instance_completion": None if done is None else list(done)}
    else:
        witness = {"failing_selection": {"l1": list(fail[:3]), "l2": list(fail[3:])}}
    return QuestionVerdict("3p2", tuple(pair), pair_case(plane, *pair), fail is None, witness, inst,
                           0 if fail is None else 1, hi == n or fail is not None, mode, points,
                           elapsed=time.perf_counter() - t0)


def question_3p1(plane, pair, mode="nondegenerate", points="affine", jobs=1, budget=None, backend=None,
                 count_all=False):
    """3 points on l1 and 1 on l2; ``count_all`` tallies every failing instance."""
    K = kernels.get(backend)
    t0 = time.perf_counter()
    tabs, P, Q = _pair_inputs(plane, pair, points)
    n, relaxed = len(P), mode == "relaxed"
    hi = _budget_hi(n, budget, lambda i: comb(n - 1 - i, 2) * len(Q))
    stop = (lambda r: False) if count_all else (lambda r: r[1] > 0)
    res = _run_chunked(K.search_3p1, (*tabs, P, Q), hi, jobs, stop, (relaxed, count_all))
    inst = sum(r[0] for r in res)
    failures = sum(r[1] for r in res)
    fail = next((r[2] for r in res if r[2] is not None), None)
    if fail is None:
        idx = _first_instance(P, Q, 3, 1)
        done = K.complete_3p1(*tabs, P, Q, *idx, relaxed) if idx else None
        witness = {"first_instance_completion": None if done is None else list(done)}
    else:
        witness = {"failing_selection": {"l1": list(fail[:3]), "l2": list(fail[3:])}}
    return QuestionVerdict("3p1", tuple(pair), pair_case(plane, *pair), failures == 0, witness, inst,
                           failures, hi == n or failures > 0, mode, points,
                           elapsed=time.perf_counter() - t0)


def question_3p0(plane, pair, mode="nondegenerate", points="affine", jobs=1, budget=None, backend=None):
    K = kernels.get(backend)
    t0 = time.perf_counter()
    tabs, P, Q = _pair_inputs(plane, pair, points)
    n, relaxed = len(P), mode == "relaxed"
    res = _run_chunked(K.search_3p0, (*tabs, P, Q), n, jobs, lambda r: r[1] is not None, (relaxed,))
    checked = sum(r[0] for r in res)
    found = next((r[1] for r in res if r[1] is not None), None)
    witness = None if found is None else {"pappus_sextuple": list(found)}
    return QuestionVerdict("3p0", tuple(pair), pair_case(plane, *pair), found is not None, witness, checked,
                           0 if found else 1, True, mode, points, elapsed=time.perf_counter() - t0)


def theorem_2p0(plane, pair, mode="nondegenerate", points="affine", jobs=1, budget=None, backend=None):
    K = kernels.get(backend)
    t0 = time.perf_counter()
    tabs, P, Q = _pair_inputs(plane, pair, points)
    n, relaxed = len(P), mode == "relaxed"
    hi = _budget_hi(n, budget, lambda i: n - 1 - i)
    res = _run_chunked(K.search_2p0, (*tabs, P, Q), hi, jobs, lambda r: r[1] is not None, (relaxed,))
    inst = sum(r[0] for r in res)
    fail = next((r[1] for r in res if r[1] is not None), None)
    if fail is None:
        done = K.complete_2p0(*tabs, P, Q, 0, 1, relaxed) if n >= 3 else None
        witness = {"first_instance_completion": None if done is None else list(done)}
    else:
        witness = {"failing_selection": {"l1": list(fail), "l2": []}}
    return QuestionVerdict("2p0", tuple(pair), pair_case(plane, *pair), fail is None, witness, inst,
                           0 if fail is None else 1, hi == n or fail is not None, mode, points,
                           elapsed=time.perf_counter() - t0)


def count_pappus(plane, pair, points="affine", jobs=1, backend=None) -> dict:
    """Pappus counts on the pair.

    ``sextuples`` counts unordered sextuples (a triple on each line) admitting
    a Pappus matching, out of ``sextuples_total``.  ``pappus``, ``relaxed``
    and ``total`` count configurations, i.e. (triple, triple, matching).
    """
    K = kernels.get(backend)
    tabs, P, Q = _pair_inputs(plane, pair, points)
    res = _run_chunked(K.count_pappus, (*tabs, P, Q), len(P), jobs, lambda r: False)
    strict, loose, total, sextuples = (sum(r[t] for r in res) for t in range(4))
    return {
        "sextuples": sextuples,
        "sextuples_total": total // 6,
        "pappus": strict,
        "relaxed": loose,
        "total": total,
        **_tables_note(P, Q),
    }


def question_count(plane, pair, mode="nondegenerate", points="affine", jobs=1, budget=None, backend=None):
    t0 = time.perf_counter()
    counts = count_pappus(plane, pair, points, jobs, backend)
    key = "relaxed" if mode == "relaxed" else "pappus"
    return QuestionVerdict("count", tuple(pair), pair_case(plane, *pair), counts[key] == counts["total"],
                           counts, counts["sextuples_total"], counts["sextuples_total"] - counts["sextuples"],
                           True, mode, points,
                           elapsed=time.perf_counter() - t0)


def _first_instance(P, Q, k, m):
    if len(P) < 3 or len(Q) < 3:
        return None
    return tuple(range(k)) + tuple(range(m))


SOLVERS = {
    "3p3": question_3p3,
    "3p2": question_3p2,
    "3p1": question_3p1,
    "3p0": question_3p0,
    "2p0": theorem_2p0,
    "count": question_count,
}


# --------------------------------------------------------------------------
# witness replay (pure Python, through pappus_check only)


def _labelled_completions(plane, fixed1, given2, cand2, need2):
    """Yield sextuples using all of ``fixed1`` on l1, ``given2`` plus ``need2`` more of ``cand2`` on l2."""
    for extra in itertools.permutations([p for p in cand2 if p not in given2], need2):
        l2pts = list(given2) + list(extra)
        for l1pts in itertools.permutations(fixed1):
            yield tuple(l1pts) + tuple(l2pts)


def replay(plane: PlaneTables, v: QuestionVerdict) -> bool:
    """Re-derive a verdict's witness using :func:`pappus_check` only."""
    relaxed = v.mode == "relaxed"

    def good(six):
        out = pappus_check(plane, Sextuple(v.pair[0], v.pair[1], *six))
        return out.collinear_relaxed if relaxed else out.is_pappus

    w = v.witness or {}
    P, Q = candidate_points(plane, *v.pair, v.points)
    P, Q = [int(p) for p in P], [int(p) for p in Q]
    if v.question == "count":
        return True
    if "non_pappus_sextuple" in w:
        return not good(w["non_pappus_sextuple"]) and v.affirmed is False
    if "pappus_sextuple" in w:
        return good(w["pappus_sextuple"]) and v.affirmed is True
    if "first_instance_completion" in w:
        six = w["first_instance_completion"]
        return six is not None and good(six) and v.affirmed is True
    if "failing_selection" in w:
        sel1, sel2 = w["failing_selection"]["l1"], w["failing_selection"]["l2"]
        if v.question == "2p0":
            for c in P:
                if c in sel1:
                    continue
                for six in _labelled_completions(plane, sel1 + [c], [], Q, 3):
                    if good(six):
                        return False
            return v.affirmed is False
        for six in _labelled_completions(plane, sel1, sel2, Q, 3 - len(sel2)):
            if good(six):
                return False
        return v.affirmed is False
    return v.affirmed is True and v.question == "3p3"


# --------------------------------------------------------------------------
# pair selection


def canonical_pairs(plane: PlaneTables, include_infinity: bool = True) -> list[dict]:
    """One pair per orbit of ordered line pairs, in canonical form when affine.

    For a plane other than the Hall plane only the generators that are
    collineations of that plane are used, and orbit minima stand in for
    canonical forms.
    """
    out = []
    if plane.kind != "hall":
        gens = [g for g in group_generators(plane) if line_action_matches_points(plane, g)]
        for o in pair_orbits(plane, gens):
            if o["case"] != INVOLVES_INFINITY or include_infinity:
                out.append({"pair": tuple(o["rep"]), "case": o["case"], "orbit_size": o["size"]})
        return out
    for o in pair_orbits(plane):
        l1, l2 = o["rep"]
        if o["case"] == INVOLVES_INFINITY:
            if include_infinity:
                out.append({"pair": (l1, l2), "case": o["case"], "orbit_size": o["size"]})
            continue
        _, form = canonicalize_pair(plane, l1, l2)
        out.append({"pair": (form.l1, form.l2), "case": form.case, "orbit_size": o["size"],
                    "params": list(form.params)})
    return out


def select_pairs(plane: PlaneTables, which: str = "canonical") -> list[dict]:
    if which == "canonical":
        return canonical_pairs(plane, include_infinity=False)
    if which == "infinity":
        return [p for p in canonical_pairs(plane) if p["case"] == INVOLVES_INFINITY]
    if which == "canonical+infinity":
        return canonical_pairs(plane)
    if which == "all":
        N = plane.num_lines
        return [{"pair": (a, b), "case": pair_case(plane, a, b), "orbit_size": 1}
                for a in range(N) for b in range(N) if a != b]
    raise ValueError(f"unknown pair selection {which!r}")


def run_question(plane, question, pairs="canonical", mode="nondegenerate", points="affine", jobs=1,
                 budget=None, backend=None, stop_on_failure=False) -> list[QuestionVerdict]:
    if question not in SOLVERS:
        raise ValueError(f"unknown question {question!r}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    solver = SOLVERS[question]
    out = []
    for entry in select_pairs(plane, pairs) if isinstance(pairs, str) else pairs:
        v = solver(plane, entry["pair"], mode=mode, points=points, jobs=jobs, budget=budget, backend=backend)
        v.orbit_size = entry.get("orbit_size")
        out.append(v)
        if stop_on_failure and v.affirmed is False:
            break
    return out


def summarize(verdicts: Iterable[QuestionVerdict]) -> dict:
    """Overall verdicts, split into affine pairs and pairs with the line at infinity."""
    groups = {"affine": [], "infinity": []}
    for v in verdicts:
        groups["infinity" if v.case == INVOLVES_INFINITY else "affine"].append(v)
    out = {}
    for name, vs in groups.items():
        if not vs:
            continue
        out[name] = {
            "pairs": len(vs),
            "affirmed": all(v.affirmed for v in vs),
            "failing_pairs": [list(v.pair) for v in vs if v.affirmed is False],
            "instances": sum(v.instances for v in vs),
            "failures": sum(v.failures for v in vs),
            "exhaustive": all(v.exhaustive for v in vs),
        }
    return out


IMPLICATIONS = (("3p3", "3p2"), ("3p2", "3p1"), ("3p1", "2p0"), ("3p1", "3p0"), ("2p0", "3p0"))


def monotone(verdicts: dict) -> bool:
    """3+3 => 3+2 => 3+1 => (2+0, 3+0) among the affirmed flags given."""
    for a, b in IMPLICATIONS:
        if a in verdicts and b in verdicts and verdicts[a].affirmed and verdicts[b].exhaustive:
            if not verdicts[b].affirmed:
                return False
    return True


def question_chain(plane, pair, mode="nondegenerate", points="affine", backend=None) -> dict:
    out = {q: SOLVERS[q](plane, pair, mode=mode, points=points, backend=backend) for q in ("3p3", "3p2", "3p1", "3p0", "2p0")}
    return out


# --------------------------------------------------------------------------
# witnesses


def find_non_pappus_witness(plane: PlaneTables, exhaustive: bool = False, backend=None) -> Sextuple:
    """A nondegenerate non-Pappus sextuple; raises NotFound if none exists.

    Orbit representatives are tried first; with ``exhaustive`` every
    unordered pair of lines is searched afterwards, using all points.
    """
    K = kernels.get(backend)
    tabs = (plane.join_table, plane.meet_table, plane.inc)
    tried = set()
    for entry in canonical_pairs(plane):
        l1, l2 = entry["pair"]
        tried.add((min(l1, l2), max(l1, l2)))
        P, Q = candidate_points(plane, l1, l2, "projective")
        _, fail = K.search_3p3(*tabs, P, Q, 0, len(P))
        if fail is not None:
            return Sextuple(l1, l2, *fail)
    if exhaustive:
        N = plane.num_lines
        for l1 in range(N):
            for l2 in range(l1 + 1, N):
                if (l1, l2) in tried:
                    continue
                P, Q = candidate_points(plane, l1, l2, "projective")
                _, fail = K.search_3p3(*tabs, P, Q, 0, len(P))
                if fail is not None:
                    return Sextuple(l1, l2, *fail)
    raise NotFound("every searched sextuple is Pappus")


@dataclass(frozen=True)
class DesarguesWitness:
    center: int
    triangle1: tuple
    triangle2: tuple
    axis_points: tuple
    concurrent_lines: tuple
    axis: int

    def to_dict(self) -> dict:
        return asdict(self)


def desargues_lines(plane: PlaneTables, w: DesarguesWitness) -> dict:
    """The ten lines with their three designated points each."""
    J = plane.join_table
    (a1, a2, a3), (b1, b2, b3) = w.triangle1, w.triangle2
    x12, x13, x23 = w.axis_points
    return {
        "concurrent_1": (w.center, a1, b1),
        "concurrent_2": (w.center, a2, b2),
        "concurrent_3": (w.center, a3, b3),
        "side_a12": (a1, a2, x12),
        "side_b12": (b1, b2, x12),
        "side_a13": (a1, a3, x13),
        "side_b13": (b1, b3, x13),
        "side_a23": (a2, a3, x23),
        "side_b23": (b2, b3, x23),
        "axis": (x12, x13, x23),
    }


def verify_desargues(plane: PlaneTables, w: DesarguesWitness) -> bool:
    """Ten distinct points, ten distinct lines, each point on exactly three of them."""
    pts = (w.center,) + tuple(w.triangle1) + tuple(w.triangle2) + tuple(w.axis_points)
    if len(set(pts)) != 10:
        return False
    named = desargues_lines(plane, w)
    line_ids = []
    for trio in named.values():
        l = int(plane.join_table[trio[0], trio[1]])
        if not all(plane.inc[p, l] for p in trio):
            return False
        line_ids.append(l)
    if len(set(line_ids)) != 10:
        return False
    for p in pts:
        if sum(int(plane.inc[p, l]) for l in line_ids) != 3:
            return False
    return True


def exists_desargues(plane: PlaneTables, center: int = 0) -> DesarguesWitness:
    """Search for a Desargues configuration by the pigeonhole route.

    Three lines through ``center`` and two points R, S off them are fixed.
    Each vertex v1 on the first line gives the triangle with side v1v2
    through R and side v1v3 through S; two triangles whose third sides meet
    RS in the same point are in perspective from the center and from RS.
    """
    J, M = plane.join_table, plane.meet_table
    through = [int(l) for l in plane.point_lines[center]]
    for l1, l2, l3 in itertools.combinations(through, 3):
        off = [p for p in range(plane.num_points) if not (plane.inc[p, l1] or plane.inc[p, l2] or plane.inc[p, l3])]
        for R, S in itertools.combinations(off, 2):
            rs = int(J[R, S])
            if plane.inc[center, rs]:
                continue
            buckets: dict[int, tuple] = {}
            for v1 in plane.line_points[l1]:
                v1 = int(v1)
                if v1 == center:
                    continue
                v2 = int(M[J[v1, R], l2])
                v3 = int(M[J[v1, S], l3])
                if center in (v2, v3) or J[v2, v3] == rs:
                    continue
                x = int(M[J[v2, v3], rs])
                if x in buckets:
                    w = DesarguesWitness(center, buckets[x], (v1, v2, v3), (R, S, x), (l1, l2, l3), rs)
                    if verify_desargues(plane, w):
                        return w
                else:
                    buckets[x] = (v1, v2, v3)
    raise NotFound("no Desargues configuration through this center")
