import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hallplanes import collineations as C
from hallplanes import configs as K
from hallplanes import kernels

from .conftest import field, hall

BACKENDS = kernels.available()


def brute_pappus(plane, six):
    """Cross points and collinearity straight from the incidence matrix."""
    inc = plane.inc.astype(bool)

    def line(a, b):
        return int(np.nonzero(inc[a] & inc[b])[0][0])

    def point(l, m):
        return int(np.nonzero(inc[:, l] & inc[:, m])[0][0])

    a1, b1, c1, a2, b2, c2 = six
    c3 = point(line(a1, b2), line(a2, b1))
    b3 = point(line(a1, c2), line(a2, c1))
    a3 = point(line(b1, c2), line(b2, c1))
    if len({a3, b3, c3}) < 3:
        return False
    return bool(inc[c3, line(a3, b3)])


def random_sextuple(plane, rng, l1=None, l2=None, points="projective"):
    N = plane.num_lines
    while True:
        a, b = (int(x) for x in rng.integers(0, N, size=2)) if l1 is None else (l1, l2)
        if a == b:
            continue
        P, Q = K.candidate_points(plane, a, b, points)
        if len(P) < 3:
            continue
        six = list(rng.choice(P, 3, replace=False)) + list(rng.choice(Q, 3, replace=False))
        return K.Sextuple(a, b, *map(int, six))


# --------------------------------------------------------------------------
# the predicate


def test_pappus_check_matches_brute_force(hall9):
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(400):
        s = random_sextuple(hall9, rng)
        out = K.pappus_check(hall9, s)
        assert out.is_pappus == brute_pappus(hall9, s.points)
        seen.add(out.is_pappus)
    assert seen == {True, False}


def test_field_plane_always_pappus(field9):
    rng = np.random.default_rng(1)
    for _ in range(300):
        s = random_sextuple(field9, rng)
        out = K.pappus_check(field9, s)
        assert out.is_pappus and out.is_ninety_three


def test_degenerate_sextuples(hall9):
    P = hall9
    l1, l2 = 0, 9
    A, B = K.candidate_points(P, l1, l2)
    O = P.meet_ids(l1, l2)
    with pytest.raises(K.DegenerateSextuple):
        K.pappus_check(P, K.Sextuple(l1, l2, A[0], A[0], A[1], B[0], B[1], B[2]))
    with pytest.raises(K.DegenerateSextuple):
        K.pappus_check(P, K.Sextuple(l1, l2, O, A[0], A[1], B[0], B[1], B[2]))
    with pytest.raises(K.DegenerateSextuple):
        K.pappus_check(P, K.Sextuple(l1, l2, B[3], A[0], A[1], B[0], B[1], B[2]))
    with pytest.raises(K.DegenerateSextuple):
        K.pappus_check(P, K.Sextuple(l1, l1, A[2], A[0], A[1], A[3], A[4], A[5]))


def test_from_points(hall9):
    P = hall9
    A, B = K.candidate_points(P, 0, 9)
    s = K.Sextuple.from_points(P, list(A[:3]) + list(B[:3]))
    assert (s.l1, s.l2) == (0, 9)


def test_candidate_points(hall9):
    P = hall9
    A, B = K.candidate_points(P, 0, 9, "affine")
    assert len(A) == len(B) == 8
    A, B = K.candidate_points(P, 0, 9, "projective")
    assert len(A) == len(B) == 9
    A, B = K.candidate_points(P, 0, 1, "affine")  # parallel verticals
    assert len(A) == len(B) == 9
    A, B = K.candidate_points(P, P.infinity_line, 0, "affine")
    assert len(A) == len(B) == 9
    with pytest.raises(ValueError):
        K.candidate_points(P, 0, 9, "nowhere")


@given(st.integers(0, 2**32 - 1), st.sampled_from([(3, 1), (2, 2)]))
def test_pappus_iff_ninety_three(seed, pk):
    P = hall(*pk)
    out = K.pappus_check(P, random_sextuple(P, np.random.default_rng(seed)))
    assert out.is_pappus == out.is_ninety_three
    assert out.collinear_relaxed or not out.is_pappus


@given(st.integers(0, 2**32 - 1))
def test_collineation_invariance(seed):
    P = hall(2, 2)
    rng = np.random.default_rng(seed)
    gens = C.group_generators(P)
    c = C.compose(*[gens[int(i)] for i in rng.integers(0, len(gens), size=5)])
    pp, lp = C.permutations(P, c)
    s = random_sextuple(P, rng)
    t = K.Sextuple(int(lp[s.l1]), int(lp[s.l2]), *(int(pp[x]) for x in s.points))
    a, b = K.pappus_check(P, s), K.pappus_check(P, t)
    assert a.is_pappus == b.is_pappus
    assert (int(pp[a.A3]), int(pp[a.B3]), int(pp[a.C3])) == (b.A3, b.B3, b.C3)


# --------------------------------------------------------------------------
# kernels


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("pk", [(3, 1), (2, 2)])
def test_backends_agree(pk):
    P = hall(*pk)
    py, cy = kernels.get("python"), kernels.get("cython")
    tabs = (P.join_table, P.meet_table, P.inc)
    for entry in K.select_pairs(P, "canonical+infinity")[:8]:
        for points in ("affine", "projective"):
            A, B = K.candidate_points(P, *entry["pair"], points)
            n = len(A)
            hi = min(n, 3)
            for relaxed in (False, True):
                for name in ("search_3p3", "search_3p2", "search_3p0", "search_2p0"):
                    assert getattr(py, name)(*tabs, A, B, 0, hi, relaxed) == getattr(cy, name)(*tabs, A, B, 0, hi, relaxed)
                for count_all in (False, True):
                    assert py.search_3p1(*tabs, A, B, 0, hi, relaxed, count_all) == cy.search_3p1(
                        *tabs, A, B, 0, hi, relaxed, count_all)
                assert py.complete_3p1(*tabs, A, B, 0, 1, 2, 0, relaxed) == cy.complete_3p1(
                    *tabs, A, B, 0, 1, 2, 0, relaxed)
                assert py.complete_3p2(*tabs, A, B, 0, 1, 2, 0, 1, relaxed) == cy.complete_3p2(
                    *tabs, A, B, 0, 1, 2, 0, 1, relaxed)
                assert py.complete_2p0(*tabs, A, B, 0, 1, relaxed) == cy.complete_2p0(*tabs, A, B, 0, 1, relaxed)
            assert py.count_pappus(*tabs, A, B, 0, 2) == cy.count_pappus(*tabs, A, B, 0, 2)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("question", ["3p3", "3p2", "3p1", "3p0", "2p0", "count"])
def test_backends_give_identical_verdicts(hall9, question):
    for backend in BACKENDS:
        vs = K.run_question(hall9, question, "canonical+infinity", points="projective", backend=backend)
        rows = [v.to_dict() for v in vs]
        for r in rows:
            r.pop("elapsed")
        if backend == BACKENDS[0]:
            first = rows
        else:
            assert rows == first


def test_backend_selection():
    assert kernels.get("python") is not None
    with pytest.raises(ValueError):
        kernels.get("fortran")
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("question", ["3p3", "3p2", "3p1", "3p0", "2p0", "count"])
def test_parallel_runs_match_serial(hall16, question):
    pairs = K.select_pairs(hall16, "canonical")[:4]
    serial = [v.to_dict() for v in K.run_question(hall16, question, pairs, jobs=1)]
    parallel = [v.to_dict() for v in K.run_question(hall16, question, pairs, jobs=4)]
    for a, b in zip(serial, parallel):
        a.pop("elapsed")
        b.pop("elapsed")
    assert serial == parallel


def test_chunks_cover_range():
    for n in (1, 2, 7, 24):
        for jobs in (1, 2, 3, 8):
            ch = K._chunks(n, jobs)
            assert ch[0][0] == 0 and ch[-1][1] == n
            assert all(a[1] == b[0] for a, b in zip(ch, ch[1:]))


# --------------------------------------------------------------------------
# questions


def test_order_9_verdicts(hall9):
    s = lambda q: K.summarize(K.run_question(hall9, q, "canonical+infinity"))
    assert s("3p3")["affine"]["affirmed"] is False and s("3p3")["infinity"]["affirmed"] is False
    assert s("3p1")["affine"]["affirmed"] is True
    assert s("3p0")["affine"]["affirmed"] and s("3p0")["infinity"]["affirmed"]
    assert s("2p0")["affine"]["affirmed"] and s("2p0")["infinity"]["affirmed"]
    assert len(s("3p2")["affine"]["failing_pairs"]) == 2


def test_projective_regime_changes_3p1_at_order_9(hall9):
    vs = K.run_question(hall9, "3p1", "canonical", points="projective")
    assert K.summarize(vs)["affine"]["affirmed"] is False


def test_field_oracle_questions(field9):
    for q in ("3p3", "3p2", "3p1", "3p0", "2p0", "count"):
        vs = K.run_question(field9, q, "canonical+infinity")
        assert all(v.affirmed for v in vs), q


def test_field_canonical_pairs_use_only_collineations(field9):
    pairs = K.canonical_pairs(field9)
    N = field9.num_lines
    assert sum(p["orbit_size"] for p in pairs) == N * (N - 1)


@pytest.mark.parametrize("question", ["3p3", "3p2", "3p1", "3p0", "2p0"])
@pytest.mark.parametrize("points", ["affine", "projective"])
def test_witness_replay(hall9, question, points):
    for v in K.run_question(hall9, question, "canonical+infinity", points=points):
        assert K.replay(hall9, v), v


def test_replay_detects_tampering(hall9):
    v = K.question_3p3(hall9, (0, 9))
    assert K.replay(hall9, v)
    good = K.question_3p0(hall9, (0, 9))
    bad = K.QuestionVerdict("3p3", (0, 9), v.case, False, {"non_pappus_sextuple": good.witness["pappus_sextuple"]})
    assert not K.replay(hall9, bad)


@pytest.mark.parametrize("points", ["affine", "projective"])
def test_monotone_chain(hall9, points):
    for entry in K.select_pairs(hall9, "canonical+infinity"):
        chain = K.question_chain(hall9, entry["pair"], points=points)
        assert K.monotone(chain)


def test_monotone_detects_violation():
    a = K.QuestionVerdict("3p3", (0, 1), "x", True)
    b = K.QuestionVerdict("3p2", (0, 1), "x", False)
    assert not K.monotone({"3p3": a, "3p2": b})
    assert K.monotone({"3p3": b, "3p2": a})


def test_budget_marks_partial(hall16):
    v = K.question_3p1(hall16, K.select_pairs(hall16)[0]["pair"], budget=10)
    assert v.exhaustive is False and v.affirmed is True
    full = K.question_3p1(hall16, K.select_pairs(hall16)[0]["pair"])
    assert full.exhaustive and full.instances > v.instances


def test_count_all_failures(hall9):
    v = K.question_3p1(hall9, K.select_pairs(hall9)[0]["pair"], points="projective", count_all=True)
    assert v.instances == 84 * 9


def test_counts_order_9(hall9, field9):
    c = K.count_pappus(field9, (0, 9))
    assert c["pappus"] == c["total"] == 6 * 56 * 56
    assert c["sextuples"] == c["sextuples_total"] == 56 * 56
    for entry in K.select_pairs(hall9, "canonical+infinity"):
        c = K.count_pappus(hall9, entry["pair"])
        assert c["pappus"] < c["total"]
        assert c["relaxed"] >= c["pappus"]
        assert c["sextuples"] <= c["sextuples_total"]


def test_orbit_reduction_is_sound(hall9):
    """Random ordered pairs get the verdict of their orbit representative."""
    labels = C.pair_orbit_labels(hall9)
    reps = {}
    for o in C.pair_orbits(hall9):
        reps[int(labels[o["rep"]])] = o["rep"]
    rng = np.random.default_rng(5)
    N = hall9.num_lines
    for _ in range(150):
        a, b = (int(x) for x in rng.integers(0, N, size=2))
        if a == b:
            continue
        rep = reps[int(labels[a, b])]
        for q in ("3p2", "3p1"):
            x = K.SOLVERS[q](hall9, (a, b), points="projective").affirmed
            y = K.SOLVERS[q](hall9, rep, points="projective").affirmed
            assert x == y


def test_canonical_pairs_are_canonical(hall16):
    for e in K.canonical_pairs(hall16):
        if e["case"] != C.INVOLVES_INFINITY:
            assert C.canonical_shape(hall16, e["case"], *e["pair"], None) is not None


def test_select_pairs(hall9):
    assert len(K.select_pairs(hall9, "all")) == 91 * 90
    inf = K.select_pairs(hall9, "infinity")
    assert inf and all(e["case"] == C.INVOLVES_INFINITY for e in inf)
    with pytest.raises(ValueError):
        K.select_pairs(hall9, "some")
    with pytest.raises(ValueError):
        K.run_question(hall9, "4p4")
    with pytest.raises(ValueError):
        K.run_question(hall9, "3p1", mode="strict")
    with pytest.raises(ValueError):
        K.question_3p1(hall9, (4, 4))


def test_summarize_and_serialization(hall9):
    vs = K.run_question(hall9, "3p2", "canonical+infinity")
    s = K.summarize(vs)
    assert s["affine"]["pairs"] + s["infinity"]["pairs"] == len(vs)
    json.dumps([v.to_dict() for v in vs])


def test_relaxed_mode_never_weaker(hall9):
    for entry in K.select_pairs(hall9, "canonical"):
        for q in ("3p2", "3p1"):
            strict = K.SOLVERS[q](hall9, entry["pair"], points="projective")
            loose = K.SOLVERS[q](hall9, entry["pair"], mode="relaxed", points="projective")
            assert loose.affirmed or not strict.affirmed


def test_stop_on_failure(hall9):
    vs = K.run_question(hall9, "3p3", "canonical", stop_on_failure=True)
    assert len(vs) == 1


# --------------------------------------------------------------------------
# witnesses


def desargues_oracle(plane, w):
    inc = plane.inc.astype(bool)

    def line(a, b):
        return int(np.nonzero(inc[a] & inc[b])[0][0])

    def point(l, m):
        return int(np.nonzero(inc[:, l] & inc[:, m])[0][0])

    t1, t2 = w.triangle1, w.triangle2
    concurrent = all(inc[w.center, line(a, b)] for a, b in zip(t1, t2))
    sides = [point(line(t1[i], t1[j]), line(t2[i], t2[j])) for i, j in ((0, 1), (0, 2), (1, 2))]
    axis = line(sides[0], sides[1])
    return concurrent and inc[sides[2], axis] and len(set(t1 + t2 + (w.center,))) == 7


def test_no_desargues_configuration_in_order_4():
    P = hall(2)
    with pytest.raises(K.NotFound):
        K.exists_desargues(P)
    # every triangle pair in perspective from the origin; the plane is point transitive
    J, M = P.join_table, P.meet_table
    through = [int(l) for l in P.point_lines[0]]
    for lines in itertools.combinations(through, 3):
        pts = [[int(x) for x in P.line_points[l] if x != 0] for l in lines]
        for (a1, b1), (a2, b2), (a3, b3) in itertools.product(*(itertools.permutations(p, 2) for p in pts)):
            axis = tuple(int(M[J[u, v], J[x, y]]) for u, v, x, y in
                         ((a1, a2, b1, b2), (a1, a3, b1, b3), (a2, a3, b2, b3)))
            w = K.DesarguesWitness(0, (a1, a2, a3), (b1, b2, b3), axis, lines, -1)
            assert not K.verify_desargues(P, w)


@pytest.mark.parametrize("pk", [(3, 1), (2, 2)])
def test_desargues_witness(pk):
    P = hall(*pk)
    w = K.exists_desargues(P)
    assert K.verify_desargues(P, w)
    assert desargues_oracle(P, w)
    assert len(K.desargues_lines(P, w)) == 10


def test_desargues_other_centers(hall9):
    for center in (5, 81, hall9.vertical_infinity):
        w = K.exists_desargues(hall9, center)
        assert w.center == center and K.verify_desargues(hall9, w)


def test_verify_desargues_rejects_bad(hall9):
    w = K.exists_desargues(hall9)
    bad = K.DesarguesWitness(w.center, w.triangle1, w.triangle2, (w.axis_points[0],) * 3, w.concurrent_lines, w.axis)
    assert not K.verify_desargues(hall9, bad)
    t = list(w.triangle2)
    t[0] = w.triangle1[0]
    assert not K.verify_desargues(hall9, K.DesarguesWitness(w.center, w.triangle1, tuple(t), w.axis_points,
                                                           w.concurrent_lines, w.axis))


def test_non_pappus_witness(hall9, field9):
    s = K.find_non_pappus_witness(hall9)
    assert not K.pappus_check(hall9, s).is_pappus
    assert not brute_pappus(hall9, s.points)
    with pytest.raises(K.NotFound):
        K.find_non_pappus_witness(field9)


def test_non_pappus_exhaustive_field_order_4():
    with pytest.raises(K.NotFound):
        K.find_non_pappus_witness(field(2), exhaustive=True)
