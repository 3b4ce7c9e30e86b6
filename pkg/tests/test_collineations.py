import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hallplanes import collineations as C
from hallplanes.plane import BF, NBF

from .conftest import field, hall


def affine_image_oracle(plane, c, x, y):
    """Point image written from the defining formulas, one map at a time."""
    H = plane.coords
    F = H.basefield
    parts = c.parts if isinstance(c, C.Composite) else (c,)
    for g in parts:
        if isinstance(g, C.Translation):
            x, y = H.add(x, g.a), H.add(y, g.b)
        elif isinstance(g, C.Autotopism):
            x, y = C.vec_mat(H, x, g.S), C.vec_mat(H, y, g.S)
        else:
            a, b = g.a, g.b
            cx = F.add(F.neg(F.mul(a, H.r)), b)
            x, y = (H.add(H.scalar(cx, x), H.scalar(a, y)),
                    H.add(H.scalar(F.mul(a, H.s), x), H.scalar(b, y)))
    return x, y


def is_collineation(plane, c):
    pp, lp = C.permutations(plane, c)
    if sorted(pp.tolist()) != list(range(plane.num_points)):
        return False
    images = np.sort(pp[plane.line_points], axis=1)
    return np.array_equal(images, plane.line_points[lp])


@pytest.mark.parametrize("p,k", [(3, 1), (2, 2), (5, 1)])
def test_generators_are_collineations(p, k):
    P = hall(p, k)
    for g in C.group_generators(P):
        assert is_collineation(P, g), g
        assert C.line_action_matches_points(P, g)


@pytest.mark.parametrize("p,k", [(3, 1), (2, 2)])
def test_point_action_matches_formulas(p, k):
    P = hall(p, k)
    n = P.n
    rng = np.random.default_rng(1)
    gens = C.group_generators(P) + [C.Linear(1, 1), C.Autotopism((1, 1, 1, 2 % P.q or 1))]
    gens = [g for g in gens if not isinstance(g, C.Autotopism) or C.mat_det(P.coords.basefield, g.S)]
    for g in gens:
        pp, _ = C.permutations(P, g)
        for pid in rng.integers(0, n * n, size=40):
            x, y = divmod(int(pid), n)
            ex, ey = affine_image_oracle(P, g, x, y)
            assert pp[pid] == ex * n + ey


def test_every_group_element_is_a_collineation_order_9(hall9):
    for c in C.translations(hall9) + C.autotopisms(hall9) + C.linear_maps(hall9):
        assert is_collineation(hall9, c)


def test_group_orders_order_9(hall9):
    P = hall9
    assert C.distinct_maps(P, C.translations(P)) == 81
    assert C.distinct_maps(P, C.linear_maps(P)) == 8
    assert C.distinct_maps(P, C.autotopisms(P)) == 48
    origin_orbit = {C.point_image(P, t, 0) for t in C.translations(P)}
    assert len(origin_orbit) == 81


@pytest.mark.parametrize("p,k", [(3, 1), (2, 2)])
def test_group_propositions(p, k):
    rep = C.verify_group_propositions(hall(p, k))
    assert rep["ok"], rep


def test_bf_nbf_orbits_order_9(hall9):
    P = hall9
    orbits = C.orbits_of([C.permutations(P, g)[1] for g in C.group_generators(P)],
                         range(P.num_affine_lines), P.num_lines)
    assert sorted(len(o) for o in orbits) == [36, 54]
    for o in orbits:
        assert len({P.line_class[l] for l in o}) == 1


def test_field_plane_rejects_some_hall_generators(field9):
    ok = [C.line_action_matches_points(field9, g) for g in C.group_generators(field9)]
    assert not all(ok) and any(ok)


def test_stabilizer_matrices_exhaustive_order_9(hall9):
    rep = C.verify_stabilizers(hall9.coords)
    assert rep["ok"] and rep["pairs_checked"] == 64


def test_stabilizer_matrix_cases():
    H = hall(5).coords
    F = H.basefield
    for y in range(1, H.n):
        S = C.stabilizer_matrix(H, y, y)
        assert C.stabilizer_matrix_ok(H, y, y, S)
    for y1 in range(1, 5):
        for c in range(1, 5):
            z = H.scalar(c, y1)
            assert C.stabilizer_matrix_ok(H, y1, z, C.stabilizer_matrix(H, y1, z))
    with pytest.raises(ValueError):
        C.stabilizer_matrix(H, 0, 3)
    assert C.mat_det(F, C.stabilizer_matrix(H, 7, 13)) != 0


def test_stabilizer_matrices_sampled_order_25():
    assert C.verify_stabilizers(hall(5).coords, sample=3000)["ok"]


@pytest.mark.parametrize("p,k", [(3, 1), (2, 2)])
def test_line_stabilizers(p, k):
    assert C.verify_line_stabilizers(hall(p, k))["ok"]


def test_line_stabilizer_kinds(hall9):
    P = hall9
    H = P.coords
    e01 = H.index((0, 1))
    l = P.n + e01 * P.n
    pts = [int(x) for x in P.line_points[l] if 0 < x < P.num_affine_points]
    g = C.transitive_stabilizer_witness(P, l, pts[0], pts[3])
    assert isinstance(g, C.Linear)
    g = C.transitive_stabilizer_witness(P, 0, 1, 5)
    assert isinstance(g, C.Autotopism)
    assert C.transitive_stabilizer_witness(P, 0, 1, 1) == C.IDENTITY
    with pytest.raises(ValueError):
        C.transitive_stabilizer_witness(P, 0, 0, 1)


def test_canonicalization_exhaustive_order_9(hall9):
    rep = C.verify_canonicalization(hall9)
    assert rep["ok"] and rep["pairs_checked"] == 90 * 89
    assert rep["fallbacks"] == 0
    assert set(rep["per_case"]) == set(C.AFFINE_CASES)


@pytest.mark.parametrize("p,k", [(2, 2), (5, 1)])
def test_canonicalization_sampled(p, k):
    assert C.verify_canonicalization(hall(p, k), sample=300, seed=3)["ok"]


def test_canonicalize_errors(hall9):
    with pytest.raises(ValueError):
        C.canonicalize_pair(hall9, 3, 3)
    with pytest.raises(C.InfinityLineUnsupported):
        C.canonicalize_pair(hall9, hall9.infinity_line, 0)
    with pytest.raises(ValueError):
        C.canonicalize_pair(hall9, 0, 9, A1=80)


def test_canonical_representatives_have_their_shape(hall16):
    P = hall16
    for l1, l2, case, params in C.canonical_pair_representatives(P, all_parameters=True):
        assert C.pair_case(P, l1, l2) == case
        if case != C.INVOLVES_INFINITY:
            assert C.canonical_shape(P, case, l1, l2, None) is not None


def test_pair_orbits_partition(hall9):
    P = hall9
    orbits = C.pair_orbits(P)
    N = P.num_lines
    assert sum(o["size"] for o in orbits) == N * (N - 1)
    affine = [o for o in orbits if o["case"] != C.INVOLVES_INFINITY]
    # every affine orbit stays inside one case
    labels = C.pair_orbit_labels(P)
    for o in affine:
        l1, l2 = o["rep"]
        members = np.argwhere(labels == labels[l1, l2])
        assert {C.pair_case(P, int(a), int(b)) for a, b in members[:50] if a != b} == {o["case"]}


def test_compose_and_singular():
    P = hall(3)
    t = C.Translation(1, 2)
    c = C.compose(t, C.Linear(1, 0), C.compose(t))
    assert len(c.parts) == 3
    with pytest.raises(C.SingularMatrix):
        C.mat_inv(P.coords.basefield, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        C.Linear(0, 0)
    with pytest.raises(ValueError):
        C.Autotopism((1, 0, 0))


def random_collineation(plane, rng, length=4):
    pool = C.group_generators(plane)
    return C.compose(*[pool[int(i)] for i in rng.integers(0, len(pool), size=length)])


@given(st.integers(0, 2**32 - 1))
def test_random_words_are_collineations(seed):
    P = hall(3)
    c = random_collineation(P, np.random.default_rng(seed))
    assert is_collineation(P, c)


@given(st.integers(0, 2**32 - 1))
def test_composition_acts_left_to_right(seed):
    P = hall(2, 2)
    rng = np.random.default_rng(seed)
    a, b = random_collineation(P, rng, 2), random_collineation(P, rng, 2)
    pa, la = C.permutations(P, a)
    pb, lb = C.permutations(P, b)
    pc, lc = C.permutations(P, C.compose(a, b))
    assert np.array_equal(pc, pb[pa]) and np.array_equal(lc, lb[la])
