"""Closed-form constructions: expression evaluation, single cases and sweeps."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hallplanes.constructions import (
    CASE_TAGS,
    CASES,
    ConstraintViolated,
    ConstructionCase,
    FieldExpr,
    _plane_for,
    evaluate_case,
    sweep_case,
    sweep_family,
)
from hallplanes.plane import LineAtInfinity, Slanted

from .conftest import hall


def HS(p):
    return hall(p, 1).coords


def first_valid(H, tag, params):
    spec = CASES[tag]
    for vals in itertools.product(range(H.q), repeat=len(spec.unknowns)):
        case = ConstructionCase(tag, params, dict(zip(spec.unknowns, vals)))
        try:
            return case, evaluate_case(H, case)
        except ConstraintViolated:
            continue
    return None, None


# -- expressions -----------------------------------------------------------

EXPRS = [
    ("a + b*c", lambda a, b, c, p: (a + b * c) % p),
    ("-a - 3*b", lambda a, b, c, p: (-a - 3 * b) % p),
    ("(a - b)**3 + c**2", lambda a, b, c, p: ((a - b) ** 3 + c * c) % p),
    ("f(a)", None),
]


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("expr,oracle", EXPRS)
def test_field_expr_matches_modular_arithmetic(p, expr, oracle):
    H = HS(p)
    if oracle is None:
        def oracle(a, b, c, p):
            return (a * a - H.r * a - H.s) % p
    grid = np.array(list(itertools.product(range(p), repeat=3)), dtype=np.int64)
    env = {"a": grid[:, 0], "b": grid[:, 1], "c": grid[:, 2]}
    vals, bad = FieldExpr(H)(expr, env, len(grid))
    want = [oracle(a, b, c, p) for a, b, c in grid.tolist()]
    assert vals.tolist() == want
    assert not bad.any()


@given(st.integers(0, 4), st.integers(0, 4))
def test_field_expr_division_flags_zero(a, b):
    H = HS(5)
    env = {"a": np.array([a]), "b": np.array([b])}
    vals, bad = FieldExpr(H)("a / b", env, 1)
    assert bool(bad[0]) == (b == 0)
    if b:
        assert (int(vals[0]) * b) % 5 == a


def test_field_expr_rejects_unsupported_syntax():
    H = HS(3)
    with pytest.raises(ValueError):
        FieldExpr(H)("a ** b", {"a": np.array([1]), "b": np.array([1])}, 1)
    with pytest.raises(ValueError):
        FieldExpr(H)("a % 2", {"a": np.array([1])}, 1)


# -- single cases ----------------------------------------------------------

VALID_PARAMS = {
    "nbf-nbf-intersecting": {"mu": 1, "psi": 2, "gamma": 1, "delta": 1},
    "nbf-nbf-parallel-i": {"k1": 1, "k2": 0, "gamma": 1, "delta": 2},
    "nbf-nbf-parallel-ii": {"kappa": (1, 0), "gamma": 1, "delta": 2},
    "bf-nbf-gamma-zero": {"gamma": 0, "delta": 2},
    "bf-nbf-gamma-nonzero": {"gamma": 1, "delta": 3},
}


@pytest.mark.parametrize("tag", CASE_TAGS)
def test_valid_assignment_is_pappus(tag):
    H = HS(5)
    case, res = first_valid(H, tag, VALID_PARAMS[tag])
    assert case is not None
    s, report, out = res
    assert report.ok
    assert out.is_pappus and out.is_ninety_three
    line = _plane_for(H).line(out.pappus_line)
    if CASES[tag].pappus_line == "infinity":
        assert line == LineAtInfinity()
    elif CASES[tag].pappus_line == "type2":
        # slanted with a slope outside the base field
        assert isinstance(line, Slanted) and line.m // H.q != 0


def test_intersecting_a1b2_slope_first_component():
    H = HS(5)
    tag = "nbf-nbf-intersecting"
    mu = 1
    hits = 0
    for params in ({"mu": mu, "psi": 2, "gamma": 1, "delta": 1}, {"mu": mu, "psi": 3, "gamma": 2, "delta": 0}):
        spec = CASES[tag]
        for vals in itertools.product(range(5), repeat=len(spec.unknowns)):
            unk = dict(zip(spec.unknowns, vals))
            try:
                s, _, _ = evaluate_case(H, ConstructionCase(tag, params, unk))
            except ConstraintViolated:
                continue
            plane = _plane_for(H)
            line = plane.line(plane.join_ids(s.A1, s.B2))
            v = unk["v"]
            assert line.m % 5 == (params["mu"] * pow(1 - v, -1, 5)) % 5
            hits += 1
    assert hits > 0


def test_v_equal_one_is_rejected():
    H = HS(5)
    case = ConstructionCase(
        "nbf-nbf-intersecting", VALID_PARAMS["nbf-nbf-intersecting"], {"e": 2, "j": 3, "h": 2, "v": 1, "w": 1}
    )
    with pytest.raises(ConstraintViolated) as err:
        evaluate_case(H, case)
    assert "v != 1" in [c.label for c in err.value.report.failed()]


def test_input_errors():
    H = HS(5)
    tag = "nbf-nbf-intersecting"
    with pytest.raises(ValueError, match="must be given"):
        evaluate_case(H, ConstructionCase(tag, VALID_PARAMS[tag], {"e": 1}))
    with pytest.raises(ValueError, match="fixed"):
        evaluate_case(H, ConstructionCase(tag, VALID_PARAMS[tag], {"e": 1, "j": 1, "h": 1, "v": 2, "w": 1, "z": 3}))
    with pytest.raises(ValueError, match="domain"):
        evaluate_case(H, ConstructionCase(tag, {"mu": 1, "psi": 0, "gamma": 1, "delta": 1},
                                          {"e": 1, "j": 1, "h": 1, "v": 2, "w": 1}))
    with pytest.raises(ValueError, match="marked point"):
        evaluate_case(H, ConstructionCase(tag, {**VALID_PARAMS[tag], "alpha": 1},
                                          {"e": 1, "j": 1, "h": 1, "v": 2, "w": 1}))


# -- sweeps ----------------------------------------------------------------


@pytest.mark.parametrize("tag", CASE_TAGS)
def test_sampled_sweep_q5(tag):
    s = sweep_case(HS(5), tag, sample=20000, seed=1)
    assert s["admissible"] > 0
    assert s["non_pappus"] == 0
    assert s["all_pappus"] and s["formulas_agree"] and s["pappus_line_as_claimed"]
    assert s["pappus"] == s["admissible"]


def test_bf_nbf_family_full_q7():
    res = sweep_family(HS(7), "bf-nbf")
    assert res["all_pappus"] and res["formulas_agree"]
    assert res["parameter_tuples"] == 47
    assert res["parameter_tuples_without_construction"] == 0


@pytest.mark.parametrize("family", ["nbf-nbf-parallel", "nbf-nbf-intersecting"])
def test_uncovered_parameters_still_complete_q5(family):
    res = sweep_family(HS(5), family)
    assert res["all_pappus"] and res["formulas_agree"]
    assert res["uncovered_completed_by_search"] == res["parameter_tuples_without_construction"]


def test_pinned_parameters_q7():
    H = HS(7)
    s = sweep_case(H, "nbf-nbf-intersecting", params=[(1, 2, 1, 1), (3, 4, 0, 5)])
    assert s["pinned_parameters"]
    assert s["parameter_tuples"] == 2
    assert s["all_pappus"] and s["formulas_agree"]
