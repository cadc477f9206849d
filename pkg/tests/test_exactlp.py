from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plausibility.errors import IndexMismatch, MalformedProblem
from plausibility.exactlp import (
    ConeResult,
    LPProblem,
    OutcomeVector,
    cone_membership,
    format_rational,
    lp_solve,
    parse_rational,
    verify_cone_result,
    verify_lp_result,
)
from plausibility.oracle import fm_feasible_point, fme_cone_membership

F = Fraction
e = OutcomeVector.indicator


def test_rational_text():
    assert format_rational(F(3, 7)) == "3/7"
    assert format_rational(F(-4, 2)) == "-2"
    assert parse_rational("6/4") == F(3, 2)
    assert parse_rational(5) == 5
    with pytest.raises(ValueError):
        parse_rational("0.5")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_outcome_vector_algebra():
    v = e(["x", "y"]) - e(["y"])
    assert v == e(["x"])
    assert v.support == ("x",)
    assert (v * 3)["x"] == 3
    assert not (v - v)
    assert hash(e(["a"]) + e(["b"])) == hash(e(["a", "b"]))
    assert v.to_doc() == {"x": "1"}


def test_bounded_max():
    p = LPProblem([1], [([1], "<=", F(3, 7))])
    r = lp_solve(p)
    assert r.status == "OPTIMAL" and r.x == [F(3, 7)] and r.objective == F(3, 7)
    assert verify_lp_result(p, r)


def test_infeasible_with_farkas():
    p = LPProblem([0], [([1], ">=", 1), ([1], "<=", 0)])
    r = lp_solve(p)
    assert r.status == "INFEASIBLE"
    assert verify_lp_result(p, r)
    y = r.farkas
    assert y[0] <= 0 <= y[1] and y[0] + y[1] >= 0 and y[0] * 1 + y[1] * 0 < 0


def test_unbounded_ray():
    p = LPProblem([1], [([1], ">=", 0)])
    r = lp_solve(p)
    assert r.status == "UNBOUNDED" and r.ray == [1]
    assert verify_lp_result(p, r)


def test_min_with_free_variable():
    p = LPProblem([1, 1], [([1, -1], "=", 2), ([1, 0], ">=", -3)], sense="min", nonneg=[False, True])
    r = lp_solve(p)
    assert r.status == "OPTIMAL" and r.objective == 2 and r.x == [2, 0]
    assert verify_lp_result(p, r)


def test_redundant_equalities():
    p = LPProblem([1, 2], [([1, 1], "=", 1), ([2, 2], "=", 2), ([1, 0], "<=", 1)])
    r = lp_solve(p)
    assert r.status == "OPTIMAL" and r.objective == 2
    assert verify_lp_result(p, r)


@pytest.mark.parametrize("bad", [
    LPProblem([1], [([1, 2], "<=", 1)]),
    LPProblem([1], [([1], "<", 1)]),
    LPProblem([0.5], [([1], "<=", 1)]),
    LPProblem([1], [([1], "<=", 1)], sense="maximize"),
    LPProblem([1], [([1], "<=", 1)], nonneg=[True, True]),
])
def test_malformed(bad):
    with pytest.raises(MalformedProblem):
        lp_solve(bad)


def test_tampered_certificates_rejected():
    p = LPProblem([1], [([1], "<=", F(3, 7))])
    r = lp_solve(p)
    r.objective = F(1, 2)
    assert not verify_lp_result(p, r)
    q = LPProblem([0], [([1], ">=", 1), ([1], "<=", 0)])
    s = lp_solve(q)
    s.farkas = [-x for x in s.farkas]
    assert not verify_lp_result(q, s)


def test_cone_zero_vector():
    res = cone_membership([e(["x"]), e(["y"])], OutcomeVector())
    assert res.member and all(c == 0 for c in res.coefficients)


def test_cone_separator():
    gens = [e(["x"])]
    v = e(["x", "y"])
    res = cone_membership(gens, v, index=["x", "y"])
    assert res.kind == "SEPARATOR"
    assert res.separator.dot(gens[0]) >= 0 and res.separator.dot(v) < 0
    assert verify_cone_result(gens, v, res)


def test_cone_kps_certificate():
    gens = [e(["4"]) - e(["1", "3"]), e(["2", "3"]) - e(["1", "4"]), e(["1", "5"]) - e(["3", "4"])]
    v = e(["2", "5"]) - e(["1", "3", "4"])
    res = cone_membership(gens, v)
    assert res.coefficients == (1, 1, 1)
    assert gens[0] + gens[1] + gens[2] == v
    assert verify_cone_result(gens, v, res)


def test_cone_index_mismatch():
    with pytest.raises(IndexMismatch):
        cone_membership([e(["x"])], e(["y"]), index=["x"])


def test_verify_cone_rejects_wrong_coefficients():
    gens = [e(["x"])]
    assert not verify_cone_result(gens, e(["x"]), ConeResult(coefficients=(F(2),)))
    assert not verify_cone_result(gens, e(["x"]), ConeResult(coefficients=(F(-1),)))


# --- properties against Fourier-Motzkin -----------------------------------

small = st.integers(-3, 3)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(small, min_size=n, max_size=n),
    st.lists(st.tuples(st.lists(small, min_size=n, max_size=n), st.sampled_from(["<=", ">=", "="]), small),
             min_size=1, max_size=4),
    st.sampled_from(["max", "min"]),
    st.lists(st.booleans(), min_size=n, max_size=n),
)))
def test_lp_matches_fourier_motzkin(data):
    c, rows, sense, nonneg = data
    p = LPProblem(c, rows, sense, nonneg)
    r = lp_solve(p)
    assert verify_lp_result(p, r)
    n = len(c)
    ineqs = []
    for coeffs, rel, rhs in rows:
        if rel in (">=", "="):
            ineqs.append((coeffs, rhs))
        if rel in ("<=", "="):
            ineqs.append(([-a for a in coeffs], -rhs))
    for j, flag in enumerate(nonneg):
        if flag:
            ineqs.append(([1 if k == j else 0 for k in range(n)], 0))
    feasible = fm_feasible_point(ineqs, n) is not None
    assert (r.status != "INFEASIBLE") == feasible
    if r.status == "OPTIMAL":
        sign = 1 if sense == "max" else -1
        better = ([sign * a for a in c], sign * r.objective + F(1, 1000))
        assert fm_feasible_point(ineqs + [better], n) is None


vectors = st.lists(st.integers(-2, 2), min_size=3, max_size=3)


@given(st.lists(vectors, min_size=0, max_size=6), vectors)
def test_cone_membership_matches_fme(gens, v):
    idx = ["a", "b", "c"]
    gv = [OutcomeVector(zip(idx, g)) for g in gens]
    vv = OutcomeVector(zip(idx, v))
    res = cone_membership(gv, vv, index=idx)
    assert verify_cone_result(gv, vv, res)
    member, _ = fme_cone_membership(gv, vv, idx)
    assert res.member == member
