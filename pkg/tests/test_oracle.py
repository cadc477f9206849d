import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plausibility.agreement import build_cone, check_archimedean, find_agreeing, verify_agreement
from plausibility.errors import (
    InvalidInput,
    NotArchimedean,
    NotTotal,
    ScopeTooLarge,
    SeparationFailed,
    TooManyGenerators,
)
from plausibility.exactlp import OutcomeVector, cone_membership
from plausibility.fixtures import random_partial_order, random_space_with_measure
from plausibility.oracle import (
    OracleConfig,
    averaged_agreeing_measure,
    brute_archimedean,
    brute_cone_membership,
    fm_feasible_point,
    fme_cone_membership,
)
from plausibility.order import Comparison, Measure, build_order, order_from_measure
from plausibility.testspace import make_classical

e = OutcomeVector.indicator


def test_config_bounds():
    with pytest.raises(InvalidInput):
        OracleConfig(max_coefficient=0)
    with pytest.raises(InvalidInput):
        OracleConfig(max_events=-1)


def test_brute_cone_kps():
    gens = [e(["4"]) - e(["1", "3"]), e(["2", "3"]) - e(["1", "4"]), e(["1", "5"]) - e(["3", "4"])]
    assert brute_cone_membership(gens, e(["2", "5"]) - e(["1", "3", "4"]), 2) == (1, 1, 1)


def test_brute_cone_zero_and_miss():
    assert brute_cone_membership([e(["x"]), e(["y"])], OutcomeVector(), 3) == (0, 0)
    assert brute_cone_membership([e(["x"])], e(["y"]), 5) is None
    res = cone_membership([e(["x"])], e(["y"]))
    assert res.kind == "SEPARATOR"


def test_brute_cone_clears_denominators():
    assert brute_cone_membership([e(["x"])], e(["x"]) * Fraction(1, 3), 1) == (1,)


def test_brute_cone_generator_limit():
    with pytest.raises(TooManyGenerators):
        brute_cone_membership([e(["x"])] * 11, e(["x"]), 1)


def test_fm_feasible_point():
    point = fm_feasible_point([([1, 1], 2), ([-1, 0], -1), ([0, -1], -1)], 2)
    assert point == [1, 1]
    assert fm_feasible_point([([1], 1), ([-1], 0)], 1) is None


def test_fme_separator_is_valid():
    member, rho = fme_cone_membership([e(["x"])], e(["x", "y"]))
    assert not member
    assert rho["x"] >= 0 and rho["x"] + rho["y"] < 0


def test_brute_archimedean_triangle(tri_order):
    found = brute_archimedean(tri_order, 3)
    target = Counter([(("y", "z"), ("x", "y")), (("x", "z"), ("x", "z")), (("x",), ("z",))])
    assert any(Counter(zip(f.first, f.second)) == target and f.conclusion == (("x",), ("z",)) for f in found)


def test_brute_archimedean_kps(kps):
    with pytest.raises(ScopeTooLarge):
        brute_archimedean(kps, 4)
    found = brute_archimedean(kps, 4, OracleConfig(max_events=14))
    first = Counter([("1", "3"), ("1", "4"), ("3", "4"), ("2", "5")])
    second = Counter([("4",), ("2", "3"), ("1", "5"), ("1", "3", "4")])
    assert any(Counter(f.first) == first and Counter(f.second) == second
               and f.conclusion == (("2", "5"), ("1", "3", "4")) for f in found)


def test_brute_archimedean_uniform_classical():
    ts = make_classical(["1", "2"])
    order = order_from_measure(Measure.of(ts, {"1": "1/2", "2": "1/2"}))
    assert brute_archimedean(order, 4) == []


def test_averaged_measure_classical():
    ts = make_classical(["1", "2"])
    order = build_order(ts, [Comparison.of(["1"], ["2"], "strict")], "full")
    mu = averaged_agreeing_measure(order)
    assert mu.weights["1"] < mu.weights["2"]
    assert verify_agreement(order, mu, "AGREE").mode == "AGREES"


def test_averaged_measure_triangle_fails(tri_order):
    with pytest.raises(SeparationFailed) as info:
        averaged_agreeing_measure(tri_order)
    a, b = info.value.pair
    assert tri_order.leq(a, b) and not tri_order.leq(b, a)
    cone = build_cone(tri_order)
    assert cone_membership(cone.vectors(cone.basis), e(a) - e(b), list(tri_order.space.outcomes)).member


def test_averaged_measure_degenerate():
    order = build_order(make_classical(["1"]), [])
    assert averaged_agreeing_measure(order).weights == {"1": 1}


def test_averaged_measure_needs_total_order():
    with pytest.raises(NotTotal):
        averaged_agreeing_measure(build_order(make_classical(["1", "2"]), [], "full"))


@given(st.integers(0, 10_000))
def test_engine_matches_oracles_on_small_orders(seed):
    rng = random.Random(seed)
    ts, mu = random_space_with_measure(rng, max_outcomes=3, max_tests=3)
    order = order_from_measure(mu) if seed % 3 == 0 else random_partial_order(rng, ts, mu=mu if seed % 2 else None)
    if order is None or len(order.scope) > 7:
        return
    report = check_archimedean(order)
    brute = brute_archimedean(order, 4)
    if brute:
        assert report.status == "VIOLATED"
    try:
        found = find_agreeing(order)
    except (NotTotal, NotArchimedean):
        found = None
    try:
        averaged = averaged_agreeing_measure(order)
    except (NotTotal, SeparationFailed):
        averaged = None
    assert (found is None) == (averaged is None)
    if averaged is not None:
        assert verify_agreement(order, averaged, "AGREE").mode == "AGREES"
