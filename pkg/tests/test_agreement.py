import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from plausibility.agreement import (
    Families,
    build_cone,
    check_archimedean,
    find_agreeing,
    find_almost_agreeing,
    verify_agreement,
    verify_archimedean_report,
    verify_families,
    verify_order_unit,
    witness_families,
)
from plausibility.errors import Infeasible, NotACertificate, NotArchimedean, NotTotal, ScopeTooLarge
from plausibility.exactlp import OutcomeVector, cone_membership
from plausibility.fixtures import (
    classical_measure_order,
    measure_chain,
    random_partial_order,
    random_space_with_measure,
)
from plausibility.order import Comparison, Measure, PlausibilityOrder, build_order, order_from_measure
from plausibility.testspace import enumerate_events, make_classical, make_triangle

e = OutcomeVector.indicator
KPS_PAIR = (("2", "5"), ("1", "3", "4"))


def _multiset(events):
    return Counter(x for ev in events for x in ev)


# --- cone -----------------------------------------------------------------


def test_triangle_generators(tri_order):
    cone = build_cone(tri_order)
    vecs = {g for g, _ in cone.generators}
    assert e(["x"]) in vecs  # {x} above the empty event
    assert e(["x", "y"]) - e(["y"]) in vecs  # subset pair inside a test
    assert e(["x", "y"]) - e(["y", "z"]) in vecs and e(["y", "z"]) - e(["x", "y"]) in vecs


def test_classical_generators():
    cone = build_cone(build_order(make_classical(["1", "2"]), [], "full"))
    assert {g for g, _ in cone.generators if g} == {e(["1"]), e(["2"]), e(["1", "2"])}


def test_zero_in_every_cone(kps):
    cone = build_cone(kps)
    res = cone_membership(cone.vectors(cone.basis), OutcomeVector(), list(kps.space.outcomes))
    assert res.member and not any(res.coefficients)


def test_basis_spans_the_full_cone(kps):
    cone = build_cone(kps)
    basis = cone.vectors(cone.basis)
    for g, _ in cone.generators:
        assert cone_membership(basis, g, list(kps.space.outcomes)).member


def test_order_unit_kps(kps):
    ok, sep = verify_order_unit(build_cone(kps))
    assert ok
    assert sep.dot(-e(kps.space.tests[0])) < 0


def test_order_unit_fails_when_everything_is_equivalent():
    ts = make_classical(["1", "2"])
    events = tuple(enumerate_events(ts))
    n = len(events)
    ones = np.ones((n, n), dtype=bool)
    order = PlausibilityOrder(ts, events, ones, np.zeros_like(ones), (), "full")
    ok, decomposition = verify_order_unit(build_cone(order))
    assert not ok
    cone = build_cone(order)
    total = sum((cone.generators[g][0] * lam for g, lam in decomposition.items()), OutcomeVector())
    assert total == -e(["1", "2"])


def test_order_unit_triangle_fails_with_certificate(tri_order):
    # {y,z} <= {y} forces mu(z) = 0 and {x} <= {} forces mu(x) = 0, so no
    # measure almost agrees and -e_T lies in the cone.
    cone = build_cone(tri_order)
    ok, decomposition = verify_order_unit(cone)
    assert not ok
    total = sum((cone.generators[g][0] * lam for g, lam in decomposition.items()), OutcomeVector())
    assert total == -cone.unit
    assert all(lam > 0 for lam in decomposition.values())


# --- Archimedean check ----------------------------------------------------


def test_triangle_violated(tri_order):
    report = check_archimedean(tri_order)
    assert report.status == "VIOLATED"
    assert verify_archimedean_report(tri_order, report)
    for v in report.violations:
        assert verify_families(tri_order, v.families)
        assert _multiset(v.families.first) == _multiset(v.families.second)


def test_kps_violation_and_families(kps):
    report = check_archimedean(kps)
    assert report.status == "VIOLATED"
    v = next(v for v in report.violations if v.pair == KPS_PAIR)
    lams = {(lo, hi): lam for lo, hi, lam, _ in v.terms}
    assert lams == {(("1", "3"), ("4",)): 1, (("1", "4"), ("2", "3")): 1, (("3", "4"), ("1", "5")): 1}
    fam = v.families
    assert fam.copies == 1 and fam.premises == 3
    assert Counter(fam.first) == Counter([("1", "3"), ("1", "4"), ("3", "4"), ("2", "5")])
    assert Counter(fam.second) == Counter([("4",), ("2", "3"), ("1", "5"), ("1", "3", "4")])
    assert verify_archimedean_report(kps, report)


def test_measure_orders_are_archimedean():
    order = classical_measure_order(["1", "2", "3"], [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)])
    report = check_archimedean(order)
    assert report.archimedean and report.separators
    assert verify_archimedean_report(order, report)


def test_report_verifier_rejects_tampering(kps):
    report = check_archimedean(kps)
    v = report.violations[0]
    bad = Families(v.families.first, v.families.second[:-1] + (("3",),), v.families.premises, v.families.copies)
    tampered = type(report)(report.status, (type(v)(v.pair, v.terms, bad),), (), report.candidates)
    assert not verify_archimedean_report(kps, tampered)
    fake = type(report)("ARCHIMEDEAN", (), (), report.candidates)
    assert not verify_archimedean_report(kps, fake)


def test_threads_do_not_change_report(kps, tri_order):
    for order in (kps, tri_order):
        a = check_archimedean(order, threads=1).to_doc()
        b = check_archimedean(order, threads=4).to_doc()
        assert a == b


def test_pair_cap(kps):
    with pytest.raises(ScopeTooLarge):
        check_archimedean(kps, pair_cap=3)


# --- witnesses ------------------------------------------------------------


def test_witness_fractional_coefficients():
    terms = [((), ("1",), Fraction(1, 2)), ((), ("1",), Fraction(1, 3)), ((), ("1",), Fraction(1, 6))]
    fam = witness_families(terms, (("1",), ()))
    assert fam.copies == 6
    assert Counter(zip(fam.first, fam.second)) == Counter({((), ("1",)): 6, (("1",), ()): 6})
    assert fam.premises == 6


def test_witness_degenerate_unit_pair():
    fam = witness_families([((), ("1", "2"), 1)], (("1", "2"), ()))
    assert fam.first == ((), ("1", "2")) and fam.second == (("1", "2"), ())
    assert _multiset(fam.first) == _multiset(fam.second)


def test_witness_rejects_bad_certificates():
    with pytest.raises(NotACertificate):
        witness_families([((), ("1",), 1)], (("2",), ()))
    with pytest.raises(NotACertificate):
        witness_families([((), ("1",), -1)], ((), ("1",)))


# --- measures -------------------------------------------------------------


def test_triangle_has_no_almost_agreeing_measure(tri_order):
    with pytest.raises(Infeasible) as info:
        find_almost_agreeing(tri_order)
    cert = info.value.certificate
    total = sum(((e(hi) - e(lo)) * lam for lo, hi, lam, _ in cert), OutcomeVector())
    assert total == -e(("x", "y"))
    uniform = Measure.of(make_triangle(), {x: Fraction(1, 2) for x in "xyz"})
    report = verify_agreement(tri_order, uniform, "ALMOST")
    assert report.mode == "FAILS"
    assert ((("x", "y"), ("y",)), "forward") in report.violated_pairs


def test_triangle_agree_mode_reports_strict_pair(tri_order):
    uniform = Measure.of(make_triangle(), {x: Fraction(1, 2) for x in "xyz"})
    report = verify_agreement(tri_order, uniform, "AGREE")
    assert report.mode == "FAILS"
    assert ((("x",), ("y",)), "strict") in report.violated_pairs


def test_triangle_not_archimedean(tri_order):
    with pytest.raises(NotArchimedean) as info:
        find_agreeing(tri_order)
    assert info.value.violation is not None
    assert verify_families(tri_order, info.value.violation.families)


def _kps_total_order():
    # Additive values that satisfy three KPS comparisons, with {2,5} moved just
    # below {1,3,4}: a consistent total order on the active scope.
    ts = make_classical(["1", "2", "3", "4", "5"])
    weights = {"1": 2, "2": 6, "3": 3, "4": 6, "5": 8}
    scope = [(), *[(x,) for x in ts.outcomes], ts.tests[0], ("1", "3"), ("4",), ("1", "4"), ("2", "3"),
             ("3", "4"), ("1", "5"), ("2", "5"), ("1", "3", "4")]
    scope = list(dict.fromkeys(scope))

    def value(ev):
        return Fraction(21, 2) if ev == ("2", "5") else sum(weights[x] for x in ev)

    ranked = sorted(scope, key=value)
    comps = [Comparison.of(a, b, "equiv" if value(a) == value(b) else "strict") for a, b in zip(ranked, ranked[1:])]
    return build_order(ts, comps, scope)


def test_kps_total_order_not_archimedean():
    order = _kps_total_order()
    assert order.lt(("1", "3"), ("4",)) and order.lt(("2", "5"), ("1", "3", "4"))
    with pytest.raises(NotArchimedean) as info:
        find_agreeing(order)
    assert info.value.violation is not None
    report = check_archimedean(order)
    assert any(v.pair == KPS_PAIR for v in report.violations)


def test_kps_partial_order_is_not_total(kps):
    with pytest.raises(NotTotal):
        find_agreeing(kps)


def test_classical_measure_agrees():
    mu0 = [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)]
    order = classical_measure_order(["1", "2", "3"], mu0)
    mu = find_agreeing(order)
    assert verify_agreement(order, mu, "AGREE").mode == "AGREES"
    induced = order_from_measure(mu)
    assert np.array_equal(induced.weak, order.weak) and len(order.scope) == 8
    almost = find_almost_agreeing(order)
    assert verify_agreement(order, almost, "ALMOST").mode == "ALMOST_AGREES"


def test_single_outcome():
    order = build_order(make_classical(["1"]), [])
    assert find_almost_agreeing(order).weights == {"1": 1}


def test_measure_chain_reproduces_measure():
    rng = random.Random(3)
    for _ in range(20):
        ts, mu = random_space_with_measure(rng)
        events = enumerate_events(ts)
        order = build_order(ts, measure_chain(mu, events), "full")
        direct = order_from_measure(mu)
        assert np.array_equal(order.weak, direct.weak)
        assert verify_agreement(order, mu, "AGREE").mode == "AGREES"


def test_random_measure_self_agreement():
    rng = random.Random(11)
    for _ in range(25):
        ts, mu = random_space_with_measure(rng)
        assert verify_agreement(order_from_measure(mu), mu, "AGREE").mode == "AGREES"


def test_archimedean_partial_orders_almost_agree():
    rng = random.Random(5)
    seen = 0
    for _ in range(80):
        ts, mu = random_space_with_measure(rng, max_outcomes=4)
        order = random_partial_order(rng, ts)
        if order is None:
            continue
        report = check_archimedean(order)
        assert verify_archimedean_report(order, report)
        if report.archimedean:
            seen += 1
            found = find_almost_agreeing(order)
            assert verify_agreement(order, found, "ALMOST").mode == "ALMOST_AGREES"
    assert seen > 10
