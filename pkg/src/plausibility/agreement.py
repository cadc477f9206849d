"""Archimedean decision and (almost-)agreeing probability measures.

The order is translated into a convex cone in the rational vector space
spanned by the outcomes: one generator ``e_B - e_A`` for every weak pair
``A <= B`` ("higher minus lower", so any measure that almost agrees is
non-negative on every generator). Then

* ``e_A - e_B`` lies in the cone for some pair with ``B </= A`` exactly when
  the order fails the Archimedean condition; the cone coefficients expand
  into the two violating event families;
* a functional that is non-negative on the cone and normalized on a test is
  an almost-agreeing measure; one that is additionally bounded away from
  zero on every strict pair is an agreeing measure.

LPs only see a generating subset of the cone (:attr:`ConeSystem.basis`):
one cycle through each equivalence class plus one edge per covering pair
of classes. Every other weak pair is a non-negative sum of those, so the
cone is unchanged; coefficients are always reported against the full
generator list.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    Infeasible,
    InvalidInput,
    NotACertificate,
    NotArchimedean,
    NotTotal,
    ScopeTooLarge,
)
from .exactlp import (
    ZERO,
    LPProblem,
    OutcomeVector,
    cone_membership,
    format_rational,
    lp_solve,
)
from .order import Measure, PlausibilityOrder, first_incomparable

DEFAULT_PAIR_CAP = 10**6
SCAN_BATCH = 8

CONVENTION = {
    "generator": "e_upper - e_lower for every weak pair lower <= upper",
    "scan": "pairs (A, B) with B </= A: strictly-below and incomparable pairs both count",
    "families": "first[i] <= second[i] for premises; last copies are the failed conclusion A >= B",
}


@dataclass(frozen=True, eq=False)
class ConeSystem:
    order: PlausibilityOrder
    generators: tuple  # (vector, (lower_event, upper_event))
    unit: OutcomeVector
    unit_test: tuple
    basis: tuple  # generator indices spanning the cone
    covers: tuple  # generator indices of covering pairs between classes
    pair_index: dict = field(repr=False)

    @property
    def space(self):
        return self.order.space

    @property
    def scope(self):
        return self.order.scope

    def vectors(self, indices) -> list:
        return [self.generators[i][0] for i in indices]


def build_cone(order: PlausibilityOrder, pair_cap: int = DEFAULT_PAIR_CAP) -> ConeSystem:
    weak = order.weak
    n = len(order.scope)
    off = weak & ~np.eye(n, dtype=bool)
    count = int(off.sum())
    if count > pair_cap:
        raise ScopeTooLarge(f"{count} weak pairs exceed the pair cap {pair_cap}")
    events = order.scope
    indicators = [OutcomeVector.indicator(e) for e in events]
    gens = []
    pair_index = {}
    for i, j in np.argwhere(off):
        i, j = int(i), int(j)
        pair_index[(i, j)] = len(gens)
        gens.append((indicators[j] - indicators[i], (events[i], events[j])))

    # equivalence classes, each represented by its first member in scope order
    equiv = weak & weak.T
    rep = [int(np.argmax(equiv[i])) for i in range(n)]
    members: dict = {}
    for i, r in enumerate(rep):
        members.setdefault(r, []).append(i)
    cycle_edges = []
    for ms in members.values():
        if len(ms) > 1:
            cycle_edges += [(ms[k], ms[(k + 1) % len(ms)]) for k in range(len(ms))]
    reps = sorted(members)
    sub = weak[np.ix_(reps, reps)]
    lt = sub & ~sub.T
    ltf = lt.astype(np.float32)
    covers_mat = lt & ~((ltf @ ltf) > 0)
    cover_edges = [(reps[a], reps[b]) for a, b in np.argwhere(covers_mat)]
    covers = tuple(sorted(pair_index[e] for e in cover_edges))

    seen = set()
    basis = []
    for gi in sorted(pair_index[e] for e in cycle_edges + cover_edges):
        vec = gens[gi][0]
        if vec not in seen:
            seen.add(vec)
            basis.append(gi)

    unit_test = order.space.tests[0]
    return ConeSystem(order, tuple(gens), OutcomeVector.indicator(unit_test), unit_test,
                      tuple(basis), covers, pair_index)


def _index(cone: ConeSystem) -> list:
    return list(cone.space.outcomes)


def _decomposition(cone: ConeSystem, lam) -> dict:
    return {cone.basis[k]: v for k, v in enumerate(lam) if v}


def _in_cone(cone: ConeSystem, v: OutcomeVector):
    return cone_membership(cone.vectors(cone.basis), v, _index(cone))


def verify_order_unit(cone: ConeSystem):
    """``(True, separator)`` if ``-e_T`` is outside the cone, else ``(False, decomposition)``.

    Lower-boundedness of every vector by a multiple of ``e_T`` holds by
    construction (singletons are above the empty event, every outcome lies in
    a test, all tests are equivalent) and is not recomputed.
    """
    res = _in_cone(cone, -cone.unit)
    if res.member:
        return False, _decomposition(cone, res.coefficients)
    return True, res.separator


# --- witnesses ------------------------------------------------------------


@dataclass(frozen=True)
class Families:
    """Two event families with equal outcome multisets.

    The first ``premises`` positions satisfy ``first[i] <= second[i]``; the
    remaining ``copies`` positions repeat the conclusion pair ``(A, B)``.
    """

    first: tuple
    second: tuple
    premises: int
    copies: int

    def to_doc(self) -> dict:
        return {
            "first": [list(e) for e in self.first],
            "second": [list(e) for e in self.second],
            "premises": self.premises,
            "copies": self.copies,
        }


def _outcome_counts(events) -> dict:
    counts: dict = {}
    for e in events:
        for x in e:
            counts[x] = counts.get(x, 0) + 1
    return counts


def witness_families(terms: Sequence, pair) -> Families:
    """Expand a cone certificate into violating families.

    ``terms`` are ``(lower, upper, coefficient)`` triples asserting
    ``e_A - e_B = sum coefficient * (e_upper - e_lower)`` for ``pair = (A, B)``.
    Coefficients are scaled by the lcm ``N`` of their denominators; each
    premise pair is repeated ``N * coefficient`` times and ``N`` copies of the
    conclusion are appended.
    """
    a, b = (tuple(e) for e in pair)
    total: dict = {}
    for lower, upper, lam in terms:
        lam = Fraction(lam)
        if lam <= 0:
            raise NotACertificate("coefficients must be positive")
        for x in upper:
            total[x] = total.get(x, ZERO) + lam
        for x in lower:
            total[x] = total.get(x, ZERO) - lam
    target = OutcomeVector.indicator(a) - OutcomeVector.indicator(b)
    if OutcomeVector(total) != target:
        raise NotACertificate("coefficients do not reproduce e_A - e_B")
    n_copies = 1
    for _, _, lam in terms:
        n_copies = math.lcm(n_copies, Fraction(lam).denominator)
    first, second = [], []
    for lower, upper, lam in terms:
        r = int(Fraction(lam) * n_copies)
        first += [tuple(lower)] * r
        second += [tuple(upper)] * r
    premises = len(first)
    first += [a] * n_copies
    second += [b] * n_copies
    return Families(tuple(first), tuple(second), premises, n_copies)


def verify_families(order: PlausibilityOrder, fam: Families) -> bool:
    """Independent check of the family invariants against ``order``."""
    if len(fam.first) != len(fam.second) or fam.premises + fam.copies != len(fam.first) or fam.copies < 1:
        return False
    if _outcome_counts(fam.first) != _outcome_counts(fam.second):
        return False
    for lo, hi in zip(fam.first[: fam.premises], fam.second[: fam.premises]):
        if not order.leq(lo, hi):
            return False
    conclusions = set(zip(fam.first[fam.premises:], fam.second[fam.premises:]))
    if len(conclusions) != 1:
        return False
    (a, b), = conclusions
    return not order.leq(b, a)


# --- Archimedean scan -----------------------------------------------------


@dataclass(frozen=True)
class Violation:
    pair: tuple
    terms: tuple  # (lower, upper, coefficient, generator index)
    families: Families

    def to_doc(self) -> dict:
        return {
            "pair": [list(self.pair[0]), list(self.pair[1])],
            "coefficients": [
                {"generator": gi, "lower": list(lo), "upper": list(hi), "lambda": format_rational(lam)}
                for lo, hi, lam, gi in self.terms
            ],
            "families": self.families.to_doc(),
        }


@dataclass(frozen=True)
class ArchimedeanReport:
    status: str  # ARCHIMEDEAN | VIOLATED
    violations: tuple
    separators: tuple  # functionals that jointly clear every non-violating pair
    candidates: int

    @property
    def archimedean(self) -> bool:
        return self.status == "ARCHIMEDEAN"

    def to_doc(self) -> dict:
        return {
            "kind": "archimedean",
            "status": self.status,
            "candidates": self.candidates,
            "violations": [v.to_doc() for v in self.violations],
            "separators": [s.to_doc() for s in self.separators],
            "convention": CONVENTION,
        }


def _candidate_pairs(order: PlausibilityOrder) -> np.ndarray:
    n = len(order.scope)
    cand = ~order.weak.T & ~np.eye(n, dtype=bool)
    return np.argwhere(cand)


def _max_margin(cone: ConeSystem):
    """Largest t <= 1 with rho >= 0 on the cone, rho(e_T) = 1, rho >= t on covers.

    Solved through its dual, which has one row per outcome plus one; the
    functional rho is read off that LP's dual solution. Returns ``(t, rho)``
    or ``(None, None)`` when -e_T is itself in the cone.
    """
    idx = _index(cone)
    basis = cone.vectors(cone.basis)
    covers = cone.vectors(cone.covers)
    ncols = len(basis) + len(covers) + 2
    rows = []
    for x in idx:
        coeffs = [g[x] for g in basis] + [s[x] for s in covers] + [ZERO, -cone.unit[x]]
        rows.append((coeffs, "=", ZERO))
    rows.append(([ZERO] * len(basis) + [Fraction(1)] * len(covers) + [Fraction(1), ZERO], "=", Fraction(1)))
    objective = [ZERO] * (ncols - 2) + [Fraction(-1), Fraction(-1)]
    nonneg = [True] * (ncols - 1) + [False]
    res = lp_solve(LPProblem(objective, rows, "max", nonneg))
    if res.status != "OPTIMAL":
        return None, None
    rho = OutcomeVector(zip(idx, res.dual[:-1]))
    t = -res.dual[-1]
    if rho.dot(cone.unit) != 1 or any(rho.dot(g) < 0 for g in basis) or any(rho.dot(s) < t for s in covers):
        raise AssertionError("max-margin dual failed its own check")
    return t, rho


def check_archimedean(order: PlausibilityOrder, pair_cap: int = DEFAULT_PAIR_CAP,
                      threads: int = 1) -> ArchimedeanReport:
    """Scan every pair (A, B) with B </= A for membership of e_A - e_B in the cone.

    Pairs already cleared by a previously found separating functional are
    skipped. Work proceeds in fixed-size batches, so the report does not
    depend on ``threads``.
    """
    cands = _candidate_pairs(order)
    if len(cands) > pair_cap:
        raise ScopeTooLarge(f"{len(cands)} candidate pairs exceed the pair cap {pair_cap}")
    cone = build_cone(order, pair_cap)
    events = order.scope
    ind = [OutcomeVector.indicator(e) for e in events]
    diffs = [ind[i] - ind[j] for i, j in cands]

    pool = []
    t, rho = _max_margin(cone)
    if t is not None and t > 0:
        pool.append(rho)

    def cleared(k):
        return any(r.dot(diffs[k]) < 0 for r in pool)

    def solve(k):
        return _in_cone(cone, diffs[k])

    violations = []
    pending = [k for k in range(len(cands)) if not cleared(k)]
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while pending:
            batch, rest = pending[:SCAN_BATCH], pending[SCAN_BATCH:]
            results = list(executor.map(solve, batch)) if executor else [solve(k) for k in batch]
            for k, res in zip(batch, results):
                i, j = (int(v) for v in cands[k])
                if res.member:
                    dec = _decomposition(cone, res.coefficients)
                    terms = tuple((cone.generators[g][1][0], cone.generators[g][1][1], lam, g)
                                  for g, lam in sorted(dec.items()))
                    fam = witness_families([term[:3] for term in terms], (events[i], events[j]))
                    violations.append((k, Violation((events[i], events[j]), terms, fam)))
                else:
                    pool.append(res.separator)
            pending = [k for k in rest if not cleared(k)]
    finally:
        if executor:
            executor.shutdown()
    violations.sort(key=lambda kv: kv[0])
    status = "VIOLATED" if violations else "ARCHIMEDEAN"
    return ArchimedeanReport(status, tuple(v for _, v in violations),
                             tuple(pool) if not violations else (), len(cands))


def verify_archimedean_report(order: PlausibilityOrder, report: ArchimedeanReport) -> bool:
    """Re-check a report without the solver: families for violations,
    separators (non-negative on every weak pair, negative on every candidate)
    for an Archimedean verdict."""
    ind = {e: OutcomeVector.indicator(e) for e in order.scope}
    if report.status == "VIOLATED":
        if not report.violations:
            return False
        for v in report.violations:
            try:
                fam = witness_families([term[:3] for term in v.terms], v.pair)
            except NotACertificate:
                return False
            if fam != v.families or not verify_families(order, v.families):
                return False
        return True
    if report.status != "ARCHIMEDEAN" or report.violations:
        return False
    n = len(order.scope)
    for rho in report.separators:
        vals = [rho.dot(ind[e]) for e in order.scope]
        for i in range(n):
            for j in range(n):
                if order.weak[i, j] and vals[j] < vals[i]:
                    return False
    vals = [[r.dot(ind[e]) for e in order.scope] for r in report.separators]
    for i, j in _candidate_pairs(order):
        if not any(v[i] < v[j] for v in vals):
            return False
    return True


# --- measures -------------------------------------------------------------


def _measure_from(order: PlausibilityOrder, rho: OutcomeVector, scale) -> Measure:
    return Measure.of(order.space, {x: rho[x] / scale for x in order.space.outcomes})


def find_almost_agreeing(order: PlausibilityOrder, pair_cap: int = DEFAULT_PAIR_CAP) -> Measure:
    """A measure with ``A <= B  =>  mu(A) <= mu(B)`` for every weak pair.

    Any functional separating ``-e_T`` from the cone works after rescaling so
    that ``rho(e_T) = 1``. Raises :class:`Infeasible` carrying the
    decomposition of ``-e_T`` otherwise.
    """
    cone = build_cone(order, pair_cap)
    ok, cert = verify_order_unit(cone)
    if not ok:
        terms = tuple((cone.generators[g][1][0], cone.generators[g][1][1], lam, g) for g, lam in sorted(cert.items()))
        raise Infeasible("-e_T lies in the cone: no almost-agreeing measure", certificate=terms)
    return _measure_from(order, cert, cert.dot(cone.unit))


def find_agreeing(order: PlausibilityOrder, pair_cap: int = DEFAULT_PAIR_CAP) -> Measure:
    """An agreeing measure, via one max-margin LP.

    Raises :class:`NotTotal` for partial orders and :class:`NotArchimedean`
    (with the first violation of :func:`check_archimedean`) when the best
    margin is zero.
    """
    pair = first_incomparable(order)
    if pair is not None:
        raise NotTotal(pair)
    cone = build_cone(order, pair_cap)
    t, rho = _max_margin(cone)
    if t is None or t <= 0:
        report = check_archimedean(order, pair_cap)
        first = report.violations[0] if report.violations else None
        raise NotArchimedean("no measure separates every strict pair", margin=t, violation=first)
    return _measure_from(order, rho, 1)


@dataclass(frozen=True)
class AgreementReport:
    mode: str  # AGREES | ALMOST_AGREES | FAILS
    measure: Measure | None
    violated_pairs: tuple  # ((A, B), direction)
    checked: str = "AGREE"

    def to_doc(self) -> dict:
        return {
            "kind": "agreement",
            "mode": self.mode,
            "checked": self.checked,
            "measure": self.measure.to_doc() if self.measure is not None else None,
            "violated_pairs": [
                {"lhs": list(a), "rhs": list(b), "direction": d} for (a, b), d in self.violated_pairs
            ],
        }


def verify_agreement(order: PlausibilityOrder, mu: Measure, mode: str = "AGREE") -> AgreementReport:
    """Check every ordered scope pair.

    ALMOST: each weak pair must satisfy mu(A) <= mu(B) ("forward"). AGREE also
    needs mu(A) < mu(B) on strict pairs ("strict") and mu(A) <= mu(B) only for
    weak pairs ("converse").
    """
    mode = mode.upper()
    if mode not in ("AGREE", "ALMOST"):
        raise InvalidInput(f"mode must be AGREE or ALMOST, got {mode!r}")
    if mu.space != order.space:
        raise InvalidInput("measure lives on a different test space")
    mw, ms = kernels.measure_relation([mu(e) for e in order.scope])
    checks = [("forward", order.weak & ~mw)]
    if mode == "AGREE":
        checks += [("strict", order.strict & ~ms), ("converse", mw & ~order.weak)]
    bad = []
    for direction, mat in checks:
        for i, j in np.argwhere(mat):
            bad.append(((int(i), int(j)), direction))
    bad.sort()
    pairs = tuple(((order.scope[i], order.scope[j]), d) for (i, j), d in bad)
    if pairs:
        result = "FAILS"
    else:
        result = "AGREES" if mode == "AGREE" else "ALMOST_AGREES"
    return AgreementReport(result, mu, pairs, mode)
