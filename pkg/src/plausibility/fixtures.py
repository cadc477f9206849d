"""Named fixtures and seeded random instances.

The named fixtures are the standard small examples (the triangle order with
one impossible outcome, the five-outcome Kraft-Pratt-Seidenberg order, and
measure-induced classical orders). The random generators build test spaces
together with a measure on them, so every random space is known to carry at
least one probability measure.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .errors import InconsistentOrder
from .order import Comparison, Measure, PlausibilityOrder, build_order
from .testspace import TestSpace, enumerate_events, event_key, make_classical, make_triangle, validate_test_space

KPS_COMPARISONS = (
    (("1", "3"), ("4",)),
    (("1", "4"), ("2", "3")),
    (("3", "4"), ("1", "5")),
    (("2", "5"), ("1", "3", "4")),
)


def triangle_comparisons() -> list:
    """x is as plausible as the empty event; y and z as plausible as a test."""
    return [
        Comparison.of(["x"], [], "equiv"),
        Comparison.of(["y"], ["x", "y"], "equiv"),
        Comparison.of(["z"], ["x", "y"], "equiv"),
    ]


def triangle_order() -> PlausibilityOrder:
    return build_order(make_triangle(), triangle_comparisons(), "full")


def kps_comparisons() -> list:
    return [Comparison.of(lo, hi, "strict") for lo, hi in KPS_COMPARISONS]


def kps_order() -> PlausibilityOrder:
    return build_order(make_classical(["1", "2", "3", "4", "5"]), kps_comparisons(), "active")


def measure_chain(mu: Measure, events: Sequence) -> list:
    """Comparisons between consecutive events sorted by measure.

    Closing the chain reproduces the measure's order on ``events`` exactly.
    """
    ranked = sorted(events, key=lambda e: (mu(e), event_key(e)))
    out = []
    for lo, hi in zip(ranked, ranked[1:]):
        rel = "equiv" if mu(lo) == mu(hi) else "strict"
        out.append(Comparison.of(lo, hi, rel))
    return out


def classical_measure_order(labels: Sequence[str], weights: Sequence) -> PlausibilityOrder:
    ts = make_classical(labels)
    mu = Measure.of(ts, dict(zip(ts.outcomes, weights)))
    return build_order(ts, measure_chain(mu, enumerate_events(ts)), "full")


# --- random instances -----------------------------------------------------


def random_space_with_measure(rng: random.Random, max_outcomes: int = 6, max_tests: int = 4):
    """A random test space and an exact measure on it.

    Outcome weights are multiples of ``1/D``. Each new test reuses a random
    set of existing outcomes whose weight fits, then adds fresh outcomes for
    the remainder; zero-weight outcomes occur on purpose.
    """
    while True:
        den = rng.randint(1, 6)
        weights: dict = {}
        tests = []
        ok = True
        for _ in range(rng.randint(1, max_tests)):
            pool = list(weights)
            rng.shuffle(pool)
            members, total = [], 0
            for x in pool:
                if rng.random() < 0.5 and total + weights[x] <= den:
                    members.append(x)
                    total += weights[x]
            rest = den - total
            room = max_outcomes - len(weights)
            if rest and not room:
                ok = False
                break
            fresh = rng.randint(1, min(2, room)) if rest else rng.randint(0, min(1, room))
            cuts = sorted(rng.randint(0, rest) for _ in range(fresh - 1))
            parts = [b - a for a, b in zip([0] + cuts, cuts + [rest])] if fresh else []
            for part in parts:
                label = str(len(weights) + 1)
                weights[label] = part
                members.append(label)
            if not members:
                ok = False
                break
            tests.append(members)
        if not ok or not tests:
            continue
        ts = validate_test_space(list(weights), tests)
        mu = Measure.of(ts, {x: Fraction(w, den) for x, w in weights.items()})
        return ts, mu


def random_partial_order(rng: random.Random, ts: TestSpace, max_comparisons: int = 4,
                         scope="full", mu: Measure | None = None):
    """A consistent order from a few random comparisons, or None if inconsistent.

    With ``mu`` given, the comparisons are drawn among pairs that ``mu``
    respects, so the result is consistent by construction.
    """
    events = enumerate_events(ts)
    comps = []
    for _ in range(rng.randint(0, max_comparisons)):
        a, b = rng.choice(events), rng.choice(events)
        if mu is not None:
            if mu(a) > mu(b):
                a, b = b, a
            rel = "equiv" if mu(a) == mu(b) else rng.choice(["weak", "strict"])
        else:
            rel = rng.choice(["weak", "weak", "strict", "equiv"])
        comps.append(Comparison.of(a, b, rel))
    try:
        return build_order(ts, comps, scope)
    except InconsistentOrder:
        return None
