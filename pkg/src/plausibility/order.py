"""Comparative plausibility orders on a scope of events.

An order is stored as two boolean matrices over the scope: ``weak[i, j]``
for "event i is at most as plausible as event j" and ``strict[i, j]`` for
"strictly less plausible". Plausibility values themselves are never
materialized; they are the classes of the weak preorder.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    Axiom3Violation,
    EmptyMeasureList,
    InconsistentOrder,
    InvalidInput,
    InvalidMeasure,
    NotAnEvent,
    UnknownOutcome,
)
from .exactlp import format_rational, parse_rational
from .testspace import (
    DEFAULT_EVENT_CAP,
    TestSpace,
    enumerate_events,
    event_key,
    is_event,
    make_event,
)


class Relation(enum.Enum):
    WEAK = "weak"
    STRICT = "strict"
    EQUIV = "equiv"


@dataclass(frozen=True)
class Comparison:
    lhs: tuple
    rhs: tuple
    relation: Relation = Relation.WEAK

    @classmethod
    def of(cls, lhs: Iterable[str], rhs: Iterable[str], relation="weak") -> "Comparison":
        return cls(make_event(lhs), make_event(rhs), Relation(relation))

    def to_doc(self) -> dict:
        return {"lhs": list(self.lhs), "rhs": list(self.rhs), "rel": self.relation.value}


@dataclass(frozen=True, eq=False)
class PlausibilityOrder:
    space: TestSpace
    scope: tuple
    weak: np.ndarray
    strict: np.ndarray
    comparisons: tuple = ()
    policy: str = "active"
    position: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self.position is None:
            object.__setattr__(self, "position", {e: i for i, e in enumerate(self.scope)})

    def _pos(self, event) -> int:
        try:
            return self.position[tuple(event)]
        except KeyError:
            raise NotAnEvent(f"{list(event)} is not in the order's scope") from None

    def leq(self, a, b) -> bool:
        return bool(self.weak[self._pos(a), self._pos(b)])

    def lt(self, a, b) -> bool:
        return bool(self.strict[self._pos(a), self._pos(b)])

    def equivalent(self, a, b) -> bool:
        return self.leq(a, b) and self.leq(b, a)

    def relations(self) -> list:
        """Every non-reflexive weak pair as a :class:`Comparison`."""
        out = []
        n = len(self.scope)
        for i in range(n):
            for j in range(n):
                if i != j and self.weak[i, j]:
                    rel = Relation.STRICT if self.strict[i, j] else Relation.WEAK
                    out.append(Comparison(self.scope[i], self.scope[j], rel))
        return out

    def to_doc(self) -> dict:
        return {
            "space": self.space.to_doc(),
            "comparisons": [c.to_doc() for c in self.comparisons],
            "scope": self.policy if self.policy in ("active", "full") else "active",
        }


# --- scope ----------------------------------------------------------------


def _checked_event(ts: TestSpace, members) -> tuple:
    ev = make_event(members)
    try:
        ok = is_event(ts, ev)
    except UnknownOutcome as exc:
        raise NotAnEvent(str(exc)) from None
    if not ok:
        raise NotAnEvent(f"{list(ev)} is not contained in any test")
    return ev


def resolve_scope(ts: TestSpace, scope="active", extra=(), event_cap=DEFAULT_EVENT_CAP) -> tuple:
    """Scope events for a policy ("active"/"full") or an explicit event list.

    The empty event, all singletons and all tests are always included.
    """
    events = {(), *((x,) for x in ts.outcomes), *ts.tests}
    events.update(extra)
    if scope == "full":
        events.update(enumerate_events(ts, event_cap))
    elif scope != "active":
        if isinstance(scope, str):
            raise InvalidInput(f"scope must be 'active' or 'full', got {scope!r}")
        events.update(_checked_event(ts, e) for e in scope)
    return tuple(sorted(events, key=event_key))


def _masks(ts: TestSpace, scope) -> list:
    idx = ts.index
    return [sum(1 << idx[x] for x in e) for e in scope]


# --- construction ---------------------------------------------------------


def build_order(ts: TestSpace, comparisons: Sequence[Comparison], scope="active",
                event_cap: int = DEFAULT_EVENT_CAP) -> PlausibilityOrder:
    """Close user comparisons together with the three plausibility axioms."""
    comps = []
    for c in comparisons:
        comps.append(Comparison(_checked_event(ts, c.lhs), _checked_event(ts, c.rhs), Relation(c.relation)))
    mentioned = [e for c in comps for e in (c.lhs, c.rhs)]
    events = resolve_scope(ts, scope, mentioned, event_cap)
    pos = {e: i for i, e in enumerate(events)}
    n = len(events)

    weak_base = kernels.subset_matrix(_masks(ts, events)).copy()
    strict_base = np.zeros((n, n), dtype=bool)
    tests = [pos[t] for t in ts.tests]
    for a in tests:
        for b in tests:
            weak_base[a, b] = True
        strict_base[pos[()], a] = True
    for c in comps:
        i, j = pos[c.lhs], pos[c.rhs]
        weak_base[i, j] = True
        if c.relation is Relation.STRICT:
            strict_base[i, j] = True
        elif c.relation is Relation.EQUIV:
            weak_base[j, i] = True

    weak, strict = kernels.closure(weak_base, strict_base)
    policy = scope if isinstance(scope, str) else "explicit"
    order = PlausibilityOrder(ts, events, weak, strict, tuple(comps), policy)

    bad_tests = [t for t in tests if weak[t, pos[()]]]
    if bad_tests:
        t = bad_tests[0]
        cycle = _shortest_strict_cycle(events, weak_base, strict_base, [pos[()]])
        raise Axiom3Violation(f"closure forces test {list(events[t])} <= empty event", cycle)
    bad = np.flatnonzero(np.diagonal(strict))
    if len(bad):
        cycle = _shortest_strict_cycle(events, weak_base, strict_base, bad[:64])
        first = events[bad[0]]
        raise InconsistentOrder(f"closure puts {list(first)} strictly below itself", cycle)
    return order


def _shortest_strict_cycle(events, weak_base, strict_base, starts):
    """Shortest cycle of base edges through one of ``starts`` using a strict edge."""
    n = len(events)
    succ = [np.flatnonzero(weak_base[i] | strict_base[i]) for i in range(n)]
    best = None
    for s in starts:
        s = int(s)
        prev = {(s, False): None}
        queue = deque([(s, False)])
        found = None
        while queue and found is None:
            node, used = queue.popleft()
            for nxt in succ[node]:
                nxt = int(nxt)
                if nxt == node:
                    continue
                state = (nxt, used or bool(strict_base[node, nxt]))
                if state in prev:
                    continue
                prev[state] = (node, used)
                if state == (s, True):
                    found = state
                    break
                queue.append(state)
        if found is None:
            continue
        path = []
        state = found
        while prev[state] is not None:
            p = prev[state]
            rel = Relation.STRICT if strict_base[p[0], state[0]] else Relation.WEAK
            path.append((events[p[0]], events[state[0]], rel))
            state = p
        path.reverse()
        if best is None or len(path) < len(best):
            best = path
    return tuple(best or ())


# --- queries --------------------------------------------------------------


def first_incomparable(order: PlausibilityOrder):
    """First pair (in scope order) related in neither direction, or None."""
    incomparable = ~(order.weak | order.weak.T)
    hits = np.argwhere(incomparable)
    if not len(hits):
        return None
    i, j = hits[0]
    return order.scope[i], order.scope[j]


def is_total(order: PlausibilityOrder) -> bool:
    return first_incomparable(order) is None


def to_possibility(order: PlausibilityOrder) -> dict:
    """Two-valued collapse: 0 for events equivalent to the empty event, else 1."""
    e = order.position[()]
    return {ev: 0 if order.weak[i, e] else 1 for i, ev in enumerate(order.scope)}


# --- measures -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Measure:
    """Exact probability measure: non-negative outcome weights, each test sums to 1."""

    space: TestSpace
    weights: Mapping

    @classmethod
    def of(cls, ts: TestSpace, weights: Mapping) -> "Measure":
        w = {}
        for x, v in weights.items():
            if x not in ts.index:
                raise InvalidMeasure(f"weight given for unknown outcome {x!r}")
            w[x] = v if isinstance(v, Fraction) else _rational(v)
        missing = [x for x in ts.outcomes if x not in w]
        if missing:
            raise InvalidMeasure(f"no weight for outcomes {missing}")
        for x, v in w.items():
            if v < 0:
                raise InvalidMeasure(f"weight of {x!r} is negative")
        for t in ts.tests:
            total = sum((w[x] for x in t), Fraction(0))
            if total != 1:
                raise InvalidMeasure(f"test {list(t)} has total weight {format_rational(total)}")
        return cls(ts, {x: w[x] for x in ts.outcomes})

    def __call__(self, event) -> Fraction:
        return sum((self.weights[x] for x in event), Fraction(0))

    def to_doc(self) -> dict:
        return {x: format_rational(v) for x, v in self.weights.items()}

    def __eq__(self, other):
        return isinstance(other, Measure) and self.space == other.space and dict(self.weights) == dict(other.weights)

    __hash__ = None


def _rational(v) -> Fraction:
    if isinstance(v, str):
        return parse_rational(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    raise InvalidMeasure(f"weights must be exact rationals, got {v!r}")


def order_from_measure(mu: Measure, scope="full", event_cap: int = DEFAULT_EVENT_CAP) -> PlausibilityOrder:
    events = resolve_scope(mu.space, scope, (), event_cap)
    weak, strict = kernels.measure_relation([mu(e) for e in events])
    policy = scope if isinstance(scope, str) else "explicit"
    return PlausibilityOrder(mu.space, events, weak, strict, (), policy)


def envelope_order(ts: TestSpace, measures: Sequence[Measure], scope="full",
                   event_cap: int = DEFAULT_EVENT_CAP) -> PlausibilityOrder:
    """A <= B iff every measure agrees; strict iff additionally one is strict."""
    if not measures:
        raise EmptyMeasureList("envelope of an empty set of measures")
    for mu in measures:
        if mu.space != ts:
            raise InvalidMeasure("all measures must live on the given space")
    events = resolve_scope(ts, scope, (), event_cap)
    weak = np.ones((len(events), len(events)), dtype=bool)
    some_strict = np.zeros_like(weak)
    for mu in measures:
        w, s = kernels.measure_relation([mu(e) for e in events])
        weak &= w
        some_strict |= s
    policy = scope if isinstance(scope, str) else "explicit"
    return PlausibilityOrder(ts, events, weak, weak & some_strict, (), policy)


# --- documents ------------------------------------------------------------


def comparison_from_doc(doc: Mapping) -> Comparison:
    try:
        return Comparison.of(doc["lhs"], doc["rhs"], doc.get("rel", "weak"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad comparison {doc!r}: {exc}") from None


def order_from_doc(doc: Mapping, scope=None, event_cap: int = DEFAULT_EVENT_CAP) -> PlausibilityOrder:
    if not isinstance(doc, Mapping) or "space" not in doc:
        raise InvalidInput("order document needs a 'space' key")
    ts = TestSpace.from_doc(doc["space"])
    comps = [comparison_from_doc(c) for c in doc.get("comparisons", [])]
    return build_order(ts, comps, scope or doc.get("scope", "active"), event_cap)
