"""Test spaces, their events, and generators for the standard fixtures.

An event is represented canonically as a tuple of outcome ids sorted by
:func:`outcome_key`; the empty tuple is the empty event. All set operations
work on that normal form so that reports are byte-deterministic.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    CoverViolation,
    DimensionTooSmall,
    DuplicateOutcomeId,
    EmptyLabelList,
    EmptyTest,
    EventExplosion,
    InvalidInput,
    InvalidOutcomeId,
    NotPrime,
    SpaceTooLarge,
    StateNotInSpace,
    UnknownOutcome,
    UnknownOutcomeInTest,
)

Event = tuple  # tuple[str, ...], canonical member order

DEFAULT_EVENT_CAP = 4096
DEFAULT_MODAL_TEST_CAP = 20000

_CHUNK = re.compile(r"(\d+)")


def outcome_key(label: str):
    """Natural sort key: ``"2" < "10"``, ties broken by the raw string."""
    parts = []
    for chunk in _CHUNK.split(label):
        if not chunk:
            continue
        parts.append((0, int(chunk), "") if chunk.isdigit() else (1, 0, chunk))
    return (tuple(parts), label)


def make_event(members: Iterable[str]) -> Event:
    return tuple(sorted(set(members), key=outcome_key))


def event_key(event: Event):
    return (len(event), tuple(outcome_key(x) for x in event))


@dataclass(frozen=True)
class TestSpace:
    """Outcomes plus a covering family of finite, non-empty tests.

    Build instances through :func:`validate_test_space` (or the generators
    below); the constructor itself does not re-check the invariants.
    """

    __test__ = False  # not a pytest class

    outcomes: tuple
    tests: tuple

    @property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.outcomes)}

    def to_doc(self) -> dict:
        return {"outcomes": list(self.outcomes), "tests": [list(t) for t in self.tests]}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "TestSpace":
        if not isinstance(doc, Mapping) or "outcomes" not in doc or "tests" not in doc:
            raise InvalidInput("test space document needs 'outcomes' and 'tests'")
        return validate_test_space(doc["outcomes"], doc["tests"])


def _check_outcome_id(x) -> str:
    if not isinstance(x, str) or not x or any(c.isspace() for c in x):
        raise InvalidOutcomeId(f"outcome id must be a non-empty token, got {x!r}")
    return x


def validate_test_space(outcomes: Sequence[str], tests: Iterable[Iterable[str]]) -> TestSpace:
    seen = set()
    for x in outcomes:
        _check_outcome_id(x)
        if x in seen:
            raise DuplicateOutcomeId(f"duplicate outcome id {x!r}")
        seen.add(x)

    canon = set()
    for raw in tests:
        members = list(raw)
        if not members:
            raise EmptyTest("tests must be non-empty")
        for x in members:
            if x not in seen:
                raise UnknownOutcomeInTest(f"test mentions unknown outcome {x!r}")
        canon.add(make_event(members))

    covered = set().union(*canon) if canon else set()
    for x in sorted(seen, key=outcome_key):
        if x not in covered:
            raise CoverViolation(x)

    return TestSpace(
        outcomes=tuple(sorted(seen, key=outcome_key)),
        tests=tuple(sorted(canon, key=event_key)),
    )


def is_event(ts: TestSpace, members: Iterable[str]) -> bool:
    members = set(members)
    unknown = members.difference(ts.outcomes)
    if unknown:
        raise UnknownOutcome(f"unknown outcomes {sorted(unknown, key=outcome_key)}")
    return any(members.issubset(t) for t in ts.tests)


def count_events(ts: TestSpace) -> int:
    """Exact size of the event set, by inclusion-exclusion over tests."""
    tests = [frozenset(t) for t in ts.tests]
    total = 0
    for k in range(1, len(tests) + 1):
        sign = 1 if k % 2 else -1
        for combo in itertools.combinations(tests, k):
            total += sign * (1 << len(frozenset.intersection(*combo)))
    return total


def enumerate_events(ts: TestSpace, cap: int = DEFAULT_EVENT_CAP) -> list:
    """All events ordered by size, then lexicographically.

    Raises :class:`EventExplosion` when there are more than ``cap`` of them.
    """
    found = set()
    for t in ts.tests:
        if len(t) >= 63 or (1 << len(t)) > cap:
            _explode(ts, cap)
        for r in range(len(t) + 1):
            found.update(itertools.combinations(t, r))
        if len(found) > cap:
            _explode(ts, cap)
    return sorted(found, key=event_key)


def _explode(ts: TestSpace, cap: int):
    if len(ts.tests) <= 16:
        raise EventExplosion(count_events(ts), cap)
    raise EventExplosion(cap + 1, cap, exact=False)


def make_classical(labels: Sequence[str]) -> TestSpace:
    labels = [str(x) for x in labels]
    if not labels:
        raise EmptyLabelList("a classical space needs at least one outcome")
    return validate_test_space(labels, [labels])


def make_triangle() -> TestSpace:
    return validate_test_space(["x", "y", "z"], [["x", "y"], ["y", "z"], ["z", "x"]])


# --- finite-field modal spaces -------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def _normalize(coords, p):
    coords = [c % p for c in coords]
    lead = next((c for c in coords if c), None)
    if lead is None:
        raise InvalidInput("modal state must be non-zero")
    inv = pow(lead, -1, p)
    return tuple(c * inv % p for c in coords)


def point_label(coords, p: int) -> str:
    sep = "" if p <= 10 else "."
    return sep.join(str(c) for c in coords)


def parse_point_label(label: str, p: int) -> tuple:
    parts = list(label) if p <= 10 else label.split(".")
    return tuple(int(c) for c in parts)


@dataclass(frozen=True)
class ModalState:
    """A projective point of GF(p)^d, normalized so the leading entry is 1."""

    p: int
    d: int
    coords: tuple

    @classmethod
    def of(cls, p: int, coords: Sequence[int]) -> "ModalState":
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if len(coords) < 2:
            raise DimensionTooSmall("dimension must be at least 2")
        return cls(p, len(coords), _normalize(coords, p))

    @property
    def label(self) -> str:
        return point_label(self.coords, self.p)


def projective_points(p: int, d: int) -> list:
    pts = []
    for v in itertools.product(range(p), repeat=d):
        if any(v):
            lead = next(c for c in v if c)
            if lead == 1:
                pts.append(v)
    return pts


def _rank_mod(vectors, p):
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _coefficients_mod(basis, target, p):
    """Solve sum_i c_i * basis[i] = target over GF(p); basis is invertible."""
    d = len(target)
    # augmented matrix: columns are basis vectors
    m = [[basis[j][i] % p for j in range(d)] + [target[i] % p] for i in range(d)]
    for col in range(d):
        piv = next(r for r in range(col, d) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        inv = pow(m[col][col], -1, p)
        m[col] = [v * inv % p for v in m[col]]
        for r in range(d):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[col])]
    return [m[i][d] for i in range(d)]


def count_bases(p: int, d: int) -> int:
    ordered = 1
    for i in range(d):
        ordered *= p**d - p**i
    return ordered // ((p - 1) ** d * math.factorial(d))


def modal_test_space(p: int, d: int, max_tests: int = DEFAULT_MODAL_TEST_CAP) -> TestSpace:
    """Projective points of GF(p)^d as outcomes, unordered bases as tests."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if d < 2:
        raise DimensionTooSmall("dimension must be at least 2")
    n_tests = count_bases(p, d)
    if n_tests > max_tests:
        raise SpaceTooLarge(f"GF({p})^{d} has {n_tests} bases (cap {max_tests})")
    pts = projective_points(p, d)
    tests = [
        [point_label(v, p) for v in combo]
        for combo in itertools.combinations(pts, d)
        if _rank_mod(combo, p) == d
    ]
    return validate_test_space([point_label(v, p) for v in pts], tests)


def modal_possibility_table(p: int, d: int, state: ModalState) -> dict:
    """``{(test, outcome): possible}`` for the given state.

    An outcome of a test is possible iff it gets a non-zero coefficient when
    the state is expanded in that test's basis.
    """
    if not isinstance(state, ModalState) or state.p != p or state.d != d:
        raise StateNotInSpace(f"state is not a point of GF({p})^{d}")
    ts = modal_test_space(p, d)
    table = {}
    for t in ts.tests:
        basis = [parse_point_label(x, p) for x in t]
        coeffs = _coefficients_mod(basis, state.coords, p)
        for x, c in zip(t, coeffs):
            table[(t, x)] = c != 0
    return table


@dataclass(frozen=True)
class PossibilityCheck:
    """Outcome of :func:`noncontextual_possibility`.

    ``assignment`` maps outcomes to 0/1 when every outcome gets the same
    verdict in every test containing it; otherwise it is ``None`` and
    ``conflicts`` lists ``(outcome, tests_impossible, tests_possible)``.
    """

    assignment: dict | None
    conflicts: tuple

    @property
    def contextual(self) -> bool:
        return self.assignment is None


def noncontextual_possibility(table: Mapping) -> PossibilityCheck:
    by_outcome: dict = {}
    for (test, x), possible in table.items():
        by_outcome.setdefault(x, ([], []))[1 if possible else 0].append(tuple(test))
    conflicts = []
    assignment = {}
    for x in sorted(by_outcome, key=outcome_key):
        impossible, possible = by_outcome[x]
        if impossible and possible:
            conflicts.append((x, tuple(sorted(impossible, key=event_key)),
                              tuple(sorted(possible, key=event_key))))
        assignment[x] = 1 if possible else 0
    if conflicts:
        return PossibilityCheck(None, tuple(conflicts))
    return PossibilityCheck(assignment, ())
