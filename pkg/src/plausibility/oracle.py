"""Brute-force reference implementations for small instances.

Everything here is deliberately naive and shares no code with
:mod:`plausibility.exactlp`: vectors are plain ``{outcome: Fraction}``
dicts, linear systems are solved by Fourier-Motzkin elimination, and cone
membership is an exhaustive search over bounded integer coefficients.
The test suite (and ``plausibility oracle``) compares the LP engine against
these on instances small enough for exhaustive methods.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInput, NotTotal, ScopeTooLarge, SeparationFailed, TooManyGenerators
from .order import Measure, PlausibilityOrder, first_incomparable

MAX_GENERATORS = 10


@dataclass(frozen=True)
class OracleConfig:
    max_coefficient: int = 4
    max_family_length: int = 4
    max_events: int = 7

    def __post_init__(self):
        for name in ("max_coefficient", "max_family_length", "max_events"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidInput(f"{name} must be a positive integer, got {value!r}")


DEFAULT_CONFIG = OracleConfig()


def _as_dict(v) -> dict:
    pairs = v.items() if hasattr(v, "items") else v
    return {str(x): Fraction(c) for x, c in pairs if c}


def _coords(vectors: Sequence[dict]) -> list:
    return sorted({x for v in vectors for x in v})


# --- Fourier-Motzkin ------------------------------------------------------


def _normalize(row):
    coeffs, rhs = row
    scale = next((abs(c) for c in coeffs if c), None)
    if scale is None:
        return tuple(coeffs), rhs
    return tuple(c / scale for c in coeffs), rhs / scale


def fm_feasible_point(rows: Iterable, nvars: int):
    """A rational point with ``coeffs . x >= rhs`` for every row, or None.

    Variables are eliminated last-to-first; each intermediate system is kept
    so that a point can be rebuilt by back-substitution.
    """
    system = {_normalize((tuple(Fraction(c) for c in coeffs), Fraction(rhs))) for coeffs, rhs in rows}
    levels = []
    for k in range(nvars - 1, -1, -1):
        levels.append(system)
        pos = [r for r in system if r[0][k] > 0]
        neg = [r for r in system if r[0][k] < 0]
        nxt = {r for r in system if r[0][k] == 0}
        for (pc, pr), (nc, nr) in itertools.product(pos, neg):
            a, b = pc[k], -nc[k]
            coeffs = tuple(pc[i] / a + nc[i] / b for i in range(nvars))
            nxt.add(_normalize((coeffs, pr / a + nr / b)))
        system = nxt
    if any(rhs > 0 for _, rhs in system):
        return None
    x = [Fraction(0)] * nvars
    for k, level in zip(range(nvars), reversed(levels)):
        lo, hi = None, None
        for coeffs, rhs in level:
            c = coeffs[k]
            if not c:
                continue
            rest = rhs - sum(coeffs[i] * x[i] for i in range(k))
            bound = rest / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None:
            x[k] = lo
        elif hi is not None:
            x[k] = min(hi, Fraction(0))
    return x


def fme_cone_membership(generators: Sequence, v, index: Sequence[str] | None = None):
    """``(True, None)`` if ``v`` is in the cone, else ``(False, separator)``.

    Non-membership is decided by finding ``rho`` with ``rho . g >= 0`` for all
    generators and ``rho . v <= -1`` (Farkas' lemma).
    """
    gens = [_as_dict(g) for g in generators]
    target = _as_dict(v)
    coords = list(index) if index is not None else _coords(gens + [target])
    rows = [([g.get(x, 0) for x in coords], 0) for g in gens]
    rows.append(([-target.get(x, 0) for x in coords], 1))
    point = fm_feasible_point(rows, len(coords))
    if point is None:
        return True, None
    return False, dict(zip(coords, point))


# --- bounded integer search ----------------------------------------------


def brute_cone_membership(generators: Sequence, v, bound: int):
    """Non-negative integers ``n_i <= bound`` with ``sum n_i g_i = D v``, or None.

    ``D`` is the lcm of the denominators of ``v``. Exhaustive over the whole
    box, so ``None`` only means "not found at this bound".
    """
    if len(generators) > MAX_GENERATORS:
        raise TooManyGenerators(f"{len(generators)} generators exceed the oracle limit {MAX_GENERATORS}")
    if not isinstance(bound, int) or bound < 0:
        raise InvalidInput("bound must be a non-negative integer")
    gens = [_as_dict(g) for g in generators]
    target = _as_dict(v)
    den = 1
    for c in target.values():
        den = math.lcm(den, c.denominator)
    coords = _coords(gens + [target])
    goal = tuple(target.get(x, 0) * den for x in coords)
    cols = [tuple(g.get(x, 0) for x in coords) for g in gens]
    reached = {tuple(Fraction(0) for _ in coords): ()}
    for col in cols:
        nxt = {}
        for vec, coeffs in reached.items():
            for n in range(bound + 1):
                key = tuple(a + n * b for a, b in zip(vec, col))
                nxt.setdefault(key, coeffs + (n,))
        reached = nxt
    return reached.get(goal)


# --- Archimedean families -------------------------------------------------


@dataclass(frozen=True)
class FamilyViolation:
    first: tuple  # A_1 .. A_n
    second: tuple  # B_1 .. B_n

    @property
    def conclusion(self) -> tuple:
        return self.first[-1], self.second[-1]


def brute_archimedean(order: PlausibilityOrder, max_family_length: int | None = None,
                      config: OracleConfig = DEFAULT_CONFIG) -> list:
    """All violating families of length up to ``max_family_length``.

    Premises range over every weak pair (reflexive ones included) taken as
    a multiset; the conclusion is any pair ``(A, B)`` whose difference
    balances the premises and for which ``B <= A`` fails.
    """
    length = config.max_family_length if max_family_length is None else max_family_length
    if len(order.scope) > config.max_events:
        raise ScopeTooLarge(f"scope has {len(order.scope)} events, oracle limit is {config.max_events}")
    outcomes = order.space.outcomes
    pos = {x: i for i, x in enumerate(outcomes)}

    def vec(e):
        out = [0] * len(outcomes)
        for x in e:
            out[pos[x]] += 1
        return out

    scope = order.scope
    vecs = [vec(e) for e in scope]
    n = len(scope)
    premises = [(i, j) for i in range(n) for j in range(n) if order.weak[i, j]]
    conclusions: dict = {}
    for a in range(n):
        for b in range(n):
            if not order.weak[b, a]:
                key = tuple(p - q for p, q in zip(vecs[a], vecs[b]))
                conclusions.setdefault(key, []).append((a, b))

    found = []
    for size in range(length):
        for combo in itertools.combinations_with_replacement(premises, size):
            total = [0] * len(outcomes)
            for i, j in combo:
                for k in range(len(outcomes)):
                    total[k] += vecs[j][k] - vecs[i][k]
            for a, b in conclusions.get(tuple(total), ()):
                first = tuple(scope[i] for i, _ in combo) + (scope[a],)
                second = tuple(scope[j] for _, j in combo) + (scope[b],)
                found.append(FamilyViolation(first, second))
    return found


# --- averaged separation --------------------------------------------------


def averaged_agreeing_measure(order: PlausibilityOrder, config: OracleConfig = DEFAULT_CONFIG) -> Measure:
    """One separating functional per strict pair, normalized and averaged.

    For each ``A < B`` find ``rho`` non-negative on every weak pair with
    ``rho(e_B) - rho(e_A) >= 1``; scale it so a test has value 1 and take the
    mean over all strict pairs.
    """
    if len(order.scope) > config.max_events:
        raise ScopeTooLarge(f"scope has {len(order.scope)} events, oracle limit is {config.max_events}")
    pair = first_incomparable(order)
    if pair is not None:
        raise NotTotal(pair)
    outcomes = list(order.space.outcomes)
    scope = order.scope
    n = len(scope)

    def diff(i, j):  # coefficients of e_{scope[j]} - e_{scope[i]}
        row = [0] * len(outcomes)
        for x in scope[j]:
            row[outcomes.index(x)] += 1
        for x in scope[i]:
            row[outcomes.index(x)] -= 1
        return row

    base = [(diff(i, j), 0) for i in range(n) for j in range(n) if i != j and order.weak[i, j]]
    strict_pairs = [(i, j) for i in range(n) for j in range(n) if order.weak[i, j] and not order.weak[j, i]]
    test = order.space.tests[0]
    total = [Fraction(0)] * len(outcomes)
    for i, j in strict_pairs:
        rho = fm_feasible_point(base + [(diff(i, j), 1)], len(outcomes))
        if rho is None:
            raise SeparationFailed((scope[i], scope[j]))
        scale = sum(rho[outcomes.index(x)] for x in test)
        for k in range(len(outcomes)):
            total[k] += rho[k] / scale
    count = len(strict_pairs)
    return Measure.of(order.space, {x: total[k] / count for k, x in enumerate(outcomes)})

