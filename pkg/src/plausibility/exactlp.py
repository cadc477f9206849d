"""Exact rational linear programming and cone membership.

Everything here runs on :class:`fractions.Fraction`; there is no floating
point anywhere. The simplex is a dense two-phase tableau method with Bland's
rule, so it terminates on every input. Each result carries a certificate
(dual solution, Farkas multipliers or an improving ray) and the ``verify_*``
functions re-check certificates using only rational ``+``, ``*`` and
comparisons, independently of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from . import kernels
from .errors import IndexMismatch, InvalidInput, MalformedProblem
from .testspace import outcome_key

ZERO = Fraction(0)
ONE = Fraction(1)


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise InvalidInput("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInput(f"rationals are written as 'p/q' strings, got {text!r}")
    num, _, den = text.strip().partition("/")
    if not num.lstrip("-").isdigit() or (den and not den.isdigit()) or (den and int(den) == 0):
        raise InvalidInput(f"not a rational: {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def _as_rational(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, Rational):
        raise MalformedProblem(f"coefficient {v!r} is not an exact rational")
    return Fraction(v)


class OutcomeVector:
    """Sparse outcome-indexed rational vector; zero entries are never stored."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, entries: Mapping[str, object] | Iterable = ()):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict = {}
        for k, v in pairs:
            acc[k] = acc.get(k, ZERO) + Fraction(v)
        self._items = tuple(sorted(((k, v) for k, v in acc.items() if v), key=lambda kv: outcome_key(kv[0])))
        self._map = dict(self._items)
        self._hash = None

    @classmethod
    def indicator(cls, event: Iterable[str]) -> "OutcomeVector":
        return cls((x, ONE) for x in event)

    def __getitem__(self, x) -> Fraction:
        return self._map.get(x, ZERO)

    def items(self):
        return self._items

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self._items)

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        return isinstance(other, OutcomeVector) and self._items == other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __add__(self, other):
        return OutcomeVector(self._items + other._items)

    def __neg__(self):
        return OutcomeVector((k, -v) for k, v in self._items)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return OutcomeVector((k, v * c) for k, v in self._items)

    __rmul__ = __mul__

    def dot(self, other) -> Fraction:
        small, big = (self, other) if len(self._items) <= len(other._items) else (other, self)
        return sum((v * big[k] for k, v in small._items), ZERO)

    def to_doc(self) -> dict:
        return {k: format_rational(v) for k, v in self._items}

    def __repr__(self):
        return f"OutcomeVector({self.to_doc()})"


# --- linear programming -----------------------------------------------------

RELATIONS = ("<=", "=", ">=")


@dataclass
class LPProblem:
    """``sense`` c.x subject to ``rows`` (coeffs, rel, rhs); free vars flagged.

    ``nonneg[j]`` is True when variable j is constrained to be >= 0 and False
    when it is free. Defaults to all non-negative.
    """

    objective: Sequence
    rows: Sequence
    sense: str = "max"
    nonneg: Sequence | None = None

    def normalized(self):
        n = len(self.objective)
        c = [_as_rational(v) for v in self.objective]
        if self.sense not in ("max", "min"):
            raise MalformedProblem(f"sense must be 'max' or 'min', got {self.sense!r}")
        rows = []
        for coeffs, rel, rhs in self.rows:
            if rel not in RELATIONS:
                raise MalformedProblem(f"relation must be one of {RELATIONS}, got {rel!r}")
            if len(coeffs) != n:
                raise MalformedProblem(f"row has {len(coeffs)} coefficients, expected {n}")
            rows.append(([_as_rational(a) for a in coeffs], rel, _as_rational(rhs)))
        nonneg = [True] * n if self.nonneg is None else [bool(b) for b in self.nonneg]
        if len(nonneg) != n:
            raise MalformedProblem("sign flags do not match the number of variables")
        return c, rows, nonneg


@dataclass
class LPResult:
    """Solver output.

    OPTIMAL: ``x``, ``objective`` and ``dual`` (one multiplier per row).
    INFEASIBLE: ``farkas`` (one multiplier per row).
    UNBOUNDED: a feasible ``x`` and an improving ``ray``.
    """

    status: str
    x: list | None = None
    objective: Fraction | None = None
    dual: list | None = None
    farkas: list | None = None
    ray: list | None = None
    pivots: int = field(default=0, compare=False)


class _Tableau:
    def __init__(self, c, rows, nonneg):
        self.n = len(c)
        # structural columns: (original var, sign)
        self.struct = []
        for j, nn in enumerate(nonneg):
            self.struct.append((j, 1))
            if not nn:
                self.struct.append((j, -1))
        ns = len(self.struct)
        m = len(rows)
        self.m = m
        self.sigma = []
        slack_of, art_of = {}, {}
        ncols = ns
        eff = []
        for i, (a, rel, b) in enumerate(rows):
            s = -1 if b < 0 else 1
            if s < 0:
                rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
            self.sigma.append(s)
            eff.append(rel)
            if rel != "=":
                slack_of[i] = ncols
                ncols += 1
        self.n_real = ncols
        for i in range(m):
            if eff[i] != "<=":
                art_of[i] = ncols
                ncols += 1
        self.ncols = ncols
        self.slack_of, self.art_of = slack_of, art_of
        self.t = []
        self.basis = []
        for i, (a, rel, b) in enumerate(rows):
            s = self.sigma[i]
            row = [ZERO] * (ncols + 1)
            for k, (j, sign) in enumerate(self.struct):
                if a[j]:
                    row[k] = s * sign * a[j]
            if i in slack_of:
                row[slack_of[i]] = ONE if eff[i] == "<=" else -ONE
            if i in art_of:
                row[art_of[i]] = ONE
                self.basis.append(art_of[i])
            else:
                self.basis.append(slack_of[i])
            row[-1] = s * b
            self.t.append(row)
        self.c = c
        self.pivots = 0

    def _set_objective(self, costs):
        obj = [-v for v in costs] + [ZERO]
        for i, bv in enumerate(self.basis):
            cb = costs[bv]
            if cb:
                row = self.t[i]
                for k, v in enumerate(row):
                    if v:
                        obj[k] += cb * v
        self.obj = obj
        self.costs = costs

    def _iterate(self, allowed):
        """Bland's rule primal simplex; returns None or the unbounded column."""
        rows = self.t + [self.obj]
        while True:
            enter = next((k for k in range(allowed) if self.obj[k] < 0), None)
            if enter is None:
                return None
            best, leave = None, None
            for i, row in enumerate(self.t):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return enter
            kernels.pivot(rows, leave, enter)
            self.t = rows[:-1]
            self.obj = rows[-1]
            self.basis[leave] = enter
            self.pivots += 1

    def row_duals(self):
        """Multipliers y' (effective rows) read off the objective row."""
        # every row owns a +1 identity column: its artificial, else its slack
        y = []
        for i in range(self.m):
            col = self.art_of.get(i, self.slack_of.get(i))
            y.append(self.obj[col] + self.costs[col])
        return y

    def primal(self):
        z = [ZERO] * self.ncols
        for i, bv in enumerate(self.basis):
            z[bv] = self.t[i][-1]
        return self._to_x(z)

    def _to_x(self, z):
        x = [ZERO] * self.n
        for k, (j, sign) in enumerate(self.struct):
            if z[k]:
                x[j] += sign * z[k]
        return x


def lp_solve(problem: LPProblem) -> LPResult:
    c, rows, nonneg = problem.normalized()
    maximize = problem.sense == "max"
    cmax = c if maximize else [-v for v in c]
    tab = _Tableau(cmax, rows, nonneg)

    if tab.art_of:
        costs = [ZERO] * tab.ncols
        for col in tab.art_of.values():
            costs[col] = -ONE
        tab._set_objective(costs)
        tab._iterate(tab.ncols)
        if tab.obj[-1] < 0:
            y = tab.row_duals()
            farkas = [s * v for s, v in zip(tab.sigma, y)]
            return LPResult("INFEASIBLE", farkas=farkas, pivots=tab.pivots)
        _drive_out_artificials(tab)

    costs = [ZERO] * tab.ncols
    for k, (j, sign) in enumerate(tab.struct):
        costs[k] = sign * cmax[j]
    tab._set_objective(costs)
    unbounded = tab._iterate(tab.n_real)
    x = tab.primal()
    if unbounded is not None:
        z = [ZERO] * tab.ncols
        z[unbounded] = ONE
        for i, bv in enumerate(tab.basis):
            z[bv] -= tab.t[i][unbounded]
        return LPResult("UNBOUNDED", x=x, ray=tab._to_x(z), pivots=tab.pivots)
    y = [s * v for s, v in zip(tab.sigma, tab.row_duals())]
    value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
    if not maximize:
        y = [-v for v in y]
    return LPResult("OPTIMAL", x=x, objective=value, dual=y, pivots=tab.pivots)


def _drive_out_artificials(tab):
    arts = set(tab.art_of.values())
    rows = tab.t + [tab.obj]
    for i, bv in enumerate(tab.basis):
        if bv not in arts:
            continue
        row = tab.t[i]
        k = next((k for k in range(tab.n_real) if row[k]), None)
        if k is None:
            continue  # redundant row: its artificial stays basic at zero
        kernels.pivot(rows, i, k)
        tab.t = rows[:-1]
        tab.obj = rows[-1]
        tab.basis[i] = k
        tab.pivots += 1


def verify_lp_result(problem: LPProblem, result: LPResult) -> bool:
    """Independent exact check of an :class:`LPResult` certificate."""
    c, rows, nonneg = problem.normalized()
    n = len(c)
    maximize = problem.sense == "max"

    def dot(u, v):
        return sum((a * b for a, b in zip(u, v)), ZERO)

    def feasible(x):
        if len(x) != n or any(nn and xj < 0 for nn, xj in zip(nonneg, x)):
            return False
        for a, rel, b in rows:
            lhs = dot(a, x)
            if (rel == "<=" and lhs > b) or (rel == ">=" and lhs < b) or (rel == "=" and lhs != b):
                return False
        return True

    def sign_ok(y, flip):
        for (a, rel, b), yi in zip(rows, y):
            s = -yi if flip else yi
            if (rel == "<=" and s < 0) or (rel == ">=" and s > 0):
                return False
        return True

    def column(y, j):
        return sum((yi * a[j] for (a, _, _), yi in zip(rows, y)), ZERO)

    if result.status == "OPTIMAL":
        x, y = result.x, result.dual
        if x is None or y is None or len(y) != len(rows) or not feasible(x):
            return False
        if dot(c, x) != result.objective or dot(y, [b for _, _, b in rows]) != result.objective:
            return False
        if not sign_ok(y, flip=not maximize):
            return False
        for j in range(n):
            col = column(y, j)
            if not nonneg[j]:
                if col != c[j]:
                    return False
            elif (maximize and col < c[j]) or (not maximize and col > c[j]):
                return False
        return True

    if result.status == "INFEASIBLE":
        y = result.farkas
        if y is None or len(y) != len(rows) or not sign_ok(y, flip=False):
            return False
        for j in range(n):
            col = column(y, j)
            if (nonneg[j] and col < 0) or (not nonneg[j] and col != 0):
                return False
        return dot(y, [b for _, _, b in rows]) < 0

    if result.status == "UNBOUNDED":
        x, d = result.x, result.ray
        if x is None or d is None or not feasible(x) or len(d) != n:
            return False
        if any(nn and dj < 0 for nn, dj in zip(nonneg, d)):
            return False
        for a, rel, _ in rows:
            ad = dot(a, d)
            if (rel == "<=" and ad > 0) or (rel == ">=" and ad < 0) or (rel == "=" and ad != 0):
                return False
        gain = dot(c, d)
        return gain > 0 if maximize else gain < 0

    return False


# --- cone membership --------------------------------------------------------


@dataclass(frozen=True)
class ConeResult:
    """Either ``coefficients`` (lambda >= 0 with sum lambda_i g_i = v) or a
    ``separator`` rho with rho.g_i >= 0 for all i and rho.v < 0."""

    coefficients: tuple | None = None
    separator: OutcomeVector | None = None

    @property
    def member(self) -> bool:
        return self.coefficients is not None

    @property
    def kind(self) -> str:
        return "COEFFS" if self.member else "SEPARATOR"


def _index_for(generators, v, index):
    support = set(v.support)
    for g in generators:
        support.update(g.support)
    if index is None:
        return sorted(support, key=outcome_key)
    index = list(index)
    stray = support.difference(index)
    if stray:
        raise IndexMismatch(f"vectors use outcomes outside the index: {sorted(stray, key=outcome_key)}")
    return index


def cone_membership(generators: Sequence[OutcomeVector], v: OutcomeVector, index=None) -> ConeResult:
    """Decide whether ``v`` is a non-negative combination of ``generators``."""
    generators = list(generators)
    idx = _index_for(generators, v, index)
    rows = [([g[x] for g in generators], "=", v[x]) for x in idx]
    res = lp_solve(LPProblem(objective=[ZERO] * len(generators), rows=rows))
    if res.status == "OPTIMAL":
        return ConeResult(coefficients=tuple(res.x))
    if res.status == "INFEASIBLE":
        return ConeResult(separator=OutcomeVector(zip(idx, res.farkas)))
    raise AssertionError(f"feasibility LP returned {res.status}")  # zero objective


def verify_cone_result(generators: Sequence[OutcomeVector], v: OutcomeVector, result: ConeResult) -> bool:
    """Re-check a :class:`ConeResult` from scratch with plain rational arithmetic."""
    if (result.coefficients is None) == (result.separator is None):
        return False
    if result.coefficients is not None:
        lam = result.coefficients
        if len(lam) != len(generators) or any(l < 0 for l in lam):
            return False
        total: dict = {}
        for l, g in zip(lam, generators):
            if l:
                for x, gx in g.items():
                    total[x] = total.get(x, ZERO) + l * gx
        keys = set(total) | set(v.support)
        return all(total.get(x, ZERO) == v[x] for x in keys)
    rho = result.separator
    return all(rho.dot(g) >= 0 for g in generators) and rho.dot(v) < 0
