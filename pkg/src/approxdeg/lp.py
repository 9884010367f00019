"""Exact epsilon-approximate degree by linear programming.

For a promise function f and degree d the solver works on the dual form

    maximize  <f, psi>
    subject to  sum_x psi(x) m(x) = 0   for every monomial m of degree <= d,
                ||psi||_1 = 1,

with psi = u - v split into nonnegative parts.  Its optimum equals the least error
eps* of a degree-d approximant; the multipliers of the moment rows are the
approximant's coefficients and the multiplier of the norm row is eps*.  For one-sided
approximation the variable v is dropped on f^{-1}(1), i.e. psi >= 0 there.

When f is invariant under row (and column) permutations the LP is solved over orbits:
one variable per point orbit and one moment row per monomial orbit.  Averaging any
optimal psi over the group gives an optimal invariant psi, so nothing is lost.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ._config import check_size
from .functions import PromiseFunction, format_rational, parse_rational
from .poly import SparsePolynomial, expand_combination, Monomial, orbit_hits, orbit_key, orbit_keys
from .simplex import OPTIMAL, solve_standard_form

log = logging.getLogger(__name__)

TWO_SIDED = "two-sided"
ONE_SIDED = "one-sided"


def _sided(value: str) -> str:
    aliases = {"two": TWO_SIDED, TWO_SIDED: TWO_SIDED, "one": ONE_SIDED, ONE_SIDED: ONE_SIDED}
    try:
        return aliases[value]
    except KeyError:
        raise ValueError(f"sided must be 'one' or 'two', got {value!r}") from None


@dataclass(frozen=True, eq=False)
class DualWitness:
    """A signed function psi on domain points, with the orth / epsilon it is claimed to certify."""

    n: int
    r: int
    values: dict
    claimed_orth: int = 0
    claimed_eps: Fraction = Fraction(0)

    def __post_init__(self):
        vals = {tuple(x): Fraction(v) for x, v in self.values.items() if v != 0}
        object.__setattr__(self, "values", dict(sorted(vals.items())))
        object.__setattr__(self, "claimed_eps", Fraction(self.claimed_eps))

    def __getitem__(self, x) -> Fraction:
        return self.values.get(tuple(x), Fraction(0))

    @property
    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.values.values()), Fraction(0))

    def correlation(self, f: PromiseFunction) -> Fraction:
        return sum((v for x, v in self.values.items() if f.labels.get(x) == 1), Fraction(0))

    def normalized(self) -> "DualWitness":
        norm = self.l1
        if norm == 0 or norm == 1:
            return self
        return DualWitness(self.n, self.r, {x: v / norm for x, v in self.values.items()},
                           self.claimed_orth, self.claimed_eps)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "points": [list(x) for x in self.values],
            "values": [format_rational(v) for v in self.values.values()],
            "orth": self.claimed_orth,
            "eps": format_rational(self.claimed_eps),
        }

    @classmethod
    def from_json(cls, data) -> "DualWitness":
        points = [tuple(int(c) for c in p) for p in data["points"]]
        values = [parse_rational(v) for v in data["values"]]
        if len(points) != len(values):
            raise ValueError("points and values have different lengths")
        n = int(data.get("n", len(points[0]) if points else 0))
        r = int(data.get("r", max((max(p) for p in points), default=1)))
        return cls(n, r, dict(zip(points, values)), int(data["orth"]), parse_rational(data["eps"]))


@dataclass(eq=False)
class LPResult:
    function: PromiseFunction
    degree_d: int
    eps_star: Fraction
    sided: str
    symmetry: str | None
    dual: DualWitness
    coefficients: list = field(repr=False)  # [(basis element, coefficient)]
    pivots: int = 0

    @cached_property
    def primal(self) -> SparsePolynomial:
        f = self.function
        return expand_combination(self.coefficients, f.n, f.r, self.symmetry)

    def primal_value(self, x) -> Fraction:
        f = self.function
        total = Fraction(0)
        if self.symmetry is None:
            for m, c in self.coefficients:
                if m(x):
                    total += c
            return total
        hits = orbit_hits(tuple(x), self.degree_d, f.r, self.symmetry)
        for key, c in self.coefficients:
            total += c * hits.get(key, 0)
        return total

    def primal_error(self) -> Fraction:
        """Largest violation of the approximation constraints by the primal polynomial."""
        worst = Fraction(0)
        for x in self.function.points:
            p = self.primal_value(x)
            if self.function.labels[x] == 1 and self.sided == ONE_SIDED:
                err = 1 - p
            else:
                err = abs(p - self.function.labels[x])
            worst = max(worst, err)
        return worst


def _point_classes(f: PromiseFunction, symmetry):
    """Group domain points into classes (orbits or singletons) with a common label."""
    if symmetry is None:
        return [(x, [x], f.labels[x]) for x in f.points]
    classes: dict = {}
    for x in f.points:
        classes.setdefault(orbit_key(x, f.r, symmetry), []).append(x)
    out = []
    for members in classes.values():
        labels = {f.labels[x] for x in members}
        if len(labels) != 1:
            raise ValueError(f"{f!r} is not invariant under its declared symmetry")
        out.append((members[0], members, labels.pop()))
    out.sort(key=lambda c: c[0])
    return out


def _moment_rows(f: PromiseFunction, d: int, classes, symmetry):
    """Sparse coefficient of each class in each basis row, plus the basis labels."""
    if symmetry is not None:
        keys = orbit_keys(f.n, f.r, d, symmetry)
        index = {k: i for i, k in enumerate(keys)}
        rows = [dict() for _ in keys]
        for c, (rep, _, _) in enumerate(classes):
            for key, hits in orbit_hits(rep, d, f.r, symmetry).items():
                rows[index[key]][c] = hits
        return keys, rows
    # distinct-row monomials avoiding column 1 span everything on D_{n,r}
    index: dict = {}
    basis: list = []
    rows: list = []
    for c, (x, _, _) in enumerate(classes):
        for t in range(d + 1):
            for sub in itertools.combinations(range(f.n), t):
                if any(x[i] == 1 for i in sub):
                    continue
                m = Monomial(tuple((i + 1, x[i]) for i in sub))
                if m not in index:
                    index[m] = len(basis)
                    basis.append(m)
                    rows.append({})
                rows[index[m]][c] = 1
    order = sorted(range(len(basis)), key=lambda i: basis[i])
    return [basis[i] for i in order], [rows[i] for i in order]


def min_error_at_degree(f: PromiseFunction, d: int, sided: str = TWO_SIDED, *,
                        use_symmetry: bool = True) -> LPResult:
    """Least error of a degree-<=d approximant to f, with optimal primal and dual."""
    sided = _sided(sided)
    if not 0 <= d <= f.n:
        raise ValueError(f"degree {d} outside [0, {f.n}]")
    if len(f) == 0:
        raise ValueError("empty promise domain")
    symmetry = f.symmetry if use_symmetry else None
    classes = _point_classes(f, symmetry)
    basis, moment_rows = _moment_rows(f, d, classes, symmetry)

    # columns: u_c for every class, v_c unless one-sided on a positive class
    columns = []
    for c, (_, _, label) in enumerate(classes):
        columns.append((c, 1))
        if not (sided == ONE_SIDED and label == 1):
            columns.append((c, -1))
    check_size((len(basis) + 1) * (len(columns) + len(basis) + 1), "LP tableau")

    col_of = {}
    for j, (c, sign) in enumerate(columns):
        col_of.setdefault(c, []).append((j, sign))
    A = []
    for row in moment_rows:
        sparse = {}
        for c, coef in row.items():
            for j, sign in col_of[c]:
                sparse[j] = Fraction(sign * coef)
        A.append(sparse)
    A.append({j: Fraction(1) for j in range(len(columns))})
    b = [Fraction(0)] * len(moment_rows) + [Fraction(1)]
    obj = [Fraction(sign * classes[c][2]) for c, sign in columns]

    sol = solve_standard_form(A, b, obj)
    if sol.status != OPTIMAL:
        raise RuntimeError(f"LP for {f!r} at degree {d} ended {sol.status}")
    log.debug("%r d=%d %s: eps*=%s after %d pivots", f, d, sided, sol.objective, sol.pivots)

    mass = [Fraction(0)] * len(classes)
    for j, (c, sign) in enumerate(columns):
        mass[c] += sign * sol.x[j]
    values = {}
    for c, (_, members, _) in enumerate(classes):
        if mass[c]:
            share = mass[c] / len(members)
            for x in members:
                values[x] = share
    dual = DualWitness(f.n, f.r, values, d + 1, sol.objective)
    coefficients = list(zip(basis, sol.y[:-1]))
    if sol.y[-1] != sol.objective:
        raise AssertionError("norm-row multiplier differs from the LP optimum")
    return LPResult(f, d, sol.objective, sided, symmetry, dual, coefficients, sol.pivots)


def extract_dual(lp: LPResult) -> DualWitness:
    """The LP's optimal psi scaled to unit L1 norm; orth >= d+1 and <f,psi> = eps*.

    When eps* = 0 the optimal psi is 0 and there is nothing to extract.
    """
    if lp.eps_star == 0:
        raise ValueError(f"degree {lp.degree_d} represents the function exactly; no dual witness")
    return lp.dual.normalized()


@dataclass
class DegreeResult:
    degree: int
    eps: Fraction
    certificate: LPResult
    below: LPResult | None
    trace: list = field(default_factory=list)

    @property
    def witness(self) -> DualWitness | None:
        """Dual witness proving the degree cannot be lowered (None when degree is 0)."""
        return None if self.below is None else extract_dual(self.below)


def approx_degree(f: PromiseFunction, eps, sided: str = TWO_SIDED, *,
                  use_symmetry: bool = True) -> DegreeResult:
    """Least d with eps*(d) <= eps, scanning d = 0, 1, 2, ..."""
    eps = Fraction(eps)
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError("eps must lie in [0, 1/2)")
    trace = []
    previous = None
    for d in range(f.n + 1):
        res = min_error_at_degree(f, d, sided, use_symmetry=use_symmetry)
        trace.append(res)
        if res.eps_star <= eps:
            return DegreeResult(d, eps, res, previous, trace)
        previous = res
    raise AssertionError("degree n always represents f exactly")
