"""Exact two-phase simplex over the rationals with Bland's rule.

Each tableau row is stored as a list of Python ints plus one positive int denominator,
kept reduced by the gcd of the row.  Rows with a zero in the pivot column are left
untouched by a pivot, which matters for the sparse 0/1 moment matrices solved here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPSolution:
    status: str
    objective: Fraction | None = None
    x: list[Fraction] = field(default_factory=list)
    y: list[Fraction] = field(default_factory=list)
    basis: list[int] = field(default_factory=list)
    pivots: int = 0


def _lcm_of_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


class _Tableau:
    def __init__(self, rows: list[list[int]], dens: list[int], basis: list[int]):
        self.rows = rows
        self.dens = dens
        self.basis = basis
        self.pivots = 0

    @staticmethod
    def _reduce(nums: list[int], den: int):
        g = math.gcd(den, *nums)
        if g > 1:
            nums = [a // g for a in nums]
            den //= g
        return nums, den

    def pivot(self, r: int, q: int, obj: list):
        nums = self.rows[r]
        p = nums[q]
        # pivot row divided by its pivot entry: values nums/p
        if p < 0:
            nums, p = [-a for a in nums], -p
        nums, p = self._reduce(nums, p)
        self.rows[r], self.dens[r] = nums, p
        for i in range(len(self.rows)):
            if i == r:
                continue
            self.rows[i], self.dens[i] = self._eliminate(self.rows[i], self.dens[i], nums, p, q)
        obj[0], obj[1] = self._eliminate(obj[0], obj[1], nums, p, q)
        self.basis[r] = q
        self.pivots += 1

    def _eliminate(self, row, den, prow, pden, q):
        f = row[q]
        if f == 0:
            return row, den
        new = [a * pden - f * b for a, b in zip(row, prow)]
        return self._reduce(new, den * pden)


def _entering(obj_nums: list[int], allowed: int) -> int | None:
    for j in range(allowed):
        if obj_nums[j] > 0:
            return j
    return None


def _leaving(tab: _Tableau, q: int) -> int | None:
    best = None
    best_num = best_den = 0
    for i, row in enumerate(tab.rows):
        a = row[q]
        if a <= 0:
            continue
        rhs = row[-1]
        if best is None:
            take = True
        else:
            lhs_cmp = rhs * best_den
            rhs_cmp = best_num * a
            take = lhs_cmp < rhs_cmp or (lhs_cmp == rhs_cmp and tab.basis[i] < tab.basis[best])
        if take:
            best, best_num, best_den = i, rhs, a
    return best


def _run(tab: _Tableau, obj: list, allowed: int) -> str:
    while True:
        q = _entering(obj[0], allowed)
        if q is None:
            return OPTIMAL
        r = _leaving(tab, q)
        if r is None:
            return UNBOUNDED
        tab.pivot(r, q, obj)


def solve_standard_form(
    A: Sequence[Mapping[int, Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> LPSolution:
    """Maximize c.x subject to A x = b and x >= 0, exactly.

    ``A`` is a list of sparse rows (column index -> coefficient).  The returned ``y``
    is an optimal solution of the dual (minimize b.y subject to A^T y >= c).
    """
    m = len(A)
    N = len(c)
    A = [dict(row) for row in A]
    b = [Fraction(v) for v in b]
    flipped = [False] * m
    for i in range(m):
        if b[i] < 0:
            A[i] = {j: -v for j, v in A[i].items()}
            b[i] = -b[i]
            flipped[i] = True

    width = N + m + 1
    rows, dens = [], []
    for i in range(m):
        scale = _lcm_of_denominators(list(A[i].values()) + [b[i]])
        nums = [0] * width
        for j, v in A[i].items():
            nums[j] = int(Fraction(v) * scale)
        nums[N + i] = scale
        nums[-1] = int(b[i] * scale)
        nums, den = _Tableau._reduce(nums, scale)
        rows.append(nums)
        dens.append(den)
    tab = _Tableau(rows, dens, [N + i for i in range(m)])

    # phase 1: maximize -(sum of artificials); reduced costs are the column sums of A
    phase1 = [Fraction(0)] * width
    for i in range(m):
        for j, v in A[i].items():
            phase1[j] += v
        phase1[-1] += b[i]
    obj = list(_integer_row(phase1))
    _run(tab, obj, N + m)
    if obj[0][-1] != 0:  # obj rhs holds minus the objective, i.e. the artificial total
        return LPSolution(INFEASIBLE, pivots=tab.pivots)

    for i in range(m):
        if tab.basis[i] >= N:
            row = tab.rows[i]
            for j in range(N):
                if row[j] != 0:
                    tab.pivot(i, j, obj)
                    break

    # phase 2 reduced costs: c_j - c_B B^{-1} A_j for every column, rhs = -z
    c = [Fraction(v) for v in c]
    reduced = [Fraction(0)] * width
    for j in range(N):
        reduced[j] = c[j]
    for i, var in enumerate(tab.basis):
        cb = c[var] if var < N else Fraction(0)
        if cb == 0:
            continue
        row, den = tab.rows[i], tab.dens[i]
        for j, a in enumerate(row):
            if a:
                reduced[j] -= cb * Fraction(a, den)
    obj = list(_integer_row(reduced))
    status = _run(tab, obj, N)
    if status != OPTIMAL:
        return LPSolution(status, pivots=tab.pivots)

    x = [Fraction(0)] * N
    for i, var in enumerate(tab.basis):
        if var < N:
            x[var] = Fraction(tab.rows[i][-1], tab.dens[i])
    obj_nums, obj_den = obj
    y = [-Fraction(obj_nums[N + k], obj_den) for k in range(m)]
    y = [-v if flip else v for v, flip in zip(y, flipped)]
    objective = -Fraction(obj_nums[-1], obj_den)
    return LPSolution(OPTIMAL, objective, x, y, list(tab.basis), tab.pivots)


def _integer_row(values: list[Fraction]):
    scale = _lcm_of_denominators(values)
    nums = [int(v * scale) for v in values]
    return _Tableau._reduce(nums, scale)
