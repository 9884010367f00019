"""Monte-Carlo sweeps of the permutation tester and the cost-exponent fit.

Trial randomness comes from numpy's SeedSequence keyed by
(master seed; kind, n, s, R, block), with kind 0 for permutations and 1 for
far-from-permutation inputs and blocks of BLOCK trials.  Any block can therefore be
regenerated on its own, and parallel or serial runs see the same numbers.

Instances are not materialised.  With S a uniform s-subset of the rows and the
negative instance built as m = floor(alpha*n) cover rows plus n - m rows with uniform
values, only three quantities matter: how many rows of S are cover rows
(hypergeometric), the values of the other sampled rows, and how many unsampled rows
land in phi(S) (binomial).  run_ptp_algorithm on explicit instances is the reference
this shortcut is tested against.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..functions import as_fraction
from .kernels import run_block
from .model import AlgoParams, SimReport, marked_lower_bound, num_searches

BLOCK = 4096
YES, NO = 0, 1

CSV_HEADER = ["n", "alpha", "eps_num", "eps_den", "s", "trials", "yes_err", "no_err",
              "mean_queries", "max_queries"]


def block_rng(seed: int, kind: int, n: int, s: int, R: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(kind, n, s, R, block)))


def draw_block(rng, n: int, m: int, s: int, R: int, alpha, size: int):
    """Randomness for one block: arrays (c, fill, t, p, u) as the kernels expect them."""
    if m == n:
        c = np.full(size, s, dtype=np.int64)
    else:
        c = rng.hypergeometric(m, n - m, s, size=size).astype(np.int64)
    fill = rng.integers(0, m, size=(size, s), dtype=np.int64)
    f = s - c
    q = min(1.0, s / m)
    outside = rng.binomial(n - m - f, q).astype(np.int64) if m < n else np.zeros(size, dtype=np.int64)
    u = rng.random((size, R))
    M = f + outside

    N = n - s
    t = np.zeros(size, dtype=np.int64)
    p = np.zeros(size)
    if N > 0:
        budget = math.floor(math.pi / 4 * math.sqrt(N / marked_lower_bound(s, alpha)))
        pos = M > 0
        known = np.floor(math.pi / 4 * np.sqrt(N / np.maximum(M, 1))).astype(np.int64)
        t = np.where(pos, np.minimum(known, budget), budget).astype(np.int64)
        theta = np.arcsin(np.sqrt(np.minimum(M, N) / N))
        p = np.where(pos, np.sin((2 * t + 1) * theta) ** 2, 0.0)
    else:
        u = u[:, :0]
    return c, fill, t, p, u


def simulate_point(params: AlgoParams, trials: int, *, backend: str | None = None):
    """Run `trials` permutations and `trials` far instances; returns a SimReport."""
    if trials < 1:
        raise ValueError("trials must be positive")
    n, s, alpha = params.n, params.s, params.alpha
    R = num_searches(params.eps)
    m_no = math.floor(alpha * n)
    if m_no < 1:
        raise ValueError("floor(alpha*n) must be at least 1")
    errors = {YES: 0, NO: 0}
    total = 0
    worst = 0
    for kind, m in ((YES, n), (NO, m_no)):
        done = 0
        block = 0
        while done < trials:
            size = min(BLOCK, trials - done)
            rng = block_rng(params.seed, kind, n, s, R, block)
            arrays = draw_block(rng, n, m, s, R, alpha, size)
            reject, queries = run_block(*arrays, s, m, backend=backend)
            errors[kind] += int(reject.sum()) if kind == YES else int((~reject).sum())
            total += int(queries.sum())
            worst = max(worst, int(queries.max()))
            done += size
            block += 1
    return SimReport(
        trials,
        Fraction(errors[YES], trials),
        Fraction(errors[NO], trials),
        total / (2 * trials),
        worst,
        params,
    )


def s_grid(n: int, ratio) -> list[int]:
    """Geometric grid 1, ~g, ~g^2, ... capped at n, rounded and deduplicated."""
    ratio = float(as_fraction(ratio))
    if ratio <= 1:
        raise ValueError("grid ratio must exceed 1")
    out, x = [], 1.0
    while True:
        s = int(round(x))
        if s > n:
            break
        if not out or s > out[-1]:
            out.append(s)
        x *= ratio
    if out[-1] != n:
        out.append(n)
    return out


@dataclass
class SweepResult:
    alpha: Fraction
    reports: list = field(default_factory=list)  # every grid point, in run order
    optimum: dict = field(default_factory=dict)  # (n, eps) -> SimReport or None
    exponents: dict = field(default_factory=dict)  # eps -> fitted slope (or None)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rep in self.reports:
            p = rep.params
            w.writerow([
                p.n, f"{self.alpha.numerator}/{self.alpha.denominator}",
                p.eps.numerator, p.eps.denominator, p.s, rep.trials,
                f"{rep.yes_error_rate.numerator}/{rep.yes_error_rate.denominator}",
                f"{rep.no_error_rate.numerator}/{rep.no_error_rate.denominator}",
                f"{rep.mean_queries:.4f}", rep.max_queries,
            ])
        return buf.getvalue()

    def min_cost(self, n: int, eps) -> float | None:
        rep = self.optimum.get((n, as_fraction(eps)))
        return None if rep is None else rep.mean_queries


def fit_exponent(ns, costs) -> float:
    """Least-squares slope of log(cost) against log(n)."""
    if len(ns) < 2:
        raise ValueError("need at least two sizes to fit")
    slope, _ = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(costs, dtype=float)), 1)
    return float(slope)


def sweep(n_list, alpha, eps_list, trials: int, seed: int = 0, *, grid="5/4",
          backend: str | None = None) -> SweepResult:
    """For each (n, eps) find the cheapest s whose empirical errors are both <= eps."""
    alpha = as_fraction(alpha)
    if trials < 1:
        raise ValueError("trials must be positive")
    result = SweepResult(alpha)
    eps_list = [as_fraction(e) for e in eps_list]
    for eps in eps_list:
        for n in n_list:
            best = None
            for s in s_grid(n, grid):
                if best is not None and s > best.mean_queries:
                    break  # every run costs at least s queries
                rep = simulate_point(AlgoParams(n, alpha, s, eps, seed), trials, backend=backend)
                result.reports.append(rep)
                feasible = rep.yes_error_rate <= eps and rep.no_error_rate <= eps
                if feasible and (best is None or rep.mean_queries < best.mean_queries):
                    best = rep
            result.optimum[(n, eps)] = best
        pts = [(n, result.optimum[(n, eps)].mean_queries) for n in n_list
               if result.optimum[(n, eps)] is not None]
        result.exponents[eps] = fit_exponent(*zip(*pts)) if len(pts) >= 2 else None
    return result
