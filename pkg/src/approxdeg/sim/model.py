"""Permutation testing by sampling plus Grover search, simulated classically.

The algorithm on phi: [n] -> [n] queries a uniform s-subset S of the rows, rejects if
phi is not injective on S, and otherwise runs R = ceil(log_3(1/eps)) Grover searches
over the remaining rows for some i with phi(i) in phi(S).  A marked row found by a
search is verified with one more query and the algorithm rejects.  Permutations have
no marked rows, so they are never rejected.

Grover is modelled through its closed-form success probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..functions import as_fraction, image_size


@dataclass(frozen=True)
class AlgoParams:
    n: int
    alpha: Fraction
    s: int
    eps: Fraction
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if not 1 <= self.s <= self.n:
            raise ValueError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")
        if not 0 < self.eps <= Fraction(1, 3):
            raise ValueError("need 0 < eps <= 1/3")
        if not 0 < self.alpha < 1:
            raise ValueError("need 0 < alpha < 1")

    @property
    def searches(self) -> int:
        return num_searches(self.eps)


@dataclass(frozen=True)
class SimReport:
    trials: int
    yes_error_rate: Fraction
    no_error_rate: Fraction
    mean_queries: float
    max_queries: int
    params: AlgoParams


def num_searches(eps) -> int:
    """Least R with 3^-R <= eps, computed exactly."""
    eps = as_fraction(eps)
    R = 0
    while Fraction(1, 3**R) > eps:
        R += 1
    return R


def grover_success_prob(N: int, M: int, t: int) -> float:
    """sin^2((2t+1) asin(sqrt(M/N))): chance that t Grover iterations return a marked item."""
    if not 1 <= M <= N or t < 0:
        raise ValueError("need 1 <= M <= N and t >= 0")
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * t + 1) * theta) ** 2


def marked_lower_bound(s: int, alpha) -> int:
    """Marked rows the search budget is tuned for: ceil((1-alpha) s / 2), at least 1."""
    return max(1, math.ceil((1 - as_fraction(alpha)) * s / 2))


def iteration_count(n: int, s: int, M: int, alpha) -> int:
    """Grover iterations per search.

    The budget floor((pi/4) sqrt((n-s)/M_lb)) is fixed by (n, s, alpha) alone, so it is
    spent identically on permutations, where M = 0.  When M is larger the known-M count
    floor((pi/4) sqrt((n-s)/M)) is used, which is never larger than the budget.
    """
    N = n - s
    if N <= 0:
        return 0
    budget = math.floor(math.pi / 4 * math.sqrt(N / marked_lower_bound(s, alpha)))
    if M <= 0:
        return budget
    return min(budget, math.floor(math.pi / 4 * math.sqrt(N / M)))


def max_query_bound(n: int, s: int, eps) -> int:
    """s + R(floor((pi/4) sqrt(n-s)) + 1), plus the single verification query."""
    return s + num_searches(eps) * (math.floor(math.pi / 4 * math.sqrt(n - s)) + 1) + 1


# ---------------------------------------------------------------------------
# instances


def sample_yes_instance(n: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform permutation of [n], as a 1-based tuple."""
    if n < 2:
        raise ValueError("need n >= 2")
    return tuple(int(v) + 1 for v in rng.permutation(n))


def sample_no_instance(n: int, alpha, rng: np.random.Generator) -> tuple[int, ...]:
    """Mapping with image exactly floor(alpha*n).

    A uniform column set T is covered once by m = |T| rows, the other rows take uniform
    values in T, and the rows are shuffled.  Rejection sampling of a uniform surjection
    onto T is hopeless here: the acceptance rate decays exponentially in n.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    m = math.floor(as_fraction(alpha) * n)
    if m < 1:
        raise ValueError("floor(alpha*n) must be at least 1")
    T = rng.choice(n, size=m, replace=False) + 1
    values = np.concatenate([T, T[rng.integers(0, m, size=n - m)]])
    rng.shuffle(values)
    return tuple(int(v) for v in values)


@dataclass(frozen=True)
class RunResult:
    accept: bool
    queries: int
    stage: str  # "sample", "search" or "done"


def run_ptp_algorithm(phi, params: AlgoParams, rng: np.random.Generator) -> RunResult:
    """One run of the tester on an explicit mapping phi (1-based values)."""
    phi = tuple(int(v) for v in phi)
    n = params.n
    if len(phi) != n or not all(1 <= v <= n for v in phi):
        raise ValueError(f"phi must map [{n}] to [{n}]")
    img = image_size(phi)
    if not (img == n or img <= params.alpha * n):
        raise ValueError(f"image size {img} is outside the promise for alpha={params.alpha}")

    s = params.s
    S = rng.choice(n, size=s, replace=False)
    seen = {phi[i] for i in S}
    queries = s
    if len(seen) < s:
        return RunResult(False, queries, "sample")
    N = n - s
    if N == 0:
        return RunResult(True, queries, "done")
    in_S = np.zeros(n, dtype=bool)
    in_S[S] = True
    M = sum(1 for i in range(n) if not in_S[i] and phi[i] in seen)
    t = iteration_count(n, s, M, params.alpha)
    p = grover_success_prob(N, M, t) if M else 0.0
    for _ in range(params.searches):
        queries += t + 1
        if rng.random() < p:
            return RunResult(False, queries + 1, "search")
    return RunResult(True, queries, "done")
