"""Promise Boolean functions on D_{n,r} and the block compositions built from them.

A domain point is a tuple ``(c_1, ..., c_n)`` with ``1 <= c_i <= r``: row ``i`` of the
n-by-r Boolean matrix has its single 1 in column ``c_i``.  AND-type functions live on
D_{n,2}; column 1 encodes bit 0 and column 2 encodes bit 1.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from ._config import check_size

DomainPoint = tuple[int, ...]

ROWS = "rows"
ROWS_COLS = "rows+cols"


class OutOfPromise(ValueError):
    """A point outside the promise domain was handed to a promise function."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; decimal literals are rejected to keep everything exact."""
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        q = int(den)
        if q == 0:
            raise ZeroDivisionError
        return Fraction(int(num), q)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational literal of the form p/q: {text!r}") from None


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def image_size(x: DomainPoint) -> int:
    return len(set(x))


def column_counts(x: DomainPoint, r: int) -> list[int]:
    counts = [0] * r
    for c in x:
        counts[c - 1] += 1
    return counts


def one_hot(x: DomainPoint, r: int) -> np.ndarray:
    m = np.zeros((len(x), r), dtype=np.int8)
    m[np.arange(len(x)), np.asarray(x) - 1] = 1
    return m


def all_points(n: int, r: int) -> Iterable[DomainPoint]:
    check_size(r**n, f"D_{{{n},{r}}}")
    return itertools.product(range(1, r + 1), repeat=n)


@dataclass(frozen=True, eq=False)
class PromiseFunction:
    family: str
    n: int
    r: int
    labels: Mapping[DomainPoint, int]
    params: tuple = ()
    symmetry: str | None = None
    points: tuple = field(init=False, repr=False)

    def __post_init__(self):
        pts = tuple(sorted(self.labels))
        for x in pts:
            if len(x) != self.n or not all(1 <= c <= self.r for c in x):
                raise ValueError(f"point {x} is not in D_{{{self.n},{self.r}}}")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.labels

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def __repr__(self):
        desc = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"<{self.family} n={self.n} r={self.r} {desc} |dom|={len(self)}>"

    @property
    def name(self) -> str:
        return self.family

    @property
    def positives(self) -> list[DomainPoint]:
        return [x for x in self.points if self.labels[x] == 1]

    @property
    def negatives(self) -> list[DomainPoint]:
        return [x for x in self.points if self.labels[x] == 0]

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def agrees_with(self, other: "PromiseFunction") -> bool:
        """Same dimensions, same domain, same label at every point."""
        return (
            self.n == other.n
            and self.r == other.r
            and self.points == other.points
            and all(self.labels[x] == other.labels[x] for x in self.points)
        )

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "r": self.r,
            "points": [list(x) for x in self.points],
            "labels": [self.labels[x] for x in self.points],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PromiseFunction":
        points = [tuple(int(c) for c in p) for p in data["points"]]
        labels = [int(v) for v in data["labels"]]
        if len(points) != len(labels):
            raise ValueError("points and labels have different lengths")
        if any(v not in (0, 1) for v in labels):
            raise ValueError("labels must be 0 or 1")
        if len(set(points)) != len(points):
            raise ValueError("duplicate points")
        return cls(str(data["family"]), int(data["n"]), int(data["r"]), dict(zip(points, labels)))


def load_function(path) -> PromiseFunction:
    with open(path) as fh:
        return PromiseFunction.from_json(json.load(fh))


def evaluate(f: PromiseFunction, x) -> int:
    x = tuple(x)
    try:
        return f.labels[x]
    except KeyError:
        raise OutOfPromise(f"{x} lies outside the promise domain of {f!r}") from None


def _build(family, n, r, pred_domain, label, params=(), symmetry=None) -> PromiseFunction:
    labels = {}
    for x in all_points(n, r):
        if pred_domain is None or pred_domain(x):
            labels[x] = int(label(x))
    return PromiseFunction(family, n, r, labels, tuple(params), symmetry)


def _weight(x: DomainPoint) -> int:
    return sum(1 for c in x if c == 2)


def make_and(n: int) -> PromiseFunction:
    if n < 1:
        raise ValueError("n must be positive")
    return _build("AND", n, 2, None, lambda x: _weight(x) == n, symmetry=ROWS)


def make_and_restricted(k: int, alpha) -> PromiseFunction:
    """AND_k restricted to inputs of Hamming weight k or at most floor(alpha*k)."""
    alpha = as_fraction(alpha)
    if k < 1:
        raise ValueError("k must be positive")
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    ell = math.floor(alpha * k)
    return _build(
        "AND_restricted",
        k,
        2,
        lambda x: _weight(x) == k or _weight(x) <= ell,
        lambda x: _weight(x) == k,
        params=(("alpha", alpha),),
        symmetry=ROWS,
    )


def make_ed(n: int, r: int | None = None) -> PromiseFunction:
    r = n if r is None else r
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    return _build("ED", n, r, None, lambda x: image_size(x) == n, symmetry=ROWS_COLS)


def make_ed_k(n: int, k: int) -> PromiseFunction:
    """k-element distinctness on D_{n,n}: true iff no column holds k or more ones."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    return _build(
        "EDk",
        n,
        n,
        None,
        lambda x: max(column_counts(x, n)) < k,
        params=(("k", k),),
        symmetry=ROWS_COLS,
    )


def make_surj(n: int, r: int) -> PromiseFunction:
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    return _build("SURJ", n, r, None, lambda x: image_size(x) == r, symmetry=ROWS_COLS)


def make_ptp(n: int, alpha) -> PromiseFunction:
    """Permutation testing: image of size n (true) or at most floor(alpha*n) (false)."""
    alpha = as_fraction(alpha)
    if n < 1 or not 0 < alpha < 1:
        raise ValueError("need n >= 1 and 0 < alpha < 1")
    small = math.floor(alpha * n)
    return _build(
        "PTP",
        n,
        n,
        lambda x: image_size(x) == n or image_size(x) <= small,
        lambda x: image_size(x) == n,
        params=(("alpha", alpha),),
        symmetry=ROWS_COLS,
    )


def _disagreement_with_permutations(x: DomainPoint) -> int:
    """Least number of rows in which x differs from a permutation matrix."""
    n = len(x)
    if n <= 5:
        return min(sum(a != b for a, b in zip(x, perm))
                   for perm in itertools.permutations(range(1, n + 1)))
    # a permutation can keep at most one row per occupied column
    return n - image_size(x)


def make_ptp_star(n: int, delta) -> PromiseFunction:
    """Far-from-permutation variant: a permutation, or differing from every permutation in >= delta*n rows."""
    delta = as_fraction(delta)
    if n < 1 or not 0 < delta < 1:
        raise ValueError("need n >= 1 and 0 < delta < 1")
    dist = {}

    def in_domain(x):
        dist[x] = _disagreement_with_permutations(x)
        return dist[x] == 0 or dist[x] >= delta * n

    return _build(
        "PTP*",
        n,
        n,
        in_domain,
        lambda x: dist[x] == 0,
        params=(("delta", delta),),
        symmetry=ROWS_COLS,
    )


def compose_and(inner: PromiseFunction, k: int, alpha=None) -> PromiseFunction:
    """Block composition AND_k o inner (or AND_{k,alpha} o inner when alpha is given).

    Points of the composition are concatenations of k points of ``inner``, so they live
    in D_{k*m, s} when ``inner`` lives in D_{m,s}.
    """
    if k < 1:
        raise ValueError("k must be positive")
    ell = None
    params = [("k", k)]
    if alpha is not None:
        alpha = as_fraction(alpha)
        if not 0 <= alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")
        ell = math.floor(alpha * k)
        params.append(("alpha", alpha))
    check_size(len(inner) ** k, "composed domain")
    labels = {}
    for blocks in itertools.product(inner.points, repeat=k):
        w = sum(inner.labels[b] for b in blocks)
        if ell is not None and not (w == k or w <= ell):
            continue
        labels[tuple(itertools.chain.from_iterable(blocks))] = int(w == k)
    family = f"AND{'_restricted' if alpha is not None else ''}({inner.family})"
    return PromiseFunction(
        family, k * inner.n, inner.r, labels,
        tuple(params) + (("inner", inner),),
    )


def split_blocks(x: DomainPoint, k: int) -> list[DomainPoint]:
    m = len(x) // k
    return [tuple(x[b * m:(b + 1) * m]) for b in range(k)]


FAMILIES = {
    "and": (make_and, ("n",)),
    "and_restricted": (make_and_restricted, ("n", "alpha")),
    "ed": (make_ed, ("n", "r")),
    "edk": (make_ed_k, ("n", "k")),
    "surj": (make_surj, ("n", "r")),
    "ptp": (make_ptp, ("n", "alpha")),
    "ptp_star": (make_ptp_star, ("n", "delta")),
}
