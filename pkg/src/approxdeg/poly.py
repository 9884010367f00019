"""Exact polynomials over the matrix variables x_{i,j} restricted to D_{n,r}.

On D_{n,r} we have x_{i,j}^2 = x_{i,j} and x_{i,j} x_{i,j'} = 0 for j != j', so every
polynomial reduces, without raising its degree, to a combination of monomials whose
variables sit in pairwise distinct rows.  Those monomials are the basis used here.

Canonical monomial order: by degree, then lexicographically by the sorted
(row, column) pairs.  Rows and columns are 1-based.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from ._config import SizeError, check_size
from .functions import ROWS, ROWS_COLS, DomainPoint, format_rational, parse_rational

INF = math.inf
NEG_INF = -math.inf


@dataclass(frozen=True)
class Monomial:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.pairs))
        rows = [i for i, _ in pairs]
        if len(set(rows)) != len(rows):
            raise ValueError(f"monomial {pairs} uses a row twice and vanishes on D_(n,r)")
        object.__setattr__(self, "pairs", pairs)

    @property
    def degree(self) -> int:
        return len(self.pairs)

    def __call__(self, x: DomainPoint) -> int:
        return int(all(x[i - 1] == j for i, j in self.pairs))

    def sort_key(self):
        return (len(self.pairs), self.pairs)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        if not self.pairs:
            return "1"
        return "*".join(f"x{i},{j}" for i, j in self.pairs)


ONE = Monomial(())


def raw_monomial_value(pairs: Iterable[tuple[int, int]], x) -> int:
    """Value of a product of variables, with no distinct-row requirement."""
    return int(all(x[i - 1] == j for i, j in pairs))


@dataclass(frozen=True, eq=False)
class SparsePolynomial:
    n: int
    r: int
    coeffs: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.coeffs.items():
            c = Fraction(c)
            if c != 0:
                clean[m] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def degree(self):
        if not self.coeffs:
            return NEG_INF
        return max(m.degree for m in self.coeffs)

    def __call__(self, x) -> Fraction:
        return eval_poly(self, x)

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return (self.n, self.r, self.coeffs) == (other.n, other.r, other.coeffs)

    def __add__(self, other):
        out = defaultdict(Fraction, self.coeffs)
        for m, c in other.coeffs.items():
            out[m] += c
        return SparsePolynomial(self.n, self.r, out)

    def scale(self, c) -> "SparsePolynomial":
        c = Fraction(c)
        return SparsePolynomial(self.n, self.r, {m: c * v for m, v in self.coeffs.items()})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "terms": [
                {"pairs": [list(p) for p in m.pairs], "coeff": format_rational(c)}
                for m, c in self.coeffs.items()
            ],
        }

    @classmethod
    def from_json(cls, data) -> "SparsePolynomial":
        coeffs = defaultdict(Fraction)
        for term in data["terms"]:
            coeffs[Monomial(tuple(tuple(p) for p in term["pairs"]))] += parse_rational(term["coeff"])
        return cls(int(data["n"]), int(data["r"]), coeffs)


def constant(n: int, r: int, c) -> SparsePolynomial:
    return SparsePolynomial(n, r, {ONE: Fraction(c)})


def eval_poly(p: SparsePolynomial, x) -> Fraction:
    x = tuple(x)
    if len(x) != p.n:
        raise ValueError(f"point of length {len(x)} for a polynomial on {p.n} rows")
    total = Fraction(0)
    for m, c in p.coeffs.items():
        if m(x):
            total += c
    return total


def count_monomials(n: int, r: int, d: int) -> int:
    return sum(math.comb(n, t) * r**t for t in range(min(d, n) + 1))


def enumerate_monomials(n: int, r: int, d: int, *, reduced: bool = False) -> list[Monomial]:
    """All distinct-row monomials of degree <= d in canonical order.

    With ``reduced`` the monomials touching column 1 are left out.  What remains is a
    basis with no redundancy on D_{n,r}, because x_{i,1} = 1 - sum_{j>1} x_{i,j} there.
    """
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    cols = range(2 if reduced else 1, r + 1)
    out = []
    for t in range(d + 1):
        for rows in itertools.combinations(range(1, n + 1), t):
            for assign in itertools.product(cols, repeat=t):
                out.append(Monomial(tuple(zip(rows, assign))))
    return sorted(out)


# ---------------------------------------------------------------------------
# moments and orthogonal content


def _support(psi) -> dict:
    values = psi if isinstance(psi, Mapping) else psi.values
    return {tuple(x): Fraction(v) for x, v in values.items() if v != 0}


def moments(psi, t: int) -> dict:
    """Sum of psi(x)*m(x) for every degree-t monomial m hit by the support of psi.

    Keys are (rows, columns) tuples; monomials missing from the result have moment 0.
    """
    out = defaultdict(Fraction)
    for x, v in _support(psi).items():
        for rows in itertools.combinations(range(len(x)), t):
            out[(rows, tuple(x[i] for i in rows))] += v
    return out


def orth(psi, *, limit: int | None = None):
    """Orthogonal content: least degree of a monomial with a nonzero moment, else inf.

    With ``limit`` set, stops after degree ``limit - 1`` and returns ``limit`` when all
    lower moments vanish (that is, the answer is only known to be >= limit).
    """
    support = _support(psi)
    if not support:
        return INF
    n = len(next(iter(support)))
    top = n if limit is None else min(n, limit - 1)
    for t in range(top + 1):
        if any(v != 0 for v in moments(support, t).values()):
            return t
    if limit is not None and limit - 1 < n:
        return limit
    return INF


# ---------------------------------------------------------------------------
# symmetry: row permutations (sigma) and column permutations (tau)


@dataclass(frozen=True)
class GroupElement:
    sigma: tuple[int, ...]
    tau: tuple[int, ...]

    def __post_init__(self):
        for perm in (self.sigma, self.tau):
            if sorted(perm) != list(range(1, len(perm) + 1)):
                raise ValueError(f"{perm} is not a permutation")

    def act_point(self, x: DomainPoint) -> DomainPoint:
        """Row i of the result is row sigma^{-1}(i) of x with its column relabelled by tau."""
        out = [0] * len(x)
        for i, c in enumerate(x, start=1):
            out[self.sigma[i - 1] - 1] = self.tau[c - 1]
        return tuple(out)

    def act_monomial(self, m: Monomial) -> Monomial:
        return Monomial(tuple((self.sigma[i - 1], self.tau[j - 1]) for i, j in m.pairs))


def group_elements(n: int, r: int, symmetry: str = ROWS_COLS):
    ident_cols = [tuple(range(1, r + 1))]
    col_perms = itertools.permutations(range(1, r + 1)) if symmetry == ROWS_COLS else ident_cols
    col_perms = list(col_perms)
    for sigma in itertools.permutations(range(1, n + 1)):
        for tau in col_perms:
            yield GroupElement(sigma, tau)


def orbit_key(columns: Iterable[int], r: int, symmetry: str):
    """Orbit label of a monomial (or point) from the columns it uses, one per row."""
    counts = Counter(columns)
    if symmetry == ROWS_COLS:
        return tuple(sorted(counts.values(), reverse=True))
    if symmetry == ROWS:
        return tuple(counts.get(j, 0) for j in range(1, r + 1))
    raise ValueError(f"unknown symmetry {symmetry!r}")


def monomial_key(m: Monomial, r: int, symmetry: str):
    return orbit_key((j for _, j in m.pairs), r, symmetry)


def key_degree(key) -> int:
    return sum(key)


def orbit_size(key, n: int, r: int, symmetry: str) -> int:
    """Number of distinct-row monomials with the given orbit key."""
    t = key_degree(key)
    if t > n:
        return 0
    if symmetry == ROWS:
        return math.comb(n, t) * math.factorial(t) // math.prod(math.factorial(c) for c in key)
    parts = [c for c in key if c > 0]
    p = len(parts)
    if p > r:
        return 0
    blocks = math.factorial(t) // math.prod(math.factorial(c) for c in parts)
    blocks //= math.prod(math.factorial(v) for v in Counter(parts).values())
    return math.comb(n, t) * blocks * math.perm(r, p)


def _partitions(t: int, max_part: int | None = None, max_len: int | None = None):
    max_part = t if max_part is None else max_part
    if t == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(t, max_part), 0, -1):
        rest_len = None if max_len is None else max_len - 1
        for rest in _partitions(t - first, first, rest_len):
            yield (first,) + rest


def _compositions(t: int, r: int):
    if r == 1:
        yield (t,)
        return
    for first in range(t, -1, -1):
        for rest in _compositions(t - first, r - 1):
            yield (first,) + rest


def orbit_keys(n: int, r: int, d: int, symmetry: str) -> list:
    """Orbit labels of all distinct-row monomials of degree <= d, canonical order."""
    keys = []
    for t in range(min(d, n) + 1):
        if symmetry == ROWS_COLS:
            found = list(_partitions(t, max_len=r))
        else:
            found = list(_compositions(t, r))
        keys.extend(sorted(found, reverse=True))
    return keys


def orbit_representative(key, symmetry: str) -> Monomial:
    # a partition and a column-count vector are both read as "size rows in column col"
    pairs = []
    row = 1
    for col, size in enumerate(key, start=1):
        for _ in range(size):
            pairs.append((row, col))
            row += 1
    return Monomial(tuple(pairs))


def orbit_hits(x: DomainPoint, d: int, r: int, symmetry: str) -> Counter:
    """For each orbit key, the number of monomials of that orbit with m(x) = 1 (degree <= d)."""
    out = Counter()
    for t in range(min(d, len(x)) + 1):
        for rows in itertools.combinations(range(len(x)), t):
            out[orbit_key((x[i] for i in rows), r, symmetry)] += 1
    return out


@lru_cache(maxsize=32)
def _members_by_key(n: int, r: int, t: int, symmetry: str):
    check_size(math.comb(n, t) * r**t, "monomial orbit expansion")
    groups = defaultdict(list)
    for rows in itertools.combinations(range(1, n + 1), t):
        for assign in itertools.product(range(1, r + 1), repeat=t):
            m = Monomial(tuple(zip(rows, assign)))
            groups[monomial_key(m, r, symmetry)].append(m)
    return dict(groups)


def orbit_members(key, n: int, r: int, symmetry: str) -> list[Monomial]:
    return _members_by_key(n, r, key_degree(key), symmetry).get(key, [])


def orbit_sum(key, n: int, r: int, symmetry: str) -> SparsePolynomial:
    return SparsePolynomial(n, r, {m: Fraction(1) for m in orbit_members(key, n, r, symmetry)})


def orbit_basis(n: int, r: int, d: int, symmetry: str = ROWS_COLS) -> list[SparsePolynomial]:
    """One orbit-sum polynomial per orbit of monomials of degree <= d."""
    return [orbit_sum(key, n, r, symmetry) for key in orbit_keys(n, r, d, symmetry)]


def symmetrize(p: SparsePolynomial, symmetry: str = ROWS_COLS) -> SparsePolynomial:
    """Exact average of p(sigma x tau) over all row and column permutations.

    The group average of a monomial equals the uniform average over its orbit
    (orbit-stabilizer), which is how it is computed.
    """
    if symmetry == ROWS_COLS and p.n != p.r:
        raise ValueError("symmetrization over rows and columns needs square matrices")
    if p.n > 5:
        raise SizeError("exact symmetrization is limited to n <= 5")
    out = defaultdict(Fraction)
    for m, c in p.coeffs.items():
        members = orbit_members(monomial_key(m, p.r, symmetry), p.n, p.r, symmetry)
        share = c / len(members)
        for mm in members:
            out[mm] += share
    return SparsePolynomial(p.n, p.r, out)


def expand_combination(terms, n: int, r: int, symmetry: str | None) -> SparsePolynomial:
    """Sum of coeff * basis_element, where basis elements are monomials or orbit keys."""
    out = defaultdict(Fraction)
    for basis, c in terms:
        if c == 0:
            continue
        if symmetry is None:
            out[basis] += c
        else:
            for m in orbit_members(basis, n, r, symmetry):
                out[m] += c
    return SparsePolynomial(n, r, out)
