"""Injective, label-preserving embeddings of one promise function into another.

Every target row is wired either to a fixed column or to a copy of one source row
(with a column offset).  Restricting a degree-t target polynomial along such a wiring
yields a degree-<=t source polynomial, which is what makes witness pushforward sound.
"""
from __future__ import annotations

from dataclasses import dataclass

from .functions import (
    DomainPoint,
    PromiseFunction,
    as_fraction,
    compose_and,
    image_size,
    make_ed,
    make_ed_k,
    make_and,
    make_ptp,
    make_surj,
)

BLOCK_DIAGONAL = "block-diagonal"
DUPLICATE_ROW = "duplicate-row"
IDENTITY_PAD = "identity-pad"
ADD_IDENTITY_BLOCK = "add-identity-block"


class EmbeddingError(ValueError):
    pass


# A wire is ("copy", source_row, column_offset) or ("fixed", column); rows are 0-based here.
Wire = tuple


@dataclass(frozen=True, eq=False)
class Embedding:
    source: PromiseFunction
    target: PromiseFunction
    kind: str
    wiring: tuple[Wire, ...]

    def inject(self, x: DomainPoint) -> DomainPoint:
        out = []
        for wire in self.wiring:
            if wire[0] == "copy":
                out.append(x[wire[1]] + wire[2])
            else:
                out.append(wire[1])
        return tuple(out)

    def check(self) -> None:
        """Exhaustively check domain membership, label preservation and injectivity."""
        if len(self.wiring) != self.target.n:
            raise EmbeddingError("wiring length differs from the target row count")
        seen = {}
        for x in self.source.points:
            y = self.inject(x)
            if y not in self.target.labels:
                raise EmbeddingError(
                    f"{x} maps to {y}, outside the promise of {self.target!r}"
                )
            if self.target.labels[y] != self.source.labels[x]:
                raise EmbeddingError(f"label changes at {x} -> {y}")
            if y in seen:
                raise EmbeddingError(f"{seen[y]} and {x} both map to {y}")
            seen[y] = x

    @property
    def copied_rows(self) -> dict[int, list[int]]:
        rows: dict[int, list[int]] = {}
        for t, wire in enumerate(self.wiring):
            if wire[0] == "copy":
                rows.setdefault(wire[1], []).append(t)
        return rows


def _make(source, target, kind, wiring) -> Embedding:
    e = Embedding(source, target, kind, tuple(wiring))
    e.check()
    return e


def identity_embedding(f: PromiseFunction) -> Embedding:
    return _make(f, f, BLOCK_DIAGONAL, [("copy", i, 0) for i in range(f.n)])


def embed_block_diagonal(
    inner: PromiseFunction,
    k: int,
    pad_identity: int = 0,
    *,
    outer_alpha=None,
    target: PromiseFunction | None = None,
) -> Embedding:
    """Embed AND_k o inner (AND_{k,alpha} o inner if ``outer_alpha``) block-diagonally.

    Block b occupies rows b*m.. and columns b*s..; the ``pad_identity`` extra rows are
    fixed to fresh columns on the diagonal.  For AND-family inner functions the blocks
    share the two columns and padding rows are fixed to bit 1.
    """
    if k < 1 or pad_identity < 0:
        raise ValueError("need k >= 1 and pad_identity >= 0")
    source = compose_and(inner, k, outer_alpha)
    m, s = inner.n, inner.r
    n_big = k * m + pad_identity
    is_and = inner.family in ("AND", "AND_restricted")
    if is_and:
        wiring = [("copy", i, 0) for i in range(k * m)]
        wiring += [("fixed", 2)] * pad_identity
        r_big = 2
    else:
        wiring = [("copy", b * m + i, b * s) for b in range(k) for i in range(m)]
        wiring += [("fixed", k * s + j + 1) for j in range(pad_identity)]
        r_big = k * s + pad_identity
    if target is None:
        target = _default_block_target(inner, n_big, r_big, outer_alpha)
    if target.n != n_big or target.r < r_big:
        raise EmbeddingError(
            f"target {target!r} cannot hold {k} blocks of {inner!r} plus {pad_identity} pad rows"
        )
    return _make(source, target, BLOCK_DIAGONAL, wiring)


def _default_block_target(inner, n_big, r_big, outer_alpha):
    fam = inner.family
    if fam == "AND" and outer_alpha is None:
        return make_and(n_big)
    if fam == "ED" and outer_alpha is None:
        return make_ed(n_big, r_big)
    if fam == "EDk" and outer_alpha is None and n_big == r_big:
        return make_ed_k(n_big, inner.param("k"))
    if fam == "SURJ" and outer_alpha is None:
        return make_surj(n_big, r_big)
    if fam == "PTP" and outer_alpha is not None and n_big == r_big and 2 * inner.param("alpha") < 1:
        return make_ptp(n_big, 2 * inner.param("alpha"))
    raise EmbeddingError(f"no default target for blocks of {inner!r}; pass target=")


def embed_surj_duplicate_row(f: PromiseFunction) -> Embedding:
    """SURJ_{n,r} into SURJ_{n+1,r}: the new last row repeats row n."""
    _require(f, "SURJ")
    wiring = [("copy", i, 0) for i in range(f.n)] + [("copy", f.n - 1, 0)]
    return _make(f, make_surj(f.n + 1, f.r), DUPLICATE_ROW, wiring)


def embed_surj_identity_block(f: PromiseFunction) -> Embedding:
    """SURJ_{n,r} into SURJ_{n+1,r+1}: block-diagonal with blocks x and a single 1."""
    _require(f, "SURJ")
    wiring = [("copy", i, 0) for i in range(f.n)] + [("fixed", f.r + 1)]
    return _make(f, make_surj(f.n + 1, f.r + 1), ADD_IDENTITY_BLOCK, wiring)


def embed_ptp_pad(m: int, n: int, alpha, source: PromiseFunction | None = None,
                  target: PromiseFunction | None = None) -> Embedding:
    """PTP_{m,alpha} into PTP_{n, (m/n)alpha + (n-m)/n} by fixing rows m+1..n to the identity."""
    alpha = as_fraction(alpha)
    if m > n:
        raise ValueError("need m <= n")
    source = make_ptp(m, alpha) if source is None else source
    if target is None:
        target = make_ptp(n, alpha * m / n + as_fraction(n - m) / n)
    wiring = [("copy", i, 0) for i in range(m)] + [("fixed", i + 1) for i in range(m, n)]
    return _make(source, target, IDENTITY_PAD, wiring)


def negative_image_bound_holds(inner: PromiseFunction, k: int, beta) -> bool:
    """Every negative of AND_{k,beta/2} o PTP_{m,beta/2}, laid out block-diagonally,
    has image size at most beta*n.  Checked point by point."""
    beta = as_fraction(beta)
    source = compose_and(inner, k, beta / 2)
    m = inner.n
    n = k * m
    for x in source.negatives:
        shifted = tuple(c + (i // m) * m for i, c in enumerate(x))
        if image_size(shifted) > beta * n:
            return False
    return True


def _require(f, family):
    if f.family != family:
        raise EmbeddingError(f"expected a {family} instance, got {f!r}")
