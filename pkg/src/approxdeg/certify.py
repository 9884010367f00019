"""Dual-witness certificates: verification, combiners, and lower-bound pipelines.

A witness psi certifies deg_eps(f) >= d when <f,psi> > eps*||psi||_1 and every moment
of psi of degree < d vanishes.  Checking that needs only exact arithmetic on the
witness itself, never an LP solver.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .embeddings import (
    Embedding,
    EmbeddingError,
    embed_block_diagonal,
    embed_ptp_pad,
    embed_surj_duplicate_row,
    embed_surj_identity_block,
)
from .functions import (
    PromiseFunction,
    as_fraction,
    compose_and,
    format_rational,
    make_and,
    make_and_restricted,
    make_ed,
    make_ed_k,
    make_ptp,
    make_ptp_star,
    make_surj,
    parse_rational,
)
from .lp import DualWitness, approx_degree, extract_dual
from .poly import INF, orth


class PipelineError(ValueError):
    """Parameters for which the lower-bound construction does not apply."""


@dataclass
class VerifyReport:
    passed: bool
    correlation: Fraction
    l1: Fraction
    orth: float
    eps: Fraction
    degree: int
    reason: str = ""
    offending_point: tuple | None = None

    def __bool__(self):
        return self.passed

    def lines(self) -> list[str]:
        orth_text = "inf" if self.orth == INF else str(self.orth)
        return [
            f"correlation={format_rational(self.correlation)}",
            f"l1={format_rational(self.l1)}",
            f"orth={orth_text}",
            f"eps={format_rational(self.eps)}",
            f"degree={self.degree}",
            f"result={'PASS' if self.passed else 'FAIL'}" + (f" ({self.reason})" if self.reason else ""),
        ]


def verify_witness(psi: DualWitness, f: PromiseFunction, eps, d: int) -> VerifyReport:
    """Exact check of <f,psi> > eps*||psi||_1 and orth(psi) >= d."""
    eps = as_fraction(eps)
    for x in psi.values:
        if x not in f.labels:
            return VerifyReport(False, Fraction(0), psi.l1, 0, eps, d,
                                "witness is nonzero outside the promise domain", x)
    corr = psi.correlation(f)
    l1 = psi.l1
    o = orth(psi)
    if not corr > eps * l1:
        return VerifyReport(False, corr, l1, o, eps, d, "correlation does not exceed eps*||psi||_1")
    if o < d:
        return VerifyReport(False, corr, l1, o, eps, d, f"a moment of degree {o} < {d} is nonzero")
    return VerifyReport(True, corr, l1, o, eps, d)


def trivial_witness(f: PromiseFunction) -> DualWitness:
    """Point mass on the first positive input: certifies degree >= 0 for every eps < 1."""
    pos = f.positives
    if not pos:
        raise PipelineError(f"{f!r} has no positive inputs, so no witness exists")
    return DualWitness(f.n, f.r, {pos[0]: Fraction(1)}, 0, Fraction(0))


def tensor_power(psi: DualWitness, k: int, base_eps) -> DualWitness:
    """psi^{(x)k}(x_1..x_k) = prod psi(x_i), on concatenated points."""
    if k < 1:
        raise ValueError("k must be positive")
    base_eps = as_fraction(base_eps)
    values = {}
    for combo in itertools.product(psi.values.items(), repeat=k):
        v = Fraction(1)
        for _, val in combo:
            v *= val
        values[tuple(itertools.chain.from_iterable(x for x, _ in combo))] = v
    return DualWitness(k * psi.n, psi.r, values, k * psi.claimed_orth, base_eps**k)


def and_restricted_combine(psi: DualWitness, f: PromiseFunction, k: int, alpha, base_eps) -> DualWitness:
    """Witness for AND_{k,alpha} o f:

        Psi(x_1..x_k) = prod_i psi(x_i) * prod_{i=l+1}^{k-1} (f(x_1)+...+f(x_k) - i),

    with l = floor(alpha*k).  The correction factor kills every tuple whose weight lies
    strictly between l and k, which is exactly the region outside the promise.
    """
    alpha = as_fraction(alpha)
    base_eps = as_fraction(base_eps)
    ell = math.floor(alpha * k)
    if not 0 <= alpha < 1 or ell >= k:
        raise ValueError("need 0 <= alpha < 1")
    for x in psi.values:
        if x not in f.labels:
            raise EmbeddingError(f"base witness is nonzero at {x}, outside the domain of {f!r}")
    values = {}
    for combo in itertools.product(psi.values.items(), repeat=k):
        w = sum(f.labels[x] for x, _ in combo)
        v = Fraction(1)
        for _, val in combo:
            v *= val
        for i in range(ell + 1, k):
            v *= w - i
        if v:
            values[tuple(itertools.chain.from_iterable(x for x, _ in combo))] = v
    return DualWitness(k * psi.n, psi.r, values, (ell + 1) * psi.claimed_orth,
                       base_eps**k / math.comb(k - 1, ell))


def pushforward(psi: DualWitness, e: Embedding) -> DualWitness:
    """psi o inject^{-1} on the image of the embedding, zero elsewhere."""
    values = {}
    for x, v in psi.values.items():
        if x not in e.source.labels:
            raise EmbeddingError(f"witness is nonzero at {x}, outside the embedding's source")
        values[e.inject(x)] = v
    return DualWitness(e.target.n, e.target.r, values, psi.claimed_orth, psi.claimed_eps)


# ---------------------------------------------------------------------------
# certified bounds and their JSON bundles


_CONSTRUCTORS = {
    "AND": lambda d: make_and(d["n"]),
    "AND_restricted": lambda d: make_and_restricted(d["n"], parse_rational(d["params"]["alpha"])),
    "ED": lambda d: make_ed(d["n"], d["r"]),
    "EDk": lambda d: make_ed_k(d["n"], int(d["params"]["k"])),
    "SURJ": lambda d: make_surj(d["n"], d["r"]),
    "PTP": lambda d: make_ptp(d["n"], parse_rational(d["params"]["alpha"])),
    "PTP*": lambda d: make_ptp_star(d["n"], parse_rational(d["params"]["delta"])),
}


def describe(f: PromiseFunction) -> dict:
    """Compact descriptor for standard families, full point list otherwise."""
    if f.family in _CONSTRUCTORS:
        params = {}
        for key, value in f.params:
            params[key] = format_rational(value) if isinstance(value, Fraction) else value
        return {"family": f.family, "n": f.n, "r": f.r, "params": params}
    return f.to_json()


def rebuild(desc: dict) -> PromiseFunction:
    if "points" in desc:
        return PromiseFunction.from_json(desc)
    try:
        return _CONSTRUCTORS[desc["family"]](desc)
    except KeyError:
        raise ValueError(f"unknown function family {desc.get('family')!r}") from None


@dataclass
class CertifiedBound:
    function: PromiseFunction
    degree_lb: int
    eps: Fraction
    witness: DualWitness
    trace: list = field(default_factory=list)

    def verify(self) -> VerifyReport:
        return verify_witness(self.witness, self.function, self.eps, self.degree_lb)

    def to_json(self) -> dict:
        return {
            "function": describe(self.function),
            "degree_lb": self.degree_lb,
            "eps": format_rational(self.eps),
            "witness": self.witness.to_json(),
            "trace": self.trace,
        }

    @classmethod
    def from_json(cls, data) -> "CertifiedBound":
        return cls(
            rebuild(data["function"]),
            int(data["degree_lb"]),
            parse_rational(data["eps"]),
            DualWitness.from_json(data["witness"]),
            list(data.get("trace", [])),
        )


def _dims(f: PromiseFunction) -> dict:
    return {"family": f.family, "n": f.n, "r": f.r}


def _base_witness(base: PromiseFunction, base_eps: Fraction):
    """Exact LP degree of the base function and a witness proving it."""
    res = approx_degree(base, base_eps)
    if res.degree == 0:
        psi = trivial_witness(base)
    else:
        psi = extract_dual(res.below)
        psi = DualWitness(psi.n, psi.r, psi.values, res.degree, base_eps)
    report = verify_witness(psi, base, base_eps, res.degree)
    if not report:
        raise AssertionError(f"base witness failed: {report.reason}")
    step = {
        "step": "base_lp",
        "function": describe(base),
        "eps": format_rational(base_eps),
        "degree": res.degree,
        "witness": psi.to_json(),
    }
    return res.degree, psi, step


def _embedding_step(name: str, e: Embedding, **params) -> dict:
    step = {"step": "pushforward", "embedding": name, "source": _dims(e.source),
            "target": describe(e.target)}
    step.update(params)
    return step


def _check_base_eps(base_eps):
    base_eps = as_fraction(base_eps)
    if not 0 <= base_eps < Fraction(1, 2):
        raise PipelineError("base_eps must lie in [0, 1/2)")
    return base_eps


def _tensor_pipeline(base, target, k, pad, base_eps) -> CertifiedBound:
    d0, psi, base_step = _base_witness(base, base_eps)
    trace = [base_step]
    w = tensor_power(psi, k, base_eps)
    trace.append({"step": "tensor_power", "k": k, "orth": w.claimed_orth,
                  "eps": format_rational(w.claimed_eps)})
    e = embed_block_diagonal(base, k, pad, target=target)
    w = pushforward(w, e)
    trace.append(_embedding_step("block-diagonal", e, inner=describe(base), k=k, pad=pad))
    w = w.normalized()
    return CertifiedBound(e.target, k * d0, base_eps**k, w, trace)


def certify_ed(n: int, k: int, base_eps) -> CertifiedBound:
    """deg_{eps^k}(ED_n) >= k * deg_eps(ED_{floor(n/k)}) through AND_k o ED_{floor(n/k)}."""
    base_eps = _check_base_eps(base_eps)
    if not 1 <= k <= n or n // k < 2:
        raise PipelineError("need 1 <= k <= n and block size floor(n/k) >= 2")
    b = n // k
    return _tensor_pipeline(make_ed(b), make_ed(n), k, n - k * b, base_eps)


def certify_ed_r(n: int, r_param: int, k: int, base_eps) -> CertifiedBound:
    """The same pipeline for r-element distinctness ED^r_n."""
    base_eps = _check_base_eps(base_eps)
    if not 1 <= k <= n or n // k < 2:
        raise PipelineError("need 1 <= k <= n and block size floor(n/k) >= 2")
    b = n // k
    return _tensor_pipeline(make_ed_k(b, r_param), make_ed_k(n, r_param), k, n - k * b, base_eps)


def certify_surj(n: int, c, k: int, base_eps) -> CertifiedBound:
    """SURJ_{n, floor(cn)} via AND_k o SURJ_{floor(n/k)-1, floor(cn/k)}.

    Built in construction order, the chain is: block-diagonal embedding into
    SURJ_{k(floor(n/k)-1), k floor(cn/k)}, duplicated rows up to n-k rows, duplicated rows
    up to n - rem rows, then rem identity blocks, where rem = floor(cn) - k floor(cn/k).
    """
    base_eps = _check_base_eps(base_eps)
    c = as_fraction(c)
    if not 0 < c < 1:
        raise PipelineError("need 0 < c < 1")
    if not 1 <= k or k > c * n or k > (1 - c) * n:
        raise PipelineError("need 1 <= k <= min(cn, (1-c)n)")
    r = math.floor(c * n)
    q = math.floor(c * n / k)
    rem = r - k * q
    b = n // k - 1
    if b < 1 or q < 1:
        raise PipelineError("block sizes must be at least 1")
    base = make_surj(b, q)
    d0, psi, base_step = _base_witness(base, base_eps)
    trace = [base_step]
    w = tensor_power(psi, k, base_eps)
    trace.append({"step": "tensor_power", "k": k, "orth": w.claimed_orth,
                  "eps": format_rational(w.claimed_eps)})
    e = embed_block_diagonal(base, k, 0)
    w = pushforward(w, e)
    trace.append(_embedding_step("block-diagonal", e, inner=describe(base), k=k, pad=0))
    current = e.target
    for rows_goal in (n - k, n - rem):
        source = current
        while current.n < rows_goal:
            e = embed_surj_duplicate_row(current)
            w = pushforward(w, e)
            current = e.target
        trace.append({"step": "pushforward", "embedding": "duplicate-row",
                      "source": _dims(source), "target": describe(current),
                      "copies": current.n - source.n})
    source = current
    for _ in range(rem):
        e = embed_surj_identity_block(current)
        w = pushforward(w, e)
        current = e.target
    trace.append({"step": "pushforward", "embedding": "add-identity-block",
                  "source": _dims(source), "target": describe(current), "copies": rem})
    if (current.n, current.r) != (n, r):
        raise AssertionError("surjectivity chain ended at the wrong size")
    return CertifiedBound(current, k * d0, base_eps**k, w.normalized(), trace)


def certify_ptp(n: int, alpha, k: int, base_eps) -> CertifiedBound:
    """PTP_{n,alpha} via AND_{k,alpha/4} o PTP_{floor(n/k),alpha/4}, the restricted-AND
    combiner, a block-diagonal embedding into PTP_{k floor(n/k), alpha/2}, and identity
    padding up to n rows."""
    base_eps = _check_base_eps(base_eps)
    alpha = as_fraction(alpha)
    if not 0 < alpha < 1:
        raise PipelineError("need 0 < alpha < 1")
    # k <= ceil(alpha*n/2) is what the asymptotic argument needs; at small n the
    # exhaustive embedding checks below decide whether the chain stays in the promise.
    if k < 1:
        raise PipelineError("need k >= 1")
    b = n // k
    if b < 2:
        raise PipelineError("block size floor(n/k) must be at least 2")
    inner_alpha = alpha / 4
    ell = math.floor(inner_alpha * k)
    base = make_ptp(b, inner_alpha)
    d0, psi, base_step = _base_witness(base, base_eps)
    trace = [base_step]
    w = and_restricted_combine(psi, base, k, inner_alpha, base_eps)
    trace.append({"step": "and_restricted_combine", "k": k, "alpha": format_rational(inner_alpha),
                  "ell": ell, "orth": w.claimed_orth, "eps": format_rational(w.claimed_eps)})
    mid = make_ptp(k * b, alpha / 2)
    try:
        e = embed_block_diagonal(base, k, 0, outer_alpha=inner_alpha, target=mid)
        w = pushforward(w, e)
        trace.append(_embedding_step("block-diagonal", e, inner=describe(base), k=k, pad=0,
                                     outer_alpha=format_rational(inner_alpha)))
        e = embed_ptp_pad(k * b, n, alpha / 2, source=mid, target=make_ptp(n, alpha))
    except EmbeddingError as exc:
        raise PipelineError(f"composition leaves the promise: {exc}") from None
    w = pushforward(w, e)
    trace.append(_embedding_step("identity-pad", e, m=k * b))
    eps = base_eps**k / math.comb(k - 1, ell)
    return CertifiedBound(e.target, (ell + 1) * d0, eps, w.normalized(), trace)


# ---------------------------------------------------------------------------
# replay: rebuild the witness from the recorded base witness, without any LP


def replay(trace: list) -> DualWitness:
    """Re-apply every recorded combiner and embedding to the recorded base witness."""
    if not trace or trace[0].get("step") != "base_lp":
        raise ValueError("trace must start with a base_lp step")
    base = rebuild(trace[0]["function"])
    w = DualWitness.from_json(trace[0]["witness"])
    current = base
    for step in trace[1:]:
        kind = step["step"]
        if kind == "tensor_power":
            w = tensor_power(w, step["k"], parse_rational(trace[0]["eps"]))
            current = compose_and(base, step["k"])
        elif kind == "and_restricted_combine":
            alpha = parse_rational(step["alpha"])
            w = and_restricted_combine(w, base, step["k"], alpha, parse_rational(trace[0]["eps"]))
            current = compose_and(base, step["k"], alpha)
        elif kind == "pushforward":
            target = rebuild(step["target"])
            emb = step["embedding"]
            if emb == "block-diagonal":
                outer = step.get("outer_alpha")
                e = embed_block_diagonal(rebuild(step["inner"]), step["k"], step["pad"],
                                         outer_alpha=None if outer is None else parse_rational(outer),
                                         target=target)
                w = pushforward(w, e)
            elif emb == "identity-pad":
                e = embed_ptp_pad(step["m"], target.n, Fraction(0), source=current, target=target)
                w = pushforward(w, e)
            elif emb == "duplicate-row":
                for _ in range(step["copies"]):
                    e = embed_surj_duplicate_row(current)
                    w = pushforward(w, e)
                    current = e.target
            elif emb == "add-identity-block":
                for _ in range(step["copies"]):
                    e = embed_surj_identity_block(current)
                    w = pushforward(w, e)
                    current = e.target
            else:
                raise ValueError(f"unknown embedding {emb!r}")
            current = target
        else:
            raise ValueError(f"unknown trace step {kind!r}")
    return w.normalized()
