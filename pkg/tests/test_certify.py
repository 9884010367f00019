import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from approxdeg.certify import (
    CertifiedBound,
    PipelineError,
    and_restricted_combine,
    certify_ed,
    certify_ed_r,
    certify_ptp,
    certify_surj,
    pushforward,
    replay,
    tensor_power,
    trivial_witness,
    verify_witness,
)
from approxdeg.embeddings import EmbeddingError, embed_block_diagonal, identity_embedding
from approxdeg.functions import compose_and, make_and, make_ed, make_ed_k, make_ptp, make_surj
from approxdeg.lp import DualWitness, approx_degree, extract_dual, min_error_at_degree
from approxdeg.poly import orth


@pytest.fixture(scope="module")
def and1_psi():
    return extract_dual(min_error_at_degree(make_and(1), 0))


def and1_witness(psi):
    return DualWitness(1, 2, psi.values, 1, F(1, 3))


def test_verify_examples(and1_psi):
    rep = verify_witness(and1_psi, make_and(1), F(1, 3), 1)
    assert rep.passed and rep.correlation == F(1, 2) and rep.l1 == 1 and rep.orth == 1
    zero = DualWitness(1, 2, {})
    assert not verify_witness(zero, make_and(1), F(1, 3), 0)


def test_verify_reports_leak():
    f = make_ptp(3, F(1, 2))
    psi = DualWitness(3, 3, {(1, 1, 2): F(1)})
    rep = verify_witness(psi, f, 0, 0)
    assert not rep.passed and rep.offending_point == (1, 1, 2)


def test_verify_strictness(and1_psi):
    # correlation exactly eps * l1 must fail
    assert not verify_witness(and1_psi, make_and(1), F(1, 2), 1)
    assert not verify_witness(and1_psi, make_and(1), F(1, 3), 2)


@given(st.fractions(min_value=0, max_value=F(1, 2)), st.integers(0, 2))
def test_verify_monotone(eps, d):
    f = make_and(2)
    psi = extract_dual(min_error_at_degree(f, 1))
    if verify_witness(psi, f, eps, d):
        assert verify_witness(psi, f, eps / 2, d)
        assert verify_witness(psi, f, eps, max(d - 1, 0))


def test_tensor_power_identities(and1_psi):
    f = make_and(1)
    assert tensor_power(and1_psi, 1, F(1, 3)).values == and1_psi.values
    for k in (2, 3):
        w = tensor_power(and1_witness(and1_psi), k, F(1, 3))
        g = compose_and(f, k)
        assert w.correlation(g) == and1_psi.correlation(f) ** k
        assert w.l1 == and1_psi.l1**k
        assert orth(w) == k * orth(and1_psi)
        assert w.claimed_orth == k and w.claimed_eps == F(1, 3) ** k


def test_tensor_power_certifies_and2(and1_psi):
    w = tensor_power(and1_witness(and1_psi), 2, F(1, 3))
    assert verify_witness(w, make_and(2), F(1, 9), 2)
    assert min_error_at_degree(make_and(2), 1).eps_star == F(1, 4) > F(1, 9)


def test_orth_of_tensor_square():
    psi = extract_dual(min_error_at_degree(make_ed(2), 1))
    assert orth(tensor_power(psi, 2, 0)) == 2 * orth(psi)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("alpha", [F(0), F(1, 2)])
def test_restricted_and_identities(and1_psi, k, alpha):
    f = make_and(1)
    ell = math.floor(alpha * k)
    Psi = and_restricted_combine(and1_witness(and1_psi), f, k, alpha, F(1, 3))
    tensor = tensor_power(and1_psi, k, F(1, 3))
    g = compose_and(f, k, alpha)
    assert Psi.correlation(g) == math.factorial(k - ell - 1) * and1_psi.correlation(f) ** k
    bound = F(math.factorial(k - 1), math.factorial(ell))
    for x, v in tensor.values.items():
        assert abs(Psi[x]) <= abs(v) * bound
    assert all(x in g.labels for x in Psi.values)
    assert orth(Psi) >= (ell + 1) * orth(and1_psi)
    assert Psi.claimed_eps == F(1, 3) ** k / math.comb(k - 1, ell)
    assert verify_witness(Psi, g, Psi.claimed_eps, Psi.claimed_orth)


def test_restricted_and_degenerate_cases(and1_psi):
    f = make_and(1)
    assert and_restricted_combine(and1_psi, f, 1, 0, F(1, 3)).values == and1_psi.values
    # alpha = (k-1)/k is the plain tensor power
    for k in (2, 3):
        a = and_restricted_combine(and1_psi, f, k, F(k - 1, k), F(1, 3))
        assert a.values == tensor_power(and1_psi, k, F(1, 3)).values


def test_restricted_and_k3_exhaustive(and1_psi):
    f = make_and(1)
    g = compose_and(f, 3, F(1, 2))
    assert len(g) == 5
    Psi = and_restricted_combine(and1_witness(and1_psi), f, 3, F(1, 2), F(1, 3))
    assert orth(Psi) >= 2
    assert Psi.correlation(g) > F(1, 2) ** 3 / math.comb(2, 1) * Psi.l1


def test_pushforward_identity_and_ed():
    f = make_ed(2)
    psi = extract_dual(min_error_at_degree(f, 1))
    assert pushforward(psi, identity_embedding(f)).values == psi.values
    w = tensor_power(psi, 2, F(1, 3))
    e = embed_block_diagonal(f, 2, 0)
    pushed = pushforward(w, e)
    assert pushed.correlation(make_ed(4)) == w.correlation(e.source)
    assert pushed.l1 == w.l1
    assert orth(pushed) >= orth(w)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_pushforward_never_lowers_orth(d):
    f = make_ed(2)
    e = embed_block_diagonal(f, 2, 0)
    src = e.source
    lp = min_error_at_degree(src, d, use_symmetry=False)
    if lp.eps_star == 0:
        pytest.skip("exact at this degree")
    psi = extract_dual(lp)
    assert orth(pushforward(psi, e)) >= orth(psi) >= d + 1


def test_pushforward_rejects_foreign_support():
    e = embed_block_diagonal(make_ed(2), 2, 0)
    with pytest.raises(EmbeddingError):
        pushforward(DualWitness(4, 2, {(1, 1, 1, 3): F(1)}), e)


def test_certify_ed_n4():
    b = certify_ed(4, 2, F(1, 3))
    base = approx_degree(make_ed(2), F(1, 3)).degree
    assert base == 2
    assert b.degree_lb == 2 * base == 4 and b.eps == F(1, 9)
    assert b.witness.l1 == 1
    assert b.verify().passed
    assert min_error_at_degree(make_ed(4), b.degree_lb - 1).eps_star > F(1, 9)
    assert b.degree_lb <= approx_degree(make_ed(4), F(1, 9)).degree


def test_certify_ed_k1_is_base_bound():
    b = certify_ed(3, 1, F(1, 3))
    assert b.degree_lb == approx_degree(make_ed(3), F(1, 3)).degree
    assert b.verify()


def test_certify_ed_r():
    b = certify_ed_r(6, 3, 2, F(1, 3))
    assert b.function.agrees_with(make_ed_k(6, 3))
    assert b.degree_lb == 2 * approx_degree(make_ed_k(3, 3), F(1, 3)).degree
    assert b.verify()


def test_certify_surj_chain():
    b = certify_surj(4, F(1, 2), 2, F(1, 3))
    assert b.function.agrees_with(make_surj(4, 2))
    assert b.degree_lb == 2 * approx_degree(make_surj(1, 1), F(1, 3)).degree
    assert b.verify()
    b8 = certify_surj(8, F(1, 2), 2, F(1, 3))
    assert b8.degree_lb == 4 and b8.verify()
    # n=8, k=2, r=4: SURJ_{3,2} blocks -> SURJ_{6,4} -> SURJ_{6,4} -> SURJ_{8,4} -> SURJ_{8,4}
    steps = [s for s in b8.trace if s["step"] == "pushforward"]
    dims = [(s["source"]["n"], s["source"]["r"], s["target"]["n"], s["target"]["r"]) for s in steps]
    assert dims == [(6, 2, 6, 4), (6, 4, 6, 4), (6, 4, 8, 4), (8, 4, 8, 4)]
    assert [s["step"] for s in b8.trace] == ["base_lp", "tensor_power", "pushforward", "pushforward",
                                            "pushforward", "pushforward"]


def test_certify_surj_k1():
    b = certify_surj(4, F(1, 2), 1, F(1, 3))
    assert b.degree_lb == approx_degree(make_surj(3, 2), F(1, 3)).degree
    assert b.degree_lb <= approx_degree(make_surj(4, 2), F(1, 3)).degree
    assert b.verify()


def test_certify_surj_rejects_bad_k():
    with pytest.raises(PipelineError):
        certify_surj(4, F(1, 2), 3, F(1, 3))


def test_certify_ptp():
    b = certify_ptp(4, F(1, 2), 2, F(1, 3))
    assert b.function.agrees_with(make_ptp(4, F(1, 2)))
    assert b.eps == F(1, 9)
    assert b.verify().passed
    assert b.degree_lb <= approx_degree(b.function, b.eps).degree
    b1 = certify_ptp(4, F(1, 2), 1, F(1, 3))
    assert b1.degree_lb == approx_degree(make_ptp(4, F(1, 8)), F(1, 3)).degree


def test_certify_ptp_rejects_small_blocks():
    with pytest.raises(PipelineError):
        certify_ptp(4, F(1, 2), 3, F(1, 3))


def test_trivial_witness():
    w = trivial_witness(make_ptp(3, F(1, 4)))
    assert verify_witness(w, make_ptp(3, F(1, 4)), F(99, 100), 0)
    with pytest.raises(PipelineError):
        trivial_witness(make_ed(2, 1))


@pytest.mark.parametrize("build", [
    lambda: certify_ed(4, 2, F(1, 3)),
    lambda: certify_surj(8, F(1, 2), 2, F(1, 3)),
    lambda: certify_ptp(4, F(1, 2), 2, F(1, 3)),
    lambda: certify_ed(5, 2, F(1, 4)),
])
def test_bundle_roundtrip_and_replay(build):
    b = build()
    text = json.dumps(b.to_json())
    back = CertifiedBound.from_json(json.loads(text))
    assert back.function.agrees_with(b.function)
    assert back.witness.values == b.witness.values
    assert back.verify().passed
    assert replay(back.trace).values == b.witness.values
    assert json.dumps(back.to_json()) == text


def test_perturbed_bundle_fails():
    b = certify_ed(4, 2, F(1, 3))
    data = b.to_json()
    vals = data["witness"]["values"]
    vals[0] = str(F(vals[0]) + F(1, 10**6)).replace(" ", "")
    if "/" not in vals[0]:
        vals[0] += "/1"
    bad = CertifiedBound.from_json(data)
    rep = bad.verify()
    assert not rep.passed and rep.orth == 0
