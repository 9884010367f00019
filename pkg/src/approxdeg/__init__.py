"""Exact approximate-degree computations, dual-witness certificates and a
permutation-testing simulator."""
from ._config import SizeError, size_limit
from .certify import (
    CertifiedBound,
    VerifyReport,
    and_restricted_combine,
    certify_ed,
    certify_ed_r,
    certify_ptp,
    certify_surj,
    pushforward,
    tensor_power,
    verify_witness,
)
from .functions import (
    PromiseFunction,
    compose_and,
    evaluate,
    make_and,
    make_and_restricted,
    make_ed,
    make_ed_k,
    make_ptp,
    make_ptp_star,
    make_surj,
)
from .lp import DualWitness, LPResult, approx_degree, extract_dual, min_error_at_degree
from .poly import Monomial, SparsePolynomial, eval_poly, orbit_basis, orth, symmetrize

__version__ = "0.1.0"

__all__ = [
    "SizeError", "size_limit",
    "CertifiedBound", "VerifyReport", "and_restricted_combine", "certify_ed", "certify_ed_r",
    "certify_ptp", "certify_surj", "pushforward", "tensor_power", "verify_witness",
    "PromiseFunction", "compose_and", "evaluate", "make_and", "make_and_restricted", "make_ed",
    "make_ed_k", "make_ptp", "make_ptp_star", "make_surj",
    "DualWitness", "LPResult", "approx_degree", "extract_dual", "min_error_at_degree",
    "Monomial", "SparsePolynomial", "eval_poly", "orbit_basis", "orth", "symmetrize",
]
