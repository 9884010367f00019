"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import math
import subprocess
import sys
import time
from fractions import Fraction as F

import pytest

from approxdeg.certify import and_restricted_combine, pushforward, tensor_power, verify_witness
from approxdeg.embeddings import embed_block_diagonal
from approxdeg.functions import (
    compose_and,
    make_and,
    make_ed,
    make_ptp,
    make_ptp_star,
    make_surj,
)
from approxdeg.lp import DualWitness, approx_degree, extract_dual, min_error_at_degree
from approxdeg.poly import orth, symmetrize
from approxdeg.sim import sweep


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {number} ({title}): {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_1_exact_lp_ground_truth(report):
    start = time.perf_counter()
    e = min_error_at_degree(make_and(2), 1, "two-sided").eps_star
    d = approx_degree(make_and(2), F(1, 3)).degree
    exact = [approx_degree(make_and(n), 0).degree for n in range(1, 5)]
    elapsed = time.perf_counter() - start
    ok = e == F(1, 4) and d == 1 and exact == [1, 2, 3, 4] and elapsed < 1
    report(1, "exact LP ground truth", ok, f"eps*={e} deg_1/3={d} deg_0={exact} t={elapsed:.2f}s")


MATRIX = [make_and(n) for n in range(1, 5)] + [make_ed(2), make_ed(3), make_surj(2, 2), make_surj(3, 2),
                                                 make_ptp(3, F(1, 2)), make_ptp(4, F(1, 2))]
EPS_GRID = [F(0), F(1, 9), F(1, 8), F(1, 4), F(1, 3), F(5, 12), F(49, 100)]


def test_criterion_2_dual_soundness_loop(report):
    problems, checked = [], 0
    for f in MATRIX:
        stars = {}
        witnesses = []
        for d in range(f.n + 1):
            lp = min_error_at_degree(f, d)
            stars[d] = lp.eps_star
            if lp.eps_star > 0:
                psi = extract_dual(lp)
                if psi.correlation(f) / psi.l1 != lp.eps_star:
                    problems.append((f, d, "ratio"))
                witnesses.append(psi)
        for psi in witnesses:
            for d in range(f.n + 1):
                for eps in EPS_GRID:
                    if verify_witness(psi, f, eps, d + 1).passed:
                        checked += 1
                        if not stars[d] > eps:
                            problems.append((f, d, eps))
    report(2, "dual soundness loop", not problems and checked > 0,
           f"{checked} passing (witness, d, eps) triples, problems={problems[:3]}")


def test_criterion_3_tensor_certificate(report):
    psi = extract_dual(min_error_at_degree(make_and(1), 0))
    psi = DualWitness(1, 2, psi.values, 1, F(1, 3))
    results = []
    for k, eps in ((2, F(1, 9)), (3, F(1, 27))):
        w = tensor_power(psi, k, F(1, 3))
        ok = verify_witness(w, make_and(k), eps, k).passed
        exact = approx_degree(make_and(k), eps).degree
        results.append((k, ok, exact))
    ok = all(v and k <= exact for k, v, exact in results)
    report(3, "tensor-power certificate", ok, f"(k, verified, exact LP degree)={results}")


def test_criterion_4_restricted_and_identities(report):
    f = make_and(1)
    psi = extract_dual(min_error_at_degree(f, 0))
    psi = DualWitness(1, 2, psi.values, 1, F(1, 3))
    bad = []
    for k in (2, 3):
        for alpha in (F(0), F(1, 2)):
            ell = math.floor(alpha * k)
            Psi = and_restricted_combine(psi, f, k, alpha, F(1, 3))
            g = compose_and(f, k, alpha)
            tensor = tensor_power(psi, k, F(1, 3))
            if Psi.correlation(g) != math.factorial(k - ell - 1) * psi.correlation(f) ** k:
                bad.append((k, alpha, "correlation"))
            cap = F(math.factorial(k - 1), math.factorial(ell))
            if any(abs(Psi[x]) > abs(tensor[x]) * cap for x in set(Psi.values) | set(tensor.values)):
                bad.append((k, alpha, "pointwise"))
            if orth(Psi) < (ell + 1) * orth(psi):
                bad.append((k, alpha, "orth"))
    report(4, "restricted-AND identities", not bad, f"violations={bad}")


def test_criterion_5_embedding_suite(report):
    bad = []
    for n in range(1, 6):
        for delta in (F(1, 4), F(1, 2), F(3, 4)):
            if not make_ptp_star(n, delta).agrees_with(make_ptp(n, 1 - delta)):
                bad.append(("ptp*", n, delta))
    e = embed_block_diagonal(make_ed(2), 2, 0)
    image = {e.inject(x): e.source.labels[x] for x in e.source.points}
    for y in itertools.product(range(1, 5), repeat=4):
        truth = int(len(set(y)) == 4)
        if e.target.labels[y] != truth or (y in image and image[y] != truth):
            bad.append(("block", y))
    for d in range(3):
        lp = min_error_at_degree(e.source, d, use_symmetry=False)
        psi = extract_dual(lp)
        pushed = pushforward(psi, e)
        if pushed.correlation(e.target) != psi.correlation(e.source) or pushed.l1 != psi.l1:
            bad.append(("pushforward", d))
        if orth(pushed) < orth(psi):
            bad.append(("orth", d))
    report(5, "embedding suite", not bad, f"violations={bad[:5]}")


@pytest.mark.slow
def test_criterion_6_one_sided_equals_two_sided_ptp(report):
    bad = []
    for n in (3, 4):
        f = make_ptp(n, F(1, 2))
        two = [min_error_at_degree(f, d, "two-sided", use_symmetry=False) for d in range(n + 1)]
        one = [min_error_at_degree(f, d, "one-sided", use_symmetry=False) for d in range(n + 1)]
        for eps in (F(0), F(1, 4), F(1, 3)):
            d2 = next(d for d, lp in enumerate(two) if lp.eps_star <= eps)
            d1 = next(d for d, lp in enumerate(one) if lp.eps_star <= eps)
            if d1 != d2:
                bad.append((n, eps, d1, d2))
        for lp in one:
            values = {symmetrize(lp.primal)(x) for x in f.positives}
            if len(values) != 1:
                bad.append((n, lp.degree_d, "not constant"))
    report(6, "one-sided = two-sided for PTP", not bad, f"violations={bad}")


@pytest.mark.slow
def test_criterion_7_simulator(report):
    start = time.perf_counter()
    ns = [2**k for k in range(7, 14)]
    res = sweep(ns, F(1, 2), [F(1, 3)], 10_000, seed=2024)
    slope = res.exponents[F(1, 3)]
    yes_trials = sum(r.trials for r in res.reports)
    false_negatives = sum(r.yes_error_rate * r.trials for r in res.reports)
    mono = sweep([1024], F(1, 2), [F(1, 3), F(1, 9), F(1, 81)], 10_000, seed=2024)
    costs = [mono.min_cost(1024, e) for e in (F(1, 3), F(1, 9), F(1, 81))]
    elapsed = time.perf_counter() - start
    ok = (yes_trials >= 10**5 and false_negatives == 0 and 0.23 <= slope <= 0.43
          and costs == sorted(costs) and elapsed < 600)
    report(7, "simulator completeness and scaling", ok,
           f"slope={slope:.4f} yes_trials={yes_trials} false_negatives={false_negatives} "
           f"costs@1024={[round(c, 2) for c in costs]} t={elapsed:.1f}s")


def test_criterion_8_determinism(report, tmp_path):
    commands = {
        "degree.csv": ["degree", "--family", "ed", "--n", "3", "--eps", "1/3", "--witness", "{dir}/w.json"],
        "scan.csv": ["scan", "--family", "ptp", "--n", "3", "--alpha", "1/2", "--eps", "1/3,1/4,0",
                     "--svg", "{dir}/scan.svg"],
        "certify.txt": ["certify", "--pipeline", "surj", "--n", "8", "--c", "1/2", "--k", "2",
                        "--base-eps", "1/3", "--out", "{dir}/bundle.json"],
        "simulate.csv": ["simulate", "--n", "128,256,512", "--trials", "2000", "--seed", "7"],
    }
    files = ["w.json", "scan.svg", "bundle.json"]
    snapshots = []
    for rep in range(2):
        d = tmp_path / str(rep)
        d.mkdir()
        snap = {}
        for name, argv in commands.items():
            argv = [a.format(dir=d) for a in argv]
            out = subprocess.run([sys.executable, "-m", "approxdeg", *argv], capture_output=True, check=True)
            snap[name] = out.stdout
        for name in files:
            snap[name] = (d / name).read_bytes()
        snapshots.append(snap)
    differ = [k for k in snapshots[0] if snapshots[0][k] != snapshots[1][k]]
    report(8, "determinism", not differ, f"artifacts={len(snapshots[0])} differing={differ}")
