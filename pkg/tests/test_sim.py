import math
import subprocess
import sys
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from approxdeg.functions import image_size, make_ptp
from approxdeg.sim import (
    AlgoParams,
    fit_exponent,
    grover_success_prob,
    iteration_count,
    max_query_bound,
    num_searches,
    run_block,
    run_ptp_algorithm,
    s_grid,
    sample_no_instance,
    sample_yes_instance,
    simulate_point,
    sweep,
)
from approxdeg.sim.sweep import NO, YES, block_rng, draw_block


def grover_by_rotation(N, M, t):
    """Success probability from explicit reflections on span{marked, unmarked}."""
    s = np.array([math.sqrt(M / N), math.sqrt(1 - M / N)])
    oracle = np.diag([-1.0, 1.0])
    diffusion = 2 * np.outer(s, s) - np.eye(2)
    v = s.copy()
    for _ in range(t):
        v = diffusion @ (oracle @ v)
    return v[0] ** 2


def test_grover_examples():
    assert grover_success_prob(5, 5, 0) == pytest.approx(1.0)
    assert grover_success_prob(4, 1, 1) == pytest.approx(1.0, abs=1e-15)
    assert grover_success_prob(2, 1, 0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        grover_success_prob(4, 0, 1)


@given(st.integers(1, 500), st.integers(1, 500), st.integers(0, 30))
def test_grover_matches_rotation(N, M, t):
    M = min(M, N)
    assert grover_success_prob(N, M, t) == pytest.approx(grover_by_rotation(N, M, t), abs=1e-9)


def test_num_searches():
    assert [num_searches(e) for e in (F(1, 3), F(1, 9), F(1, 10), F(1, 81))] == [1, 2, 3, 4]


def test_params_validation():
    with pytest.raises(ValueError):
        AlgoParams(4, F(1, 2), 0, F(1, 3))
    with pytest.raises(ValueError):
        AlgoParams(4, F(1, 2), 2, F(1, 2))


def test_iteration_count():
    assert iteration_count(100, 10, 0, F(1, 2)) == math.floor(math.pi / 4 * math.sqrt(90 / 3))
    assert iteration_count(100, 10, 90, F(1, 2)) == 0
    assert iteration_count(4, 4, 0, F(1, 2)) == 0


def test_samplers():
    rng = np.random.default_rng(1)
    for n in (2, 4, 9):
        x = sample_yes_instance(n, rng)
        assert sorted(x) == list(range(1, n + 1))
    f = make_ptp(4, F(1, 2))
    for _ in range(50):
        y = sample_no_instance(4, F(1, 2), rng)
        assert image_size(y) == 2 and f.labels[y] == 0
    for _ in range(20):
        assert image_size(sample_no_instance(37, F(1, 3), rng)) == 12


def test_algorithm_examples():
    rng = np.random.default_rng(5)
    p = AlgoParams(12, F(1, 2), 3, F(1, 9))
    for _ in range(200):
        res = run_ptp_algorithm(sample_yes_instance(12, rng), p, rng)
        assert res.accept and res.queries <= max_query_bound(12, 3, F(1, 9))
    # a collision inside S is caught by the sampling stage
    collide = (1,) * 12
    res = run_ptp_algorithm(collide, AlgoParams(12, F(1, 2), 2, F(1, 3)), rng)
    assert not res.accept and res.stage == "sample" and res.queries == 2
    # s = n samples everything: the decision is the injectivity test itself
    full = AlgoParams(4, F(1, 2), 4, F(1, 3))
    assert run_ptp_algorithm((2, 1, 4, 3), full, rng).accept
    assert not run_ptp_algorithm((1, 1, 2, 2), full, rng).accept
    with pytest.raises(ValueError):
        run_ptp_algorithm((1, 2, 2, 3), full, rng)


def test_shortcut_matches_explicit_runs():
    """The compressed sampler and explicit instances give the same statistics."""
    n, s, eps = 16, 3, F(1, 3)
    params = AlgoParams(n, F(1, 2), s, eps, seed=11)
    trials = 6000
    rng = np.random.default_rng(123)
    rejects, queries = 0, 0
    for _ in range(trials):
        res = run_ptp_algorithm(sample_no_instance(n, F(1, 2), rng), params, rng)
        rejects += not res.accept
        queries += res.queries
    rep = simulate_point(params, trials)
    p_explicit = rejects / trials
    p_short = 1 - float(rep.no_error_rate)
    sigma = math.sqrt(p_short * (1 - p_short) / trials) * math.sqrt(2)
    assert abs(p_explicit - p_short) < 4 * sigma + 1e-9
    # yes trials all cost the same, so the no-trial mean is recoverable
    yes_cost = s + num_searches(eps) * (iteration_count(n, s, 0, F(1, 2)) + 1)
    no_mean = 2 * rep.mean_queries - yes_cost
    assert abs(queries / trials - no_mean) < 0.1


@pytest.mark.parametrize("kind,m", [(YES, 64), (NO, 32)])
@pytest.mark.parametrize("s", [1, 6, 20])
def test_backends_agree(kind, m, s):
    pytest.importorskip("numba")
    rng = block_rng(3, kind, 64, s, 2, 0)
    arrays = draw_block(rng, 64, m, s, 2, F(1, 2), 3000)
    a = run_block(*arrays, s, m, backend="numpy")
    b = run_block(*arrays, s, m, backend="numba")
    c = run_block(*arrays, s, m, backend="python")
    for x, y in ((a, b), (a, c)):
        assert np.array_equal(x[0], y[0]) and np.array_equal(x[1], y[1])


def test_env_flag_selects_numpy(monkeypatch):
    from approxdeg.sim import kernels

    monkeypatch.setenv(kernels.ENV_FLAG, "1")
    assert not kernels.numba_enabled()


def test_env_flag_in_subprocess():
    code = (
        "from fractions import Fraction as F\n"
        "from approxdeg.sim import AlgoParams, numba_enabled, simulate_point\n"
        "r = simulate_point(AlgoParams(256, F(1, 2), 9, F(1, 3), 4), 2000)\n"
        "print(numba_enabled(), r.no_error_rate, r.mean_queries, r.max_queries)\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = {"APPROXDEG_NO_NUMBA": flag, "PATH": "/usr/bin:/bin"}
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout.split(" ", 1))
    assert outs[0][0] == "True" and outs[1][0] == "False"
    assert outs[0][1] == outs[1][1]


def test_simulate_point_invariants():
    p = AlgoParams(512, F(1, 2), 8, F(1, 9), seed=2)
    rep = simulate_point(p, 5000)
    assert rep.yes_error_rate == 0
    assert 0 <= rep.no_error_rate <= 1
    assert rep.mean_queries >= p.s
    assert rep.max_queries <= max_query_bound(512, 8, F(1, 9))
    assert simulate_point(p, 5000) == rep


def test_s_grid():
    assert s_grid(10, F(2)) == [1, 2, 4, 8, 10]
    g = s_grid(1000, F(5, 4))
    assert g[0] == 1 and g[-1] == 1000 and g == sorted(set(g))


def test_fit_exponent_recovers_slope():
    ns = [2**k for k in range(5, 12)]
    assert fit_exponent(ns, [3 * n ** 0.4 for n in ns]) == pytest.approx(0.4)


def test_sweep_small_and_deterministic():
    a = sweep([64, 128, 256], F(1, 2), [F(1, 3), F(1, 9)], 2000, seed=9)
    b = sweep([64, 128, 256], F(1, 2), [F(1, 3), F(1, 9)], 2000, seed=9)
    assert a.csv_text() == b.csv_text()
    assert a.csv_text().splitlines()[0] == "n,alpha,eps_num,eps_den,s,trials,yes_err,no_err,mean_queries,max_queries"
    for n in (64, 128, 256):
        assert a.min_cost(n, F(1, 3)) <= a.min_cost(n, F(1, 9))
        best = a.optimum[(n, F(1, 9))]
        # at the optimum the empirical error is within 3 sigma of eps
        sd = math.sqrt(float(F(1, 9)) * (1 - float(F(1, 9))) / best.trials)
        assert float(best.no_error_rate) <= float(F(1, 9)) + 3 * sd
    assert all(rep.yes_error_rate == 0 for rep in a.reports)
