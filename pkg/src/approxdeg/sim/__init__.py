"""Classical simulation of the sampling-plus-Grover permutation tester."""
from .kernels import numba_enabled, run_block
from .model import (
    AlgoParams,
    RunResult,
    SimReport,
    grover_success_prob,
    iteration_count,
    max_query_bound,
    num_searches,
    run_ptp_algorithm,
    sample_no_instance,
    sample_yes_instance,
)
from .sweep import CSV_HEADER, SweepResult, fit_exponent, s_grid, simulate_point, sweep

__all__ = [
    "AlgoParams", "RunResult", "SimReport", "CSV_HEADER", "SweepResult",
    "fit_exponent", "grover_success_prob", "iteration_count", "max_query_bound",
    "num_searches", "numba_enabled", "run_block", "run_ptp_algorithm",
    "s_grid", "sample_no_instance", "sample_yes_instance", "simulate_point", "sweep",
]
