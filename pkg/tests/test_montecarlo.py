import numpy as np
import pytest

from qrcd import (
    RunConfig,
    TheoryInputs,
    build_least_squares,
    estimate,
    iteration_bound,
    markov_check,
    synthesize,
    theorem_check,
)


def small_instance(seed=123):
    A, y, _ = synthesize(80, 4, 2.0, seed=seed)
    return build_least_squares(A, y)


def base_config(obj, **overrides):
    defaults = dict(step_t=0.05, delta=0.0, iterations_T=100, seed=1000,
                    x0=np.ones(obj.dimension))
    defaults.update(overrides)
    return RunConfig(**defaults)


class TestEstimate:
    def test_k_zero_reports_initial_residual(self):
        obj = small_instance()
        cfg = base_config(obj)
        diff = cfg.x0 - obj.minimizer_x_star
        summary = estimate(obj, cfg, 50, epsilon=0.01, rho=0.1, k=0)
        assert summary.mean_residual_sq == float(diff @ diff)
        assert summary.success_fraction in (0.0, 1.0)
        assert summary.std_error_mean == 0.0
        assert summary.per_iteration_mean_residuals == [summary.mean_residual_sq]

    def test_deterministic(self):
        obj = small_instance()
        cfg = base_config(obj)
        s1 = estimate(obj, cfg, 40, epsilon=0.01, rho=0.1, k=50)
        s2 = estimate(obj, cfg, 40, epsilon=0.01, rho=0.1, k=50)
        assert s1 == s2

    def test_mean_meets_markov_threshold_at_free_bound(self):
        # quantization-free run at the optimal step for k_free iterations
        obj = small_instance()
        x0 = np.ones(obj.dimension)
        diff = x0 - obj.minimizer_x_star
        r0 = float(diff @ diff)
        inputs = TheoryInputs(L=obj.lipschitz_L, m=obj.strong_convexity_m,
                              d=obj.dimension, epsilon=0.01, rho=0.1,
                              initial_residual_sq=r0)
        report = iteration_bound(inputs)
        cfg = base_config(obj, step_t=report.t_opt, iterations_T=report.k_free)
        summary = estimate(obj, cfg, 200, epsilon=0.01, rho=0.1, k=report.k_free)
        assert markov_check(0.01, 0.1, summary.mean_residual_sq)
        checks = theorem_check(summary)
        assert checks["mean_ok"] and checks["success_ok"]
        assert summary.aborted_runs == 0

    def test_per_iteration_means_contract_smoothed(self):
        obj = small_instance()
        inputs = TheoryInputs(L=obj.lipschitz_L, m=obj.strong_convexity_m,
                              d=obj.dimension, epsilon=0.01, rho=0.1,
                              initial_residual_sq=1.0)
        t_opt = iteration_bound(inputs).t_opt
        cfg = base_config(obj, step_t=t_opt, iterations_T=60)
        summary = estimate(obj, cfg, 100, epsilon=0.01, rho=0.1, k=60)
        means = np.array(summary.per_iteration_mean_residuals)
        # non-increasing after smoothing over 10-iteration windows
        windows = [means[i:i + 10].mean() for i in range(0, 60, 10)]
        assert all(a >= b - 1e-12 for a, b in zip(windows, windows[1:]))

    def test_aborted_runs_count_as_failures(self):
        # destabilizing step: every replication diverges
        obj = build_least_squares([[1.0]], [0.0])
        cfg = RunConfig(step_t=3.0, delta=0.0, iterations_T=1200, seed=0, x0=[1.0])
        summary = estimate(obj, cfg, 30, epsilon=1e6, rho=0.1, k=1200)
        assert summary.aborted_runs == 30
        assert summary.success_fraction == 0.0

    def test_level_overflow_counts_as_failure(self):
        # resolution so fine the very first message overflows the level index
        obj = build_least_squares([[1.0]], [0.0])
        cfg = RunConfig(step_t=0.5, delta=1e-300, iterations_T=5, seed=0, x0=[1e10])
        summary = estimate(obj, cfg, 30, epsilon=1e30, rho=0.1, k=5)
        assert summary.aborted_runs == 30
        assert summary.success_fraction == 0.0
        # held initial residual across the truncated tail
        assert summary.per_iteration_mean_residuals[0] == summary.mean_residual_sq

    def test_replication_seeds_are_consecutive(self):
        from qrcd import run
        obj = small_instance()
        cfg = base_config(obj, iterations_T=20)
        summary = estimate(obj, cfg, 30, epsilon=0.01, rho=0.1, k=20)
        # replication 7 must equal a plain run with seed base+7
        import dataclasses
        solo = run(obj, dataclasses.replace(cfg, seed=cfg.seed + 7))
        assert summary.per_iteration_mean_residuals[20] == pytest.approx(
            summary.mean_residual_sq, rel=1e-12)
        assert solo.records[-1].residual_sq <= summary.mean_residual_sq * 30


class TestValidation:
    def test_too_few_replications(self):
        obj = small_instance()
        with pytest.raises(ValueError):
            estimate(obj, base_config(obj), 10, epsilon=0.01, rho=0.1, k=10)

    def test_k_bounds(self):
        obj = small_instance()
        cfg = base_config(obj, iterations_T=50)
        with pytest.raises(ValueError):
            estimate(obj, cfg, 30, epsilon=0.01, rho=0.1, k=51)
        with pytest.raises(ValueError):
            estimate(obj, cfg, 30, epsilon=0.01, rho=0.1, k=-1)

    def test_bad_epsilon_rho(self):
        obj = small_instance()
        cfg = base_config(obj)
        with pytest.raises(ValueError):
            estimate(obj, cfg, 30, epsilon=0.0, rho=0.1, k=10)
        with pytest.raises(ValueError):
            estimate(obj, cfg, 30, epsilon=0.01, rho=1.0, k=10)
