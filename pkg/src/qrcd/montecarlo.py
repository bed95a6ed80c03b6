"""Replicated runs estimating the probabilistic convergence guarantee.

The target criterion Pr(||x_k - x*||^2 <= epsilon) >= 1 - rho reduces via
Markov's inequality to E||x_k - x*||^2 <= epsilon * rho, so the harness
estimates both the mean squared residual at the cutoff iteration and the
empirical success fraction over seeded replications. Replication r uses
seed base_seed + r; aggregation is a deterministic fold in replication
order, so results do not depend on any execution schedule.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .engine import RunConfig, run
from .objective import QuadraticObjective
from .quantizer import LevelOverflow

__all__ = ["MonteCarloSummary", "estimate", "theorem_check"]

_MAX_CHECKPOINTS = 10_000


@dataclass(frozen=True)
class MonteCarloSummary:
    replications: int
    epsilon: float
    rho: float
    iterations_used: int
    mean_residual_sq: float
    success_fraction: float
    std_error_mean: float
    per_iteration_mean_residuals: list[float]  # entry i = mean at iteration i
    per_iteration_std_errors: list[float]
    aborted_runs: int  # diverged or overflowed replications, counted as failures


def estimate(obj: QuadraticObjective, base_cfg: RunConfig, replications: int,
             epsilon: float, rho: float, k: int) -> MonteCarloSummary:
    """Run `replications` seeded replications and aggregate residuals at k.

    Aborted replications (non-finite iterates or quantizer level overflow)
    keep their last observed residual and always count as failures, so
    divergence cannot inflate the success fraction. Per-iteration means
    cover iterations 0..k, capped at 10^4 checkpoints.
    """
    if replications < 30:
        raise ValueError(f"need at least 30 replications, got {replications}")
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if not (math.isfinite(rho) and 0.0 < rho < 1.0):
        raise ValueError(f"rho must be in (0, 1), got {rho!r}")
    if k < 0 or k > base_cfg.iterations_T:
        raise ValueError(f"need 0 <= k <= iterations_T, got k={k}")

    diff0 = base_cfg.x0 - obj.minimizer_x_star
    initial_residual = float(diff0 @ diff0)

    if k == 0:
        success = 1.0 if initial_residual <= epsilon else 0.0
        return MonteCarloSummary(
            replications=replications,
            epsilon=epsilon,
            rho=rho,
            iterations_used=0,
            mean_residual_sq=initial_residual,
            success_fraction=success,
            std_error_mean=0.0,
            per_iteration_mean_residuals=[initial_residual],
            per_iteration_std_errors=[0.0],
            aborted_runs=0,
        )

    residuals = np.empty((replications, k + 1))
    residuals[:, 0] = initial_residual
    aborted = 0
    succeeded = np.zeros(replications, dtype=bool)
    for rep in range(replications):
        cfg = replace(base_cfg, seed=base_cfg.seed + rep, iterations_T=k)
        failed = False
        try:
            trajectory = run(obj, cfg)
            failed = trajectory.diverged
            series = [record.residual_sq for record in trajectory.records]
        except LevelOverflow:
            failed = True
            series = []
        # hold the last observed value across any truncated tail
        last = series[-1] if series else initial_residual
        series = series + [last] * (k - len(series))
        residuals[rep, 1:] = series
        if failed:
            aborted += 1
        else:
            succeeded[rep] = residuals[rep, k] <= epsilon

    checkpoints = np.arange(k + 1)
    if k + 1 > _MAX_CHECKPOINTS:
        checkpoints = np.unique(np.linspace(0, k, _MAX_CHECKPOINTS).astype(int))
    sampled = residuals[:, checkpoints]
    with np.errstate(over="ignore", invalid="ignore"):
        # diverged replications contribute inf; the aborted count flags them
        means = sampled.mean(axis=0)
        std_errors = sampled.std(axis=0, ddof=1) / math.sqrt(replications)
        final = residuals[:, k]
        final_mean = float(final.mean())
        final_se = float(final.std(ddof=1) / math.sqrt(replications))
    return MonteCarloSummary(
        replications=replications,
        epsilon=epsilon,
        rho=rho,
        iterations_used=k,
        mean_residual_sq=final_mean,
        success_fraction=float(succeeded.mean()),
        std_error_mean=final_se,
        per_iteration_mean_residuals=[float(v) for v in means],
        per_iteration_std_errors=[float(v) for v in std_errors],
        aborted_runs=aborted,
    )


def theorem_check(summary: MonteCarloSummary) -> dict[str, bool]:
    """One-sided empirical checks of the convergence guarantee.

    The theory provides upper bounds, so each check allows three standard
    errors of Monte Carlo slack in the upper direction only:
      mean_ok:    mean residual^2 <= eps*rho + 3*SE(mean)
      success_ok: success fraction >= 1 - rho - 3*sqrt(rho(1-rho)/R)
    """
    target = summary.epsilon * summary.rho
    mean_ok = summary.mean_residual_sq <= target + 3.0 * summary.std_error_mean
    binom_se = math.sqrt(summary.rho * (1.0 - summary.rho) / summary.replications)
    success_ok = summary.success_fraction >= 1.0 - summary.rho - 3.0 * binom_se
    return {"mean_ok": mean_ok, "success_ok": success_ok}
