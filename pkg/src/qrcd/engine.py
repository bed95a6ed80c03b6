"""Sequential simulator for quantized randomized coordinate descent.

The simulated network is a star: at each iteration one of d coordinate
nodes is drawn uniformly, computes its partial derivative at the current
iterate, and the fusion center applies

    x <- x - step_t * d * Q(partial) * e_s

where Q is the configured quantizer. A single authoritative iterate is
kept, which is observationally identical to every machine applying the
same broadcast update. Runs are deterministic given the config, including
the seed of the pinned coordinate generator.
"""

import math
from dataclasses import dataclass

import numpy as np

from .objective import QuadraticObjective, partial_derivative
from .quantizer import Quantizer
from .rng import SplitMix64

__all__ = [
    "RunConfig",
    "IterationRecord",
    "Trajectory",
    "ShadowMismatch",
    "draw_uniform_coordinate",
    "run",
    "run_with_shadow",
]

_SHADOW_TOL = 1e-12


class ShadowMismatch(RuntimeError):
    """Quantized and shadow iterates stopped differing by step*d*noise."""


@dataclass(frozen=True)
class RunConfig:
    """One experiment's inputs.

    probe_input, when given, is a row vector whose prediction
    probe_input . x is recorded after every update.
    """

    step_t: float
    delta: float
    iterations_T: int
    seed: int
    x0: np.ndarray
    probe_input: np.ndarray | None = None

    def __post_init__(self):
        if not (math.isfinite(self.step_t) and self.step_t > 0.0):
            raise ValueError(f"step_t must be positive, got {self.step_t!r}")
        if not (math.isfinite(self.delta) and self.delta >= 0.0):
            raise ValueError(f"delta must be >= 0, got {self.delta!r}")
        if self.iterations_T < 1:
            raise ValueError(f"iterations_T must be >= 1, got {self.iterations_T}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        x0 = np.array(self.x0, dtype=float).reshape(-1)
        if not np.isfinite(x0).all():
            raise ValueError("x0 must be finite")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if self.probe_input is not None:
            probe = np.array(self.probe_input, dtype=float).reshape(-1)
            if probe.shape != x0.shape:
                raise ValueError("probe_input must have the same dimension as x0")
            probe.setflags(write=False)
            object.__setattr__(self, "probe_input", probe)


@dataclass(frozen=True, slots=True)
class IterationRecord:
    iter_index: int
    selected_coordinate: int  # 1-based node label, as serialized
    raw_partial: float
    quantized_partial: float
    noise_value: float  # raw - quantized
    residual_sq: float
    probe_prediction: float | None


@dataclass(frozen=True)
class Trajectory:
    config: RunConfig
    records: list[IterationRecord]
    final_iterate: np.ndarray
    initial_residual_sq: float
    diverged: bool = False  # a non-finite value truncated the run early


def draw_uniform_coordinate(rng: SplitMix64, d: int) -> int:
    """Uniform 0-based coordinate index in [0, d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return rng.randbelow(d)


def run(obj: QuadraticObjective, cfg: RunConfig) -> Trajectory:
    """Execute exactly cfg.iterations_T update steps and record each one.

    Iterates are never clipped; if a partial derivative or iterate becomes
    non-finite the run stops early with `diverged` set (the trajectory is
    truncated at the last recorded iteration). A LevelOverflow from the
    quantizer propagates to the caller.
    """
    traj, _ = _simulate(obj, cfg, track_shadow=False)
    return traj


def run_with_shadow(obj: QuadraticObjective, cfg: RunConfig) -> tuple[Trajectory, list[float]]:
    """run(), also recording the unquantized-step shadow sequence.

    The shadow iterate x_{j+1} = x_j^q - step*d*raw*e_s restarts from the
    quantized state every iteration; the returned list holds its squared
    residuals. Each iteration the identity
    x_{j+1}^q - x_{j+1} = step*d*(raw - quantized)*e_s is verified to
    1e-12 absolute tolerance.

    Raises:
        ShadowMismatch: the identity fails (internal consistency bug).
    """
    return _simulate(obj, cfg, track_shadow=True)


def _simulate(obj, cfg, track_shadow):
    d = obj.dimension
    if cfg.x0.shape != (d,):
        raise ValueError(f"x0 has dimension {cfg.x0.shape[0]}, objective has {d}")
    quantizer = Quantizer(cfg.delta)
    rng = SplitMix64(cfg.seed)
    eta = cfg.step_t * d
    x_star = obj.minimizer_x_star
    probe = cfg.probe_input

    x = cfg.x0.copy()
    diff0 = x - x_star
    initial_residual_sq = float(diff0 @ diff0)

    records: list[IterationRecord] = []
    shadow_residuals: list[float] = []
    diverged = False
    # overflow to inf is the detected divergence signal, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, cfg.iterations_T + 1):
            idx = draw_uniform_coordinate(rng, d)
            raw = partial_derivative(obj, x, idx)
            if not math.isfinite(raw):
                diverged = True
                break
            quantized = quantizer.quantize(raw)
            noise = raw - quantized
            if track_shadow:
                shadow_coord = x[idx] - eta * raw
            x[idx] -= eta * quantized
            if track_shadow:
                gap = x[idx] - shadow_coord
                # 1e-12 absolute at desk scale; rounding of the two updates
                # grows with the iterate magnitude, widen proportionally
                tol = _SHADOW_TOL + 4e-15 * max(1.0, abs(shadow_coord), abs(x[idx]))
                if abs(gap - eta * noise) > tol:
                    raise ShadowMismatch(
                        f"iteration {j}: quantized-shadow gap {gap!r} "
                        f"!= step*d*noise {eta * noise!r}"
                    )
                shadow = x.copy()
                shadow[idx] = shadow_coord
                sdiff = shadow - x_star
                shadow_residuals.append(float(sdiff @ sdiff))
            diff = x - x_star
            residual_sq = float(diff @ diff)
            prediction = float(probe @ x) if probe is not None else None
            records.append(
                IterationRecord(
                    iter_index=j,
                    selected_coordinate=idx + 1,
                    raw_partial=raw,
                    quantized_partial=quantized,
                    noise_value=noise,
                    residual_sq=residual_sq,
                    probe_prediction=prediction,
                )
            )
            if not (math.isfinite(x[idx]) and math.isfinite(residual_sq)):
                diverged = True
                break

    trajectory = Trajectory(
        config=cfg,
        records=records,
        final_iterate=x,
        initial_residual_sq=initial_residual_sq,
        diverged=diverged,
    )
    return trajectory, (shadow_residuals if track_shadow else None)
