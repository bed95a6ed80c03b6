"""Closed-form convergence quantities for the quantized coordinate descent loop.

Everything here is a pure function of the problem constants: the expected
squared residual contracts per iteration by C(t) = t^2 L^2 d - 2 t m + 1,
minimized at t_opt = 1/(g L d) with value C_min = 1 - 1/(g^2 d), where
g = L/m. From an accuracy/confidence pair (epsilon, rho) the module derives
the sufficient quantization resolution and the iteration-count bounds for
the quantized and quantization-free algorithms.
"""

import math
from dataclasses import dataclass

__all__ = [
    "TheoryInputs",
    "TheoryReport",
    "SufficiencyCheck",
    "InvalidConfidence",
    "DegenerateContraction",
    "contraction_constant",
    "optimal_step",
    "delta_bound",
    "iteration_bound",
    "markov_check",
    "check_delta_sufficiency",
]


class InvalidConfidence(ValueError):
    """Confidence level rho must lie strictly between 0 and 1."""


class DegenerateContraction(ValueError):
    """C_min = 0 (g = d = 1): one expected step converges, bounds are vacuous."""


@dataclass(frozen=True)
class TheoryInputs:
    L: float
    m: float
    d: int
    epsilon: float
    rho: float
    initial_residual_sq: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.L) and self.L >= self.m > 0.0):
            raise ValueError(f"need L >= m > 0, got L={self.L!r}, m={self.m!r}")
        if self.d < 1:
            raise ValueError(f"need d >= 1, got {self.d}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (math.isfinite(self.rho) and 0.0 < self.rho < 1.0):
            raise InvalidConfidence(f"rho must be in (0, 1), got {self.rho!r}")
        if not (math.isfinite(self.initial_residual_sq) and self.initial_residual_sq > 0.0):
            raise ValueError("initial_residual_sq must be positive")


@dataclass(frozen=True)
class TheoryReport:
    """All derived quantities; *_raw fields are the real-valued expressions
    before taking ceilings and clamping at zero."""

    t_opt: float
    c_min: float
    delta_max: float
    k1: int
    k2: int
    k_q: int
    k_free: int
    markov_threshold: float
    k1_raw: float
    k2_raw: float
    k_free_raw: float


def contraction_constant(t: float, L: float, m: float, d: int) -> float:
    """Per-iteration expected squared-residual multiplier C(t)."""
    return t * t * L * L * d - 2.0 * t * m + 1.0


def optimal_step(L: float, m: float, d: int) -> tuple[float, float]:
    """Step size minimizing C(t) and the minimum value C_min.

    t_opt = 1/(g L d), C_min = 1 - 1/(g^2 d) with g = L/m.
    """
    g = L / m
    t_opt = 1.0 / (g * L * d)
    c_min = 1.0 - 1.0 / (g * g * d)
    return t_opt, c_min


def delta_bound(inputs: TheoryInputs) -> float:
    """Sufficient quantization resolution:
    delta_max = (epsilon rho L^2 / 2m) * (1/C_min - 1).

    Raises:
        DegenerateContraction: C_min = 0, the bound is unbounded.
    """
    _, c_min = optimal_step(inputs.L, inputs.m, inputs.d)
    if c_min <= 0.0:
        raise DegenerateContraction("C_min = 0: any finite resolution suffices")
    scale = inputs.epsilon * inputs.rho * inputs.L * inputs.L / (2.0 * inputs.m)
    return scale * (1.0 / c_min - 1.0)


def markov_check(epsilon: float, rho: float, mean_residual_sq: float) -> bool:
    """True iff the expected squared residual meets the Markov reduction
    E||x_k - x*||^2 <= epsilon * rho of the probabilistic target."""
    return mean_residual_sq <= epsilon * rho


def _ceil_clamped(value: float) -> int:
    if value <= 0.0:
        return 0
    return int(math.ceil(value))


def iteration_bound(inputs: TheoryInputs) -> TheoryReport:
    """Iteration-count bounds at the optimal step size.

    k1 covers the contraction phase down to epsilon*rho/2; k2 covers the
    extra iterations while the residual exceeds 1 (zero when the initial
    residual is already <= 1, where that phase is vacuous); the quantized
    bound is k_q = k1 + k2. k_free is the quantization-free bound. Real
    values are reported alongside the clamped integer ceilings.
    """
    t_opt, c_min = optimal_step(inputs.L, inputs.m, inputs.d)
    if c_min <= 0.0:
        raise DegenerateContraction("C_min = 0: bounds are vacuous")
    dmax = delta_bound(inputs)
    r0 = inputs.initial_residual_sq
    eps_rho = inputs.epsilon * inputs.rho

    log_contract = math.log(1.0 / c_min)
    k1_raw = math.log(2.0 * r0 / eps_rho) / log_contract
    k_free_raw = math.log(r0 / eps_rho) / log_contract

    noisy_base = c_min + (eps_rho / 2.0) * (1.0 - c_min)
    if noisy_base < 1.0:
        k2_raw = math.log(2.0 * r0) / math.log(1.0 / noisy_base)
    else:
        # eps*rho >= 2 makes the noisy contraction vacuous; phase not needed
        k2_raw = 0.0

    k1 = _ceil_clamped(k1_raw)
    k2 = 0 if r0 <= 1.0 else _ceil_clamped(k2_raw)
    k_free = _ceil_clamped(k_free_raw)
    return TheoryReport(
        t_opt=t_opt,
        c_min=c_min,
        delta_max=dmax,
        k1=k1,
        k2=k2,
        k_q=k1 + k2,
        k_free=k_free,
        markov_threshold=eps_rho,
        k1_raw=k1_raw,
        k2_raw=k2_raw,
        k_free_raw=k_free_raw,
    )


@dataclass(frozen=True)
class SufficiencyCheck:
    """Evaluation of the two proof-side conditions at t_opt, C_min, delta_max.

    condition one: (C/(1-C)) * t d delta * (1 + t d delta / 4) <= eps rho / 2
    condition two: C * (t d delta)^2 / (4 (1-C))             <= 1/2
    """

    inputs: TheoryInputs
    delta_max: float
    lhs_noise_floor: float
    rhs_noise_floor: float
    noise_floor_ok: bool
    lhs_warmup: float
    rhs_warmup: float
    warmup_ok: bool

    @property
    def both_ok(self) -> bool:
        return self.noise_floor_ok and self.warmup_ok


def check_delta_sufficiency(inputs: TheoryInputs) -> SufficiencyCheck:
    """Check whether delta_bound actually satisfies both proof conditions.

    The headline bound drops a second-order term, so the first condition
    can be violated by a factor (1 + t d delta / 4); callers record any
    violation as a finding instead of assuming the claim.
    """
    t_opt, c_min = optimal_step(inputs.L, inputs.m, inputs.d)
    if c_min <= 0.0:
        raise DegenerateContraction("C_min = 0: sufficiency check is vacuous")
    dmax = delta_bound(inputs)
    td_delta = t_opt * inputs.d * dmax
    ratio = c_min / (1.0 - c_min)
    lhs1 = ratio * td_delta * (1.0 + td_delta / 4.0)
    rhs1 = inputs.epsilon * inputs.rho / 2.0
    lhs2 = c_min * td_delta * td_delta / (4.0 * (1.0 - c_min))
    rhs2 = 0.5
    return SufficiencyCheck(
        inputs=inputs,
        delta_max=dmax,
        lhs_noise_floor=lhs1,
        rhs_noise_floor=rhs1,
        noise_floor_ok=lhs1 <= rhs1,
        lhs_warmup=lhs2,
        rhs_warmup=rhs2,
        warmup_ok=lhs2 <= rhs2,
    )
