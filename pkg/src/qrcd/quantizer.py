"""Uniform mid-tread scalar quantizer with half-open cells.

A value v is mapped to the level y*delta whose cell
[(y - 1/2)*delta, (y + 1/2)*delta) contains it, so the boundary value
(y + 1/2)*delta always belongs to the upper cell (round half up) and the
error never exceeds delta/2 in magnitude. A resolution of zero denotes
the identity channel.
"""

import math
from dataclasses import dataclass

import numpy as np

_MAX_LEVEL = 2**53


class LevelOverflow(OverflowError):
    """Level index is too large to be represented exactly."""


@dataclass(frozen=True)
class Quantizer:
    resolution_delta: float = 0.0

    def __post_init__(self):
        delta = self.resolution_delta
        if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta >= 0.0):
            raise ValueError(f"resolution_delta must be finite and >= 0, got {delta!r}")
        object.__setattr__(self, "resolution_delta", float(delta))

    def quantize(self, v: float) -> float:
        """Quantize one scalar to the nearest level.

        Returns y*delta for the unique integer y with
        (y - 1/2)*delta <= v < (y + 1/2)*delta; returns v unchanged when
        the resolution is zero.

        Raises:
            ValueError: v is not finite.
            LevelOverflow: |y| exceeds 2**53 (level not exactly
                representable; the channel has no saturation mode).
        """
        delta = self.resolution_delta
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"cannot quantize non-finite value {v!r}")
        if delta == 0.0:
            return v
        ratio = v / delta
        if not math.isfinite(ratio) or abs(ratio) > _MAX_LEVEL:
            raise LevelOverflow(f"value {v!r} needs level beyond 2**53 at delta={delta!r}")
        y = math.floor(ratio + 0.5)
        # float division can misplace an exact cell edge; repair against the
        # defining half-open inequality, comparing the in-cell offset (exact
        # near the boundary) rather than reconstructed edge values
        offset = v - y * delta
        while offset < -0.5 * delta:
            y -= 1
            offset = v - y * delta
        while offset >= 0.5 * delta:
            y += 1
            offset = v - y * delta
        if abs(y) > _MAX_LEVEL:
            raise LevelOverflow(f"value {v!r} needs level {y} beyond 2**53")
        return y * delta

    def quantize_coordinate_vector(self, value: float, index: int, dim: int) -> np.ndarray:
        """Vector with quantize(value) at `index` and zeros elsewhere."""
        if not 0 <= index < dim:
            raise IndexError(f"coordinate index {index} out of range for dimension {dim}")
        out = np.zeros(dim)
        out[index] = self.quantize(value)
        return out
