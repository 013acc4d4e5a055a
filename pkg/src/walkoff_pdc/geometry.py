"""Pump walk-off frame and per-crystal longitudinal integration windows.

The walk-off frame tilts z onto the pump Poynting vector. The tilt by ρ
happens inside the principal plane, which is rotated by α about z with
respect to the lab x–z plane:

    u  = x cos α + y sin α        (in the principal plane)
    v  = y cos α - x sin α        (normal to it)
    x' = (u cos ρ - z sin ρ) cos α - v sin α
    y' = v cos α + (u cos ρ - z sin ρ) sin α
    z' = u sin ρ + z cos ρ

All crystals of an arrangement share one pivot for this rotation, placed at
the face where the two crystals meet, so the pump path is continuous across
the pair (for the compensated pair it is the familiar V shape).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Arrangement",
    "GeometryConfig",
    "LongitudinalWindow",
    "RotatedFrame",
    "build_rotated_frame",
    "longitudinal_windows",
    "rotate_to_walkoff_frame",
    "walkoff_frame_matrix",
]


class Arrangement(str, Enum):
    SINGLE = "single"
    PARALLEL = "parallel_pair"
    COMPENSATED = "compensated_pair"

    @property
    def n_crystals(self) -> int:
        return 1 if self is Arrangement.SINGLE else 2


@dataclass(frozen=True)
class GeometryConfig:
    alpha: float = 0.0  # rad, principal plane vs lab x axis
    gap: float = 0.0  # m, free space between the crystals
    arrangement: Arrangement = Arrangement.SINGLE

    def __post_init__(self):
        object.__setattr__(self, "arrangement", Arrangement(self.arrangement))
        if not self.gap >= 0:
            raise ValueError(f"gap must be >= 0, got {self.gap}")
        if not 0 <= self.alpha < np.pi:
            raise ValueError(f"alpha must lie in [0, pi), got {self.alpha}")


def walkoff_frame_matrix(alpha: float, rho: float) -> np.ndarray:
    """3x3 orthogonal matrix R with r' = R r."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cr, sr = np.cos(rho), np.sin(rho)
    return np.array(
        [
            [ca * ca * cr + sa * sa, sa * ca * (cr - 1.0), -sr * ca],
            [sa * ca * (cr - 1.0), ca * ca + sa * sa * cr, -sr * sa],
            [ca * sr, sa * sr, cr],
        ]
    )


@dataclass(frozen=True)
class RotatedFrame:
    matrix: np.ndarray
    rho_signed: float
    alpha: float

    def rotate(self, vec):
        """Apply R to a stack of 3-vectors with the component axis first."""
        vec = np.asarray(vec)
        return np.tensordot(self.matrix, vec, axes=(1, 0))

    def unrotate(self, vec):
        vec = np.asarray(vec)
        return np.tensordot(self.matrix.T, vec, axes=(1, 0))

    def to_primed(self, x, y, z):
        return tuple(self.rotate(np.stack(np.broadcast_arrays(x, y, z))))

    def from_primed(self, xp, yp, zp):
        return tuple(self.unrotate(np.stack(np.broadcast_arrays(xp, yp, zp))))


def build_rotated_frame(alpha: float, rho_signed: float) -> RotatedFrame:
    if not (np.isfinite(alpha) and np.isfinite(rho_signed)):
        raise ValueError(f"non-finite frame angles alpha={alpha}, rho={rho_signed}")
    return RotatedFrame(walkoff_frame_matrix(alpha, rho_signed), float(rho_signed), float(alpha))


def rotate_to_walkoff_frame(dk_lab, frame: RotatedFrame):
    """Δk' = R Δk, so that Δk·r = Δk'·r' for r' = R r."""
    return frame.rotate(dk_lab)


@dataclass(frozen=True)
class LongitudinalWindow:
    z_start: float  # m, along z'
    z_end: float

    @property
    def length(self) -> float:
        return self.z_end - self.z_start

    @property
    def center(self) -> float:
        return 0.5 * (self.z_start + self.z_end)


def longitudinal_windows(length: float, rho: float, arrangement, which_crystal: int = 1) -> LongitudinalWindow:
    """z' range of crystal ``which_crystal`` (1 or 2) of physical length ``length``.

    Each crystal spans L / cos ρ along z'. A single crystal is centred on the
    pivot; in a pair the first crystal ends and the second starts at the pivot.
    """
    arrangement = Arrangement(arrangement)
    if which_crystal not in range(1, arrangement.n_crystals + 1):
        raise IndexError(f"crystal {which_crystal} does not exist in arrangement {arrangement.value!r}")
    span = length / np.cos(rho)
    if arrangement is Arrangement.SINGLE:
        return LongitudinalWindow(-0.5 * span, 0.5 * span)
    if which_crystal == 1:
        return LongitudinalWindow(-span, 0.0)
    return LongitudinalWindow(0.0, span)
