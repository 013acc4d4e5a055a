"""Dispersion, phase matching and walk-off for a negative uniaxial crystal.

Sellmeier sets use the four-parameter form

    n^2(λ) = A + B / (λ^2 - C) - D λ^2,        λ in µm,

one set per polarisation. The default set is β-BaB2O4 from D. Eimerl et al.,
J. Appl. Phys. 62, 1968 (1987), nominally valid from 0.22 to 1.06 µm.

All wavelengths passed to the public functions are vacuum wavelengths in
metres; angles are in radians.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .geometry import build_rotated_frame

__all__ = [
    "BBO_EIMERL",
    "CrystalSpec",
    "DispersionModel",
    "DomainError",
    "PhaseMismatch",
    "delta_k",
    "internal_angle",
    "n_extraordinary",
    "n_extraordinary_theta",
    "n_ordinary",
    "phase_matching_angle",
    "walk_off_angle",
]


class DomainError(ValueError):
    """An input lies outside the domain where the model is defined."""


@dataclass(frozen=True)
class DispersionModel:
    """Ordinary and extraordinary Sellmeier coefficients (A, B, C, D)."""

    ordinary: tuple[float, float, float, float]
    extraordinary: tuple[float, float, float, float]
    wavelength_range: tuple[float, float]  # metres
    name: str = "custom"

    def __post_init__(self):
        lo, hi = self.wavelength_range
        if not (0 < lo < hi):
            raise ValueError(f"invalid wavelength range {self.wavelength_range}")
        for label, coeffs in (("ordinary", self.ordinary), ("extraordinary", self.extraordinary)):
            if len(coeffs) != 4:
                raise ValueError(f"{label} Sellmeier set needs 4 coefficients, got {len(coeffs)}")
            # pole of B/(λ²-C) must sit below the valid range
            if coeffs[2] >= (lo * 1e6) ** 2:
                raise ValueError(f"{label} Sellmeier pole lies inside the valid range")

    def check(self, wavelength):
        lo, hi = self.wavelength_range
        wl = np.asarray(wavelength, dtype=float)
        if np.any(~np.isfinite(wl)) or np.any(wl < lo) or np.any(wl > hi):
            raise DomainError(
                f"wavelength {wavelength!r} m outside valid range "
                f"[{lo * 1e9:.0f} nm, {hi * 1e9:.0f} nm] of dispersion model {self.name!r}"
            )


BBO_EIMERL = DispersionModel(
    ordinary=(2.7405, 0.0184, 0.0179, 0.0155),
    extraordinary=(2.3730, 0.0128, 0.0156, 0.0044),
    wavelength_range=(0.22e-6, 1.06e-6),
    name="BBO (Eimerl 1987)",
)


def _sellmeier(coeffs, wavelength):
    a, b, c, d = coeffs
    lam2 = (np.asarray(wavelength, dtype=float) * 1e6) ** 2
    return np.sqrt(a + b / (lam2 - c) - d * lam2)


def n_ordinary(wavelength, model: DispersionModel = BBO_EIMERL):
    """Ordinary index n_o(λ)."""
    model.check(wavelength)
    return _sellmeier(model.ordinary, wavelength)


def n_extraordinary(wavelength, model: DispersionModel = BBO_EIMERL):
    """Principal extraordinary index n_e(λ) (propagation normal to the optic axis)."""
    model.check(wavelength)
    return _sellmeier(model.extraordinary, wavelength)


def n_extraordinary_theta(wavelength, theta, model: DispersionModel = BBO_EIMERL):
    """Index of the extraordinary wave propagating at ``theta`` to the optic axis.

    Index ellipsoid: n(θ)^-2 = cos²θ / n_o² + sin²θ / n_e².
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi / 2):
        raise DomainError(f"angle to optic axis {theta!r} rad outside [0, pi/2]")
    no = n_ordinary(wavelength, model)
    ne = n_extraordinary(wavelength, model)
    return 1.0 / np.sqrt((np.cos(theta) / no) ** 2 + (np.sin(theta) / ne) ** 2)


def phase_matching_angle(
    pump_wavelength: float,
    model: DispersionModel = BBO_EIMERL,
    bracket: tuple[float, float] = (1e-6, np.pi / 2 - 1e-6),
    xtol: float = 1e-15,
) -> float:
    """Optic-axis angle for collinear, frequency-degenerate type-I (eoo) phase matching.

    Solves n_e(θ, λ_p) = n_o(2 λ_p) by bisection on ``bracket``.
    """
    target = float(n_ordinary(2 * pump_wavelength, model))

    def mismatch(theta):
        return float(n_extraordinary_theta(pump_wavelength, theta, model)) - target

    lo, hi = bracket
    if mismatch(lo) * mismatch(hi) > 0:
        raise DomainError(
            f"no phase-matching solution for pump {pump_wavelength * 1e9:.1f} nm "
            f"in bracket [{lo:.6g}, {hi:.6g}] rad"
        )
    return bisect(mismatch, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def walk_off_angle(pump_wavelength, theta_oa, model: DispersionModel = BBO_EIMERL):
    """Poynting-vector walk-off angle ρ >= 0 of the extraordinary pump."""
    n_theta = n_extraordinary_theta(pump_wavelength, theta_oa, model)
    no = n_ordinary(pump_wavelength, model)
    ne = n_extraordinary(pump_wavelength, model)
    tan_rho = 0.5 * n_theta**2 * np.sin(2 * np.asarray(theta_oa, dtype=float)) * abs(ne**-2 - no**-2)
    return np.arctan(tan_rho)


@dataclass(frozen=True)
class CrystalSpec:
    """One uniaxial crystal slab with the pump incident normally on its faces."""

    length: float  # m
    optic_axis_angle: float  # rad, between pump wavevector and optic axis
    chi_sign: int = 1
    walkoff_sign: int = 1
    dispersion: DispersionModel = field(default=BBO_EIMERL)

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"crystal length must be positive, got {self.length}")
        if not 0 < self.optic_axis_angle < np.pi / 2:
            raise ValueError(f"optic axis angle {self.optic_axis_angle} rad outside (0, pi/2)")
        if self.chi_sign not in (-1, 1):
            raise ValueError(f"chi_sign must be +1 or -1, got {self.chi_sign}")
        if self.walkoff_sign not in (-1, 1):
            raise ValueError(f"walkoff_sign must be +1 or -1, got {self.walkoff_sign}")

    def walk_off(self, pump_wavelength: float) -> float:
        return float(walk_off_angle(pump_wavelength, self.optic_axis_angle, self.dispersion))


@dataclass(frozen=True)
class PhaseMismatch:
    """Wave-vector mismatch Δk = k_p - k_s - k_i in the lab and walk-off frames (rad/m)."""

    lab: np.ndarray  # shape (3, ...): Δk_x, Δk_y, Δk_z
    rotated: np.ndarray  # shape (3, ...): Δk'_x, Δk'_y, Δk'_z
    k_pump: float
    k_signal: float
    k_idler: float

    @property
    def dkx(self):
        return self.lab[0]

    @property
    def dky(self):
        return self.lab[1]

    @property
    def dkz(self):
        return self.lab[2]


def internal_angle(theta_ext, index):
    """Refracted angle inside a medium of ``index`` (transverse-k conservation)."""
    s = np.sin(np.asarray(theta_ext, dtype=float))
    if np.any(np.abs(s) >= index):
        raise DomainError(f"total internal reflection: |sin(theta)| >= n = {index}")
    return np.arcsin(s / index)


def delta_k(
    theta_s,
    theta_i,
    pump_wavelength: float,
    spec: CrystalSpec,
    alpha: float = 0.0,
    rho_signed: float | None = None,
    signal_wavelength: float | None = None,
) -> PhaseMismatch:
    """Phase mismatch for signal/idler emitted at external in-plane angles.

    The pump wavevector points along z with the extraordinary index at the
    optic-axis angle; signal and idler are ordinary. By default both sit at the
    degenerate wavelength 2 λ_p; ``signal_wavelength`` detunes the signal and
    fixes the idler by energy conservation. Out-of-plane angles are zero, so the
    lab-frame Δk_y vanishes; the walk-off frame mixes it in when α ≠ 0.
    """
    model = spec.dispersion
    lam_s = 2 * pump_wavelength if signal_wavelength is None else signal_wavelength
    lam_i = 1.0 / (1.0 / pump_wavelength - 1.0 / lam_s)
    k_p = 2 * np.pi / pump_wavelength * float(n_extraordinary_theta(pump_wavelength, spec.optic_axis_angle, model))
    n_s = float(n_ordinary(lam_s, model))
    n_i = float(n_ordinary(lam_i, model))
    k_s = 2 * np.pi / lam_s * n_s
    k_i = 2 * np.pi / lam_i * n_i

    ts = internal_angle(theta_s, n_s)
    ti = internal_angle(theta_i, n_i)
    ts, ti = np.broadcast_arrays(ts, ti)
    lab = np.stack(
        [
            -(k_s * np.sin(ts) + k_i * np.sin(ti)),
            np.zeros(ts.shape),
            k_p - k_s * np.cos(ts) - k_i * np.cos(ti),
        ]
    )
    if rho_signed is None:
        rho_signed = spec.walkoff_sign * spec.walk_off(pump_wavelength)
    frame = build_rotated_frame(alpha, rho_signed)
    return PhaseMismatch(lab=lab, rotated=frame.rotate(lab), k_pump=k_p, k_signal=k_s, k_idler=k_i)
