"""Two-photon amplitude of one crystal and of a crystal pair.

For one crystal the amplitude is the volume integral

    F(θs, θi) = ∫∫ dx' dy' ∫ dz'  exp(-(x'² + y'²) / 2σ²) exp(i Δk·r)

over the pump walk-off frame. Writing Δk·r = Δk'·r' the integrand factorises;
the two transverse Gaussian integrals and the finite z' integral are done
analytically (``single_crystal_tpa``). ``oracle_tpa_bruteforce`` integrates
the same expression on a Gauss-Legendre tensor grid in lab coordinates and
is only meant for cross-checking.

Two crystals combine as F = F1 exp(iφ) + F2 with the free-space phase φ
accumulated in the gap (``relative_phase``).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .crystal_optics import CrystalSpec, delta_k
from .geometry import (
    Arrangement,
    GeometryConfig,
    LongitudinalWindow,
    build_rotated_frame,
    longitudinal_windows,
)

__all__ = [
    "AngularGrid",
    "NumericalError",
    "PumpSpec",
    "TPAGrid",
    "TwoCrystalComposition",
    "arrangement_tpa",
    "compose_two_crystals",
    "crystal_pair",
    "oracle_tpa_bruteforce",
    "relative_phase",
    "single_crystal_tpa",
    "tpa_closed_form",
]

# rows per work unit; fixed so that the result never depends on the thread count
_ROW_BLOCK = 16


class NumericalError(RuntimeError):
    pass


@dataclass(frozen=True)
class PumpSpec:
    wavelength: float  # m
    sigma: float  # m, field envelope exp(-r²/2σ²)

    def __post_init__(self):
        if not (self.wavelength > 0 and self.sigma > 0):
            raise ValueError(f"pump wavelength and sigma must be positive, got {self}")


@dataclass(frozen=True)
class AngularGrid:
    """Uniform grid of external angles, endpoints included, shared by both photons."""

    theta_min: float
    theta_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.n}")
        if not self.theta_max > self.theta_min:
            raise ValueError("theta_max must exceed theta_min")

    @classmethod
    def symmetric(cls, theta_max: float, n: int) -> AngularGrid:
        return cls(-theta_max, theta_max, n)

    @property
    def axis(self) -> np.ndarray:
        axis = np.linspace(self.theta_min, self.theta_max, self.n)
        if self.is_symmetric:
            # exact mirror symmetry of the samples
            axis = 0.5 * (axis - axis[::-1])
        return axis

    @property
    def step(self) -> float:
        return (self.theta_max - self.theta_min) / (self.n - 1)

    @property
    def is_symmetric(self) -> bool:
        return self.theta_min == -self.theta_max

    def mesh(self):
        return np.meshgrid(self.axis, self.axis, indexing="ij")


@dataclass
class TPAGrid:
    """F[i, j] = F(θs = axis[i], θi = axis[j])."""

    grid: AngularGrid
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"values shape {self.values.shape} does not match grid n={self.grid.n}")

    def norm2(self) -> float:
        """Σ|F|² Δθ²."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.step**2)

    def normalize(self) -> TPAGrid:
        n2 = self.norm2()
        if not n2 > 0:
            raise NumericalError("cannot normalise an all-zero amplitude")
        return TPAGrid(self.grid, self.values / np.sqrt(n2), normalized=True)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def relative_phase(theta_s, theta_i, gap: float, pump_wavelength: float, phi_offset: float = 0.0,
                   signal_wavelength: float | None = None):
    """Gap phase φ = d (k_p0 - k_s0 cos θs - k_i0 cos θi) + offset, vacuum wavevectors."""
    if gap < 0:
        raise ValueError(f"gap must be >= 0, got {gap}")
    lam_s = 2 * pump_wavelength if signal_wavelength is None else signal_wavelength
    lam_i = 1.0 / (1.0 / pump_wavelength - 1.0 / lam_s)
    k_p, k_s, k_i = 2 * np.pi / pump_wavelength, 2 * np.pi / lam_s, 2 * np.pi / lam_i
    # 1 - cos written as 2 sin² to keep the small-angle phase accurate
    dk = (k_p - k_s - k_i) + 2 * k_s * np.sin(0.5 * np.asarray(theta_s)) ** 2 \
        + 2 * k_i * np.sin(0.5 * np.asarray(theta_i)) ** 2
    return gap * dk + phi_offset


@dataclass(frozen=True)
class TwoCrystalComposition:
    gap: float  # m
    pump_wavelength: float  # m
    phi_offset: float = 0.0  # rad
    signal_wavelength: float | None = None

    def phase(self, theta_s, theta_i):
        return relative_phase(theta_s, theta_i, self.gap, self.pump_wavelength, self.phi_offset,
                              self.signal_wavelength)

    @property
    def wavevectors(self) -> tuple[float, float, float]:
        lam_s = 2 * self.pump_wavelength if self.signal_wavelength is None else self.signal_wavelength
        lam_i = 1.0 / (1.0 / self.pump_wavelength - 1.0 / lam_s)
        return 2 * np.pi / self.pump_wavelength, 2 * np.pi / lam_s, 2 * np.pi / lam_i


def _signed_rho(spec: CrystalSpec, pump: PumpSpec, rho_sign, rho):
    magnitude = spec.walk_off(pump.wavelength) if rho is None else abs(rho)
    sign = spec.walkoff_sign if rho_sign is None else rho_sign
    if sign not in (-1, 1):
        raise ValueError(f"rho_sign must be +1 or -1, got {sign}")
    return sign * magnitude


def tpa_closed_form(theta_s, theta_i, pump: PumpSpec, spec: CrystalSpec, alpha: float,
                    window: LongitudinalWindow, rho_signed: float, signal_wavelength=None):
    """Pointwise closed form of the single-crystal amplitude (arrays broadcast)."""
    dk = delta_k(theta_s, theta_i, pump.wavelength, spec, alpha=alpha, rho_signed=rho_signed,
                 signal_wavelength=signal_wavelength).rotated
    sigma2 = pump.sigma**2
    transverse = 2 * np.pi * sigma2 * np.exp(-0.5 * sigma2 * (dk[0] ** 2 + dk[1] ** 2))
    span = window.length
    longitudinal = span * np.exp(1j * dk[2] * window.center) * np.sinc(dk[2] * span / (2 * np.pi))
    return spec.chi_sign * transverse * longitudinal


def single_crystal_tpa(grid: AngularGrid, pump: PumpSpec, spec: CrystalSpec, geom: GeometryConfig,
                       window: LongitudinalWindow | None = None, rho_sign: int | None = None, *,
                       rho: float | None = None, threads: int = 1,
                       signal_wavelength: float | None = None) -> TPAGrid:
    """Raw amplitude of one crystal on ``grid``.

    ``rho_sign`` overrides ``spec.walkoff_sign``; ``rho`` overrides the walk-off
    magnitude (``rho=0`` switches anisotropy off). Without ``window`` the crystal
    is centred on the frame pivot.
    """
    rho_signed = _signed_rho(spec, pump, rho_sign, rho)
    if window is None:
        window = longitudinal_windows(spec.length, rho_signed, Arrangement.SINGLE)
    axis = grid.axis
    out = np.empty((grid.n, grid.n), dtype=complex)

    def work(start):
        rows = slice(start, min(start + _ROW_BLOCK, grid.n))
        ts, ti = np.meshgrid(axis[rows], axis, indexing="ij")
        out[rows] = tpa_closed_form(ts, ti, pump, spec, geom.alpha, window, rho_signed, signal_wavelength)

    starts = range(0, grid.n, _ROW_BLOCK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)

    bad = ~np.isfinite(out)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NumericalError(f"non-finite amplitude at theta_s={axis[i]:.6g} rad, theta_i={axis[j]:.6g} rad")
    return TPAGrid(grid, out)


def oracle_tpa_bruteforce(theta_s: float, theta_i: float, pump: PumpSpec, spec: CrystalSpec,
                          geom: GeometryConfig, window: LongitudinalWindow | None = None,
                          rho_sign: int | None = None, *, rho: float | None = None,
                          order: tuple[int, int, int] = (96, 96, 48), extent: float = 8.0) -> complex:
    """Direct 3D Gauss-Legendre quadrature of the amplitude integral at one angle pair.

    Nodes are laid out in the walk-off frame (transverse box ±``extent``·σ, the
    crystal's z' window), mapped back to lab coordinates, and the lab-frame
    plane wave exp(i Δk·r) is evaluated there.
    """
    rho_signed = _signed_rho(spec, pump, rho_sign, rho)
    if window is None:
        window = longitudinal_windows(spec.length, rho_signed, Arrangement.SINGLE)
    dk = delta_k(theta_s, theta_i, pump.wavelength, spec, alpha=geom.alpha, rho_signed=rho_signed).lab

    half = extent * pump.sigma
    nodes, weights = [], []
    for n, (lo, hi) in zip(order, [(-half, half), (-half, half), (window.z_start, window.z_end)]):
        t, w = np.polynomial.legendre.leggauss(n)
        nodes.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
        weights.append(0.5 * (hi - lo) * w)

    xp, yp, zp = np.meshgrid(*nodes, indexing="ij")
    frame = build_rotated_frame(geom.alpha, rho_signed)
    x, y, z = frame.from_primed(xp, yp, zp)
    integrand = np.exp(-(xp**2 + yp**2) / (2 * pump.sigma**2)) * np.exp(1j * (dk[0] * x + dk[1] * y + dk[2] * z))
    w3 = weights[0][:, None, None] * weights[1][None, :, None] * weights[2][None, None, :]
    return complex(spec.chi_sign * np.sum(w3 * integrand))


def compose_two_crystals(f1: TPAGrid, f2: TPAGrid, comp: TwoCrystalComposition) -> TPAGrid:
    """F = F1 exp(iφ(θs, θi)) + F2, unnormalised."""
    if f1.grid != f2.grid or f1.values.shape != f2.values.shape:
        raise ValueError(f"grid mismatch: {f1.grid} vs {f2.grid}")
    ts, ti = f1.grid.mesh()
    phi = comp.phase(ts, ti)
    return TPAGrid(f1.grid, f1.values * np.exp(1j * phi) + f2.values)


def crystal_pair(spec: CrystalSpec, arrangement, chi_signs: tuple[int, int] = (1, 1)) -> tuple[CrystalSpec, CrystalSpec]:
    """First and second crystal for a pair arrangement built from one crystal cut.

    The compensated second crystal is the first one turned by 180° about x, so
    its walk-off points the other way.
    """
    arrangement = Arrangement(arrangement)
    if arrangement is Arrangement.SINGLE:
        raise ValueError("crystal_pair needs a two-crystal arrangement")
    first = replace(spec, chi_sign=chi_signs[0])
    flip = -1 if arrangement is Arrangement.COMPENSATED else 1
    second = replace(spec, chi_sign=chi_signs[1], walkoff_sign=flip * spec.walkoff_sign)
    return first, second


def arrangement_tpa(grid: AngularGrid, pump: PumpSpec, spec: CrystalSpec, geom: GeometryConfig,
                    phi_offset: float = 0.0, chi_signs: tuple[int, int] = (1, 1), *,
                    rho: float | None = None, threads: int = 1,
                    signal_wavelength: float | None = None) -> TPAGrid:
    """Raw amplitude of the whole arrangement described by ``geom``."""
    if geom.arrangement is Arrangement.SINGLE:
        return single_crystal_tpa(grid, pump, replace(spec, chi_sign=chi_signs[0]), geom, rho=rho, threads=threads,
                                  signal_wavelength=signal_wavelength)
    first, second = crystal_pair(spec, geom.arrangement, chi_signs)
    rho_mag = spec.walk_off(pump.wavelength) if rho is None else abs(rho)
    parts = []
    for which, crystal in ((1, first), (2, second)):
        window = longitudinal_windows(crystal.length, rho_mag, geom.arrangement, which)
        parts.append(single_crystal_tpa(grid, pump, crystal, geom, window, rho=rho_mag, threads=threads,
                                        signal_wavelength=signal_wavelength))
    comp = TwoCrystalComposition(geom.gap, pump.wavelength, phi_offset, signal_wavelength)
    return compose_two_crystals(parts[0], parts[1], comp)
