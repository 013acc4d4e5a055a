"""Observables derived from a two-photon amplitude grid.

Marginal and conditional angular profiles, the detector-plane mapping and
pinhole blur, symmetry and fringe metrics, and the Schmidt decomposition
of the in-plane amplitude with a Gaussian fit of its modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import golden

from .crystal_optics import DomainError
from .tpa import NumericalError, TPAGrid

__all__ = [
    "DetectorSpec",
    "GaussianFit",
    "Profile1D",
    "SchmidtResult",
    "angle_to_position",
    "asymmetry_metric",
    "conditional",
    "count_fringes",
    "fit_gaussian",
    "fringe_visibility",
    "gaussian_overlap",
    "interior_extrema",
    "pinhole_smooth",
    "position_to_angle",
    "rms_width",
    "schmidt_decompose",
    "unconditional",
]


@dataclass
class Profile1D:
    axis: np.ndarray  # rad unless ``unit`` says otherwise
    values: np.ndarray
    kind: str  # "unconditional" | "conditional"
    unit: str = "rad"
    theta_fixed: float | None = None  # realised conditioning angle
    fixed_index: int | None = None
    scale: float = 1.0  # values = raw / scale
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.axis.shape != self.values.shape or self.axis.ndim != 1:
            raise ValueError("profile axis and values must be 1D arrays of equal length")
        if np.any(np.diff(self.axis) <= 0):
            raise ValueError("profile axis must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("profile values must be non-negative")

    @property
    def raw(self) -> np.ndarray:
        return self.values * self.scale


@dataclass(frozen=True)
class DetectorSpec:
    focal_length: float  # m
    pinhole: float = 0.0  # m, diameter

    def __post_init__(self):
        if not self.focal_length > 0:
            raise ValueError(f"focal length must be positive, got {self.focal_length}")
        if not self.pinhole >= 0:
            raise ValueError(f"pinhole diameter must be >= 0, got {self.pinhole}")

    @property
    def angular_width(self) -> float:
        return self.pinhole / self.focal_length


def _peak_normalize(values):
    peak = float(values.max()) if values.size else 0.0
    if peak > 0:
        return values / peak, peak
    return values, 1.0


def unconditional(tpa: TPAGrid, which: str = "signal", peak_normalize: bool = True) -> Profile1D:
    """Marginal P(θs) = Σ_θi |F|² Δθ (or the idler marginal)."""
    if which not in ("signal", "idler"):
        raise ValueError(f"which must be 'signal' or 'idler', got {which!r}")
    axis_summed = 1 if which == "signal" else 0
    raw = np.sum(tpa.intensity, axis=axis_summed) * tpa.grid.step
    values, scale = _peak_normalize(raw) if peak_normalize else (raw, 1.0)
    return Profile1D(tpa.grid.axis, values, "unconditional", scale=scale)


def conditional(tpa: TPAGrid, theta_fixed: float, which: str = "signal", peak_normalize: bool = True) -> Profile1D:
    """Profile of one photon with the partner pinned to the grid sample nearest ``theta_fixed``."""
    axis = tpa.grid.axis
    if not axis[0] <= theta_fixed <= axis[-1]:
        raise DomainError(f"theta_fixed={theta_fixed} rad outside grid [{axis[0]}, {axis[-1]}]")
    idx = int(np.argmin(np.abs(axis - theta_fixed)))
    raw = tpa.intensity[:, idx] if which == "signal" else tpa.intensity[idx, :]
    values, scale = _peak_normalize(raw) if peak_normalize else (raw, 1.0)
    return Profile1D(axis, values, "conditional", theta_fixed=float(axis[idx]), fixed_index=idx, scale=scale)


def angle_to_position(theta, det: DetectorSpec):
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) >= np.pi / 2):
        raise DomainError("angle must satisfy |theta| < pi/2")
    return det.focal_length * np.tan(theta)


def position_to_angle(x, det: DetectorSpec):
    return np.arctan(np.asarray(x, dtype=float) / det.focal_length)


def pinhole_smooth(p: Profile1D, det: DetectorSpec) -> Profile1D:
    """Blur with a top-hat of angular width pinhole/f.

    Edge samples receive fractional weights; each source sample's weight is
    renormalised over the part of the kernel that lands on the axis, so the
    profile sum is conserved.
    """
    step = np.diff(p.axis)
    if not np.allclose(step, step[0], rtol=1e-9, atol=0):
        raise DomainError("pinhole smoothing needs a uniform axis")
    step = step[0]
    width = det.angular_width
    if width < step:
        msg = f"pinhole width {width:.3g} rad below grid step {step:.3g} rad; profile left unchanged"
        return Profile1D(p.axis, p.values.copy(), p.kind, p.unit, p.theta_fixed, p.fixed_index, p.scale,
                         p.warnings + (msg,))

    half = 0.5 * width / step  # in samples
    reach = int(np.ceil(half - 0.5))
    offsets = np.arange(-reach, reach + 1)
    kernel = np.clip(np.minimum(offsets + 0.5, half) - np.maximum(offsets - 0.5, -half), 0.0, None)
    kernel /= kernel.sum()
    if len(kernel) > len(p.values):
        raise DomainError("pinhole wider than the whole profile axis")

    # share of each source sample's kernel that falls on the axis
    coverage = np.convolve(np.ones_like(p.values), kernel, mode="same")
    smoothed = np.convolve(p.values / coverage, kernel, mode="same")
    smoothed = np.clip(smoothed, 0.0, None)
    return Profile1D(p.axis, smoothed, p.kind, p.unit, p.theta_fixed, p.fixed_index, p.scale, p.warnings)


def asymmetry_metric(p: Profile1D) -> float:
    """‖p(θ) - p(-θ)‖₁ / ‖p(θ) + p(-θ)‖₁ on an axis symmetric about zero."""
    tol = 1e-9 * max(np.max(np.abs(p.axis)), np.finfo(float).tiny)
    if not np.allclose(p.axis, -p.axis[::-1], rtol=0, atol=tol):
        raise DomainError("asymmetry metric needs an axis symmetric about 0")
    mirrored = p.values[::-1]
    total = np.sum(np.abs(p.values + mirrored))
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(p.values - mirrored)) / total)


def _window_mask(axis, window):
    if window is None:
        return np.ones(axis.shape, dtype=bool)
    lo, hi = window
    return (axis >= lo) & (axis <= hi)


def interior_extrema(p: Profile1D, window=None) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior local maxima and minima inside ``window``."""
    v = p.values
    mid = v[1:-1]
    maxima = np.flatnonzero((mid > v[:-2]) & (mid >= v[2:])) + 1
    minima = np.flatnonzero((mid < v[:-2]) & (mid <= v[2:])) + 1
    mask = _window_mask(p.axis, window)
    return maxima[mask[maxima]], minima[mask[minima]]


def count_fringes(p: Profile1D, window=None) -> int:
    return len(interior_extrema(p, window)[0])


def fringe_visibility(p: Profile1D, window=None) -> float:
    """(max - min) / (max + min) taken over the interior extrema in ``window``."""
    maxima, minima = interior_extrema(p, window)
    if len(maxima) == 0 or len(minima) == 0:
        raise DomainError("fringe visibility needs at least one interior maximum and one minimum")
    vmax = p.values[maxima].max()
    vmin = p.values[minima].min()
    return float((vmax - vmin) / (vmax + vmin))


def rms_width(p: Profile1D) -> float:
    w = p.values / p.values.sum()
    mean = np.sum(w * p.axis)
    return float(np.sqrt(np.sum(w * (p.axis - mean) ** 2)))


@dataclass(frozen=True)
class GaussianFit:
    overlap: float
    center: float
    width: float
    tilt: float  # rad⁻¹, linear phase slope
    curvature: float  # rad⁻², quadratic phase coefficient


def _golden_refine(func, grid, tol):
    """Minimise ``func`` by scanning ``grid`` then golden-section inside the best bracket."""
    vals = np.array([func(x) for x in grid])
    k = int(np.argmin(vals))
    if k == 0 or k == len(grid) - 1:
        raise NumericalError(
            f"optimum at the edge of the search interval [{grid[0]:.4g}, {grid[-1]:.4g}] "
            f"(best value {vals[k]:.6g} at {grid[k]:.4g})"
        )
    if vals[k] == vals[k - 1] or vals[k] == vals[k + 1]:
        return grid[k], vals[k]
    xmin = golden(func, brack=(grid[k - 1], grid[k], grid[k + 1]), tol=tol)
    fx = func(xmin)
    return (xmin, fx) if fx <= vals[k] else (grid[k], vals[k])


def fit_gaussian(axis, mode, tol: float = 1e-10) -> GaussianFit:
    """Best overlap |⟨φ|g⟩|² of a mode with a displaced, tilted, curved Gaussian.

    g(θ) ∝ exp(-(θ-θ0)²/2w² + i a (θ-θ0) + i b (θ-θ0)²). The centre θ0 and the
    tilt a are the first moments of the mode (position and mean conjugate
    momentum); the width w and curvature b are refined by nested golden-section
    searches. Tilt and curvature only absorb a transverse shift or a defocus of
    the near-field mode.
    """
    axis = np.asarray(axis, dtype=float)
    mode = np.asarray(mode, dtype=complex)
    dx = axis[1] - axis[0]
    norm = np.sqrt(np.sum(np.abs(mode) ** 2) * dx)
    if not norm > 0:
        raise NumericalError("cannot fit a Gaussian to an all-zero mode")
    m = mode / norm
    dens = np.abs(m) ** 2 * dx
    center = float(np.sum(axis * dens))
    # mean phase slope from neighbour phase increments (exact for polynomial phases up to 2nd order)
    pair = np.conj(m[:-1]) * m[1:]
    tilt = float(np.sum(np.abs(pair) * np.angle(pair)) / (np.sum(np.abs(pair)) * dx))
    spread = float(np.sqrt(np.sum((axis - center) ** 2 * dens)))
    if not spread > 0:
        raise NumericalError("mode has zero width")
    u = (axis - center) / spread
    carrier = np.conj(m) * np.exp(1j * tilt * (axis - center))

    def neg_overlap(log_w, beta):
        w = np.exp(log_w)
        g = np.exp(-0.5 * (u / w) ** 2 + 1j * beta * u**2)
        return -np.abs(np.sum(carrier * g)) ** 2 * dx / np.sum(np.abs(g) ** 2)

    def best_beta(log_w):
        return _golden_refine(lambda b: neg_overlap(log_w, b), np.linspace(-6.0, 6.0, 121), tol)

    log_w, _ = _golden_refine(lambda lw: best_beta(lw)[1], np.linspace(np.log(0.05), np.log(20.0), 81), tol)
    beta, value = best_beta(log_w)
    return GaussianFit(
        overlap=float(min(-value, 1.0)),
        center=center,
        width=float(np.exp(log_w) * spread),
        tilt=tilt,
        curvature=float(beta / spread**2),
    )


def gaussian_overlap(axis, mode) -> float:
    return fit_gaussian(axis, mode).overlap


@dataclass
class SchmidtResult:
    axis: np.ndarray
    coefficients: np.ndarray  # λ_n, descending, sum to 1 over all modes
    signal_modes: np.ndarray  # shape (n_modes, n_axis)
    idler_modes: np.ndarray
    schmidt_number: float
    singular_values: np.ndarray  # of F·Δθ, all of them
    gaussian_overlap: float | None = None
    gaussian_fit: GaussianFit | None = field(default=None, repr=False)

    @property
    def amplitude_weights(self) -> np.ndarray:
        """s_n / Σ s_m, i.e. weights of the singular values rather than their squares."""
        s = self.singular_values
        return s[: len(self.coefficients)] / s.sum()

    def reconstruct(self) -> np.ndarray:
        root = np.sqrt(self.coefficients)
        return np.einsum("n,ni,nj->ij", root, self.signal_modes, self.idler_modes)


def schmidt_decompose(tpa: TPAGrid, n_modes: int | None = None, fit_mode0: bool = True) -> SchmidtResult:
    """Schmidt decomposition of the in-plane amplitude by SVD of F·Δθ.

    λ_n = s_n² / Σ s_m²; modes are unit-norm functions of angle, phased so that
    each signal mode's largest entry is real and positive (the idler partner
    takes the conjugate phase so the expansion is unchanged). For an
    exchange-symmetric F the phase is instead split so that signal and idler
    modes coincide; the largest entry then only has a positive real part.
    """
    values = tpa.values
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"Schmidt decomposition needs a square grid, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise NumericalError("amplitude grid contains non-finite values")
    step = tpa.grid.step
    u, s, vh = np.linalg.svd(values * step)
    total = np.sum(s**2)
    if not total > 0:
        raise NumericalError("all-zero amplitude has no Schmidt decomposition")
    lam_all = s**2 / total
    n = len(s) if n_modes is None else min(n_modes, len(s))

    signal = u[:, :n].T / np.sqrt(step)
    idler = vh[:n, :] / np.sqrt(step)
    rows = np.arange(n)
    peak = np.argmax(np.abs(signal), axis=1)
    phase = signal[rows, peak] / np.abs(signal[rows, peak])
    if np.max(np.abs(values - values.T)) <= 1e-12 * np.max(np.abs(values)):
        # symmetric F: the idler singular vector is the signal one times a phase;
        # splitting that phase evenly makes the two modes identical
        ratio = np.sum(np.conj(signal) * idler, axis=1) * step
        paired = np.abs(np.abs(ratio) - 1) < 1e-8
        half = np.exp(-0.5j * np.angle(ratio))
        half *= np.where((signal[rows, peak] / half).real < 0, -1, 1)
        phase = np.where(paired, half, phase)
    peak_abs = np.abs(signal[rows, peak])
    signal = signal / phase[:, None]
    idler = idler * phase[:, None]
    real_peak = np.abs(signal[rows, peak].imag) <= 1e-12 * peak_abs
    signal[rows[real_peak], peak[real_peak]] = signal[rows[real_peak], peak[real_peak]].real

    result = SchmidtResult(
        axis=tpa.grid.axis,
        coefficients=lam_all[:n],
        signal_modes=signal,
        idler_modes=idler,
        schmidt_number=float(1.0 / np.sum(lam_all**2)),
        singular_values=s,
    )
    if fit_mode0:
        result.gaussian_fit = fit_gaussian(tpa.grid.axis, signal[0])
        result.gaussian_overlap = result.gaussian_fit.overlap
    return result
