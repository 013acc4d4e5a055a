"""Config-driven scenario runs: load a YAML config, build the amplitude, analyse it, write files.

A config is a nested mapping; every section is optional and falls back to the
single-crystal laboratory setup (1 mm BBO, 405 nm pump, f = 200 mm lenses,
100 µm pinholes). Example::

    scenario: compensated_pair
    crystal: {length_mm: 1.0, optic_axis_angle_deg: auto, chi_sign: [1, 1]}
    pump: {wavelength_nm: 405, sigma_um: 39}
    geometry: {gap_mm: 5, alpha_deg: 0}
    grid: {theta_max_mrad: 30, n_points: 256}
    detector: {focal_mm: 200, pinhole_um: 100, fixed_mrad: 0}
    schmidt: {enabled: true, n_modes: 8}
    phase: {offset_rad: 0}
    output: {directory: out, emit: [tpa, unconditional, conditional, schmidt, summary]}

Analysis runs on the amplitude exactly as it is written to ``tpa.csv``, so
every number in the summary can be recomputed from the emitted files.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import (
    DetectorSpec,
    asymmetry_metric,
    conditional,
    count_fringes,
    fringe_visibility,
    pinhole_smooth,
    rms_width,
    schmidt_decompose,
    unconditional,
)
from .crystal_optics import BBO_EIMERL, CrystalSpec, DispersionModel, DomainError, phase_matching_angle
from .geometry import Arrangement, GeometryConfig
from .tpa import AngularGrid, PumpSpec, TPAGrid, arrangement_tpa

__all__ = [
    "ConfigError",
    "EMIT_KINDS",
    "PRESETS",
    "RunSummary",
    "ScenarioConfig",
    "config_hash",
    "list_presets",
    "load_config",
    "parse_config",
    "preset_config",
    "read_tpa_csv",
    "run_scenario",
]

EMIT_KINDS = ("tpa", "unconditional", "conditional", "schmidt", "summary")
TPA_HEADER = "theta_s_mrad,theta_i_mrad,re,im"
_FMT = "%.8e"  # 9 significant digits


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


# --- schema -----------------------------------------------------------------

DEFAULTS = {
    "scenario": "single",
    "crystal": {
        "length_mm": 1.0,
        "optic_axis_angle_deg": "auto",
        "chi_sign": [1, 1],
        "dispersion": None,
    },
    "pump": {"wavelength_nm": 405.0, "sigma_um": 39.0, "signal_wavelength_nm": None},
    "geometry": {"gap_mm": 5.0, "alpha_deg": 0.0},
    "grid": {"theta_max_mrad": 30.0, "n_points": 256},
    "detector": {"focal_mm": 200.0, "pinhole_um": 100.0, "fixed_mrad": 0.0},
    "schmidt": {"enabled": True, "n_modes": 8},
    "phase": {"offset_rad": 0.0},
    "reference": {"lambda0": None, "gaussian_overlap": None},
    "output": {"directory": "out", "emit": list(EMIT_KINDS)},
}

_DISPERSION_KEYS = {"name", "ordinary", "extraordinary", "range_nm"}


def _merge(base, override, path=""):
    """Deep-merge ``override`` into a copy of ``base``, rejecting unknown keys."""
    if not isinstance(override, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(override).__name__}")
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError(f"{where}: unknown key")
        if isinstance(base[key], dict):
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def _number(raw, where, *, positive=False, nonneg=False):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {raw!r}")
    value = float(raw)
    if not np.isfinite(value):
        raise ConfigError(f"{where}: must be finite, got {raw!r}")
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be > 0, got {raw!r}")
    if nonneg and not value >= 0:
        raise ConfigError(f"{where}: must be >= 0, got {raw!r}")
    return value


def _integer(raw, where, minimum):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"{where}: expected an integer, got {raw!r}")
    if raw < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {raw}")
    return raw


def _dispersion(raw) -> DispersionModel:
    if raw is None:
        return BBO_EIMERL
    if not isinstance(raw, dict):
        raise ConfigError("crystal.dispersion: expected a mapping")
    unknown = set(raw) - _DISPERSION_KEYS
    if unknown:
        raise ConfigError(f"crystal.dispersion.{sorted(unknown)[0]}: unknown key")
    coeffs = {}
    for key in ("ordinary", "extraordinary"):
        seq = raw.get(key)
        if not isinstance(seq, list) or len(seq) != 4:
            raise ConfigError(f"crystal.dispersion.{key}: expected 4 Sellmeier coefficients [A, B, C, D]")
        coeffs[key] = tuple(_number(c, f"crystal.dispersion.{key}") for c in seq)
    rng = raw.get("range_nm")
    if not isinstance(rng, list) or len(rng) != 2:
        raise ConfigError("crystal.dispersion.range_nm: expected [min, max]")
    lo, hi = (_number(v, "crystal.dispersion.range_nm", positive=True) for v in rng)
    try:
        return DispersionModel(coeffs["ordinary"], coeffs["extraordinary"], (lo * 1e-9, hi * 1e-9),
                               str(raw.get("name", "custom")))
    except ValueError as exc:
        raise ConfigError(f"crystal.dispersion: {exc}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario; lengths in SI units, angles in radians."""

    arrangement: Arrangement
    crystal: CrystalSpec
    chi_signs: tuple[int, int]
    pump: PumpSpec
    signal_wavelength: float | None
    geometry: GeometryConfig
    grid: AngularGrid
    detector: DetectorSpec
    fixed_angle: float
    schmidt_enabled: bool
    n_modes: int
    phi_offset: float
    reference_lambda0: float | None
    reference_overlap: float | None
    output_dir: Path
    emit: tuple[str, ...]
    resolved: dict = field(repr=False, compare=False)  # fully-defaulted raw mapping

    @property
    def rho(self) -> float:
        return self.crystal.walk_off(self.pump.wavelength)


def parse_config(raw: dict | None) -> ScenarioConfig:
    """Validate a raw mapping (as read from YAML) and apply defaults."""
    cfg = _merge(DEFAULTS, raw or {})

    try:
        arrangement = Arrangement(cfg["scenario"])
    except ValueError:
        names = ", ".join(a.value for a in Arrangement)
        raise ConfigError(f"scenario: expected one of {names}, got {cfg['scenario']!r}") from None

    c, p, g = cfg["crystal"], cfg["pump"], cfg["geometry"]
    length = _number(c["length_mm"], "crystal.length_mm", positive=True) * 1e-3
    model = _dispersion(c["dispersion"])
    wavelength = _number(p["wavelength_nm"], "pump.wavelength_nm", positive=True) * 1e-9
    sigma = _number(p["sigma_um"], "pump.sigma_um", positive=True) * 1e-6
    signal_wl = None
    if p["signal_wavelength_nm"] is not None:
        signal_wl = _number(p["signal_wavelength_nm"], "pump.signal_wavelength_nm", positive=True) * 1e-9
        if not signal_wl > wavelength:
            raise ConfigError("pump.signal_wavelength_nm: must exceed the pump wavelength")
        try:
            model.check(signal_wl)
            model.check(1.0 / (1.0 / wavelength - 1.0 / signal_wl))
        except DomainError as exc:
            raise ConfigError(f"pump.signal_wavelength_nm: {exc}") from None

    angle = c["optic_axis_angle_deg"]
    try:
        if angle == "auto":
            theta_oa = phase_matching_angle(wavelength, model)
        else:
            theta_oa = np.deg2rad(_number(angle, "crystal.optic_axis_angle_deg", positive=True))
            model.check(wavelength)
            model.check(2 * wavelength)
    except DomainError as exc:
        raise ConfigError(f"pump.wavelength_nm: {exc}") from None

    chi = c["chi_sign"]
    if isinstance(chi, int) and not isinstance(chi, bool):
        chi = [chi, chi]
    if not isinstance(chi, list) or len(chi) not in (1, 2) or any(s not in (-1, 1) or isinstance(s, bool) for s in chi):
        raise ConfigError(f"crystal.chi_sign: expected +1/-1 or a list of them per crystal, got {c['chi_sign']!r}")
    chi_signs = (chi[0], chi[-1])
    try:
        crystal = CrystalSpec(length, float(theta_oa), dispersion=model)
    except ValueError as exc:
        raise ConfigError(f"crystal.optic_axis_angle_deg: {exc}") from None

    gap = _number(g["gap_mm"], "geometry.gap_mm", nonneg=True) * 1e-3
    alpha_deg = _number(g["alpha_deg"], "geometry.alpha_deg")
    if not 0 <= alpha_deg < 180:
        raise ConfigError(f"geometry.alpha_deg: must lie in [0, 180), got {alpha_deg}")
    geometry = GeometryConfig(np.deg2rad(alpha_deg), gap, arrangement)

    gr = cfg["grid"]
    theta_max = _number(gr["theta_max_mrad"], "grid.theta_max_mrad", positive=True) * 1e-3
    if theta_max >= 0.5:
        raise ConfigError("grid.theta_max_mrad: must be below 500 mrad")
    schmidt = cfg["schmidt"]
    if not isinstance(schmidt["enabled"], bool):
        raise ConfigError("schmidt.enabled: expected true or false")
    n_points = _integer(gr["n_points"], "grid.n_points", 64 if schmidt["enabled"] else 2)
    n_modes = _integer(schmidt["n_modes"], "schmidt.n_modes", 1)

    d = cfg["detector"]
    detector = DetectorSpec(
        _number(d["focal_mm"], "detector.focal_mm", positive=True) * 1e-3,
        _number(d["pinhole_um"], "detector.pinhole_um", nonneg=True) * 1e-6,
    )
    fixed = _number(d["fixed_mrad"], "detector.fixed_mrad") * 1e-3
    if abs(fixed) > theta_max:
        raise ConfigError("detector.fixed_mrad: conditioning angle lies outside the grid")

    ref = cfg["reference"]
    ref_l0 = None if ref["lambda0"] is None else _number(ref["lambda0"], "reference.lambda0", positive=True)
    ref_ov = None if ref["gaussian_overlap"] is None else _number(
        ref["gaussian_overlap"], "reference.gaussian_overlap", positive=True)

    out = cfg["output"]
    if not isinstance(out["directory"], str) or not out["directory"]:
        raise ConfigError("output.directory: expected a non-empty path string")
    emit = out["emit"]
    if not isinstance(emit, list) or any(e not in EMIT_KINDS for e in emit):
        raise ConfigError(f"output.emit: expected a list drawn from {list(EMIT_KINDS)}, got {emit!r}")
    if "schmidt" in emit and not schmidt["enabled"]:
        emit = [e for e in emit if e != "schmidt"]

    return ScenarioConfig(
        arrangement=arrangement,
        crystal=crystal,
        chi_signs=chi_signs,
        pump=PumpSpec(wavelength, sigma),
        signal_wavelength=signal_wl,
        geometry=geometry,
        grid=AngularGrid.symmetric(theta_max, n_points),
        detector=detector,
        fixed_angle=fixed,
        schmidt_enabled=schmidt["enabled"],
        n_modes=n_modes,
        phi_offset=_number(cfg["phase"]["offset_rad"], "phase.offset_rad"),
        reference_lambda0=ref_l0,
        reference_overlap=ref_ov,
        output_dir=Path(out["directory"]),
        emit=tuple(k for k in EMIT_KINDS if k in emit),
        resolved=cfg,
    )


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Read a YAML scenario file. ``overrides`` (e.g. a preset) sit underneath the file's keys."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{path}: parse error at {where}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if overrides:
        raw = _deep_update(copy.deepcopy(overrides), raw)
    return parse_config(raw)


def _deep_update(base: dict, top: dict) -> dict:
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            base[key] = _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the resolved config; the output directory does not count."""
    resolved = copy.deepcopy(config.resolved)
    resolved["output"].pop("directory", None)
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --- presets ----------------------------------------------------------------

_GAP_NOTE = "The phase offset is a free parameter (default 0), so fringes may be translated relative to a measurement."

PRESETS: dict[str, tuple[str, dict]] = {
    "fig4_single": (
        "Single 1 mm BBO crystal: bent amplitude and asymmetric unconditional profile.",
        {"scenario": "single"},
    ),
    "fig5_parallel": (
        "Two 1 mm crystals with parallel optic axes 5 mm apart: walk-off adds up, fringes. " + _GAP_NOTE,
        {"scenario": "parallel_pair"},
    ),
    "fig6_compensated": (
        "Second crystal turned by 180 degrees: walk-off compensation, symmetric fringed profiles. " + _GAP_NOTE,
        {"scenario": "compensated_pair"},
    ),
    "fig7_weak": (
        "Compensated pair with crystals and pump polarisation turned by 90 degrees: scan normal to the principal plane.",
        {"scenario": "compensated_pair", "geometry": {"alpha_deg": 90.0}},
    ),
    "fig8_schmidt_single2mm": (
        "Schmidt decomposition of a single 2 mm crystal on a 512-point grid wide enough to hold the sinc tails.",
        {
            "scenario": "single",
            "crystal": {"length_mm": 2.0},
            "grid": {"theta_max_mrad": 150.0, "n_points": 512},
            "reference": {"lambda0": 0.094, "gaussian_overlap": 0.997},
        },
    ),
    "fig8_schmidt_compensated": (
        "Schmidt decomposition of the compensated 2x1 mm pair with the crystals in contact.",
        {
            "scenario": "compensated_pair",
            "geometry": {"gap_mm": 0.0},
            "grid": {"theta_max_mrad": 150.0, "n_points": 512},
            "reference": {"lambda0": 0.15, "gaussian_overlap": 0.999},
        },
    ),
}


def list_presets() -> list[tuple[str, str]]:
    return [(name, desc) for name, (desc, _) in PRESETS.items()]


def preset_config(name: str) -> dict:
    """Raw mapping of a preset, suitable for ``parse_config`` or writing as YAML."""
    try:
        return copy.deepcopy(PRESETS[name][1])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None


# --- outputs ----------------------------------------------------------------

def _format_tpa(tpa: TPAGrid) -> str:
    ts, ti = tpa.grid.mesh()
    table = np.column_stack([ts.ravel() * 1e3, ti.ravel() * 1e3, tpa.values.real.ravel(), tpa.values.imag.ravel()])
    return _format_table(TPA_HEADER, table)


def _format_table(header: str, table: np.ndarray) -> str:
    lines = [header]
    lines.extend(",".join(_FMT % v for v in row) for row in table)
    return "\n".join(lines) + "\n"


def read_tpa_csv(path) -> TPAGrid:
    """Rebuild a TPAGrid from ``tpa.csv`` (row-major over θs, then θi)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != TPA_HEADER:
            raise ValueError(f"unexpected TPA header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    n = int(round(np.sqrt(len(data))))
    if n * n != len(data):
        raise ValueError(f"TPA table with {len(data)} rows is not square")
    theta_i = data[:n, 1] * 1e-3
    grid = AngularGrid(float(theta_i[0]), float(theta_i[-1]), n)
    return TPAGrid(grid, (data[:, 2] + 1j * data[:, 3]).reshape(n, n))


def _roundtrip(tpa: TPAGrid) -> TPAGrid:
    """The amplitude as it reads back from its CSV text, so analysis matches the file."""
    text_re = np.array([float(_FMT % v) for v in tpa.values.real.ravel()])
    text_im = np.array([float(_FMT % v) for v in tpa.values.imag.ravel()])
    return TPAGrid(tpa.grid, (text_re + 1j * text_im).reshape(tpa.values.shape))


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _write_atomic(path: Path, text: str):
    """Write to a temporary sibling, then rename over ``path``."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- running ----------------------------------------------------------------

@dataclass
class RunSummary:
    data: dict
    files: dict[str, str]

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"


def _visibility(p):
    try:
        return fringe_visibility(p)
    except DomainError:
        return None


def _profile_metrics(raw, det):
    smooth = pinhole_smooth(raw, det)
    out = {
        "asymmetry": asymmetry_metric(raw),
        "rms_width_mrad": rms_width(raw) * 1e3,
        "fringes": count_fringes(raw),
        "visibility": _visibility(raw),
        "visibility_smoothed": _visibility(smooth),
        "smoothing_warnings": list(smooth.warnings),
    }
    return out, smooth


def analyse(tpa: TPAGrid, config: ScenarioConfig) -> tuple[dict, dict[str, np.ndarray]]:
    """Observables of one amplitude grid; returns summary fields and CSV tables."""
    det = config.detector
    axis_mrad = tpa.grid.axis * 1e3
    uncond = unconditional(tpa, "signal")
    cond = conditional(tpa, config.fixed_angle, "signal")
    u_metrics, u_smooth = _profile_metrics(uncond, det)
    c_metrics, c_smooth = _profile_metrics(cond, det)
    c_metrics["theta_fixed_mrad"] = cond.theta_fixed * 1e3
    fields = {
        "unconditional": u_metrics,
        "unconditional_idler_asymmetry": asymmetry_metric(unconditional(tpa, "idler")),
        "conditional": c_metrics,
        "norm2": tpa.norm2(),
    }
    tables = {
        "unconditional": np.column_stack([axis_mrad, uncond.values]),
        "unconditional_smoothed": np.column_stack([axis_mrad, u_smooth.values]),
        "conditional": np.column_stack([axis_mrad, cond.values]),
        "conditional_smoothed": np.column_stack([axis_mrad, c_smooth.values]),
    }
    if config.schmidt_enabled:
        res = schmidt_decompose(tpa, config.n_modes)
        fit = res.gaussian_fit
        schmidt = {
            "lambda": res.coefficients.tolist(),
            "lambda0": float(res.coefficients[0]),
            "amplitude_weight0": float(res.amplitude_weights[0]),
            "schmidt_number": res.schmidt_number,
            "gaussian_overlap": res.gaussian_overlap,
            "gaussian_fit": {
                "center_mrad": fit.center * 1e3,
                "width_mrad": fit.width * 1e3,
                "tilt_per_mrad": fit.tilt * 1e-3,
                "curvature_per_mrad2": fit.curvature * 1e-6,
            },
        }
        comparison = {}
        if config.reference_lambda0 is not None:
            comparison["lambda0"] = {
                "reference": config.reference_lambda0,
                "model": schmidt["lambda0"],
                "deviation": schmidt["lambda0"] - config.reference_lambda0,
                "amplitude_weight0": schmidt["amplitude_weight0"],
                "amplitude_weight0_deviation": schmidt["amplitude_weight0"] - config.reference_lambda0,
            }
        if config.reference_overlap is not None:
            comparison["gaussian_overlap"] = {
                "reference": config.reference_overlap,
                "model": res.gaussian_overlap,
                "deviation": res.gaussian_overlap - config.reference_overlap,
            }
        if comparison:
            schmidt["reference_comparison"] = comparison
        fields["schmidt"] = schmidt
        idx = np.arange(len(res.coefficients))
        tables["schmidt"] = np.column_stack([idx, res.coefficients, res.amplitude_weights])
        modes = [axis_mrad]
        for n in idx:
            modes += [res.signal_modes[n].real, res.signal_modes[n].imag]
        tables["schmidt_modes"] = np.column_stack(modes)
    return fields, tables


_TABLE_HEADERS = {
    "unconditional": "theta_mrad,value",
    "unconditional_smoothed": "theta_mrad,value",
    "conditional": "theta_mrad,value",
    "conditional_smoothed": "theta_mrad,value",
    "schmidt": "n,lambda,amplitude_weight",
}


def _resolved_parameters(config: ScenarioConfig) -> dict:
    c = config.crystal
    rho = config.rho
    return {
        "arrangement": config.arrangement.value,
        "crystal_length_mm": c.length * 1e3,
        "optic_axis_angle_deg": float(np.rad2deg(c.optic_axis_angle)),
        "walkoff_angle_deg": float(np.rad2deg(rho)),
        "walkoff_distance_um": float(c.length * np.tan(rho) * 1e6),
        "chi_signs": list(config.chi_signs),
        "dispersion": c.dispersion.name,
        "pump_wavelength_nm": config.pump.wavelength * 1e9,
        "sigma_um": config.pump.sigma * 1e6,
        "gap_mm": config.geometry.gap * 1e3,
        "alpha_deg": float(np.rad2deg(config.geometry.alpha)),
        "phi_offset_rad": config.phi_offset,
        "theta_max_mrad": config.grid.theta_max * 1e3,
        "n_points": config.grid.n,
        "focal_mm": config.detector.focal_length * 1e3,
        "pinhole_um": config.detector.pinhole * 1e6,
        "pinhole_width_mrad": config.detector.angular_width * 1e3,
    }


def build_tpa(config: ScenarioConfig, threads: int = 1) -> TPAGrid:
    return arrangement_tpa(config.grid, config.pump, config.crystal, config.geometry,
                           config.phi_offset, config.chi_signs, threads=threads,
                           signal_wavelength=config.signal_wavelength)


def run_scenario(config: ScenarioConfig, out_dir=None, threads: int = 1) -> RunSummary:
    """Compute everything first, then write the requested files (summary last)."""
    out = Path(out_dir) if out_dir is not None else config.output_dir
    tpa = _roundtrip(build_tpa(config, threads))
    fields, tables = analyse(tpa, config)
    data = {
        "version": __version__,
        "config_hash": config_hash(config),
        "parameters": _resolved_parameters(config),
        **fields,
    }

    texts = {}
    if "tpa" in config.emit:
        texts["tpa.csv"] = _format_tpa(tpa)
    for kind in ("unconditional", "conditional"):
        if kind in config.emit:
            for name in (kind, f"{kind}_smoothed"):
                texts[f"{name}.csv"] = _format_table(_TABLE_HEADERS[name], tables[name])
    if "schmidt" in config.emit:
        texts["schmidt.csv"] = _format_table(_TABLE_HEADERS["schmidt"], tables["schmidt"])
        n = tables["schmidt_modes"].shape[1] // 2
        header = ",".join(["theta_mrad"] + [f"mode{k}_{part}" for k in range(n) for part in ("re", "im")])
        texts["schmidt_modes.csv"] = _format_table(header, tables["schmidt_modes"])
    summary = RunSummary(data, {})
    if "summary" in config.emit:
        texts["summary.json"] = summary.to_json()

    out.mkdir(parents=True, exist_ok=True)
    for name, text in texts.items():
        _write_atomic(out / name, text)
        summary.files[name] = str(out / name)
    return summary


def config_to_yaml(raw: dict) -> str:
    return yaml.safe_dump(raw, sort_keys=True)
