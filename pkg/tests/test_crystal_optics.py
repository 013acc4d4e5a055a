import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from walkoff_pdc.crystal_optics import (
    BBO_EIMERL,
    CrystalSpec,
    DispersionModel,
    DomainError,
    delta_k,
    internal_angle,
    n_extraordinary,
    n_extraordinary_theta,
    n_ordinary,
    phase_matching_angle,
    walk_off_angle,
)

wavelengths = st.floats(0.23e-6, 1.05e-6)


def test_ordinary_index_reference_values():
    assert n_ordinary(810e-9) == pytest.approx(1.6611, abs=5e-5)
    assert n_ordinary(405e-9) == pytest.approx(1.6923, abs=5e-5)


def test_indices_match_high_precision_oracle():
    for wl in (250e-9, 405e-9, 532e-9, 810e-9, 1.0e-6):
        assert n_ordinary(wl) == pytest.approx(float(oracles.sellmeier(oracles.ORDINARY, wl)), rel=1e-14)
        assert n_extraordinary(wl) == pytest.approx(float(oracles.sellmeier(oracles.EXTRAORDINARY, wl)), rel=1e-14)


def test_out_of_range_wavelength_names_range():
    with pytest.raises(DomainError, match=r"220 nm, 1060 nm"):
        n_ordinary(10e-6)
    with pytest.raises(DomainError):
        n_extraordinary_theta(10e-6, 0.3)


def test_index_ellipsoid_endpoints():
    assert n_extraordinary_theta(405e-9, 0.0) == pytest.approx(n_ordinary(405e-9), rel=1e-15)
    assert n_extraordinary_theta(405e-9, np.pi / 2) == pytest.approx(n_extraordinary(405e-9), rel=1e-15)
    assert n_extraordinary_theta(405e-9, np.pi / 2) == pytest.approx(1.5680, abs=5e-5)


def test_angle_outside_quadrant_rejected():
    with pytest.raises(DomainError):
        n_extraordinary_theta(405e-9, -0.1)


@given(wavelengths)
def test_negative_uniaxial(wl):
    assert n_ordinary(wl) > n_extraordinary(wl) > 1


@given(wavelengths, st.floats(0, np.pi / 2), st.floats(0, np.pi / 2))
def test_extraordinary_index_monotone_in_angle(wl, a, b):
    lo, hi = sorted((a, b))
    assert n_extraordinary_theta(wl, lo) >= n_extraordinary_theta(wl, hi) - 1e-15


def test_phase_matching_round_trip(theta_pm):
    n_e = n_extraordinary_theta(405e-9, theta_pm)
    assert abs(n_e - n_ordinary(810e-9)) / n_ordinary(810e-9) < 1e-10
    assert np.rad2deg(theta_pm) == pytest.approx(float(oracles.mp.degrees(oracles.matching_angle(405e-9))), abs=1e-9)


def test_phase_matching_independent_of_bracket(theta_pm):
    other = phase_matching_angle(405e-9, bracket=(0.2, 0.8))
    assert other == pytest.approx(theta_pm, abs=1e-14)


def test_no_phase_matching_solution():
    with pytest.raises(DomainError, match="no phase-matching solution"):
        phase_matching_angle(405e-9, bracket=(0.6, 1.0))


def test_walk_off_against_oracle(theta_pm):
    rho = walk_off_angle(405e-9, theta_pm)
    ref = oracles.walkoff(405e-9, oracles.matching_angle(405e-9))
    assert rho == pytest.approx(float(ref), rel=1e-12)
    assert walk_off_angle(405e-9, 0.0) == 0.0


def test_walk_off_depends_only_on_indices(theta_pm):
    # swapping in a model with identical indices but a different name/range changes nothing
    clone = DispersionModel(BBO_EIMERL.ordinary, BBO_EIMERL.extraordinary, (0.3e-6, 0.9e-6), "clone")
    assert walk_off_angle(405e-9, theta_pm, clone) == walk_off_angle(405e-9, theta_pm)


def test_crystal_spec_validation(theta_pm):
    with pytest.raises(ValueError):
        CrystalSpec(-1e-3, theta_pm)
    with pytest.raises(ValueError):
        CrystalSpec(1e-3, 2.0)
    with pytest.raises(ValueError):
        CrystalSpec(1e-3, theta_pm, chi_sign=0)


def test_sellmeier_pole_in_range_rejected():
    with pytest.raises(ValueError):
        DispersionModel((2.7, 0.02, 0.1, 0.01), (2.3, 0.01, 0.01, 0.004), (0.22e-6, 1e-6))


def test_collinear_mismatch_vanishes(bbo_1mm):
    pm = delta_k(0.0, 0.0, 405e-9, bbo_1mm)
    assert abs(pm.dkz) / pm.k_pump < 1e-9
    assert pm.dkx == 0 and pm.dky == 0


def test_golden_mismatch_at_twenty_mrad(bbo_1mm):
    # golden value from the mpmath oracle (tests/oracles.py): 1867.7730696620290771 rad/m
    pm = delta_k(0.02, -0.02, 405e-9, bbo_1mm)
    assert pm.dkz == pytest.approx(1867.7730696620290771, rel=1e-9)
    _, dkz = oracles.mismatch(oracles.mp.mpf("0.02"), oracles.mp.mpf("-0.02"), 405e-9)
    assert pm.dkz == pytest.approx(float(dkz), rel=1e-9)
    assert abs(pm.dkx) < 1e-9


@given(st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
@settings(max_examples=50)
def test_transverse_mismatch_odd(bbo_1mm, ts, ti):
    a = delta_k(ts, ti, 405e-9, bbo_1mm).dkx
    b = delta_k(-ts, -ti, 405e-9, bbo_1mm).dkx
    assert a == -b


@given(st.floats(-0.1, 0.1), st.floats(-0.1, 0.1), st.floats(0, np.pi - 1e-9), st.floats(-0.1, 0.1))
@settings(max_examples=100)
def test_rotated_norm_preserved(bbo_1mm, ts, ti, alpha, rho):
    pm = delta_k(ts, ti, 405e-9, bbo_1mm, alpha=alpha, rho_signed=rho)
    n_lab = np.linalg.norm(pm.lab)
    n_rot = np.linalg.norm(pm.rotated)
    assert n_rot == pytest.approx(n_lab, rel=1e-12, abs=1e-9)


def test_mismatch_against_oracle_on_grid(bbo_1mm):
    for ts in (-0.03, 0.0, 0.011):
        for ti in (-0.02, 0.005, 0.03):
            pm = delta_k(ts, ti, 405e-9, bbo_1mm)
            dkx, dkz = oracles.mismatch(oracles.mp.mpf(ts), oracles.mp.mpf(ti), 405e-9)
            assert pm.dkx == pytest.approx(float(dkx), rel=1e-10)
            assert pm.dkz == pytest.approx(float(dkz), rel=1e-8)


def test_total_internal_reflection_guard():
    with pytest.raises(DomainError, match="total internal reflection"):
        internal_angle(np.pi / 2, 0.9)


def test_detuned_signal_changes_mismatch(bbo_1mm):
    base = delta_k(0.01, -0.01, 405e-9, bbo_1mm)
    detuned = delta_k(0.01, -0.01, 405e-9, bbo_1mm, signal_wavelength=808e-9)
    assert detuned.k_signal != base.k_signal
    assert detuned.dkz != base.dkz
