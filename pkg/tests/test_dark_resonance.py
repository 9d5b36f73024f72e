"""Closed-form four-level model: dark state, susceptibility, narrow line."""

import math

import numpy as np
import pytest

from darkwell.dark_resonance import (
    FourLevelParams,
    dark_state,
    eta_from_primitives,
    fit_narrow_line,
    hamiltonian_apply,
    predict_narrow_line,
    reference_absorption,
    spectrum,
    susceptibility,
)
from darkwell.errors import ContractViolation, SingularParametersError


def _params(**kw):
    base = dict(
        omega_mev=40.0,
        alpha_mev=0.4,
        omega_ir_mev=1.0,
        gamma_ab_mev=2.0,
        gamma_cb_mev=0.01,
        gamma_db_mev=0.02,
        gamma_a_to_b_mev=4.0,
        eta_mev=1.0,
    )
    base.update(kw)
    return FourLevelParams(**base)


def test_dark_state_is_annihilated_by_the_couplings():
    p = _params(omega_ir_mev=0.0)
    vec = dark_state(p.omega_mev, p.alpha_mev)
    assert np.linalg.norm(vec) == pytest.approx(1.0)
    assert np.linalg.norm(hamiltonian_apply(p, vec)) < 1e-12
    with pytest.raises(ContractViolation):
        dark_state(0.0, 0.0)


def test_transparency_point_is_exact():
    p = _params(gamma_cb_mev=0.0, omega_ir_mev=0.0, gamma_db_mev=0.05)
    assert abs(susceptibility(p, 0.0)) < 1e-12


def test_two_level_limit():
    # vanishing coupling and IR field reduce chi to the bare Lorentzian
    p = _params(omega_mev=1e-15, omega_ir_mev=0.0)
    for d in (-5.0, -0.3, 0.0, 1.7, 10.0):
        chi = susceptibility(p, d)
        expected = 1j * p.eta_mev / (p.gamma_ab_mev + 1j * d)
        assert abs(chi - expected) < 1e-10


def test_conjugation_symmetry():
    p = _params(delta0_mev=0.7, delta_ir_mev=-1.3)
    p_neg = _params(delta0_mev=-0.7, delta_ir_mev=1.3)
    for d in (-11.0, -0.2, 3.4):
        assert susceptibility(p_neg, -d) == pytest.approx(-np.conj(susceptibility(p, d)))


def test_absorption_is_non_negative():
    p = _params()
    grid = np.linspace(-80, 80, 801)
    sp = spectrum(p, grid)
    assert np.all(sp.chi.imag > -1e-14)
    assert np.all(sp.transmission <= 1.0 + 1e-12)


def test_spectrum_symmetric_for_symmetric_parameters():
    p = _params(delta0_mev=0.0, delta_ir_mev=0.0, gamma_cb_mev=0.02, gamma_db_mev=0.02)
    grid = np.linspace(-50, 50, 501)
    sp = spectrum(p, grid)
    assert np.allclose(sp.chi.imag, sp.chi.imag[::-1], atol=1e-12)


def test_narrow_line_prediction_and_fit_agree():
    p = _params(omega_ir_mev=0.8, delta_ir_mev=3.0, ir_linewidth_mev=0.04)
    center, width, weak_ok = predict_narrow_line(p)
    assert center == pytest.approx(3.0)
    assert weak_ok
    fit_center, fit_width = fit_narrow_line(p)
    assert fit_center == pytest.approx(center, abs=0.1 * width)
    assert fit_width == pytest.approx(width, rel=0.2)


def test_weak_ir_flag_trips_at_strong_drive():
    _, _, weak_ok = predict_narrow_line(_params(omega_ir_mev=10.0))
    assert not weak_ok


def test_singular_point_raises_and_spectrum_interpolates():
    # undamped lower coherences put the pole on the real axis at delta = delta0
    p = _params(gamma_cb_mev=0.0, gamma_db_mev=0.0, omega_ir_mev=0.0)
    with pytest.raises(SingularParametersError):
        susceptibility(p, 0.0)
    sp = spectrum(p, np.array([-1.0, 0.0, 1.0]))
    assert sp.flagged_points == (1,)
    assert np.all(np.isfinite(sp.chi))


def test_reference_absorption_and_eta_scale():
    p = _params()
    assert reference_absorption(p) == pytest.approx(p.eta_mev / p.gamma_ab_mev)
    eta = eta_from_primitives(1.0, 1e17, 2.0)
    assert eta == pytest.approx(3.0 * 1e17 * (2.0e-4) ** 3 / (8.0 * math.pi**2))


def test_parameter_validation():
    with pytest.raises(ContractViolation):
        _params(omega_mev=0.0)
    with pytest.raises(ContractViolation):
        _params(gamma_ab_mev=-1.0)


def test_autler_townes_peaks_sit_near_plus_minus_omega():
    p = _params(omega_ir_mev=0.0)
    grid = np.linspace(-80, 80, 3201)
    im = np.array([susceptibility(p, float(d)).imag for d in grid])
    peak_left = grid[np.argmax(im[grid < 0])]
    peak_right = grid[len(grid[grid < 0]) + np.argmax(im[grid >= 0])]
    assert abs(abs(peak_left) - p.omega_mev) < 0.1 * p.omega_mev
    assert abs(peak_right - p.omega_mev) < 0.1 * p.omega_mev
