"""Dipoles, Rabi conversions, radiative rates, tunneling and Fano factors."""

import math

import pytest
import scipy.constants as sc

from darkwell.constants import MEV_TO_RADPS
from darkwell.couplings import (
    dipole,
    fano_coupling,
    field_amplitude_v_per_m,
    intensity_w_m2_for_rabi,
    rabi_energy_mev,
    radiative_rate_mev,
    tunnel_coupling,
)
from darkwell.eigensolver import Resonance, solve_bound
from darkwell.errors import ContractViolation
from darkwell.heterostructure import Layer, MaterialModel, StructureSpec, build_grid

import numpy as np

MASS = 0.067


def _deep_well(L=10.0, dz=0.05):
    spec = StructureSpec(layers=(Layer(4.0, 1.0), Layer(L, 0.0), Layer(4.0, 1.0)))
    model = MaterialModel(offset_coefficient_mev=1e7, effective_mass=MASS)
    grid = build_grid(spec, dz, model)
    return grid, solve_bound(grid, (1.0, 1000.0), scan_step_mev=0.05)


def test_parity_selection_rule_in_symmetric_well():
    grid, states = _deep_well()
    d11 = dipole(states[0].envelope, states[0].envelope, grid).value_e_nm
    d13 = dipole(states[0].envelope, states[2].envelope, grid).value_e_nm
    d12 = dipole(states[0].envelope, states[1].envelope, grid).value_e_nm
    assert abs(d11) < 1e-8
    assert abs(d13) < 1e-8
    assert abs(d12) > 0.1


def test_infinite_well_dipole_value():
    # |<1|z|2>| = 16 L / (9 pi^2) for the infinite square well
    L = 10.0
    grid, states = _deep_well(L=L)
    d12 = abs(dipole(states[0].envelope, states[1].envelope, grid).value_e_nm)
    expected = 16.0 * L / (9.0 * math.pi**2)
    assert abs(d12 - expected) / expected < 0.005


def test_dipole_is_symmetric_under_swap():
    grid, states = _deep_well()
    a, b = states[0].envelope, states[1].envelope
    assert dipole(a, b, grid).value_e_nm == pytest.approx(dipole(b, a, grid).value_e_nm)


def test_rabi_intensity_roundtrip():
    d = 0.73
    for rabi in (1e-4, 0.1, 5.0):
        intensity = intensity_w_m2_for_rabi(rabi, d)
        assert rabi_energy_mev(d, intensity) == pytest.approx(rabi, rel=1e-12)
    with pytest.raises(ContractViolation):
        intensity_w_m2_for_rabi(1.0, 0.0)


def test_field_amplitude_against_si_formula():
    intensity, n = 1e3, 3.3
    expected = math.sqrt(2.0 * intensity / (n * sc.epsilon_0 * sc.c))
    assert field_amplitude_v_per_m(intensity, n) == pytest.approx(expected, rel=1e-6)


def test_radiative_rate_against_si_oracle():
    # gamma = n w^3 d^2 / (3 pi eps0 hbar c^3), evaluated from scipy.constants
    d_e_nm, e_mev, n = 1.0, 100.0, 1.0
    omega = e_mev * 1e-3 * sc.e / sc.hbar
    d_si = d_e_nm * sc.e * 1e-9
    rate_s = n * omega**3 * d_si**2 / (3.0 * math.pi * sc.epsilon_0 * sc.hbar * sc.c**3)
    expected_mev = rate_s / MEV_TO_RADPS
    assert radiative_rate_mev(d_e_nm, e_mev, n) == pytest.approx(expected_mev, rel=1e-5)
    # scaling laws: quadratic in dipole, cubic in transition energy
    assert radiative_rate_mev(2.0, 100.0, n) == pytest.approx(4.0 * radiative_rate_mev(1.0, 100.0, n))
    assert radiative_rate_mev(1.0, 200.0, n) == pytest.approx(8.0 * radiative_rate_mev(1.0, 100.0, n))
    assert radiative_rate_mev(1.0, -5.0, n) == 0.0


def test_fano_coupling_arithmetic_and_validation():
    def res(width):
        return Resonance(energy_mev=100.0, width_mev=width, envelope=np.zeros(3))

    f = fano_coupling(res(4.0), res(9.0), k=0.5)
    assert f.value_mev == pytest.approx(0.5 * 6.0)
    with pytest.raises(ContractViolation):
        fano_coupling(res(0.0), res(9.0))


def test_tunnel_element_consistent_with_doublet_splitting():
    model = MaterialModel(effective_mass=MASS)
    barrier = 0.5

    def stack(left_x, right_x):
        return StructureSpec(
            layers=(
                Layer(20.0, barrier),
                Layer(6.0, left_x),
                Layer(1.6, barrier),
                Layer(6.0, right_x),
                Layer(20.0, barrier),
            )
        )

    grid = build_grid(stack(0.0, 0.0), 0.02, model)
    states = solve_bound(grid, (1.0, 495.0))
    doublet = [s for s in states if s.energy_mev < 250.0][:2]
    assert len(doublet) == 2
    splitting = doublet[1].energy_mev - doublet[0].energy_mev
    grid_a = build_grid(stack(0.0, barrier), 0.02, model)
    grid_c = build_grid(stack(barrier, 0.0), 0.02, model)
    center = 0.5 * (doublet[0].energy_mev + doublet[1].energy_mev)
    window = (center - 60.0, center + 60.0)
    tc = tunnel_coupling(grid, grid_a, grid_c, window, window)
    # for aligned wells the splitting is 2|t| up to overlap corrections
    assert abs(2.0 * abs(tc.matrix_element_mev) - splitting) / splitting < 0.15
    # explicit gap passthrough
    tc2 = tunnel_coupling(grid, grid_a, grid_c, window, window, doublet_gap_mev=splitting)
    assert tc2.splitting_mev == pytest.approx(splitting)
