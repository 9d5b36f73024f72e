"""Dipole elements, tunnel splitting and the Fano coupling factor.

All integrals are trapezoidal quadrature on the shared potential grid.
Dipole elements are reported in e nm with z measured from the structure
center, so that symmetric structures obey the parity selection rules
exactly (up to quadrature noise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import (
    ELECTRON_CHARGE_C,
    EPSILON0_F_PER_M,
    HBAR_J_S,
    MEV_TO_J,
    MEV_TO_RADPS,
    SPEED_OF_LIGHT_M_PER_S,
)
from .errors import ContractViolation
from .eigensolver import Resonance, solve_bound
from .heterostructure import PotentialGrid


@dataclass(frozen=True)
class DipoleElement:
    value_e_nm: float  # signed; symmetric under bra/ket swap for real envelopes
    bra_index: int
    ket_index: int


@dataclass(frozen=True)
class TunnelCoupling:
    matrix_element_mev: float
    splitting_mev: float


@dataclass(frozen=True)
class FanoFactor:
    value_mev: float
    proportionality_constant: float


def dipole(
    envelope_i: np.ndarray,
    envelope_f: np.ndarray,
    grid: PotentialGrid,
    bra_index: int = 0,
    ket_index: int = 0,
) -> DipoleElement:
    """<f| z |i> in e nm, z relative to the structure center."""
    if len(envelope_i) != len(grid.z) or len(envelope_f) != len(grid.z):
        raise ContractViolation("envelopes must share the potential grid")
    z0 = 0.5 * (grid.z[0] + grid.z[-1])
    value = np.trapezoid(envelope_f * (grid.z - z0) * envelope_i, dx=grid.dz)
    return DipoleElement(value_e_nm=float(value), bra_index=bra_index, ket_index=ket_index)


def tunnel_coupling(
    grid: PotentialGrid,
    grid_a_isolated: PotentialGrid,
    grid_c_isolated: PotentialGrid,
    state_a_window: tuple[float, float],
    state_c_window: tuple[float, float],
    doublet_gap_mev: float | None = None,
) -> TunnelCoupling:
    """Tunneling matrix element between isolated-well states.

    The isolated grids are the full structure with the partner well flooded
    by its barrier alloy.  matrix_element = <a| V_full - V_isolated_a |c>.
    splitting is taken from doublet_gap_mev when the caller has solved the
    full structure, otherwise falls back to 2|matrix_element|.
    """
    for g in (grid_a_isolated, grid_c_isolated):
        if len(g.z) != len(grid.z):
            raise ContractViolation("isolated grids must share the full grid sampling")
    states_a = solve_bound(grid_a_isolated, state_a_window)
    states_c = solve_bound(grid_c_isolated, state_c_window)
    if not states_a or not states_c:
        raise ContractViolation("no isolated-well state found in the given window")
    psi_a = states_a[-1].envelope
    psi_c = states_c[-1].envelope
    dv = grid.V - grid_a_isolated.V
    element = float(np.trapezoid(psi_a * dv * psi_c, dx=grid.dz))
    splitting = doublet_gap_mev if doublet_gap_mev is not None else 2.0 * abs(element)
    return TunnelCoupling(matrix_element_mev=element, splitting_mev=float(splitting))


def fano_coupling(res_plus: Resonance, res_minus: Resonance, k: float = 1.0) -> FanoFactor:
    """Fano interference magnitude k * sqrt(Gamma_plus * Gamma_minus)."""
    if res_plus.width_mev <= 0 or res_minus.width_mev <= 0:
        raise ContractViolation("both resonance widths must be positive")
    return FanoFactor(
        value_mev=k * math.sqrt(res_plus.width_mev * res_minus.width_mev),
        proportionality_constant=k,
    )


def field_amplitude_v_per_m(intensity_w_m2: float, refractive_index: float = 3.3) -> float:
    """Electric field amplitude of a plane wave of given intensity in a medium."""
    if intensity_w_m2 < 0:
        raise ContractViolation("intensity must be non-negative")
    return math.sqrt(
        2.0 * intensity_w_m2 / (refractive_index * EPSILON0_F_PER_M * SPEED_OF_LIGHT_M_PER_S)
    )


def rabi_energy_mev(
    dipole_e_nm: float, intensity_w_m2: float, refractive_index: float = 3.3
) -> float:
    """Rabi coupling d*E/hbar expressed as an energy in meV."""
    field = field_amplitude_v_per_m(intensity_w_m2, refractive_index)
    d_si = abs(dipole_e_nm) * ELECTRON_CHARGE_C * 1e-9
    return d_si * field / MEV_TO_J


def intensity_w_m2_for_rabi(
    rabi_mev: float, dipole_e_nm: float, refractive_index: float = 3.3
) -> float:
    """Inverse of rabi_energy_mev: intensity needed for a given Rabi energy."""
    if dipole_e_nm == 0:
        raise ContractViolation("vanishing dipole cannot be driven to a finite Rabi energy")
    d_si = abs(dipole_e_nm) * ELECTRON_CHARGE_C * 1e-9
    field = rabi_mev * MEV_TO_J / d_si
    return field**2 * refractive_index * EPSILON0_F_PER_M * SPEED_OF_LIGHT_M_PER_S / 2.0


def radiative_rate_mev(
    dipole_e_nm: float, transition_energy_mev: float, refractive_index: float = 3.3
) -> float:
    """Spontaneous-emission rate of a dipole transition, returned in meV.

    gamma = n * omega^3 * d^2 / (3 pi eps0 hbar c^3), converted from s^-1.
    """
    if transition_energy_mev <= 0:
        return 0.0
    omega = transition_energy_mev * MEV_TO_RADPS
    d = abs(dipole_e_nm) * ELECTRON_CHARGE_C * 1e-9
    rate_s = (
        refractive_index
        * omega**3
        * d**2
        / (3.0 * math.pi * EPSILON0_F_PER_M * HBAR_J_S * SPEED_OF_LIGHT_M_PER_S**3)
    )
    return rate_s / MEV_TO_RADPS
