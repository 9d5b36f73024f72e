"""Physical constants in the meV / nm / s unit system used throughout."""

import math

# hbar^2 / (2 m_e) in meV nm^2.  Single source of truth for kinetic-energy
# prefactors; divide by the dimensionless effective mass where needed.
HBAR2_OVER_2ME_MEV_NM2 = 38.0998  # 6.10426e-39 J m^2 / 1.602177e-22 J/meV

# Conversion of an energy in meV to an angular frequency in rad/s.
MEV_TO_RADPS = 1.519267e12  # 1 meV / hbar

# hbar in meV s.
HBAR_MEV_S = 6.582120e-13

# SI constants for field-strength and radiative-rate conversions.
ELECTRON_CHARGE_C = 1.602176634e-19
EPSILON0_F_PER_M = 8.8541878128e-12
SPEED_OF_LIGHT_M_PER_S = 2.99792458e8
HBAR_J_S = 1.054571817e-34
PLANCK_J_S = 6.62607015e-34
BOLTZMANN_J_PER_K = 1.380649e-23
ELECTRON_MASS_KG = 9.1093837015e-31

# hc in meV um: photon energy E[meV] = HC_MEV_UM / lambda[um].
HC_MEV_UM = 1239.841984

MEV_TO_J = 1.602176634e-22


def wavelength_um_from_mev(energy_mev: float) -> float:
    """Photon wavelength in micrometers for a transition energy in meV."""
    if energy_mev <= 0:
        raise ValueError(f"transition energy must be positive, got {energy_mev}")
    return HC_MEV_UM / energy_mev


def ghz_to_mev(freq_ghz: float) -> float:
    """Convert an ordinary frequency in GHz to an energy in meV (E = h f)."""
    return PLANCK_J_S * freq_ghz * 1e9 / MEV_TO_J


def thermal_inplane_momentum_nm(effective_mass: float, temperature_k: float = 300.0) -> float:
    """Thermal in-plane momentum sqrt(2 m* kB T)/hbar in nm^-1."""
    p = math.sqrt(2.0 * effective_mass * ELECTRON_MASS_KG * BOLTZMANN_J_PER_K * temperature_k)
    return p / HBAR_J_S * 1e-9
