"""Detector figures of merit: signal, efficiency, minimum power, QWIP ratio.

All formulas are evaluated exactly as stated, with every multiplicative
factor itemized in the returned objects so reports can show the breakdown.
Rates are converted from meV to angular frequency with the fixed package
constant where a dimensioned result (watts) is produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import HBAR_J_S, MEV_TO_RADPS, SPEED_OF_LIGHT_M_PER_S
from .dark_resonance import FourLevelParams, reference_absorption, susceptibility
from .errors import ContractViolation, SolverError


@dataclass(frozen=True)
class DetectorParams:
    """Inputs of the sensitivity and comparison formulas.

    The radiative rates are free parameters of the underlying noise model;
    the shipped configurations document two regimes (sensitivity example and
    QWIP comparison) with their calibrated values.
    """

    lambda_ir_um: float
    lambda_probe_um: float
    gamma_ir_rad_mev: float
    gamma_probe_rad_mev: float
    line_width_mev: float  # Gamma of the narrow detection line
    gamma_decoh_mev: float
    alpha_mev: float
    omega_mev: float
    area_m2: float = 1e-10  # (10 um)^2 detector patch
    wavelength_exponent: int = 3  # efficiency prefactor exponent; see report note

    def __post_init__(self):
        for name in ("lambda_ir_um", "lambda_probe_um", "gamma_ir_rad_mev",
                     "gamma_probe_rad_mev", "line_width_mev", "gamma_decoh_mev",
                     "omega_mev"):
            if getattr(self, name) <= 0:
                raise ContractViolation(f"{name} must be positive")


@dataclass(frozen=True)
class QwipParams:
    line_width_mev: float
    gamma_decoh_mev: float

    def __post_init__(self):
        if self.line_width_mev <= 0 or self.gamma_decoh_mev <= 0:
            raise ContractViolation("QWIP comparison rates must be positive")


@dataclass(frozen=True)
class EfficiencyBreakdown:
    wavelength_rate_factor: float  # (l_IR/l_probe)^n * gamma_IR_rad/gamma_probe_rad
    coherence_factor: float  # alpha^2 / (Gamma gamma_decoh)
    total: float
    wavelength_exponent: int


@dataclass(frozen=True)
class QwipRatioBreakdown:
    linewidth_factor: float  # Gamma_coh / Gamma_QWIP
    wavelength_factor: float  # lambda_probe / lambda_IR
    coupling_factor: float  # sqrt(gamma_decoh gamma_probe_rad) / Omega
    decoherence_factor: float  # sqrt(gamma_decoh / gamma_decoh_QWIP)
    total: float


def efficiency(params: DetectorParams) -> EfficiencyBreakdown:
    """Signal-to-IR intensity ratio, split into its two factors."""
    n = params.wavelength_exponent
    f1 = (params.lambda_ir_um / params.lambda_probe_um) ** n * (
        params.gamma_ir_rad_mev / params.gamma_probe_rad_mev
    )
    f2 = params.alpha_mev**2 / (params.line_width_mev * params.gamma_decoh_mev)
    return EfficiencyBreakdown(
        wavelength_rate_factor=f1, coherence_factor=f2, total=f1 * f2, wavelength_exponent=n
    )


def min_power_w(params: DetectorParams, t_m_s: float) -> float:
    """Minimum detectable IR power in watts for a measuring time t_m.

    P = hbar nu_IR * Gamma / sqrt(gamma_probe_rad t_m) * (gamma_decoh/Omega)
        * (lambda_IR/lambda_probe), with rates converted meV -> rad/s.
    """
    if t_m_s <= 0:
        raise ContractViolation("measuring time must be positive")
    nu_ir_radps = 2.0 * math.pi * SPEED_OF_LIGHT_M_PER_S / (params.lambda_ir_um * 1e-6)
    photon_energy_j = HBAR_J_S * nu_ir_radps
    gamma_line_radps = params.line_width_mev * MEV_TO_RADPS
    gamma_rad_radps = params.gamma_probe_rad_mev * MEV_TO_RADPS
    return (
        photon_energy_j
        * gamma_line_radps
        / math.sqrt(gamma_rad_radps * t_m_s)
        * (params.gamma_decoh_mev / params.omega_mev)
        * (params.lambda_ir_um / params.lambda_probe_um)
    )


def qwip_ratio(params: DetectorParams, qwip: QwipParams) -> QwipRatioBreakdown:
    """Ratio of minimum detectable powers, coherent detector over QWIP."""
    f1 = params.line_width_mev / qwip.line_width_mev
    f2 = params.lambda_probe_um / params.lambda_ir_um
    f3 = math.sqrt(params.gamma_decoh_mev * params.gamma_probe_rad_mev) / params.omega_mev
    f4 = math.sqrt(params.gamma_decoh_mev / qwip.gamma_decoh_mev)
    return QwipRatioBreakdown(
        linewidth_factor=f1,
        wavelength_factor=f2,
        coupling_factor=f3,
        decoherence_factor=f4,
        total=f1 * f2 * f3 * f4,
    )


def _chi_at_x(four_level: FourLevelParams, x: float) -> complex:
    """Susceptibility at the line center as a function of x = Omega_IR^2.

    chi depends on the IR field only through Omega_IR^2, so x may be taken
    negative during finite differencing.
    """
    from .dark_resonance import _gammas

    delta_center = four_level.delta0_mev + four_level.delta_ir_mev
    g_ab, g_cb, g_db = _gammas(four_level, delta_center)
    inner = g_cb * g_db + x
    denom = g_ab * inner + four_level.omega_mev**2 * g_db
    if denom == 0:
        raise SolverError("transmission is non-smooth: singular susceptibility at line center")
    return 1j * four_level.eta_mev * inner / denom


def _transmitted_intensity(
    four_level: FourLevelParams, omega_ir_sq: float, probe_intensity: float, od: float
) -> float:
    chi = _chi_at_x(four_level, omega_ir_sq)
    return probe_intensity * math.exp(-od * chi.imag / reference_absorption(four_level))


def signal_intensity(
    four_level: FourLevelParams,
    omega_ir_mev: float,
    probe_intensity: float = 1.0,
    od: float = 1.0,
    rel_tol: float = 1e-3,
) -> float:
    """Probe-intensity drop caused by the IR field, linearized in Omega_IR^2.

    I_signal = -(d I_total / d Omega_IR^2)|_0 * Omega_IR^2, with the
    derivative from a central difference on Omega_IR^2, step-halved until the
    change between refinements is below rel_tol.
    """
    if omega_ir_mev < 0:
        raise ContractViolation("omega_ir_mev must be non-negative")
    if omega_ir_mev == 0:
        return 0.0

    def deriv(h: float) -> float:
        hi = _transmitted_intensity(four_level, h, probe_intensity, od)
        lo = _transmitted_intensity(four_level, -h, probe_intensity, od)
        return (hi - lo) / (2.0 * h)

    h = max(omega_ir_mev**2, 1e-12)
    prev = deriv(h)
    for _ in range(60):
        h /= 2.0
        cur = deriv(h)
        if abs(cur - prev) <= rel_tol * abs(cur) and cur != 0.0:
            return -cur * omega_ir_mev**2
        prev = cur
        if h < 1e-200:
            break
    raise SolverError("signal derivative did not converge; transmission may be non-smooth")


def chi_im_slope_analytic(four_level: FourLevelParams) -> float:
    """Closed-form d(Im chi)/d(Omega_IR^2) at Omega_IR = 0, at the line center."""
    from .dark_resonance import _gammas

    delta_center = four_level.delta0_mev + four_level.delta_ir_mev
    g_ab, g_cb, g_db = _gammas(replace(four_level, omega_ir_mev=0.0), delta_center)
    denom = g_ab * (g_cb * g_db) + four_level.omega_mev**2 * g_db
    slope = 1j * four_level.eta_mev * four_level.omega_mev**2 * g_db / denom**2
    return float(slope.imag)
