"""Four-level double-dark-resonance model: Hamiltonian, susceptibility, spectra.

Basis order is (a, b, c, d): |b> is the ground state, |a> the optically
excited state reached by the weak probe (Rabi energy alpha), |c> is coupled
to |a> by the strong coupling mechanism (Rabi energy Omega, here tunneling),
and |d> is coupled to |c> by the weak IR field (Rabi energy Omega_IR).
All Rabi energies, detunings and decay rates are in meV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import curve_fit

from .errors import ContractViolation, SingularParametersError

A, B, C, D = 0, 1, 2, 3


@dataclass(frozen=True)
class FourLevelParams:
    omega_mev: float  # coupling Rabi energy
    alpha_mev: float  # probe Rabi energy
    omega_ir_mev: float  # IR Rabi energy
    delta_mev: float = 0.0  # probe detuning
    delta0_mev: float = 0.0  # coupling detuning
    delta_ir_mev: float = 0.0  # IR detuning
    gamma_ab_mev: float = 0.0
    gamma_cb_mev: float = 0.0
    gamma_db_mev: float = 0.0
    gamma_a_to_b_mev: float = 0.0  # population decay a -> b
    eta_mev: float = 1.0  # absorption scale of the susceptibility
    ir_linewidth_mev: float = 0.0  # laser linewidth entering the narrow-line law
    lambda_probe_um: float | None = None
    lambda_ir_um: float | None = None
    n_density_cm3: float | None = None

    def __post_init__(self):
        for name in ("gamma_ab_mev", "gamma_cb_mev", "gamma_db_mev", "gamma_a_to_b_mev"):
            if getattr(self, name) < 0:
                raise ContractViolation(f"{name} must be non-negative")
        if self.omega_mev <= 0:
            raise ContractViolation("coupling omega_mev must be positive")

    def at_detuning(self, delta_mev: float) -> "FourLevelParams":
        return replace(self, delta_mev=delta_mev)


def eta_from_primitives(
    gamma_a_to_b_mev: float, n_density_cm3: float, lambda_probe_um: float
) -> float:
    """Absorption scale eta = 3 gamma_(a->b) N lambda^3 / (8 pi^2), in meV."""
    lam_cm = lambda_probe_um * 1e-4
    return 3.0 * gamma_a_to_b_mev * n_density_cm3 * lam_cm**3 / (8.0 * math.pi**2)


def interaction_hamiltonian(params: FourLevelParams) -> np.ndarray:
    """Bare coupling Hamiltonian of the three fields, hbar = 1, in meV."""
    h = np.zeros((4, 4), dtype=complex)
    h[C, A] = params.omega_mev
    h[B, A] = params.alpha_mev
    h[C, D] = params.omega_ir_mev
    return h + h.conj().T


def hamiltonian_apply(params: FourLevelParams, state: np.ndarray) -> np.ndarray:
    """Apply the bare interaction Hamiltonian to a 4-vector in (a,b,c,d) order."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (4,):
        raise ContractViolation("state must be a 4-vector")
    return interaction_hamiltonian(params) @ state


def dark_state(omega_mev: float, alpha_mev: float) -> np.ndarray:
    """Normalized dark superposition (Omega |b> - alpha |c>) / sqrt(Omega^2 + alpha^2)."""
    norm = math.hypot(omega_mev, alpha_mev)
    if norm == 0:
        raise ContractViolation("dark state undefined for omega = alpha = 0")
    vec = np.zeros(4, dtype=complex)
    vec[B] = omega_mev / norm
    vec[C] = -alpha_mev / norm
    return vec


def _gammas(params: FourLevelParams, delta_mev: float | None = None):
    delta = params.delta_mev if delta_mev is None else delta_mev
    g_ab = params.gamma_ab_mev + 1j * delta
    g_cb = params.gamma_cb_mev + 1j * (delta - params.delta0_mev)
    g_db = params.gamma_db_mev + 1j * (delta - params.delta0_mev - params.delta_ir_mev)
    return g_ab, g_cb, g_db


def susceptibility(params: FourLevelParams, delta_mev: float | None = None) -> complex:
    """Closed-form probe susceptibility of the double-dark four-level scheme.

    chi = i eta (G_cb G_db + Omega_IR^2) / (G_ab (G_cb G_db + Omega_IR^2)
          + Omega^2 G_db), with G_xy = gamma_xy + i(detuning combination).
    Dimensionless; eta carries the density and wavelength scale.
    """
    g_ab, g_cb, g_db = _gammas(params, delta_mev)
    inner = g_cb * g_db + params.omega_ir_mev**2
    denom = g_ab * inner + params.omega_mev**2 * g_db
    if denom == 0:
        raise SingularParametersError(
            "susceptibility denominator vanished; perturb the detuning or add decay"
        )
    return 1j * params.eta_mev * inner / denom


def predict_narrow_line(params: FourLevelParams) -> tuple[float, float, bool]:
    """Position and width of the revived absorption line inside the window.

    Returns (center offset = Delta_IR, width = gamma_(a->b) Omega_IR^2/Omega^2
    + IR linewidth, weak_ir_ok).  The law assumes Omega_IR << Omega; the flag
    is False when Omega_IR exceeds Omega/5.
    """
    width = (
        params.gamma_a_to_b_mev * params.omega_ir_mev**2 / params.omega_mev**2
        + params.ir_linewidth_mev
    )
    weak_ok = params.omega_ir_mev < params.omega_mev / 5.0
    return params.delta_ir_mev, width, weak_ok


@dataclass(frozen=True)
class Spectrum:
    detuning_mev: np.ndarray
    chi: np.ndarray  # complex
    transmission: np.ndarray
    flagged_points: tuple[int, ...] = ()

    def __post_init__(self):
        if not (len(self.detuning_mev) == len(self.chi) == len(self.transmission)):
            raise ContractViolation("spectrum arrays must have equal length")


def reference_absorption(params: FourLevelParams) -> float:
    """Peak Im chi of the bare two-level probe line (Omega, Omega_IR -> 0)."""
    if params.gamma_ab_mev <= 0:
        raise SingularParametersError("bare-line normalization needs gamma_ab > 0")
    return params.eta_mev / params.gamma_ab_mev


def spectrum(
    params: FourLevelParams,
    detuning_grid_mev: np.ndarray,
    od: float = 1.0,
) -> Spectrum:
    """Evaluate chi on a detuning grid and convert to single-pass transmission.

    Transmission is exp(-od * Im chi / Im chi_ref) where chi_ref is the bare
    two-level peak of the same parameter set, i.e. the bare resonance has
    optical density `od` at line center.  Singular grid points are replaced
    by the neighbor average and flagged.
    """
    detuning = np.asarray(detuning_grid_mev, dtype=float)
    if len(detuning) < 2 or np.any(np.diff(detuning) <= 0):
        raise ContractViolation("detuning grid must be monotone increasing")
    chi = np.empty(len(detuning), dtype=complex)
    flagged = []
    for i, d in enumerate(detuning):
        try:
            chi[i] = susceptibility(params, float(d))
        except SingularParametersError:
            chi[i] = np.nan
            flagged.append(i)
    for i in flagged:
        lo = chi[i - 1] if i > 0 else chi[i + 1]
        hi = chi[i + 1] if i < len(chi) - 1 else chi[i - 1]
        chi[i] = 0.5 * (lo + hi)
    ref = reference_absorption(params)
    transmission = np.exp(-od * chi.imag / ref)
    return Spectrum(
        detuning_mev=detuning, chi=chi, transmission=transmission, flagged_points=tuple(flagged)
    )


def _lorentzian(x, x0, gamma, amp, bg):
    return amp * (gamma / 2) ** 2 / ((x - x0) ** 2 + (gamma / 2) ** 2) + bg


def fit_narrow_line(
    params: FourLevelParams,
    window_mev: float | None = None,
    n_points: int = 2001,
) -> tuple[float, float]:
    """Least-squares Lorentzian fit of the revived line in Im chi.

    Returns (center, FWHM).  The fit window defaults to 20x the predicted
    width around the predicted center.
    """
    center_guess, width_guess, _ = predict_narrow_line(params)
    if width_guess <= 0:
        raise ContractViolation("predicted width is zero; nothing to fit")
    if window_mev is None:
        window_mev = 20.0 * width_guess
    grid = np.linspace(center_guess - window_mev, center_guess + window_mev, n_points)
    im = np.array([susceptibility(params, float(d)).imag for d in grid])
    p0 = (center_guess, width_guess, float(im.max() - im.min()), float(im.min()))
    popt, _ = curve_fit(_lorentzian, grid, im, p0=p0, maxfev=20000)
    return float(popt[0]), abs(float(popt[1]))
