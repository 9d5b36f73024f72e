"""Brute-force steady-state verifier for the closed-form susceptibility.

Builds the full 4x4 density-matrix generator (rotating frame, phenomenological
Lindblad decays plus per-state pure dephasing) and solves for the steady
state.  The probe-transition coherence divided by the probe Rabi energy gives
an independent susceptibility to compare against the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dark_resonance import A, B, C, D, FourLevelParams, interaction_hamiltonian
from .errors import AmbiguityError, ContractViolation

_EYE4 = np.eye(4)


@dataclass(frozen=True)
class MasterEquationSpec:
    params: FourLevelParams
    gamma_d_decay_mev: float = 0.0  # population decay of |d>
    d_decay_channel: str = "b"  # 'b' or 'c'

    def __post_init__(self):
        if self.d_decay_channel not in ("b", "c"):
            raise ContractViolation("d_decay_channel must be 'b' or 'c'")
        if self.gamma_d_decay_mev < 0:
            raise ContractViolation("gamma_d_decay_mev must be non-negative")


def rotating_frame_hamiltonian(params: FourLevelParams) -> np.ndarray:
    """Interaction Hamiltonian plus detuning diagonal, signs fixed so the
    weak-probe coherence reproduces the closed-form Gamma definitions."""
    h = interaction_hamiltonian(params)
    h[A, A] = params.delta_mev
    h[C, C] = params.delta_mev - params.delta0_mev
    h[D, D] = params.delta_mev - params.delta0_mev - params.delta_ir_mev
    return h


def _collapse_operators(spec: MasterEquationSpec) -> list[np.ndarray]:
    params = spec.params
    ops = []
    if params.gamma_a_to_b_mev > 0:
        c = np.zeros((4, 4))
        c[B, A] = np.sqrt(params.gamma_a_to_b_mev)
        ops.append(c)
    if spec.gamma_d_decay_mev > 0:
        target = B if spec.d_decay_channel == "b" else C
        c = np.zeros((4, 4))
        c[target, D] = np.sqrt(spec.gamma_d_decay_mev)
        ops.append(c)
    # per-state pure dephasing chosen so the b-coherences hit the requested
    # gamma_ab/cb/db totals on top of the population-decay halves
    pure = {
        A: params.gamma_ab_mev - 0.5 * params.gamma_a_to_b_mev,
        C: params.gamma_cb_mev,
        D: params.gamma_db_mev - 0.5 * spec.gamma_d_decay_mev,
    }
    for state, rate in pure.items():
        if rate < -1e-12:
            raise ContractViolation(
                "requested coherence decay is below the population-decay floor; "
                f"state index {state} needs pure dephasing {rate} meV"
            )
        if rate > 0:
            c = np.zeros((4, 4))
            c[state, state] = np.sqrt(2.0 * rate)
            ops.append(c)
    return ops


def liouvillian(spec: MasterEquationSpec) -> np.ndarray:
    """Vectorized generator (column stacking) in meV units."""
    h = rotating_frame_hamiltonian(spec.params)
    lv = -1j * (np.kron(_EYE4, h) - np.kron(h.T, _EYE4))
    for c in _collapse_operators(spec):
        cdc = c.conj().T @ c
        lv = lv + (
            np.kron(c.conj(), c)
            - 0.5 * np.kron(_EYE4, cdc)
            - 0.5 * np.kron(cdc.T, _EYE4)
        )
    return lv


def steady_state(spec: MasterEquationSpec) -> np.ndarray:
    """Unique trace-one steady state of the generator.

    Raises AmbiguityError when the null space is degenerate.  The result is
    Hermitian to 1e-12 and positive semidefinite to -1e-10.
    """
    lv = liouvillian(spec)
    u, s, vh = np.linalg.svd(lv)
    # the exact null singular value sits at ~1e-16 * s[0]; keep the cutoff
    # well above that but below slow physical relaxation modes
    tol = max(s[0], 1.0) * 1e-13
    null_dim = int(np.sum(s < tol))
    if null_dim != 1:
        raise AmbiguityError(f"steady state not unique: null-space dimension {null_dim}")
    rho = vh[-1].conj().reshape(4, 4, order="F")
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    eigvals = np.linalg.eigvalsh(rho)
    if eigvals.min() < -1e-10:
        raise AmbiguityError(f"steady state not positive semidefinite: min eigenvalue {eigvals.min()}")
    return rho


def population_check(rho: np.ndarray) -> dict[str, float]:
    """Per-state populations and the excitation fraction 1 - rho_bb."""
    pops = np.real(np.diag(rho))
    return {
        "a": float(pops[A]),
        "b": float(pops[B]),
        "c": float(pops[C]),
        "d": float(pops[D]),
        "excitation_fraction": float(1.0 - pops[B]),
    }


def oracle_susceptibility(
    spec: MasterEquationSpec,
    delta_mev: float | None = None,
    richardson: bool = False,
) -> complex:
    """Susceptibility from the steady-state probe coherence, chi = -eta rho_ab / alpha.

    With richardson=True the linear response is extrapolated from two probe
    amplitudes (alpha and alpha/2) to remove the leading saturation bias.
    """
    params = spec.params
    if delta_mev is not None:
        spec = replace(spec, params=params.at_detuning(delta_mev))
        params = spec.params
    if params.alpha_mev == 0:
        raise ContractViolation("probe response needs alpha > 0")

    def response(alpha: float) -> complex:
        s = replace(spec, params=replace(params, alpha_mev=alpha))
        rho = steady_state(s)
        return rho[A, B] / alpha

    r = response(params.alpha_mev)
    if richardson:
        r_half = response(params.alpha_mev / 2.0)
        r = (4.0 * r_half - r) / 3.0
    return -params.eta_mev * r
