"""Transfer-matrix solver for bound states and quasi-bound resonances.

The potential is treated as a stack of constant-(V, m) slices obtained by
run-length encoding the sampled grid.  Within each slice the Schrodinger
equation is solved analytically, so the only numerical error in a bound
energy is the root-finding tolerance.  Interfaces use BenDaniel-Duke
matching: psi and psi'/m* continuous.

Open structures expose a scattering phase shift at real energies; quasi-bound
resonances show up as Breit-Wigner steps of the phase (peaks of the Wigner
time delay) and are fitted to extract position and width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, curve_fit
from scipy.signal import find_peaks

from .constants import HBAR2_OVER_2ME_MEV_NM2 as K2
from .errors import ContractViolation, SolverError, WindowError
from .heterostructure import PotentialGrid

DEFAULT_SCAN_STEP_MEV = 0.01
DEFAULT_ENERGY_TOL_MEV = 1e-6


@dataclass(frozen=True)
class BoundState:
    energy_mev: float
    envelope: np.ndarray  # real, normalized to unit L2 norm on the grid, nm^-1/2
    node_count: int


@dataclass(frozen=True)
class Resonance:
    energy_mev: float
    width_mev: float
    envelope: np.ndarray  # interior-normalized
    width_rel_uncertainty: float = 0.0
    quality_flag: bool = False  # True when the single-Breit-Wigner fit is doubtful


@dataclass(frozen=True)
class _Slices:
    V: np.ndarray
    m: np.ndarray
    length: np.ndarray  # nm
    start: np.ndarray  # left edge of each slice, nm
    counts: np.ndarray  # grid cells per slice


def _slices_from_grid(grid: PotentialGrid) -> _Slices:
    """Run-length encode cells with identical (V, m) into analytic slices."""
    same = (np.diff(grid.V) == 0) & (np.diff(grid.m_eff) == 0)
    breaks = np.flatnonzero(~same) + 1
    starts_idx = np.concatenate(([0], breaks))
    ends_idx = np.concatenate((breaks, [len(grid.V)]))
    counts = ends_idx - starts_idx
    z0 = grid.z[0] - 0.5 * grid.dz
    return _Slices(
        V=grid.V[starts_idx],
        m=grid.m_eff[starts_idx],
        length=counts * grid.dz,
        start=z0 + np.concatenate(([0.0], np.cumsum(counts * grid.dz)[:-1])),
        counts=counts,
    )


def _wavenumber_sq(E, V, m):
    """k^2 in nm^-2; negative in classically forbidden regions."""
    return (E - V) * m / K2


def _step(psi, dpsi, k2, length):
    """Advance (psi, psi') across one constant slice of given length."""
    if np.real(k2) > 0 or np.imag(k2) != 0:
        k = np.sqrt(k2 + 0j)
        c, s = np.cos(k * length), np.sin(k * length)
        psi_n = psi * c + dpsi * s / k
        dpsi_n = -psi * k * s + dpsi * c
    elif k2 < 0:
        kap = np.sqrt(-k2)
        c, s = np.cosh(kap * length), np.sinh(kap * length)
        psi_n = psi * c + dpsi * s / kap
        dpsi_n = psi * kap * s + dpsi * c
    else:
        psi_n = psi + dpsi * length
        dpsi_n = dpsi
    if np.imag(k2) == 0:
        psi_n, dpsi_n = np.real(psi_n), np.real(dpsi_n)
    return psi_n, dpsi_n


def _propagate(slices: _Slices, E, start: int, stop: int, psi, phi):
    """Propagate (psi, phi=psi'/m) through slices [start, stop), left to right.

    Works for scalar complex E as well as real E.  Renormalizes after every
    slice to avoid overflow in thick forbidden regions; only the ray
    (psi : phi) matters for matching.
    """
    step = 1 if stop >= start else -1
    rng = range(start, stop, step)
    for j in rng:
        m = slices.m[j]
        k2 = _wavenumber_sq(E, slices.V[j], m)
        length = slices.length[j] * step
        psi, dpsi = _step(psi, phi * m, k2, length)
        phi = dpsi / m
        scale = abs(psi) + abs(phi)
        if scale > 0:
            psi, phi = psi / scale, phi / scale
    return psi, phi


def _edge_kappa(E, V_edge, m_edge):
    k2 = _wavenumber_sq(E, V_edge, m_edge)
    if np.imag(np.asarray(E)) == 0 and np.real(k2) >= 0:
        raise WindowError(
            f"energy {E} meV is not below the edge potential {V_edge} meV; widen the barrier "
            "or shrink the window"
        )
    return np.sqrt(-k2 + 0j) if np.iscomplexobj(np.asarray(E)) else np.sqrt(-k2)


def _match_determinant(slices: _Slices, E: float, match: int) -> float:
    """Wronskian-type mismatch of decaying solutions shot from both edges."""
    kap_l = _edge_kappa(E, slices.V[0], slices.m[0])
    psi_l, phi_l = _propagate(slices, E, 0, match, 1.0, kap_l / slices.m[0])
    kap_r = _edge_kappa(E, slices.V[-1], slices.m[-1])
    psi_r, phi_r = _propagate(slices, E, len(slices.V) - 1, match - 1, 1.0, -kap_r / slices.m[-1])
    return psi_l * phi_r - psi_r * phi_l


def _match_slice_index(slices: _Slices) -> int:
    """Match at the left edge of the slice following the deepest well."""
    j = int(np.argmin(slices.V))
    return min(j + 1, len(slices.V) - 1)


def _sample_envelope(grid: PotentialGrid, slices: _Slices, E: float, match: int) -> np.ndarray:
    """Stitch left- and right-shot solutions at the match boundary and sample cells."""

    def shoot(side: str) -> tuple[np.ndarray, float, float]:
        vals = np.empty(len(grid.z))
        if side == "left":
            kap = _edge_kappa(E, slices.V[0], slices.m[0])
            psi, phi = 1.0, kap / slices.m[0]
            cell = 0
            for j in range(match):
                m, V = slices.m[j], slices.V[j]
                k2 = _wavenumber_sq(E, V, m)
                dpsi = phi * m
                # cell centers sit at offsets (i+0.5)dz within the slice
                for i in range(slices.counts[j]):
                    vals[cell], _ = _step(psi, dpsi, k2, (i + 0.5) * grid.dz)
                    cell += 1
                psi, dpsi = _step(psi, dpsi, k2, slices.length[j])
                phi = dpsi / m
                scale = abs(psi) + abs(phi)
                vals[: cell] /= scale
                psi, phi = psi / scale, phi / scale
            return vals[:cell], psi, phi
        kap = _edge_kappa(E, slices.V[-1], slices.m[-1])
        psi, phi = 1.0, -kap / slices.m[-1]
        cell = len(grid.z)
        for j in range(len(slices.V) - 1, match - 1, -1):
            m, V = slices.m[j], slices.V[j]
            k2 = _wavenumber_sq(E, V, m)
            dpsi = phi * m
            for i in range(slices.counts[j]):
                vals[cell - 1 - i], _ = _step(psi, dpsi, k2, -(i + 0.5) * grid.dz)
            cell -= slices.counts[j]
            psi, dpsi = _step(psi, dpsi, k2, -slices.length[j])
            phi = dpsi / m
            scale = abs(psi) + abs(phi)
            vals[cell:] /= scale
            psi, phi = psi / scale, phi / scale
        n_right = len(grid.z) - cell
        return vals[cell:], psi, phi

    left_vals, psi_l, phi_l = shoot("left")
    right_vals, psi_r, phi_r = shoot("right")
    # scale the right branch onto the left one using the larger matching component
    if abs(psi_r) >= abs(phi_r):
        scale = psi_l / psi_r
    else:
        scale = phi_l / phi_r
    env = np.concatenate((left_vals, right_vals * scale))
    norm = np.sqrt(np.trapezoid(env * env, dx=grid.dz))
    if norm == 0 or not np.isfinite(norm):
        raise SolverError(f"degenerate envelope at E={E} meV")
    env = env / norm
    if env[np.argmax(np.abs(env))] < 0:
        env = -env
    return env


def _count_nodes(env: np.ndarray) -> int:
    significant = env[np.abs(env) > 1e-6 * np.max(np.abs(env))]
    return int(np.sum(np.diff(np.sign(significant)) != 0))


def solve_bound(
    grid: PotentialGrid,
    energy_window: tuple[float, float],
    scan_step_mev: float = DEFAULT_SCAN_STEP_MEV,
    energy_tol_mev: float = DEFAULT_ENERGY_TOL_MEV,
) -> list[BoundState]:
    """All bound states in the window, energy ordered.

    Energies are bracketed by sign changes of the matching determinant on a
    uniform scan and refined by bisection to energy_tol_mev.
    """
    e_lo, e_hi = energy_window
    if e_hi <= e_lo:
        raise ContractViolation("empty energy window")
    slices = _slices_from_grid(grid)
    edge_cap = min(slices.V[0], slices.V[-1])
    if e_hi >= edge_cap:
        raise WindowError(
            f"window top {e_hi} meV reaches the edge potential {edge_cap} meV; "
            "closed-boundary bound states require E < V at both edges"
        )
    match = _match_slice_index(slices)

    energies = np.arange(e_lo, e_hi, scan_step_mev)
    if len(energies) < 2:
        energies = np.array([e_lo, e_hi])
    det = np.array([_match_determinant(slices, float(E), match) for E in energies])

    roots: list[float] = []
    sign_change = np.flatnonzero(np.sign(det[:-1]) * np.sign(det[1:]) < 0)
    for i in sign_change:
        root = brentq(
            lambda E: _match_determinant(slices, E, match),
            energies[i],
            energies[i + 1],
            xtol=energy_tol_mev * 1e-3,
            rtol=8.881784197001252e-16,
        )
        roots.append(float(root))

    states = []
    for E in sorted(roots):
        env = _sample_envelope(grid, slices, E, match)
        states.append(BoundState(energy_mev=E, envelope=env, node_count=_count_nodes(env)))
    return states


# --- resonances on open structures -----------------------------------------


def _open_slice_count(slices: _Slices) -> int:
    """Number of trailing slices that form the open (quasi-continuum) region."""
    return 1


def phase_shift(grid: PotentialGrid, energies: np.ndarray) -> np.ndarray:
    """Scattering phase shift (mod pi) of the right-open structure at real energies."""
    if not grid.open_right:
        raise ContractViolation("phase_shift requires an open right boundary")
    slices = _slices_from_grid(grid)
    n_open = _open_slice_count(slices)
    interior = len(slices.V) - n_open
    floor = slices.V[-1]
    m_open = slices.m[-1]
    delta = np.empty(len(energies))
    for i, E in enumerate(energies):
        if E <= floor:
            raise WindowError(f"energy {E} meV is below the open-side floor {floor} meV")
        kap = _edge_kappa(E, slices.V[0], slices.m[0])
        psi, phi = _propagate(slices, float(E), 0, interior, 1.0, kap / slices.m[0])
        k = np.sqrt(_wavenumber_sq(E, floor, m_open))
        # interior solution continues as sin(k (z - z_edge) + delta)
        delta[i] = np.arctan2(k * psi, phi * m_open)
    return delta


def _atan_phase(E, e0, gamma, c0, c1):
    """Breit-Wigner phase step of height pi on a linear background."""
    return c0 + c1 * E + np.arctan2(E - e0, gamma / 2.0)


def solve_resonances(
    grid: PotentialGrid,
    energy_window: tuple[float, float],
    scan_step_mev: float = DEFAULT_SCAN_STEP_MEV,
) -> list[Resonance]:
    """Quasi-bound resonances of a right-open structure.

    Peaks of the Wigner time delay d(delta)/dE locate the resonances; each is
    then fitted as a Breit-Wigner phase step (arctan plus linear background)
    of the unwrapped phase shift itself, which stays accurate for widths
    comparable to the resonance energy above threshold.  Poorly fitted peaks
    are reported with quality_flag set.
    """
    e_lo, e_hi = energy_window
    slices = _slices_from_grid(grid)
    floor = slices.V[-1]
    if e_lo <= floor:
        raise WindowError(f"window bottom {e_lo} meV must lie above the open-side floor {floor} meV")

    energies = np.arange(e_lo, e_hi, scan_step_mev)
    delta = np.unwrap(phase_shift(grid, energies), period=np.pi)
    delay = np.gradient(delta, energies)

    peaks, _ = find_peaks(delay, height=max(delay.max() * 0.05, 0.0))
    resonances: list[Resonance] = []
    n_open = _open_slice_count(slices)
    interior_cells = int(np.sum(slices.counts[: len(slices.V) - n_open]))
    for p in peaks:
        e_fit = energies[p]
        g_fit = max(2.0 / delay[p], scan_step_mev)
        popt = pcov = None
        try:
            # two passes: the second re-centers the window on the first fit
            for _ in range(2):
                half = 1.5 * g_fit
                sl = (energies > e_fit - half) & (energies < e_fit + half)
                if np.sum(sl) < 10:
                    raise RuntimeError("window too small")
                popt, pcov = curve_fit(
                    _atan_phase,
                    energies[sl],
                    delta[sl],
                    p0=(e_fit, g_fit, float(delta[sl][0]), 0.0),
                    maxfev=20000,
                )
                e_fit, g_fit = float(popt[0]), abs(float(popt[1]))
        except RuntimeError:
            continue
        if not (e_lo <= e_fit <= e_hi) or g_fit <= 0:
            continue
        g_err = float(np.sqrt(abs(pcov[1, 1]))) if np.all(np.isfinite(pcov)) else np.inf
        rel_unc = g_err / g_fit if g_fit > 0 else np.inf
        model = _atan_phase(energies[sl], *popt)
        resid = np.sqrt(np.mean((delta[sl] - model) ** 2)) / np.pi
        flag = rel_unc > 0.05 or resid > 0.05
        env = _resonance_envelope(grid, slices, e_fit, interior_cells)
        resonances.append(
            Resonance(
                energy_mev=e_fit,
                width_mev=g_fit,
                envelope=env,
                width_rel_uncertainty=rel_unc,
                quality_flag=bool(flag),
            )
        )
    resonances.sort(key=lambda r: r.energy_mev)
    return resonances


def _resonance_envelope(
    grid: PotentialGrid, slices: _Slices, energy: float, interior_cells: int
) -> np.ndarray:
    """Real scattering solution at the resonance energy, interior-normalized."""
    vals = np.empty(len(grid.z))
    kap = _edge_kappa(energy, slices.V[0], slices.m[0])
    psi, phi = 1.0, kap / slices.m[0]
    cell = 0
    for j in range(len(slices.V)):
        m, V = slices.m[j], slices.V[j]
        k2 = _wavenumber_sq(energy, V, m)
        dpsi = phi * m
        for i in range(slices.counts[j]):
            vals[cell], _ = _step(psi, dpsi, k2, (i + 0.5) * grid.dz)
            cell += 1
        psi, dpsi = _step(psi, dpsi, k2, slices.length[j])
        phi = dpsi / m
        scale = abs(psi) + abs(phi)
        vals[:cell] /= scale
        psi, phi = psi / scale, phi / scale
    interior = vals[:interior_cells]
    norm = np.sqrt(np.trapezoid(interior * interior, dx=grid.dz))
    if norm == 0 or not np.isfinite(norm):
        raise SolverError(f"degenerate resonance envelope at E={energy} meV")
    vals = vals / norm
    if vals[np.argmax(np.abs(interior / norm))] < 0:
        vals = -vals
    return vals


def outgoing_pole(
    grid: PotentialGrid,
    e_guess_mev: float,
    width_guess_mev: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> complex:
    """Complex-energy pole E_r - i Gamma/2 with purely outgoing right boundary.

    Secant iteration on the outgoing-wave mismatch psi' - i k psi at the edge
    of the open region, continued to complex energy.  Used as an independent
    cross-check of the real-energy phase-shift fit.
    """
    if not grid.open_right:
        raise ContractViolation("outgoing_pole requires an open right boundary")
    slices = _slices_from_grid(grid)
    n_open = _open_slice_count(slices)
    interior = len(slices.V) - n_open
    floor = slices.V[-1]
    m_open = slices.m[-1]

    def mismatch(E: complex) -> complex:
        kap = np.sqrt(-_wavenumber_sq(E, slices.V[0], slices.m[0]) + 0j)
        if kap.real < 0:
            kap = -kap
        psi, phi = _propagate(slices, E, 0, interior, 1.0 + 0j, kap / slices.m[0])
        k = np.sqrt(_wavenumber_sq(E, floor, m_open) + 0j)
        if k.real < 0:
            k = -k
        return (phi * m_open - 1j * k * psi) / (abs(psi) + abs(phi))

    e0 = complex(e_guess_mev, -0.5 * width_guess_mev)
    e1 = e0 * (1 + 1e-4) - 1e-4j
    f0, f1 = mismatch(e0), mismatch(e1)
    for _ in range(max_iter):
        denom = f1 - f0
        if denom == 0:
            break
        e2 = e1 - f1 * (e1 - e0) / denom
        if abs(e2 - e1) < tol * max(1.0, abs(e2)):
            return e2
        e0, f0 = e1, f1
        e1 = e2
        f1 = mismatch(e1)
    raise SolverError(f"outgoing-wave pole search did not converge near {e_guess_mev} meV")
