"""Phonon form factors and assembly of the per-coherence dephasing budget.

The paper-level inputs are proportionalities: acoustic-phonon dephasing goes
as the q-integral of |G_if(q)|^2 and polar-optical dephasing as the same
integral weighted by 1/(q^2 + Q^2).  The prefactors turning those weights
into meV rates are configuration values with documented GaAs defaults; only
upper bounds are asserted against, never absolute rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .constants import thermal_inplane_momentum_nm
from .errors import ContractViolation, SingularParametersError
from .heterostructure import PotentialGrid

# Rate = prefactor * weight.  Defaults calibrated so that a GaAs double-well
# intersubband pair at room temperature sits at the literature upper bounds
# (acoustic well below 1e-4 meV, polar-optical below 0.1 meV).
DEFAULT_ACOUSTIC_PREFACTOR_MEV_NM = 2.0e-4
DEFAULT_POLAR_PREFACTOR_MEV_PER_NM = 3.0e-2
DEFAULT_Q_NM = thermal_inplane_momentum_nm(0.067, 300.0)  # ~0.213 nm^-1 at 300 K


@dataclass(frozen=True)
class PhononFormFactor:
    q_nm: float
    value: complex


@dataclass(frozen=True)
class CoherenceBudget:
    radiative_mev: float = 0.0
    lifetime_mev: float = 0.0  # tunneling escape of quasi-bound states
    acoustic_mev: float = 0.0
    polar_optical_mev: float = 0.0
    roughness_mev: float = 0.0
    laser_linewidth_mev: float = 0.0
    fano_mev: float = 0.0

    def __post_init__(self):
        for name, val in self.__dict__.items():
            if val < 0:
                raise ContractViolation(f"budget component {name} must be non-negative")

    @property
    def total_mev(self) -> float:
        return (
            self.radiative_mev
            + self.lifetime_mev
            + self.acoustic_mev
            + self.polar_optical_mev
            + self.roughness_mev
            + self.laser_linewidth_mev
            + self.fano_mev
        )


@dataclass(frozen=True)
class DephasingBudget:
    ab: CoherenceBudget = field(default_factory=CoherenceBudget)
    cb: CoherenceBudget = field(default_factory=CoherenceBudget)
    db: CoherenceBudget = field(default_factory=CoherenceBudget)

    @property
    def gamma_ab_mev(self) -> float:
        return self.ab.total_mev

    @property
    def gamma_cb_mev(self) -> float:
        return self.cb.total_mev

    @property
    def gamma_db_mev(self) -> float:
        return self.db.total_mev

    def as_dict(self) -> dict:
        out = {}
        for coh in ("ab", "cb", "db"):
            budget: CoherenceBudget = getattr(self, coh)
            out[coh] = {
                "radiative_mev": budget.radiative_mev,
                "lifetime_mev": budget.lifetime_mev,
                "acoustic_mev": budget.acoustic_mev,
                "polar_optical_mev": budget.polar_optical_mev,
                "roughness_mev": budget.roughness_mev,
                "laser_linewidth_mev": budget.laser_linewidth_mev,
                "fano_mev": budget.fano_mev,
                "total_mev": budget.total_mev,
            }
        return out


def form_factor(
    envelope_i: np.ndarray, envelope_f: np.ndarray, q_nm: float, grid: PotentialGrid
) -> PhononFormFactor:
    """G_if(q) = <f| exp(i q z) |i> by trapezoidal quadrature."""
    if len(envelope_i) != len(grid.z) or len(envelope_f) != len(grid.z):
        raise ContractViolation("envelopes must share the potential grid")
    value = np.trapezoid(envelope_f * np.exp(1j * q_nm * grid.z) * envelope_i, dx=grid.dz)
    return PhononFormFactor(q_nm=q_nm, value=complex(value))


def _abs_g_squared(envelope_i, envelope_f, grid):
    def integrand(q):
        g = np.trapezoid(envelope_f * np.exp(1j * q * grid.z) * envelope_i, dx=grid.dz)
        return abs(g) ** 2

    return integrand


def _adaptive_q_max(integrand, q_start: float, tail_fraction: float = 0.01) -> float:
    """Grow the cutoff until the outermost octave contributes < tail_fraction."""
    q_max = q_start
    total, _ = quad(integrand, 0.0, q_max, limit=200)
    for _ in range(20):
        tail, _ = quad(integrand, q_max, 2 * q_max, limit=200)
        if total > 0 and tail < tail_fraction * total:
            return 2 * q_max
        total += tail
        q_max *= 2
    raise SingularParametersError("q-integral tail did not converge; envelopes may be unbound")


def acoustic_weight(
    envelope_i: np.ndarray,
    envelope_f: np.ndarray,
    grid: PotentialGrid,
    q_max_nm: float | None = None,
) -> float:
    """Integral of |G_if(q)|^2 over the full q axis, in nm^-1.

    Even integrand for real envelopes, so twice the half-axis integral.
    The cutoff is widened adaptively until the tail is below 1%.
    """
    integrand = _abs_g_squared(envelope_i, envelope_f, grid)
    extent = grid.z[-1] - grid.z[0]
    if q_max_nm is None:
        q_max_nm = _adaptive_q_max(integrand, 20.0 / extent)
    value, err = quad(integrand, 0.0, q_max_nm, limit=400, epsrel=1e-6)
    return 2.0 * value


def polar_optical_weight(
    envelope_i: np.ndarray,
    envelope_f: np.ndarray,
    grid: PotentialGrid,
    Q_nm: float = DEFAULT_Q_NM,
    q_max_nm: float | None = None,
) -> float:
    """Integral of |G_if(q)|^2 / (q^2 + Q^2) over the full q axis, in nm."""
    if Q_nm <= 0:
        raise SingularParametersError("in-plane momentum Q must be positive")
    base = _abs_g_squared(envelope_i, envelope_f, grid)

    def integrand(q):
        return base(q) / (q * q + Q_nm * Q_nm)

    extent = grid.z[-1] - grid.z[0]
    if q_max_nm is None:
        q_max_nm = _adaptive_q_max(integrand, 20.0 / extent)
    value, err = quad(integrand, 0.0, q_max_nm, limit=400, epsrel=1e-6)
    return 2.0 * value


@dataclass(frozen=True)
class DephasingConfig:
    """Prefactors and parametric contributions feeding the budget."""

    acoustic_prefactor_mev_nm: float = DEFAULT_ACOUSTIC_PREFACTOR_MEV_NM
    polar_prefactor_mev_per_nm: float = DEFAULT_POLAR_PREFACTOR_MEV_PER_NM
    Q_nm: float = DEFAULT_Q_NM
    roughness_mev: float = 1.0
    # per-coherence multipliers for the parametric roughness term; the narrow
    # line rides on the d-b coherence whose width the four-level model pins
    # to the IR laser linewidth, so roughness is not routed there by default
    roughness_weight_ab: float = 1.0
    roughness_weight_cb: float = 1.0
    roughness_weight_db: float = 0.0
    laser_linewidth_mev: float = 0.0


def assemble_budget(
    config: DephasingConfig,
    acoustic_weights: dict[str, float] | None = None,
    polar_weights: dict[str, float] | None = None,
    radiative_mev: dict[str, float] | None = None,
    lifetime_mev: dict[str, float] | None = None,
    fano_mev: dict[str, float] | None = None,
) -> DephasingBudget:
    """Combine mechanism contributions into per-coherence totals.

    All dict arguments are keyed by coherence name ('ab', 'cb', 'db');
    missing keys contribute zero.  The IR laser linewidth enters the d-b
    coherence only.
    """

    def get(d, coh):
        val = 0.0 if d is None else float(d.get(coh, 0.0))
        if val < 0:
            raise ContractViolation(f"negative contribution for coherence {coh}")
        return val

    weights = {
        "ab": config.roughness_weight_ab,
        "cb": config.roughness_weight_cb,
        "db": config.roughness_weight_db,
    }
    budgets = {}
    for coh in ("ab", "cb", "db"):
        budgets[coh] = CoherenceBudget(
            radiative_mev=get(radiative_mev, coh),
            lifetime_mev=get(lifetime_mev, coh),
            acoustic_mev=config.acoustic_prefactor_mev_nm * get(acoustic_weights, coh),
            polar_optical_mev=config.polar_prefactor_mev_per_nm * get(polar_weights, coh),
            roughness_mev=config.roughness_mev * weights[coh],
            laser_linewidth_mev=config.laser_linewidth_mev if coh == "db" else 0.0,
            fano_mev=get(fano_mev, coh),
        )
    return DephasingBudget(ab=budgets["ab"], cb=budgets["cb"], db=budgets["db"])
