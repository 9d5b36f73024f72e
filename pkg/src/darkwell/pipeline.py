"""End-to-end parameter extraction: structure file in, model parameters out.

The pipeline solves the sampled structure, identifies the four working levels
(ground |b>, storage |d>, and the tunneling doublet whose uncoupled halves
are |a> and |c>), computes dipoles and Rabi energies, assembles the
per-coherence dephasing budget, and packages everything as four-level model
parameters plus detector inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .constants import HC_MEV_UM, ghz_to_mev, wavelength_um_from_mev
from .couplings import (
    dipole,
    fano_coupling,
    rabi_energy_mev,
    radiative_rate_mev,
    tunnel_coupling,
)
from .dark_resonance import FourLevelParams, eta_from_primitives, predict_narrow_line
from .dephasing import (
    DephasingBudget,
    DephasingConfig,
    acoustic_weight,
    assemble_budget,
    polar_optical_weight,
)
from .detector import DetectorParams
from .eigensolver import (
    BoundState,
    Resonance,
    solve_bound,
    solve_resonances,
)
from .errors import ConfigurationError, ContractViolation
from .heterostructure import (
    Boundary,
    Layer,
    MaterialModel,
    PotentialGrid,
    StructureSpec,
    build_grid,
    load_structure,
)


@dataclass(frozen=True)
class LevelScheme:
    """Energies (meV) of the working levels and the derived optical scales."""

    e_b_mev: float
    e_d_mev: float
    e_minus_mev: float
    e_plus_mev: float
    e_a0_mev: float  # uncoupled |a> (isolated-well state)
    e_c0_mev: float  # uncoupled |c>
    omega_mev: float  # half the doublet splitting
    delta0_mev: float  # coupling detuning e_c0 - e_a0
    probe_energy_mev: float
    ir_energy_mev: float
    lambda_probe_um: float
    lambda_ir_um: float
    gamma_plus_mev: float  # doublet widths (escape or radiative)
    gamma_minus_mev: float


@dataclass(frozen=True)
class PipelineResult:
    grid: PotentialGrid
    bound_states: list[BoundState]
    resonances: list[Resonance]
    scheme: LevelScheme
    dipole_ba_e_nm: float
    dipole_dc_e_nm: float
    tunnel_element_mev: float
    fano_mev: float
    budget: DephasingBudget
    four_level: FourLevelParams
    detector: DetectorParams
    narrow_line_center_mev: float
    narrow_line_width_mev: float
    weak_ir_ok: bool

    def report(self) -> dict:
        """Flat, JSON-serializable summary of the run."""
        p, s = self.four_level, self.scheme
        return {
            "levels": {
                "e_b_mev": s.e_b_mev,
                "e_d_mev": s.e_d_mev,
                "e_minus_mev": s.e_minus_mev,
                "e_plus_mev": s.e_plus_mev,
                "e_a0_mev": s.e_a0_mev,
                "e_c0_mev": s.e_c0_mev,
                "gamma_plus_mev": s.gamma_plus_mev,
                "gamma_minus_mev": s.gamma_minus_mev,
            },
            "optical": {
                "probe_energy_mev": s.probe_energy_mev,
                "ir_energy_mev": s.ir_energy_mev,
                "lambda_probe_um": s.lambda_probe_um,
                "lambda_ir_um": s.lambda_ir_um,
                "dipole_ba_e_nm": self.dipole_ba_e_nm,
                "dipole_dc_e_nm": self.dipole_dc_e_nm,
            },
            "couplings": {
                "omega_mev": p.omega_mev,
                "alpha_mev": p.alpha_mev,
                "omega_ir_mev": p.omega_ir_mev,
                "tunnel_element_mev": self.tunnel_element_mev,
                "fano_mev": self.fano_mev,
                "delta0_mev": p.delta0_mev,
                "delta_ir_mev": p.delta_ir_mev,
                "eta_mev": p.eta_mev,
            },
            "budget": self.budget.as_dict(),
            "narrow_line": {
                "center_mev": self.narrow_line_center_mev,
                "width_mev": self.narrow_line_width_mev,
                "weak_ir_ok": self.weak_ir_ok,
            },
        }


def _isolated_spec(spec: StructureSpec, flood_layer: int, keep_layer: int) -> StructureSpec:
    """Replace one well by barrier material, leaving the other well intact.

    The flooding alloy is the largest fraction among the layers strictly
    between the two wells (the shared tunneling barrier).
    """
    n = len(spec.layers)
    if not (0 <= flood_layer < n and 0 <= keep_layer < n) or flood_layer == keep_layer:
        raise ConfigurationError("well layer indices must be distinct and in range")
    lo, hi = sorted((flood_layer, keep_layer))
    between = spec.layers[lo + 1 : hi]
    if not between:
        raise ConfigurationError("the two wells must be separated by a barrier layer")
    flood_fraction = max(layer.alloy_fraction for layer in between)
    old = spec.layers[flood_layer]
    layers = list(spec.layers)
    layers[flood_layer] = Layer(
        thickness_nm=old.thickness_nm,
        alloy_fraction=flood_fraction,
        effective_mass=old.effective_mass,
    )
    return StructureSpec(
        layers=tuple(layers),
        left_boundary=spec.left_boundary,
        right_boundary=spec.right_boundary,
    )


def _closed_core(spec: StructureSpec, last_well_layer: int) -> StructureSpec:
    """Decouple an open structure from its continuum for uncoupled-state solves.

    Layers beyond the last well are flooded with the tallest barrier alloy and
    the boundaries are closed; thicknesses are untouched so the sampled grid
    is unchanged.
    """
    if spec.right_boundary is not Boundary.OPEN:
        return spec
    top = max(layer.alloy_fraction for layer in spec.layers)
    layers = list(spec.layers)
    for j in range(last_well_layer + 1, len(layers)):
        old = layers[j]
        layers[j] = Layer(
            thickness_nm=old.thickness_nm,
            alloy_fraction=top,
            effective_mass=old.effective_mass,
        )
    return StructureSpec(
        layers=tuple(layers),
        left_boundary=spec.left_boundary,
        right_boundary=Boundary.CLOSED,
    )


def _pick(states: list, index: int, what: str):
    if index < 0 or index >= len(states):
        raise ConfigurationError(
            f"state role '{what}' wants index {index} but only {len(states)} states were found"
        )
    return states[index]


def solve_structure(
    config: RunConfig,
) -> tuple[StructureSpec, MaterialModel, PotentialGrid, list[BoundState], list[Resonance]]:
    """Solve the configured structure: grid, bound states and (if an energy
    window is configured on an open structure) resonances.  No role
    identification happens here, so an empty spectrum is a valid result."""
    if config.structure_file is None:
        raise ConfigurationError("a [structure] file is required; "
                                 "pure [four_level] runs use the model directly")
    spec, model = load_structure(config.structure_file)
    grid = build_grid(spec, config.dz_nm, model)
    bound = solve_bound(grid, config.solver.bound_window_mev, config.solver.scan_step_mev)
    resonances: list[Resonance] = []
    if grid.open_right and config.solver.resonance_window_mev is not None:
        resonances = solve_resonances(
            grid, config.solver.resonance_window_mev, config.solver.scan_step_mev
        )
    return spec, model, grid, bound, resonances


def run_pipeline(config: RunConfig) -> PipelineResult:
    spec, model, grid, bound, resonances = solve_structure(config)
    roles = config.states

    state_b = _pick(bound, roles.b, "b")
    state_d = _pick(bound, roles.d, "d")

    if roles.doublet_in == "resonances":
        if config.solver.resonance_window_mev is None:
            raise ConfigurationError("open doublet requires solver.resonance_window_mev")
        res_minus = _pick(resonances, roles.minus, "minus")
        res_plus = _pick(resonances, roles.plus, "plus")
        e_minus, e_plus = res_minus.energy_mev, res_plus.energy_mev
        gamma_minus, gamma_plus = res_minus.width_mev, res_plus.width_mev
    else:
        st_minus = _pick(bound, roles.minus, "minus")
        st_plus = _pick(bound, roles.plus, "plus")
        e_minus, e_plus = st_minus.energy_mev, st_plus.energy_mev
        # closed structures: the doublet decays only radiatively to the ground state
        gamma_minus = radiative_rate_mev(
            dipole(state_b.envelope, st_minus.envelope, grid).value_e_nm,
            e_minus - state_b.energy_mev,
        )
        gamma_plus = radiative_rate_mev(
            dipole(state_b.envelope, st_plus.envelope, grid).value_e_nm,
            e_plus - state_b.energy_mev,
        )
    if e_plus <= e_minus:
        raise ConfigurationError("doublet roles reversed: 'plus' must lie above 'minus'")
    omega = 0.5 * (e_plus - e_minus)

    # uncoupled |a>, |c> from the structure with the partner well flooded
    center = 0.5 * (e_plus + e_minus)
    hw = roles.isolated_halfwidth_mev
    window = (center - hw, center + hw)
    core = _closed_core(spec, max(roles.well_a_layer, roles.well_c_layer))
    spec_a = _isolated_spec(core, flood_layer=roles.well_c_layer, keep_layer=roles.well_a_layer)
    spec_c = _isolated_spec(core, flood_layer=roles.well_a_layer, keep_layer=roles.well_c_layer)
    grid_a = build_grid(spec_a, config.dz_nm, model)
    grid_c = build_grid(spec_c, config.dz_nm, model)
    states_a = solve_bound(grid_a, window, config.solver.scan_step_mev)
    states_c = solve_bound(grid_c, window, config.solver.scan_step_mev)
    if not states_a or not states_c:
        raise ConfigurationError(
            "no isolated-well state found near the doublet; check well layer indices"
        )
    iso_a, iso_c = states_a[-1], states_c[-1]
    tunnel = tunnel_coupling(
        grid, grid_a, grid_c, window, window, doublet_gap_mev=e_plus - e_minus
    )
    delta0 = iso_c.energy_mev - iso_a.energy_mev

    # optical scales
    probe_energy = iso_a.energy_mev - state_b.energy_mev
    ir_energy = iso_c.energy_mev - state_d.energy_mev
    if probe_energy <= 0 or ir_energy <= 0:
        raise ConfigurationError("level ordering violates the ladder b < d < (a, c)")
    lambda_probe = wavelength_um_from_mev(probe_energy)
    if config.fields.ir_wavelength_um is None:
        lambda_ir = wavelength_um_from_mev(ir_energy)
        delta_ir = 0.0
    else:
        lambda_ir = config.fields.ir_wavelength_um
        delta_ir = ir_energy - HC_MEV_UM / lambda_ir

    d_ba = dipole(state_b.envelope, iso_a.envelope, grid).value_e_nm
    d_dc = dipole(state_d.envelope, iso_c.envelope, grid).value_e_nm
    gamma_probe_rad = radiative_rate_mev(d_ba, probe_energy, config.fields.refractive_index)
    # total population decay of |a>: radiative plus phonon-mediated relaxation
    gamma_a_to_b = gamma_probe_rad + config.dephasing.nonradiative_a_mev
    gamma_ir_rad = radiative_rate_mev(d_dc, ir_energy, config.fields.refractive_index)

    alpha = config.fields.probe_rabi_fraction * omega
    omega_ir = rabi_energy_mev(
        d_dc, config.fields.ir_intensity_w_m2, config.fields.refractive_index
    )

    # dephasing budget; a laser line of FWHM dnu adds dnu/2 to the coherence
    # decay rate, so the revived line's FWHM picks up the full dnu
    deph = config.dephasing
    ir_linewidth = ghz_to_mev(config.fields.ir_linewidth_ghz)
    deph_cfg = DephasingConfig(
        acoustic_prefactor_mev_nm=deph.acoustic_prefactor_mev_nm,
        polar_prefactor_mev_per_nm=deph.polar_prefactor_mev_per_nm,
        Q_nm=deph.Q_nm,
        roughness_mev=deph.roughness_mev,
        roughness_weight_ab=deph.roughness_weight_ab,
        roughness_weight_cb=deph.roughness_weight_cb,
        roughness_weight_db=deph.roughness_weight_db,
        laser_linewidth_mev=0.5 * ir_linewidth,
    )
    pairs = {
        "ab": (state_b.envelope, iso_a.envelope, grid),
        "cb": (state_b.envelope, iso_c.envelope, grid),
        "db": (state_b.envelope, state_d.envelope, grid),
    }
    ac_weights = {k: acoustic_weight(*v) for k, v in pairs.items()}
    po_weights = {k: polar_optical_weight(*v[:2], v[2], Q_nm=deph.Q_nm) for k, v in pairs.items()}
    gamma_mean = 0.5 * (gamma_plus + gamma_minus)
    # escape through the extraction barrier plus nonradiative relaxation of |a>
    lifetimes = {
        "ab": 0.5 * gamma_mean + 0.5 * config.dephasing.nonradiative_a_mev,
        "cb": 0.5 * gamma_mean,
        "db": 0.0,
    }
    fano = fano_coupling_value(gamma_plus, gamma_minus, config.fano.k)
    fano_terms = {"ab": config.fano.weight_ab * fano, "db": config.fano.weight_db * fano}
    budget = assemble_budget(
        deph_cfg,
        acoustic_weights=ac_weights,
        polar_weights=po_weights,
        radiative_mev={"ab": 0.5 * gamma_probe_rad},
        lifetime_mev=lifetimes,
        fano_mev=fano_terms,
    )

    eta = eta_from_primitives(gamma_probe_rad, config.n_density_cm3, lambda_probe)
    four_level = FourLevelParams(
        omega_mev=omega,
        alpha_mev=alpha,
        omega_ir_mev=omega_ir,
        delta0_mev=delta0,
        delta_ir_mev=delta_ir,
        gamma_ab_mev=budget.gamma_ab_mev,
        gamma_cb_mev=budget.gamma_cb_mev,
        gamma_db_mev=budget.gamma_db_mev,
        gamma_a_to_b_mev=gamma_a_to_b,
        eta_mev=eta,
        ir_linewidth_mev=ir_linewidth,
        lambda_probe_um=lambda_probe,
        lambda_ir_um=lambda_ir,
        n_density_cm3=config.n_density_cm3,
    )
    line_center, line_width, weak_ok = predict_narrow_line(four_level)

    det = config.detector
    detector = DetectorParams(
        lambda_ir_um=lambda_ir,
        lambda_probe_um=lambda_probe,
        gamma_ir_rad_mev=det.gamma_ir_rad_mev if det.gamma_ir_rad_mev is not None else gamma_ir_rad,
        gamma_probe_rad_mev=(
            det.gamma_probe_rad_mev if det.gamma_probe_rad_mev is not None else gamma_probe_rad
        ),
        line_width_mev=det.line_width_mev if det.line_width_mev is not None else line_width,
        gamma_decoh_mev=(
            det.gamma_decoh_mev if det.gamma_decoh_mev is not None else budget.gamma_cb_mev
        ),
        alpha_mev=alpha,
        omega_mev=omega,
        area_m2=det.area_m2,
        wavelength_exponent=det.wavelength_exponent,
    )

    scheme = LevelScheme(
        e_b_mev=state_b.energy_mev,
        e_d_mev=state_d.energy_mev,
        e_minus_mev=e_minus,
        e_plus_mev=e_plus,
        e_a0_mev=iso_a.energy_mev,
        e_c0_mev=iso_c.energy_mev,
        omega_mev=omega,
        delta0_mev=delta0,
        probe_energy_mev=probe_energy,
        ir_energy_mev=ir_energy,
        lambda_probe_um=lambda_probe,
        lambda_ir_um=lambda_ir,
        gamma_plus_mev=gamma_plus,
        gamma_minus_mev=gamma_minus,
    )
    return PipelineResult(
        grid=grid,
        bound_states=bound,
        resonances=resonances,
        scheme=scheme,
        dipole_ba_e_nm=d_ba,
        dipole_dc_e_nm=d_dc,
        tunnel_element_mev=tunnel.matrix_element_mev,
        fano_mev=fano,
        budget=budget,
        four_level=four_level,
        detector=detector,
        narrow_line_center_mev=line_center,
        narrow_line_width_mev=line_width,
        weak_ir_ok=weak_ok,
    )


def fano_coupling_value(gamma_plus: float, gamma_minus: float, k: float) -> float:
    """k sqrt(Gamma_+ Gamma_-), tolerant of vanishing widths (closed limit)."""
    if gamma_plus < 0 or gamma_minus < 0:
        raise ConfigurationError("doublet widths must be non-negative")
    return k * float(np.sqrt(gamma_plus * gamma_minus))


def four_level_from_override(table: dict) -> FourLevelParams:
    """Build model parameters straight from a [four_level] config table."""
    known = set(FourLevelParams.__dataclass_fields__)
    unknown = set(table) - known
    if unknown:
        raise ConfigurationError(f"unknown keys in [four_level]: {sorted(unknown)}")
    try:
        return FourLevelParams(**table)
    except (TypeError, ContractViolation) as exc:
        raise ConfigurationError(f"invalid [four_level] table: {exc}") from exc
