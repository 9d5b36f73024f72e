"""Master-equation steady state: structure, limits and linear response."""

import numpy as np
import pytest

from darkwell.dark_resonance import FourLevelParams, susceptibility
from darkwell.errors import AmbiguityError, ContractViolation
from darkwell.liouville import (
    MasterEquationSpec,
    oracle_susceptibility,
    population_check,
    steady_state,
)


def _params(**kw):
    base = dict(
        omega_mev=40.0,
        alpha_mev=0.04,
        omega_ir_mev=1.0,
        gamma_ab_mev=2.0,
        gamma_cb_mev=0.05,
        gamma_db_mev=0.02,
        gamma_a_to_b_mev=4.0,
        eta_mev=1.0,
    )
    base.update(kw)
    return FourLevelParams(**base)


def test_steady_state_is_physical():
    rho = steady_state(MasterEquationSpec(params=_params()))
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_decay_dominated_limit_pools_population_in_ground_state():
    p = _params(alpha_mev=1e-6, omega_ir_mev=1e-6, omega_mev=1e-4)
    rho = steady_state(MasterEquationSpec(params=p))
    pops = population_check(rho)
    assert pops["b"] > 0.999
    assert pops["excitation_fraction"] < 1e-3


def test_weak_probe_population_bound():
    # three-level transparency configuration: |d> grounded by a weak decay
    p = _params(alpha_mev=0.04, omega_ir_mev=0.0)  # alpha/omega = 1e-3
    rho = steady_state(MasterEquationSpec(params=p, gamma_d_decay_mev=0.04))
    pops = population_check(rho)
    assert pops["excitation_fraction"] < 10.0 * (p.alpha_mev / p.omega_mev) ** 2


def test_decoupled_level_gives_ambiguous_steady_state():
    # with the IR field off and no decay out of |d>, its population is conserved
    p = _params(omega_ir_mev=0.0, gamma_db_mev=0.0)
    with pytest.raises(AmbiguityError):
        steady_state(MasterEquationSpec(params=p))


def test_coherence_rate_below_population_floor_is_rejected():
    p = _params(gamma_ab_mev=0.5, gamma_a_to_b_mev=4.0)  # needs negative pure dephasing
    with pytest.raises(ContractViolation):
        steady_state(MasterEquationSpec(params=p))


def test_oracle_matches_closed_form_in_linear_response():
    p = _params(alpha_mev=0.004, delta0_mev=0.3, delta_ir_mev=-0.8)
    spec = MasterEquationSpec(params=p)
    for d in (-41.0, -2.0, 0.0, 0.5, 39.0):
        formula = susceptibility(p, d)
        oracle = oracle_susceptibility(spec, d, richardson=True)
        scale = max(abs(formula), abs(oracle))
        assert abs(formula - oracle) / scale < 1e-4


def test_richardson_extrapolation_reduces_saturation_bias():
    p = _params(alpha_mev=0.4)  # alpha/omega = 1e-2, visible saturation
    spec = MasterEquationSpec(params=p)
    d = p.delta0_mev + p.delta_ir_mev  # the sharp revived line
    exact = susceptibility(p, d).imag
    raw = oracle_susceptibility(spec, d, richardson=False).imag
    rich = oracle_susceptibility(spec, d, richardson=True).imag
    assert abs(rich - exact) < abs(raw - exact)


def test_oracle_requires_finite_probe():
    p = _params(alpha_mev=0.0)
    with pytest.raises(ContractViolation):
        oracle_susceptibility(MasterEquationSpec(params=p))


def test_d_decay_channel_validation():
    with pytest.raises(ContractViolation):
        MasterEquationSpec(params=_params(), d_decay_channel="a")
    with pytest.raises(ContractViolation):
        MasterEquationSpec(params=_params(), gamma_d_decay_mev=-1.0)
