"""End-to-end parameter extraction from the two reference structures."""

import json

import pytest

from darkwell.errors import ConfigurationError
from darkwell.pipeline import fano_coupling_value, four_level_from_override, solve_structure


def test_closed_pipeline_level_scheme(closed_run):
    s = closed_run["result"].scheme
    assert s.e_b_mev < s.e_d_mev < s.e_minus_mev < s.e_plus_mev
    assert s.omega_mev == pytest.approx(0.5 * (s.e_plus_mev - s.e_minus_mev))
    # the structure was tuned to the quoted scales: ~40 meV splitting,
    # ~10 um IR wavelength, aligned wells
    assert 30.0 < s.omega_mev < 50.0
    assert 8.0 < s.lambda_ir_um < 12.0
    assert abs(s.delta0_mev) < 1.0
    assert s.gamma_plus_mev < 1e-3  # closed doublet decays only radiatively


def test_closed_pipeline_four_level_parameters(closed_run):
    r = closed_run["result"]
    p = r.four_level
    assert p.alpha_mev == pytest.approx(0.01 * p.omega_mev)
    assert p.gamma_ab_mev > p.gamma_cb_mev > 0
    assert p.gamma_db_mev > 0
    assert p.eta_mev > 0
    assert r.weak_ir_ok
    # narrow line width = population-decay funneling plus the laser linewidth
    expected = (
        p.gamma_a_to_b_mev * p.omega_ir_mev**2 / p.omega_mev**2 + p.ir_linewidth_mev
    )
    assert r.narrow_line_width_mev == pytest.approx(expected)


def test_closed_report_is_json_serializable(closed_run):
    report = closed_run["result"].report()
    text = json.dumps(report)
    assert "budget" in report and "couplings" in report
    assert json.loads(text)["couplings"]["omega_mev"] > 0


def test_open_pipeline_uses_resonance_doublet(open_run):
    r = open_run["result"]
    assert len(r.resonances) >= 2
    s = r.scheme
    assert s.gamma_plus_mev > 1.0 and s.gamma_minus_mev > 1.0
    assert r.fano_mev == pytest.approx(
        (s.gamma_plus_mev * s.gamma_minus_mev) ** 0.5
    )
    # interference broadening lands on the a-b and d-b coherences
    assert r.budget.ab.fano_mev > 0
    assert r.budget.db.fano_mev > 0
    assert r.four_level.gamma_db_mev > open_run["config"].dephasing.roughness_mev


def test_open_and_closed_geometries_share_the_ladder(closed_run, open_run):
    for run in (closed_run, open_run):
        s = run["result"].scheme
        assert s.probe_energy_mev > s.ir_energy_mev > 0


def test_solve_structure_without_roles(closed_run):
    spec, model, grid, bound, resonances = solve_structure(closed_run["config"])
    assert len(bound) >= 4
    assert resonances == []
    assert len(grid.z) > 0


def test_override_table_round_trip_and_unknown_key():
    table = {"omega_mev": 40.0, "alpha_mev": 0.4, "omega_ir_mev": 1.0}
    assert four_level_from_override(table).omega_mev == 40.0
    with pytest.raises(ConfigurationError):
        four_level_from_override({**table, "bogus": 1.0})
    with pytest.raises(ConfigurationError):
        four_level_from_override({"omega_mev": 40.0})  # missing required keys
    with pytest.raises(ConfigurationError):
        four_level_from_override({**table, "gamma_ab_mev": -1.0})


def test_fano_coupling_value():
    assert fano_coupling_value(4.0, 9.0, 0.5) == pytest.approx(3.0)
    assert fano_coupling_value(0.0, 9.0, 1.0) == 0.0
    with pytest.raises(ConfigurationError):
        fano_coupling_value(-1.0, 9.0, 1.0)
