"""Layer stacks, alloy offsets and grid sampling."""

from pathlib import Path

import numpy as np
import pytest

from darkwell.errors import ConfigurationError, ContractViolation
from darkwell.heterostructure import (
    Boundary,
    Layer,
    MaterialModel,
    StructureSpec,
    build_grid,
    load_structure,
    offset_of,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
MODEL = MaterialModel()


def _stack(*pairs, left="closed", right="closed"):
    return StructureSpec(
        layers=tuple(Layer(thickness_nm=t, alloy_fraction=x) for t, x in pairs),
        left_boundary=Boundary(left),
        right_boundary=Boundary(right),
    )


def test_offset_is_linear_in_alloy_fraction():
    assert offset_of(0.0, MODEL) == 0.0
    assert offset_of(0.3, MODEL) == pytest.approx(300.0)
    assert offset_of(1.0, MODEL) == pytest.approx(1000.0)
    with pytest.raises(ContractViolation):
        offset_of(1.2, MODEL)


def test_grid_is_cell_centered_and_uniform():
    spec = _stack((10, 0.5), (8, 0.0), (10, 0.5))
    grid = build_grid(spec, 0.05, MODEL)
    assert len(grid.z) == round(28 / 0.05)
    assert grid.z[0] == pytest.approx(0.025)
    assert np.allclose(np.diff(grid.z), 0.05)
    assert grid.V.max() == pytest.approx(500.0)
    assert grid.V.min() == pytest.approx(0.0)


def test_reflected_structure_samples_to_reversed_potential():
    spec = _stack((10, 0.8), (6, 0.0), (2, 0.3), (4, 0.1), (12, 0.8))
    grid = build_grid(spec, 0.05, MODEL)
    grid_r = build_grid(spec.reflected(), 0.05, MODEL)
    assert np.array_equal(grid_r.V, grid.V[::-1])
    assert np.array_equal(grid_r.m_eff, grid.m_eff[::-1])


def test_too_coarse_sampling_is_rejected():
    spec = _stack((10, 0.5), (1.0, 0.0), (10, 0.5))
    with pytest.raises(ConfigurationError):
        build_grid(spec, 0.3, MODEL)


def test_layer_and_stack_validation():
    with pytest.raises(ContractViolation):
        Layer(thickness_nm=-1.0, alloy_fraction=0.2)
    with pytest.raises(ContractViolation):
        Layer(thickness_nm=1.0, alloy_fraction=1.5)
    with pytest.raises(ContractViolation):
        StructureSpec(layers=(Layer(1.0, 0.1), Layer(1.0, 0.2)))


def test_per_layer_mass_override_lands_on_grid():
    spec = StructureSpec(
        layers=(
            Layer(4.0, 0.5, effective_mass=0.1),
            Layer(4.0, 0.0),
            Layer(4.0, 0.5, effective_mass=0.1),
        )
    )
    grid = build_grid(spec, 0.1, MODEL)
    assert grid.m_eff[0] == pytest.approx(0.1)
    assert grid.m_eff[len(grid.z) // 2] == pytest.approx(0.067)


def test_shipped_structures_load():
    spec_c, model_c = load_structure(CONFIG_DIR / "double_well_closed.toml")
    assert spec_c.right_boundary is Boundary.CLOSED
    spec_o, _ = load_structure(CONFIG_DIR / "double_well_open.toml")
    assert spec_o.right_boundary is Boundary.OPEN
    assert model_c.effective_mass == pytest.approx(0.067)


def test_missing_structure_file_raises_config_error(tmp_path):
    with pytest.raises(ConfigurationError):
        load_structure(tmp_path / "nope.toml")
