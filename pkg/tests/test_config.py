"""Configuration loading, validation and provenance hashing."""

from pathlib import Path

import pytest

from darkwell.config import load_config
from darkwell.errors import ConfigurationError

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def test_shipped_configs_load():
    for name in ("run_closed.toml", "run_open.toml", "run_params_override.toml"):
        cfg = load_config(CONFIG_DIR / name)
        assert len(cfg.config_hash) == 16


def test_hash_covers_structure_file(tmp_path):
    structure = tmp_path / "s.toml"
    structure.write_text(
        "[[layer]]\nthickness_nm = 10.0\nalloy_fraction = 0.5\n"
        "[[layer]]\nthickness_nm = 8.0\nalloy_fraction = 0.0\n"
        "[[layer]]\nthickness_nm = 10.0\nalloy_fraction = 0.5\n"
    )
    run = tmp_path / "run.toml"
    run.write_text('[structure]\nfile = "s.toml"\n')
    h1 = load_config(run).config_hash
    structure.write_text(structure.read_text().replace("8.0", "9.0"))
    h2 = load_config(run).config_hash
    assert h1 != h2


def test_unknown_keys_are_rejected(tmp_path):
    run = tmp_path / "run.toml"
    run.write_text("[four_level]\nomega_mev = 40.0\n[solver]\nbogus_key = 1\n")
    with pytest.raises(ConfigurationError):
        load_config(run)


def test_missing_file_and_parse_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "absent.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[unterminated\n")
    with pytest.raises(ConfigurationError):
        load_config(bad)


def test_requires_structure_or_override(tmp_path):
    run = tmp_path / "run.toml"
    run.write_text("[spectrum]\npoints = 10\n")
    with pytest.raises(ConfigurationError):
        load_config(run)


def test_range_validation(tmp_path):
    run = tmp_path / "run.toml"
    run.write_text(
        "[four_level]\nomega_mev = 40.0\n"
        "[spectrum]\ndetuning_min_mev = 5.0\ndetuning_max_mev = -5.0\n"
    )
    with pytest.raises(ConfigurationError):
        load_config(run)
