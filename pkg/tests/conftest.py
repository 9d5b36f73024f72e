"""Shared fixtures: the two reference pipelines are expensive, solve them once."""

from __future__ import annotations

import time
from pathlib import Path

import pytest

from darkwell.config import load_config
from darkwell.pipeline import run_pipeline

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _timed_run(name: str) -> dict:
    cfg = load_config(CONFIG_DIR / name)
    t0 = time.perf_counter()
    result = run_pipeline(cfg)
    return {"config": cfg, "result": result, "seconds": time.perf_counter() - t0}


@pytest.fixture(scope="session")
def closed_run() -> dict:
    """Fully confined reference double well, solved end to end."""
    return _timed_run("run_closed.toml")


@pytest.fixture(scope="session")
def open_run() -> dict:
    """Right-open reference double well with the doublet as resonances."""
    return _timed_run("run_open.toml")
