"""Simulation of coherence-based infrared detection in double quantum wells.

The package covers the full chain from a layered heterostructure to detector
figures of merit: 1D envelope eigensolver (bound states and quasi-bound
resonances), coupling elements (dipoles, tunnel splitting, Fano factor),
a per-coherence dephasing budget, the four-level double-dark-resonance
susceptibility with an independent master-equation oracle, and a
deterministic CLI pipeline.
"""

from .config import RunConfig, load_config
from .dark_resonance import FourLevelParams, susceptibility
from .eigensolver import solve_bound, solve_resonances
from .heterostructure import Layer, MaterialModel, StructureSpec, build_grid, load_structure
from .pipeline import PipelineResult, run_pipeline

__all__ = [
    "FourLevelParams",
    "Layer",
    "MaterialModel",
    "PipelineResult",
    "RunConfig",
    "StructureSpec",
    "build_grid",
    "load_config",
    "load_structure",
    "run_pipeline",
    "solve_bound",
    "solve_resonances",
    "susceptibility",
]

__version__ = "0.1.0"
