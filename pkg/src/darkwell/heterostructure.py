"""Layered GaAs/AlGaAs structures and their sampled 1D potential profiles.

A structure is an ordered stack of alloy layers grown along z.  The
conduction-band offset of each layer is a linear function of its alloy
fraction; the sampled result is a piecewise-constant potential on a uniform
grid, evaluated at cell centers so that reflection symmetry of the layer
stack carries over exactly to the sampled arrays.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ContractViolation


class Boundary(Enum):
    CLOSED = "closed"
    OPEN = "open"


@dataclass(frozen=True)
class MaterialModel:
    """Linear alloy model: offset(x) = offset_coefficient * x, mass in m_e units."""

    offset_coefficient_mev: float = 1000.0
    effective_mass: float = 0.067

    def __post_init__(self):
        if self.effective_mass <= 0:
            raise ContractViolation("effective_mass must be positive")
        if self.offset_coefficient_mev <= 0:
            raise ContractViolation("offset_coefficient_mev must be positive")


@dataclass(frozen=True)
class Layer:
    thickness_nm: float
    alloy_fraction: float
    doping_cm2: float | None = None  # sheet density, metadata only
    effective_mass: float | None = None  # per-layer override

    def __post_init__(self):
        if self.thickness_nm <= 0:
            raise ContractViolation("layer thickness must be positive")
        if not 0.0 <= self.alloy_fraction <= 1.0:
            raise ContractViolation("alloy_fraction must be within [0, 1]")


@dataclass(frozen=True)
class StructureSpec:
    layers: tuple[Layer, ...]
    left_boundary: Boundary = Boundary.CLOSED
    right_boundary: Boundary = Boundary.CLOSED

    def __post_init__(self):
        if len(self.layers) < 3:
            raise ContractViolation("a structure needs at least 3 layers")

    def reflected(self) -> "StructureSpec":
        return StructureSpec(
            layers=tuple(reversed(self.layers)),
            left_boundary=self.right_boundary,
            right_boundary=self.left_boundary,
        )


@dataclass(frozen=True)
class PotentialGrid:
    """Cell-centered samples of the potential and effective-mass profile."""

    z: np.ndarray  # nm, strictly increasing, uniform spacing
    V: np.ndarray  # meV
    m_eff: np.ndarray  # units of m_e
    dz: float  # nm
    open_right: bool = False
    open_left: bool = False

    def __post_init__(self):
        if not (len(self.z) == len(self.V) == len(self.m_eff)):
            raise ContractViolation("grid arrays must have equal length")
        if len(self.z) < 2:
            raise ContractViolation("grid needs at least 2 points")
        steps = np.diff(self.z)
        if np.any(steps <= 0) or not np.allclose(steps, self.dz, rtol=1e-9, atol=0):
            raise ContractViolation("z must be strictly increasing with uniform spacing dz")
        if not np.all(np.isfinite(self.V)):
            raise ContractViolation("V must be finite everywhere")


def offset_of(alloy_fraction: float, model: MaterialModel) -> float:
    """Conduction-band offset in meV for a given alloy fraction."""
    if not 0.0 <= alloy_fraction <= 1.0:
        raise ContractViolation(f"alloy fraction {alloy_fraction} outside [0, 1]")
    return model.offset_coefficient_mev * alloy_fraction


def build_grid(spec: StructureSpec, dz: float, model: MaterialModel) -> PotentialGrid:
    """Sample the layer stack onto a uniform cell-centered grid.

    dz must resolve the thinnest layer with at least 4 cells.  Each cell
    takes the potential of the layer containing its center, so layer
    boundaries are honored to within dz/2.
    """
    if dz <= 0:
        raise ConfigurationError("dz must be positive")
    thinnest = min(layer.thickness_nm for layer in spec.layers)
    if dz > thinnest / 4:
        raise ConfigurationError(
            f"dz={dz} nm too coarse: thinnest layer is {thinnest} nm, need dz <= {thinnest / 4}"
        )

    total = sum(layer.thickness_nm for layer in spec.layers)
    n = int(round(total / dz))
    z = (np.arange(n) + 0.5) * dz

    edges = np.cumsum([layer.thickness_nm for layer in spec.layers])
    idx = np.searchsorted(edges, z, side="right")
    idx = np.clip(idx, 0, len(spec.layers) - 1)

    offsets = np.array([offset_of(layer.alloy_fraction, model) for layer in spec.layers])
    masses = np.array(
        [
            layer.effective_mass if layer.effective_mass is not None else model.effective_mass
            for layer in spec.layers
        ]
    )
    return PotentialGrid(
        z=z,
        V=offsets[idx],
        m_eff=masses[idx],
        dz=dz,
        open_left=spec.left_boundary is Boundary.OPEN,
        open_right=spec.right_boundary is Boundary.OPEN,
    )


def load_structure(path: str | Path) -> tuple[StructureSpec, MaterialModel]:
    """Read a structure file (TOML: [material] table plus ordered [[layer]] list)."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"structure file not found: {path}")
    with open(path, "rb") as fh:
        data = tomllib.load(fh)

    mat = data.get("material", {})
    model = MaterialModel(
        offset_coefficient_mev=float(mat.get("offset_coefficient_mev", 1000.0)),
        effective_mass=float(mat.get("effective_mass", 0.067)),
    )
    raw_layers = data.get("layer", [])
    if not raw_layers:
        raise ConfigurationError(f"no [[layer]] entries in {path}")
    layers = []
    for entry in raw_layers:
        layers.append(
            Layer(
                thickness_nm=float(entry["thickness_nm"]),
                alloy_fraction=float(entry["alloy_fraction"]),
                doping_cm2=float(entry["doping_cm2"]) if "doping_cm2" in entry else None,
                effective_mass=float(entry["effective_mass"]) if "effective_mass" in entry else None,
            )
        )
    try:
        left = Boundary(data.get("left_boundary", "closed"))
        right = Boundary(data.get("right_boundary", "closed"))
    except ValueError as exc:
        raise ConfigurationError(f"boundary must be 'closed' or 'open': {exc}") from exc
    spec = StructureSpec(layers=tuple(layers), left_boundary=left, right_boundary=right)
    return spec, model
