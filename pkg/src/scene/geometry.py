"""
Element-level geometry of the BS antenna panel, the RIS panel and the UE.

Panels are planar rectangular grids centred on a configured point. Element ordering is
row-major: rows run along the panel's vertical axis, columns along its horizontal axis,
starting from the panel's minimum corner.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from utils.errors import ConfigurationError

SPEED_OF_LIGHT = 299_792_458.0
_UNIT_TOLERANCE = 1e-12


class PropagationVariant(str, Enum):
    # amplitude ~ 1/sqrt(d)
    PAPER_PRINTED = "paper_printed"
    # amplitude ~ 1/d
    FRIIS_SQUARED = "friis_squared"

    @classmethod
    def _missing_(cls, value):
        return _VARIANT_ALIASES.get(value)


# accepted spellings besides the member values
_VARIANT_ALIASES = {"sqrt_distance": PropagationVariant.PAPER_PRINTED}

# with the enum values, every spelling a scenario file or --variant accepts
VARIANT_NAMES = tuple(v.value for v in PropagationVariant) + tuple(_VARIANT_ALIASES)


class ApertureModel(str, Enum):
    FLAT = "flat"
    COSINE_PROJECTED = "cosine_projected"


@dataclass(frozen=True)
class SceneConfig:
    """
    Full geometric and RF description of a single-user RIS-assisted downlink.

    Attributes:
        carrier_frequency (float): Carrier frequency in Hz.
        bs_center, ris_center, ue_position (tuple[float, float, float]): Positions in meters.
        bs_grid, ris_grid (tuple[int, int]): (rows, cols) of the BS and RIS panels.
        bs_spacing, ris_spacing (float | None): Element spacing in meters; None means lambda/2.
        bs_normal, ris_normal (tuple[float, float, float]): Unit panel normals.
        propagation_variant (PropagationVariant): Distance exponent used for G and f.
        aperture_model (ApertureModel): Effective aperture of RIS elements.
        los_enabled (bool): Whether the direct BS-UE path exists.
        noise_power (float | None): N0 in watts, only used for capacity.
    """
    carrier_frequency: float = 28.0e9
    bs_center: tuple = (0.0, 0.0, 0.0)
    ris_center: tuple = (2.0, 50.0, 0.0)
    ue_position: tuple = (0.0, 50.0, 0.0)
    bs_grid: tuple = (8, 8)
    ris_grid: tuple = (74, 74)
    bs_spacing: float | None = None
    ris_spacing: float | None = None
    bs_normal: tuple = (0.0, 1.0, 0.0)
    ris_normal: tuple = (-1.0, 0.0, 0.0)
    propagation_variant: PropagationVariant = PropagationVariant.FRIIS_SQUARED
    aperture_model: ApertureModel = ApertureModel.COSINE_PROJECTED
    los_enabled: bool = False
    noise_power: float | None = None
    name: str = field(default="scene", compare=False)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def bs_element_spacing(self) -> float:
        return self.wavelength / 2 if self.bs_spacing is None else float(self.bs_spacing)

    @property
    def ris_element_spacing(self) -> float:
        return self.wavelength / 2 if self.ris_spacing is None else float(self.ris_spacing)

    @property
    def n_bs(self) -> int:
        return int(self.bs_grid[0] * self.bs_grid[1])

    @property
    def n_ris(self) -> int:
        return int(self.ris_grid[0] * self.ris_grid[1])

    def with_ue(self, ue_position) -> "SceneConfig":
        """Returns a copy of the scene with the UE moved."""
        return replace(self, ue_position=tuple(float(c) for c in ue_position))

    def validate(self) -> "SceneConfig":
        """
        Checks the invariants of the configuration.

        Returns:
            SceneConfig: self, so the call can be chained.

        Raises:
            ConfigurationError: On a non-positive frequency, empty grid, non-positive spacing,
                malformed point or non-unit normal.
        """
        if not (self.carrier_frequency > 0 and math.isfinite(self.carrier_frequency)):
            raise ConfigurationError(f"carrier_frequency must be > 0, got {self.carrier_frequency}")
        for label, grid in (("bs_grid", self.bs_grid), ("ris_grid", self.ris_grid)):
            if len(grid) != 2 or any(int(g) != g or g < 1 for g in grid):
                raise ConfigurationError(f"{label} must be two integers >= 1, got {grid}")
        for label, spacing in (("bs_spacing", self.bs_spacing), ("ris_spacing", self.ris_spacing)):
            if spacing is not None and not spacing > 0:
                raise ConfigurationError(f"{label} must be > 0, got {spacing}")
        for label, point in (("bs_center", self.bs_center), ("ris_center", self.ris_center),
                             ("ue_position", self.ue_position)):
            _as_point(point, label)
        for label, normal in (("bs_normal", self.bs_normal), ("ris_normal", self.ris_normal)):
            vec = _as_point(normal, label)
            if abs(np.linalg.norm(vec) - 1.0) > _UNIT_TOLERANCE:
                raise ConfigurationError(f"{label} must be unit length, got {normal}")
        if self.noise_power is not None and not self.noise_power > 0:
            raise ConfigurationError(f"noise_power must be > 0, got {self.noise_power}")
        return self

    def describe(self) -> dict:
        """Plain dictionary of the configuration, used for hashing and reports."""
        return {
            "carrier_frequency": self.carrier_frequency,
            "bs_center": list(self.bs_center),
            "ris_center": list(self.ris_center),
            "ue_position": list(self.ue_position),
            "bs_grid": list(self.bs_grid),
            "ris_grid": list(self.ris_grid),
            "bs_spacing": self.bs_element_spacing,
            "ris_spacing": self.ris_element_spacing,
            "bs_normal": list(self.bs_normal),
            "ris_normal": list(self.ris_normal),
            "propagation_variant": PropagationVariant(self.propagation_variant).value,
            "aperture_model": ApertureModel(self.aperture_model).value,
            "los_enabled": bool(self.los_enabled),
            "noise_power": self.noise_power,
        }


@dataclass(frozen=True)
class ArrayGeometry:
    """
    Positions of a planar array's elements.

    Attributes:
        element_positions (np.ndarray): (N, 3) positions in meters, row-major order.
        normal (np.ndarray): Unit normal of the panel.
        element_area (float): Physical area per element (spacing squared), m^2.
        grid (tuple[int, int]): (rows, cols).
        spacing (float): Element spacing in meters.
        center (np.ndarray): Panel center.
    """
    element_positions: np.ndarray
    normal: np.ndarray
    element_area: float
    grid: tuple
    spacing: float
    center: np.ndarray

    @property
    def size(self) -> int:
        return int(self.element_positions.shape[0])


def _as_point(value, label: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{label} must be a finite 3-vector, got {value}")
    return arr


def grid_from_side_length(side_length: float, spacing: float) -> int:
    """
    Number of elements per side of a square panel of the given side length.

    Args:
        side_length (float): Physical side length in meters.
        spacing (float): Element spacing in meters.

    Returns:
        int: floor(side_length / spacing), at least 1.
    """
    if not (side_length > 0 and spacing > 0):
        raise ConfigurationError(
            f"side_length and spacing must be > 0, got {side_length}, {spacing}")
    # guard against 0.4/0.005 landing at 79.99999999
    return max(1, int(math.floor(side_length / spacing + 1e-9)))


def panel_axes(normal) -> tuple[np.ndarray, np.ndarray]:
    """
    In-plane (horizontal, vertical) unit axes of a panel with the given normal.

    The vertical axis is the projection of +z onto the panel; panels facing +/-z use +x
    as horizontal axis instead.

    Args:
        normal: Unit normal of the panel.

    Returns:
        tuple[np.ndarray, np.ndarray]: (u, v) with u, v, normal mutually orthogonal.
    """
    n = np.asarray(normal, dtype=float)
    u = np.cross(n, np.array([0.0, 0.0, 1.0]))
    if np.linalg.norm(u) < 1e-9:
        u = np.array([1.0, 0.0, 0.0]) - n * n[0]
    u = u / np.linalg.norm(u)
    v = np.cross(u, n)
    return u, v / np.linalg.norm(v)


def planar_array(center, grid, spacing: float, normal) -> ArrayGeometry:
    """
    Builds a rectangular planar array centred on `center` in the plane orthogonal to `normal`.

    Args:
        center: Panel center (3-vector).
        grid (tuple[int, int]): (rows, cols).
        spacing (float): Element spacing in meters.
        normal: Unit normal.

    Returns:
        ArrayGeometry: Geometry with row-major element ordering.
    """
    rows, cols = int(grid[0]), int(grid[1])
    if spacing <= 0:
        raise ConfigurationError(f"spacing must be > 0, got {spacing}")
    n = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > _UNIT_TOLERANCE:
        raise ConfigurationError(f"normal must be unit length, got {normal}")
    c = np.asarray(center, dtype=float)
    u, v = panel_axes(n)
    row_offsets = (np.arange(rows) - (rows - 1) / 2.0) * spacing
    col_offsets = (np.arange(cols) - (cols - 1) / 2.0) * spacing
    rr, cc = np.meshgrid(row_offsets, col_offsets, indexing="ij")
    positions = (c[None, :]
                 + cc.reshape(-1, 1) * u[None, :]
                 + rr.reshape(-1, 1) * v[None, :])
    return ArrayGeometry(
        element_positions=positions,
        normal=n,
        element_area=spacing * spacing,
        grid=(rows, cols),
        spacing=float(spacing),
        center=c,
    )


def build_geometry(cfg: SceneConfig) -> tuple[ArrayGeometry, ArrayGeometry, np.ndarray]:
    """
    Builds the BS array, the RIS panel and the UE position from a scene description.

    Args:
        cfg (SceneConfig): Validated scene.

    Returns:
        tuple: (bs, ris, ue) where bs and ris are `ArrayGeometry` and ue a 3-vector.

    Raises:
        ConfigurationError: If the configuration violates its invariants.
    """
    cfg.validate()
    bs = planar_array(cfg.bs_center, cfg.bs_grid, cfg.bs_element_spacing, cfg.bs_normal)
    ris = planar_array(cfg.ris_center, cfg.ris_grid, cfg.ris_element_spacing, cfg.ris_normal)
    return bs, ris, np.asarray(cfg.ue_position, dtype=float)
