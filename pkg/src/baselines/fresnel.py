"""
Fresnel-zone baseline.

Each element gets phase 0 or pi from the parity of its half-wavelength zone, counted on the
path from the BS array center through the element to the UE.
"""
import numpy as np

from channel.phases import PhaseConfig
from scene.geometry import ArrayGeometry


def fresnel_zone_indices(path_lengths: np.ndarray, wavelength: float) -> np.ndarray:
    """
    Fresnel zone of each path: m = floor(2 (d - min d) / lambda), so zone 0 starts at the
    shortest path and zones are lambda/2 wide.
    """
    d = np.asarray(path_lengths, dtype=float)
    if d.size == 0:
        return np.zeros(0, dtype=np.int64)
    # a path exactly on a zone boundary belongs to the outer zone
    return np.floor(2.0 * (d - d.min()) / wavelength + 1e-9).astype(np.int64)


def fresnel_zone(bs: ArrayGeometry, ris: ArrayGeometry, ue, wavelength: float) -> PhaseConfig:
    """
    Binary Fresnel-zone design: elements in even zones keep phase 0, odd zones invert.

    Path lengths run from the BS array center via each RIS element to the UE; only geometry
    and wavelength enter, never channel magnitudes.
    """
    ue = np.asarray(ue, dtype=float)
    positions = ris.element_positions
    d = (np.linalg.norm(positions - bs.center[None, :], axis=1)
         + np.linalg.norm(positions - ue[None, :], axis=1))
    return PhaseConfig(level=2, indices=fresnel_zone_indices(d, wavelength) % 2)
