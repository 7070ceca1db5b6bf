"""
Free-space channel synthesis for a RIS-assisted MISO downlink.

All channels follow the convention h^T = h_d^T + phi^H V with V = diag(f) G, so the
reflected contribution of element n enters with conj(phi_n). Distances are exact
element-to-element distances, so near-field phase curvature is captured without
further approximation.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from channel.phases import PhaseConfig
from scene.geometry import (ApertureModel, ArrayGeometry, PropagationVariant, SceneConfig,
                            build_geometry)
from utils.errors import ConfigurationError, DegenerateGeometryError, NumericalError
from utils.utilities import power_to_db

logger = logging.getLogger(__name__)

_MIN_DISTANCE = 1e-12


@dataclass(frozen=True)
class ChannelSet:
    """
    Channels of one scene at one UE position.

    Attributes:
        h_d (np.ndarray): Direct BS-UE channel, length N_BS (zeros without LoS).
        G (np.ndarray): BS-RIS channel, N_RIS x N_BS.
        f (np.ndarray): RIS-UE channel, length N_RIS.
        V (np.ndarray): Cascade matrix diag(f) G, N_RIS x N_BS.
    """
    h_d: np.ndarray
    G: np.ndarray
    f: np.ndarray
    V: np.ndarray

    @property
    def n_ris(self) -> int:
        return int(self.V.shape[0])

    @property
    def n_bs(self) -> int:
        return int(self.V.shape[1])


def _distances(points_a: np.ndarray, points_b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise offsets b - a with shape (len(a), len(b), 3) and their norms."""
    offsets = points_b[None, :, :] - points_a[:, None, :]
    dist = np.linalg.norm(offsets, axis=-1)
    if dist.size and dist.min() < _MIN_DISTANCE:
        raise DegenerateGeometryError(
            f"coincident points: minimum distance {dist.min():.3e} m")
    return offsets, dist


def _free_space_phase(dist: np.ndarray, wavelength: float) -> np.ndarray:
    return np.exp(-2j * np.pi * dist / wavelength)


def effective_aperture(normal, element_area: float, link_direction,
                       model: ApertureModel | str = ApertureModel.COSINE_PROJECTED):
    """
    Effective aperture of a RIS element seen along a link direction.

    Args:
        normal: Unit normal of the element.
        element_area (float): Physical element area in m^2.
        link_direction: Unit vector(s) from the element toward the far end, shape (..., 3).
        model (ApertureModel | str): "flat" or "cosine_projected".

    Returns:
        float | np.ndarray: element_area for the flat model, element_area * max(0, n.dir)
        for the cosine-projected model.
    """
    model = ApertureModel(model)
    direction = np.asarray(link_direction, dtype=float)
    if model is ApertureModel.FLAT:
        area = np.full(direction.shape[:-1], float(element_area))
    else:
        cosine = direction @ np.asarray(normal, dtype=float)
        area = element_area * np.maximum(0.0, cosine)
    if area.ndim == 0:
        return float(area)
    return area


def direct_channel(bs: ArrayGeometry, ue, wavelength: float) -> np.ndarray:
    """
    Free-space path-loss channel from every BS antenna to the UE.

    Args:
        bs (ArrayGeometry): BS array.
        ue: UE position (3-vector).
        wavelength (float): Wavelength in meters.

    Returns:
        np.ndarray: h_d with h_d[k] = lambda / (4 pi d_k) * exp(-j 2 pi d_k / lambda).

    Raises:
        DegenerateGeometryError: If the UE coincides with a BS antenna.
    """
    _, dist = _distances(bs.element_positions, np.asarray(ue, dtype=float).reshape(1, 3))
    dist = dist[:, 0]
    return wavelength / (4 * np.pi * dist) * _free_space_phase(dist, wavelength)


def _distance_power(variant: PropagationVariant | str) -> int:
    return 1 if PropagationVariant(variant) is PropagationVariant.PAPER_PRINTED else 2


def bs_ris_channel(bs: ArrayGeometry, ris: ArrayGeometry, wavelength: float,
                   variant: PropagationVariant | str = PropagationVariant.FRIIS_SQUARED,
                   aperture_model: ApertureModel | str = ApertureModel.COSINE_PROJECTED
                   ) -> np.ndarray:
    """
    Friis-type channel between every BS antenna and every RIS element.

    Args:
        bs (ArrayGeometry): BS array.
        ris (ArrayGeometry): RIS panel.
        wavelength (float): Wavelength in meters.
        variant: Distance exponent p of sqrt(A / (4 pi d^p)).
        aperture_model: Aperture of the RIS element as seen from each BS antenna.

    Returns:
        np.ndarray: G with shape (N_RIS, N_BS).
    """
    offsets, dist = _distances(ris.element_positions, bs.element_positions)
    area = effective_aperture(ris.normal, ris.element_area, offsets / dist[..., None],
                              aperture_model)
    amplitude = np.sqrt(area / (4 * np.pi * dist ** _distance_power(variant)))
    return amplitude * _free_space_phase(dist, wavelength)


def ris_ue_channel(ris: ArrayGeometry, ue, wavelength: float,
                   variant: PropagationVariant | str = PropagationVariant.FRIIS_SQUARED,
                   aperture_model: ApertureModel | str = ApertureModel.COSINE_PROJECTED
                   ) -> np.ndarray:
    """
    Friis-type channel between every RIS element and the UE.

    Args:
        ris (ArrayGeometry): RIS panel.
        ue: UE position.
        wavelength (float): Wavelength in meters.
        variant: Distance exponent of the amplitude law.
        aperture_model: Aperture of the RIS element as observed from the UE.

    Returns:
        np.ndarray: f with length N_RIS.
    """
    offsets, dist = _distances(ris.element_positions, np.asarray(ue, dtype=float).reshape(1, 3))
    offsets, dist = offsets[:, 0, :], dist[:, 0]
    area = effective_aperture(ris.normal, ris.element_area, offsets / dist[:, None],
                              aperture_model)
    amplitude = np.sqrt(area / (4 * np.pi * dist ** _distance_power(variant)))
    return amplitude * _free_space_phase(dist, wavelength)


def cascade_matrix(f: np.ndarray, G: np.ndarray) -> np.ndarray:
    """
    Cascade matrix V = diag(f) G: row n is element n's contribution to the composite channel.
    """
    f = np.asarray(f)
    G = np.asarray(G)
    if G.ndim != 2 or f.shape != (G.shape[0],):
        raise ConfigurationError(f"shape mismatch: f {f.shape} vs G {G.shape}")
    return f[:, None] * G


def _coefficients(phases) -> np.ndarray:
    if isinstance(phases, PhaseConfig):
        return phases.coefficients
    return np.asarray(phases, dtype=complex).reshape(-1)


def composite_channel(h_d: np.ndarray, V: np.ndarray, phases) -> np.ndarray:
    """
    Composite channel h^T = h_d^T + phi^H V.

    Args:
        h_d (np.ndarray): Direct channel, length N_BS.
        V (np.ndarray): Cascade matrix, N_RIS x N_BS.
        phases (PhaseConfig | np.ndarray): Discrete configuration or complex coefficients.

    Returns:
        np.ndarray: h, length N_BS.
    """
    phi = _coefficients(phases)
    if phi.shape[0] != V.shape[0]:
        raise ConfigurationError(
            f"phase vector has {phi.shape[0]} entries, cascade matrix {V.shape[0]} rows")
    return np.asarray(h_d, dtype=complex) + V.T @ np.conj(phi)


def mrt_weights(h: np.ndarray) -> np.ndarray:
    """
    Maximum ratio transmission beamformer w = conj(h) / ||h||, so that h^T w = ||h||.

    Raises:
        DegenerateGeometryError: If the channel is identically zero.
    """
    h = np.asarray(h, dtype=complex)
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise DegenerateGeometryError("MRT weights undefined for an all-zero channel")
    return np.conj(h) / norm


def channel_gain(h: np.ndarray) -> float:
    """Linear channel gain ||h||^2."""
    h = np.asarray(h, dtype=complex)
    return float(np.real(np.vdot(h, h)))


def channel_gain_db(h: np.ndarray) -> float:
    """Channel gain 10 log10 ||h||^2 in dB; -inf for a zero channel."""
    return power_to_db(channel_gain(h))


def capacity(h: np.ndarray, w: np.ndarray, noise_power: float) -> float:
    """
    Single-user capacity log2(1 + |h^T w|^2 / N0) in bits/s/Hz.

    Raises:
        ConfigurationError: If noise_power is not positive.
    """
    if not noise_power > 0:
        raise ConfigurationError(f"noise_power must be > 0, got {noise_power}")
    signal = abs(np.asarray(h, dtype=complex) @ np.asarray(w, dtype=complex)) ** 2
    return math.log2(1.0 + signal / noise_power)


def build_channels(cfg: SceneConfig, ue=None, geometry=None) -> ChannelSet:
    """
    Synthesizes every channel of a scene at the configured (or given) UE position.

    Args:
        cfg (SceneConfig): Scene description.
        ue (optional): Override of the UE position.
        geometry (optional): Pre-built (bs, ris, ue) tuple from `build_geometry`.

    Returns:
        ChannelSet: h_d, G, f and V.

    Raises:
        NumericalError: If any synthesized value is non-finite.
    """
    bs, ris, ue_default = geometry if geometry is not None else build_geometry(cfg)
    ue = ue_default if ue is None else np.asarray(ue, dtype=float)
    wavelength = cfg.wavelength
    if cfg.los_enabled:
        h_d = direct_channel(bs, ue, wavelength)
    else:
        h_d = np.zeros(bs.size, dtype=complex)
    G = bs_ris_channel(bs, ris, wavelength, cfg.propagation_variant, cfg.aperture_model)
    f = ris_ue_channel(ris, ue, wavelength, cfg.propagation_variant, cfg.aperture_model)
    V = cascade_matrix(f, G)
    if not (np.all(np.isfinite(V)) and np.all(np.isfinite(h_d))):
        raise NumericalError("non-finite channel coefficients")
    logger.debug("channels built: N_RIS=%d N_BS=%d LoS=%s", V.shape[0], V.shape[1],
                 cfg.los_enabled)
    return ChannelSet(h_d=h_d, G=G, f=f, V=V)
