"""
Distance sweeps: the UE moves along the y axis while every RIS mask stays fixed at its
design-point value, producing the beam pattern of each mask.
"""
import logging
import math
from dataclasses import dataclass, field

import joblib
import numpy as np
import pandas as pd

from channel.channel_model import (bs_ris_channel, cascade_matrix, channel_gain_db,
                                   composite_channel, direct_channel, ris_ue_channel)
from channel.phases import PhaseConfig
from load_config import LoadSweepConfig
from scene.geometry import SceneConfig, build_geometry
from utils.errors import ConfigurationError, DegenerateGeometryError
from utils.utilities import finite_db, stable_hash

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class SweepResult:
    """
    Channel gain of every mask at every sweep distance.

    Attributes:
        distances (np.ndarray): UE y coordinates in meters, increasing.
        gains (dict[str, np.ndarray]): Method name -> gain in dB per distance, in column order.
        metadata (dict): Scene hash, range, method parameters and seeds.
    """
    distances: np.ndarray
    gains: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.distances = np.asarray(self.distances, dtype=float)
        for name, values in self.gains.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.distances.shape:
                raise ConfigurationError(
                    f"column {name} has {values.size} values for {self.distances.size} distances")
            if np.any(np.isnan(values)):
                raise ConfigurationError(f"column {name} contains NaN")
            self.gains[name] = values

    @property
    def methods(self) -> list[str]:
        return list(self.gains)

    def to_frame(self) -> pd.DataFrame:
        """Table `d_m, <method>_db...` with non-finite gains replaced by the sentinel."""
        columns = {"d_m": self.distances}
        for name, values in self.gains.items():
            columns[f"{name}_db"] = finite_db(values)
        return pd.DataFrame(columns)


def sweep_distances(d_start: float, d_stop: float, d_step: float) -> np.ndarray:
    """
    Sweep distances start, start + step, ... up to and including stop.

    Raises:
        ConfigurationError: Non-positive step or stop < start.
    """
    if not d_step > 0:
        raise ConfigurationError(f"sweep step must be > 0, got {d_step}")
    if not d_stop >= d_start:
        raise ConfigurationError(f"empty sweep range [{d_start}, {d_stop}]")
    count = int(math.floor((d_stop - d_start) / d_step + 1e-9)) + 1
    return d_start + d_step * np.arange(count)


def _gains_at(scene: SceneConfig, bs, ris, G: np.ndarray, coefficients: list, d: float) -> list:
    ue = np.array([scene.ue_position[0], d, scene.ue_position[2]], dtype=float)
    try:
        f = ris_ue_channel(ris, ue, scene.wavelength, scene.propagation_variant,
                           scene.aperture_model)
        if scene.los_enabled:
            h_d = direct_channel(bs, ue, scene.wavelength)
        else:
            h_d = np.zeros(bs.size, dtype=complex)
    except DegenerateGeometryError:
        logger.debug("UE at d=%.3f m coincides with an array element", d)
        return [-math.inf] * len(coefficients)
    V = cascade_matrix(f, G)
    return [channel_gain_db(composite_channel(h_d, V, phi)) for phi in coefficients]


def run_sweep(scene: SceneConfig, masks: dict, d_start: float | None = None,
              d_stop: float | None = None, d_step: float | None = None,
              n_jobs: int | None = None, metadata: dict | None = None) -> SweepResult:
    """
    Evaluates fixed masks with the UE at (ue_x, d, ue_z) for every sweep distance d.

    Args:
        scene (SceneConfig): Scene; its UE position gives the x and z of every sweep point.
        masks (dict): Method name -> PhaseConfig or unit-modulus coefficients, in column order.
        d_start, d_stop, d_step (float | None): Range; defaults from the configuration.
        n_jobs (int | None): Threads evaluating sweep points.
        metadata (dict | None): Extra entries such as method parameters and seeds.

    Returns:
        SweepResult: One gain per (method, distance); points on an element give -inf.

    Raises:
        ConfigurationError: Empty range or no masks.
    """
    cfg = LoadSweepConfig()
    d_start = cfg.d_start if d_start is None else d_start
    d_stop = cfg.d_stop if d_stop is None else d_stop
    d_step = cfg.d_step if d_step is None else d_step
    n_jobs = cfg.n_jobs if n_jobs is None else n_jobs
    if not masks:
        raise ConfigurationError("a sweep needs at least one mask")
    distances = sweep_distances(d_start, d_stop, d_step)
    coefficients = [m.coefficients if isinstance(m, PhaseConfig) else np.asarray(m, dtype=complex)
                    for m in masks.values()]

    bs, ris, _ = build_geometry(scene)
    # the BS-RIS link does not depend on the UE
    G = bs_ris_channel(bs, ris, scene.wavelength, scene.propagation_variant,
                       scene.aperture_model)
    rows = joblib.Parallel(n_jobs=n_jobs, prefer="threads")(
        joblib.delayed(_gains_at)(scene, bs, ris, G, coefficients, d) for d in distances
    )
    table = np.array(rows, dtype=float).reshape(distances.size, len(coefficients))
    gains = {name: table[:, k] for k, name in enumerate(masks)}
    meta = {
        "scene_hash": stable_hash(scene.describe()),
        "d_start": float(d_start),
        "d_stop": float(d_stop),
        "d_step": float(d_step),
        "methods": list(masks),
    }
    meta.update(metadata or {})
    logger.info("sweep: %d points x %d masks over [%.2f, %.2f] m", distances.size, len(masks),
                d_start, d_stop)
    return SweepResult(distances=distances, gains=gains, metadata=meta)
