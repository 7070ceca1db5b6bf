"""
Reference configurations: the passive reflector and the continuous-phase upper reference.
"""
import logging

import numpy as np

from channel.channel_model import channel_gain, channel_gain_db, composite_channel
from channel.phases import PhaseConfig

logger = logging.getLogger(__name__)


def passive(n_ris: int) -> PhaseConfig:
    """Every element at phase 0: the surface acts as a plain reflector."""
    return PhaseConfig.zeros(n_ris, 2)


def continuous_reference(h_d: np.ndarray, V: np.ndarray, max_sweeps: int = 200,
                         tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """
    Continuous-phase coordinate ascent on ||h||^2.

    With the other elements fixed, element n's best coefficient aligns its contribution
    conj(phi_n) v_n with the residual channel r: phi_n = <v_n, r> / |<v_n, r>|. Sweeps stop when
    the relative gain change drops below `tol`.

    Args:
        h_d (np.ndarray): Direct channel.
        V (np.ndarray): Cascade matrix.
        max_sweeps (int): Maximum passes.
        tol (float): Relative convergence threshold.

    Returns:
        tuple[np.ndarray, float]: Unit-modulus coefficients and the channel gain in dB.
    """
    V = np.asarray(V, dtype=complex)
    phi = np.ones(V.shape[0], dtype=complex)
    h = composite_channel(h_d, V, phi)
    gain = channel_gain(h)
    for sweep in range(max_sweeps):
        for n in range(V.shape[0]):
            v = V[n]
            residual = h - np.conj(phi[n]) * v
            z = np.vdot(residual, v)
            if z != 0:
                phi[n] = z / abs(z)
            h = residual + np.conj(phi[n]) * v
        h = composite_channel(h_d, V, phi)
        new_gain = channel_gain(h)
        converged = abs(new_gain - gain) <= tol * max(new_gain, 1e-300)
        gain = new_gain
        if converged:
            logger.debug("continuous reference converged after %d sweeps", sweep + 1)
            break
    return phi, channel_gain_db(h)
