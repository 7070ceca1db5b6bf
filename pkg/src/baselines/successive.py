"""
Successive refinement: Gauss-Seidel coordinate ascent over discrete RIS phases.

Each element in turn takes the candidate phase that maximizes ||h||^2 with every other element
fixed. Only strictly better candidates replace the current phase, so the gain never decreases
and an optimal configuration is a fixed point.
"""
import logging

import numpy as np

from channel.channel_model import channel_gain, composite_channel
from channel.phases import PhaseConfig, check_level, phase_candidates
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


def successive_refinement(h_d: np.ndarray, V: np.ndarray, level: int,
                          init: PhaseConfig | None = None, max_sweeps: int = 50
                          ) -> PhaseConfig:
    """
    Optimizes discrete phases one element at a time.

    Args:
        h_d (np.ndarray): Direct channel.
        V (np.ndarray): Cascade matrix.
        level (int): 2 or 4.
        init (PhaseConfig | None): Starting configuration; all-zero phases by default.
        max_sweeps (int): Maximum passes over the elements.

    Returns:
        PhaseConfig: Configuration at which no single-element change improves the gain
        (or the state after `max_sweeps` passes).
    """
    check_level(level)
    V = np.asarray(V, dtype=complex)
    n_ris = V.shape[0]
    current = init if init is not None else PhaseConfig.zeros(n_ris, level)
    if current.level != level or current.n_ris != n_ris:
        raise ConfigurationError("initial configuration does not match level / RIS size")
    conj_cands = np.conj(phase_candidates(level))
    indices = current.indices.copy()
    h = composite_channel(h_d, V, current)
    scale = max(channel_gain(h), 1e-300)
    for sweep in range(max_sweeps):
        changed = 0
        for n in range(n_ris):
            v = V[n]
            base = h - conj_cands[indices[n]] * v
            # ||base + c v||^2 differs across candidates only by 2 Re(c <v, base>)
            scores = np.real(conj_cands * np.vdot(base, v))
            best = int(np.argmax(scores))
            if scores[best] > scores[indices[n]] + 1e-14 * scale:
                indices[n] = best
                changed += 1
            h = base + conj_cands[indices[n]] * v
        h = composite_channel(h_d, V, PhaseConfig(level=level, indices=indices))
        scale = max(channel_gain(h), 1e-300)
        logger.debug("successive refinement sweep %d: %d changes, gain %.6e", sweep, changed,
                     scale)
        if changed == 0:
            break
    return PhaseConfig(level=level, indices=indices)
