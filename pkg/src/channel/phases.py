"""
Discrete RIS phase configurations.

Level 2 uses the phases {0, pi}; level 4 uses {pi/4, 3pi/4, 5pi/4, 7pi/4}, the quaternary set
rotated by pi/4 so that every coefficient splits into equal-magnitude real and imaginary parts.
"""
import math
from dataclasses import dataclass

import numpy as np

from utils.errors import ConfigurationError

SUPPORTED_LEVELS = (2, 4)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def check_level(level: int) -> int:
    if level not in SUPPORTED_LEVELS:
        raise ConfigurationError(f"phase level must be one of {SUPPORTED_LEVELS}, got {level}")
    return int(level)


def phase_candidates(level: int) -> np.ndarray:
    """
    Unit-modulus reflection coefficients available at a given level, ordered by index.

    Args:
        level (int): 2 or 4.

    Returns:
        np.ndarray: Complex vector of length `level`.
    """
    check_level(level)
    if level == 2:
        return np.array([1.0 + 0.0j, -1.0 + 0.0j])
    return np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) * _INV_SQRT2


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    """
    Per-element discrete phase indices.

    Attributes:
        level (int): Number of phase levels L (2 or 4).
        indices (np.ndarray): Integers in {0..L-1}, one per RIS element.
    """
    level: int
    indices: np.ndarray

    def __post_init__(self) -> None:
        check_level(self.level)
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= self.level):
            raise ConfigurationError(f"phase indices must lie in 0..{self.level - 1}")
        object.__setattr__(self, "indices", idx)

    @property
    def n_ris(self) -> int:
        return int(self.indices.size)

    @property
    def theta(self) -> np.ndarray:
        """Phase angles in radians, in [0, 2*pi)."""
        if self.level == 2:
            return self.indices * math.pi
        return math.pi / 4 + self.indices * (math.pi / 2)

    @property
    def coefficients(self) -> np.ndarray:
        """Reflection coefficients phi_n (unit modulus)."""
        return phase_candidates(self.level)[self.indices]

    @classmethod
    def zeros(cls, n_ris: int, level: int = 2) -> "PhaseConfig":
        return cls(level=level, indices=np.zeros(n_ris, dtype=np.int64))

    @classmethod
    def nearest(cls, coefficients, level: int) -> "PhaseConfig":
        """
        Quantizes arbitrary complex coefficients to the closest candidate phase.

        Args:
            coefficients: Complex vector (only the phase matters).
            level (int): Target level.

        Returns:
            PhaseConfig: Nearest discrete configuration.
        """
        cands = phase_candidates(level)
        coeffs = np.asarray(coefficients, dtype=complex).reshape(-1)
        # maximizing Re(c * conj(candidate)) picks the closest angle
        scores = np.real(coeffs[:, None] * np.conj(cands)[None, :])
        return cls(level=level, indices=np.argmax(scores, axis=1))
