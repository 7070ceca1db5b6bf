"""
Transforms that make a model fit Ising hardware without external fields and with
fixed-point couplings.

The field lam is absorbed by coupling every spin to an auxiliary spin s_0 with J_0i = lam_i / 2,
so s^T J s + lam^T s = s'^T J' s' for s' = (+1, s). The augmented model is symmetric under a
global flip, and solutions whose auxiliary spin ends at -1 are flipped back.
"""
import logging
from dataclasses import dataclass

import numpy as np

from ising.ising_model import IsingModel, as_spins
from utils.errors import ConfigurationError, NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuxiliaryNormalizer:
    """Maps a spin vector of the augmented model back to the original model."""
    n_spins: int

    def __call__(self, aug_spins) -> np.ndarray:
        s = as_spins(aug_spins)
        if s.size != self.n_spins + 1:
            raise ConfigurationError(
                f"expected {self.n_spins + 1} augmented spins, got {s.size}")
        if s[0] < 0:
            s = -s
        return s[1:].astype(np.int8)


def absorb_field_aux_spin(model: IsingModel, max_spins: int | None = None
                          ) -> tuple[IsingModel, AuxiliaryNormalizer]:
    """
    Embeds the external field into couplings to an auxiliary spin at index 0.

    Args:
        model (IsingModel): Any model.
        max_spins (int | None): Refuse to materialize dense couplings above this size.

    Returns:
        tuple: (augmented model with N+1 spins and zero field, normalizer).

    Raises:
        NumericalError: If the model is larger than `max_spins`.
    """
    n = model.size
    if max_spins is not None and n + 1 > max_spins:
        raise NumericalError(f"auxiliary-spin absorption needs a dense {n + 1}^2 J, "
                             f"above the budget of {max_spins} spins")
    J_aug = np.zeros((n + 1, n + 1))
    J_aug[1:, 1:] = model.J
    J_aug[0, 1:] = model.lam / 2
    J_aug[1:, 0] = model.lam / 2
    aug = IsingModel(lam=np.zeros(n + 1), offset=model.offset, encoding=model.encoding,
                     n_ris=model.n_ris, couplings=J_aug, normalized=model.normalized)
    return aug, AuxiliaryNormalizer(n)


def _quantize(values: np.ndarray, bits: int) -> np.ndarray:
    peak = np.max(np.abs(values)) if values.size else 0.0
    if peak == 0.0:
        return values
    step = peak / (2 ** (bits - 1) - 1)
    return np.round(values / step) * step


def coupling_step(model: IsingModel, bits: int = 8) -> float:
    """Quantization step s = max|J_ij| / (2^(bits-1) - 1)."""
    peak = float(np.max(np.abs(model.J))) if model.size else 0.0
    return peak / (2 ** (bits - 1) - 1)


def quantize_couplings(model: IsingModel, bits: int = 8, max_spins: int | None = None
                       ) -> IsingModel:
    """
    Rounds couplings (and a non-zero field, with its own scale) to a signed fixed-point grid.

    Args:
        model (IsingModel): Model to quantize, normally already field-free.
        bits (int, optional): Resolution including sign. Defaults to 8 (levels -127..127).
        max_spins (int | None): Refuse to materialize dense couplings above this size.

    Returns:
        IsingModel: Quantized dense model with the same offset; unchanged if J is all zero.

    Raises:
        ConfigurationError: If bits < 2.
        NumericalError: If the model exceeds `max_spins`.
    """
    if bits < 2:
        raise ConfigurationError(f"bits must be >= 2, got {bits}")
    if max_spins is not None and model.size > max_spins:
        raise NumericalError(f"quantization needs a dense J; {model.size} spins exceeds "
                             f"the budget of {max_spins}")
    J = model.J
    if not np.any(J):
        return model
    J_q = _quantize(J, bits)
    lam_q = _quantize(model.lam, bits)
    logger.debug("quantized couplings to %d bits, step %.3e", bits, coupling_step(model, bits))
    return IsingModel(lam=lam_q, offset=model.offset, encoding=model.encoding,
                      n_ris=model.n_ris, couplings=J_q, normalized=model.normalized)
