"""Local fields and single-flip energy changes, for any model layout."""
import numpy as np

from ising.ising_model import IsingModel, as_spins
from utils.errors import ConfigurationError


def local_field(model: IsingModel, spins) -> np.ndarray:
    """
    Local fields l_i = 2 sum_j J_ij s_j + lam_i.

    Flipping spin i changes the energy by -2 s_i l_i.
    """
    s = as_spins(spins)
    if s.size != model.size:
        raise ConfigurationError(f"spin vector has {s.size} entries, model has {model.size}")
    return 2.0 * model.coupling_product(s) + model.lam


def flip_deltas(model: IsingModel, spins) -> np.ndarray:
    """Energy change of each single-spin flip."""
    s = as_spins(spins)
    return -2.0 * s * local_field(model, s)
