"""
Exact ground states by enumeration.

Spins are visited in Gray-code order so each step flips one spin and updates the local fields
incrementally. Ties go to the lexicographically first vector with +1 ordered before -1.
Models above `max_spins` are refused.
"""
import time

import numpy as np

from ising.ising_model import IsingModel
from solvers import kernels
from solvers.solve_report import IsingSolver, SolveReport, make_report
from utils.errors import NumericalError

DEFAULT_MAX_SPINS = 24


def code_to_spins(code: int, n: int) -> np.ndarray:
    """Spin i is -1 when bit (n-1-i) of `code` is set."""
    bits = (int(code) >> (n - 1 - np.arange(n))) & 1 if n else np.zeros(0, dtype=np.int64)
    return np.where(bits == 1, -1, 1).astype(np.int8)


class ExhaustiveSolver(IsingSolver):
    """
    Enumerates every configuration; the global-optimum oracle for small models.

    Ties are broken toward the lexicographically smallest spin vector with +1 < -1.
    """
    name = "exhaustive"

    def __init__(self, max_spins: int = DEFAULT_MAX_SPINS) -> None:
        self.max_spins = max_spins

    def solve(self, model: IsingModel) -> SolveReport:
        if model.size > self.max_spins:
            raise NumericalError(
                f"exhaustive search over {model.size} spins exceeds the limit of {self.max_spins}")
        started = time.perf_counter()
        J = model.J
        scale = float(np.abs(model.lam).sum() + np.abs(J).sum())
        code, _ = kernels.exhaustive_dense(J, model.lam, 1e-13 * scale)
        spins = code_to_spins(code, model.size)
        return make_report(model, spins, self.name, sweeps=1,
                           wall_time=time.perf_counter() - started,
                           extras={"states": 2 ** model.size})


def solve_exhaustive(model: IsingModel, max_spins: int = DEFAULT_MAX_SPINS) -> SolveReport:
    """Global minimum of `model` by enumeration (N <= max_spins)."""
    return ExhaustiveSolver(max_spins).solve(model)
