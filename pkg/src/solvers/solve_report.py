"""
The common solver contract: every solver takes an `IsingModel` and returns a `SolveReport`
whose energy is re-evaluated from the returned spins.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ising.ising_model import IsingModel, SpinConfig, energy
from utils.utilities import power_to_db

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class SolveReport:
    """
    Result of one solve.

    Attributes:
        best_spins (SpinConfig | None): Best configuration (None for continuous references).
        best_energy (float): energy(model, best_spins), re-evaluated.
        gain_db (float): 10 log10(-best_energy); -inf when best_energy >= 0.
        solver_name (str): Label of the method.
        seed (int | None): Seed of the run.
        sweeps (int): Sweeps (SA) or integration steps (bifurcation) per replica.
        wall_time (float): Seconds spent in the solver.
        replica_count (int): Independent replicas run.
        energy_trace (list[float] | None): Best energy after each sweep/step.
        extras (dict): Solver-specific diagnostics.
    """
    best_spins: SpinConfig | None
    best_energy: float
    gain_db: float
    solver_name: str
    seed: int | None = None
    sweeps: int = 0
    wall_time: float = 0.0
    replica_count: int = 1
    energy_trace: list | None = None
    extras: dict = field(default_factory=dict)

    def summary(self) -> dict:
        """Scalar fields for run reports."""
        return {
            "solver": self.solver_name,
            "best_energy": float(self.best_energy),
            "gain_db": float(self.gain_db),
            "seed": self.seed,
            "sweeps": int(self.sweeps),
            "wall_time_s": round(float(self.wall_time), 6),
            "replicas": int(self.replica_count),
            **self.extras,
        }

    def trace_frame(self) -> pd.DataFrame:
        """Energy trace as a (step, best_energy) table."""
        # a solve without iterations still has its final energy
        trace = self.energy_trace or [float(self.best_energy)]
        return pd.DataFrame({"step": np.arange(len(trace)), "best_energy": trace})


def gain_from_energy(best_energy: float) -> float:
    """Channel gain in dB implied by an energy under the -||h||^2 offset convention."""
    return power_to_db(-best_energy)


def make_report(model: IsingModel, spins, solver_name: str, **kwargs) -> SolveReport:
    """
    Builds a report, re-evaluating the energy of `spins` on `model`.
    """
    config = spins if isinstance(spins, SpinConfig) else SpinConfig(np.asarray(spins))
    best_energy = energy(model, config)
    report = SolveReport(best_spins=config, best_energy=best_energy,
                         gain_db=gain_from_energy(best_energy), solver_name=solver_name,
                         **kwargs)
    logger.info("%s: N=%d energy=%.6e gain=%.3f dB time=%.3fs", solver_name, model.size,
                best_energy, report.gain_db, report.wall_time)
    return report


class IsingSolver(ABC):
    """Base class of the energy minimizers."""

    name: str = "solver"

    @abstractmethod
    def solve(self, model: IsingModel) -> SolveReport:
        """Minimizes the energy of `model`."""
