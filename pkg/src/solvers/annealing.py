"""
Simulated annealing: the software stand-in for the coherent Ising machine.

Metropolis single-spin flips under a geometric temperature schedule, several independent
replicas, best replica returned. Each replica's random stream depends only on
(seed, replica index), so results do not depend on how many replicas run in parallel.
Channel-derived models above the dense threshold run on the factor layout, where a flip
costs O(N_BS) instead of O(N).
"""
import logging
import time
from dataclasses import dataclass

import joblib
import numpy as np

from ising.ising_model import DEFAULT_DENSE_THRESHOLD, IsingModel, energy
from load_config import LoadSolverConfig
from solvers import kernels
from solvers.solve_report import IsingSolver, SolveReport, make_report
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class AnnealingParams:
    """
    Parameters of `solve_sa`.

    Attributes:
        t0 (float | None): Initial temperature; None derives max_i sum_j |J_ij| + |lam_i|.
        t_end (float | None): Final temperature; None means t_end_ratio * t0.
        t_end_ratio (float): Ratio used when t_end is None.
        sweeps (int): Full sweeps per replica (N flip attempts each).
        seed (int): Master seed.
        replicas (int): Independent replicas.
        fast_path (bool | None): Force (True) or forbid (False) the factor layout;
            None picks it when the model has no dense J or exceeds `dense_threshold`.
        dense_threshold (int): Size above which the factor layout is used automatically.
        n_jobs (int): Threads running replicas.
    """
    t0: float | None = None
    t_end: float | None = None
    t_end_ratio: float = 1e-4
    sweeps: int = 200
    seed: int = 0
    replicas: int = 8
    fast_path: bool | None = None
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD
    n_jobs: int = 1

    @classmethod
    def from_config(cls, **overrides) -> "AnnealingParams":
        cfg = LoadSolverConfig()
        values = dict(t0=cfg.sa_t0, t_end_ratio=cfg.sa_t_end_ratio, sweeps=cfg.sa_sweeps,
                      seed=cfg.sa_seed, replicas=cfg.sa_replicas,
                      dense_threshold=cfg.dense_threshold, n_jobs=cfg.n_jobs)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def uses_factor_layout(model: IsingModel, fast_path: bool | None,
                       dense_threshold: int = DEFAULT_DENSE_THRESHOLD) -> bool:
    """Decides between the dense and the factor kernels for `model`."""
    if model.factor is None:
        if fast_path:
            raise ConfigurationError("fast path requested for a model without a channel factor")
        return False
    if model.couplings is None:
        return True
    if fast_path is not None:
        return bool(fast_path)
    return model.size > dense_threshold


def default_start_temperature(model: IsingModel) -> float:
    """max_i sum_j |J_ij| + |lam_i|, a temperature at which almost every flip is accepted."""
    if model.size == 0:
        return 1.0
    t0 = float(np.max(model.abs_row_sums() + np.abs(model.lam)))
    return t0 if t0 > 0 else 1.0


def temperature_schedule(t0: float, t_end: float, sweeps: int) -> np.ndarray:
    """Inverse temperatures of a geometric schedule from t0 down to t_end."""
    if not (t0 > t_end > 0):
        raise ConfigurationError(f"schedule needs t0 > t_end > 0, got t0={t0}, t_end={t_end}")
    if sweeps < 1:
        raise ConfigurationError(f"sweeps must be >= 1, got {sweeps}")
    return 1.0 / np.geomspace(t0, t_end, sweeps)


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(replica)]))


def _kernel_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 31 - 1))


def polish(model: IsingModel, spins, use_factor: bool, max_sweeps: int = 1000) -> np.ndarray:
    """Zero-temperature single-flip descent to the nearest local minimum."""
    s = np.asarray(spins, dtype=float)
    if model.size == 0:
        return s
    scale = float(np.abs(model.lam).sum() + model.abs_row_sums().sum())
    tol = 1e-13 * max(scale, 1e-300)
    if use_factor:
        return kernels.descend_factor(model.factor, model.factor_row_norms, model.lam, s,
                                      tol, max_sweeps)
    return kernels.descend_dense(model.J, model.lam, s, tol, max_sweeps)


def pick_best(model: IsingModel, candidates: list) -> tuple[int, float]:
    """Lowest re-evaluated energy, ties resolved by the lowest index."""
    energies = [energy(model, c) for c in candidates]
    best = int(np.argmin(energies))
    return best, energies[best]


class SimulatedAnnealingSolver(IsingSolver):
    name = "cim-sa"

    def __init__(self, params: AnnealingParams | None = None) -> None:
        self.params = params or AnnealingParams()

    def _run_replica(self, model: IsingModel, betas: np.ndarray, use_factor: bool,
                     replica: int):
        rng = replica_rng(self.params.seed, replica)
        start = rng.choice(np.array([-1.0, 1.0]), size=model.size)
        seed = _kernel_seed(rng)
        if use_factor:
            return kernels.anneal_factor(model.factor, model.factor_row_norms, model.lam,
                                         start, betas, seed)
        return kernels.anneal_dense(model.J, model.lam, start, betas, seed)

    def solve(self, model: IsingModel) -> SolveReport:
        p = self.params
        if p.replicas < 1:
            raise ConfigurationError(f"replicas must be >= 1, got {p.replicas}")
        started = time.perf_counter()
        t0 = float(p.t0) if p.t0 is not None else default_start_temperature(model)
        t_end = float(p.t_end) if p.t_end is not None else p.t_end_ratio * t0
        betas = temperature_schedule(t0, t_end, p.sweeps)
        if model.size == 0:
            return make_report(model, np.zeros(0), self.name, seed=p.seed, sweeps=p.sweeps,
                               wall_time=time.perf_counter() - started,
                               replica_count=p.replicas)
        use_factor = uses_factor_layout(model, p.fast_path, p.dense_threshold)
        logger.debug("SA: N=%d layout=%s T0=%.3e T_end=%.3e sweeps=%d replicas=%d",
                     model.size, "factor" if use_factor else "dense", t0, t_end, p.sweeps,
                     p.replicas)
        results = joblib.Parallel(n_jobs=p.n_jobs, prefer="threads")(
            joblib.delayed(self._run_replica)(model, betas, use_factor, r)
            for r in range(p.replicas)
        )
        best, _ = pick_best(model, [spins for spins, _, _ in results])
        trace = np.min(np.vstack([tr for _, _, tr in results]), axis=0) + model.offset
        return make_report(
            model, results[best][0].astype(np.int8), self.name, seed=p.seed,
            sweeps=p.sweeps, wall_time=time.perf_counter() - started,
            replica_count=p.replicas, energy_trace=trace.tolist(),
            extras={"t0": t0, "t_end": t_end, "best_replica": best,
                    "layout": "factor" if use_factor else "dense"},
        )


def solve_sa(model: IsingModel, params: AnnealingParams | None = None) -> SolveReport:
    """Runs simulated annealing on `model` and returns the best replica."""
    return SimulatedAnnealingSolver(params).solve(model)
