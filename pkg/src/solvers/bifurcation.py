"""
Ballistic simulated bifurcation, a continuous surrogate of coherent-Ising-machine dynamics.

Every spin is an oscillator with position x and momentum y. The pump a(t) ramps from 0 to a0;
positions bifurcate toward +/-1 and inelastic walls clamp them at |x| = 1. The external
field is carried by an auxiliary oscillator coupled with lam_i / 2, as on hardware that only
implements couplings, and final signs are normalized so that the auxiliary spin is +1.
All replicas are integrated together as columns of one matrix.
"""
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from ising.ising_model import IsingModel
from load_config import LoadSolverConfig
from solvers.annealing import pick_best, polish, replica_rng, uses_factor_layout
from solvers.solve_report import IsingSolver, SolveReport, make_report
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

SCHEDULES = ("linear", "quadratic")


@dataclass
class BifurcationParams:
    """
    Parameters of `solve_bifurcation`.

    Attributes:
        steps (int): Integration steps.
        dt (float): Time step.
        schedule (str): Pump ramp, "linear" or "quadratic" in t / T.
        seed (int): Master seed; replica r starts from a stream of (seed, r).
        replicas (int): Oscillator networks integrated in parallel.
        a0 (float): Final pump amplitude and detuning.
        polish (bool): Finish each replica with zero-temperature single-flip descent.
    """
    steps: int = 1000
    dt: float = 0.5
    schedule: str = "linear"
    seed: int = 0
    replicas: int = 16
    a0: float = 1.0
    polish: bool = True

    @classmethod
    def from_config(cls, **overrides) -> "BifurcationParams":
        cfg = LoadSolverConfig()
        values = dict(steps=cfg.bif_steps, dt=cfg.bif_dt, schedule=cfg.bif_schedule,
                      seed=cfg.bif_seed, replicas=cfg.bif_replicas, polish=cfg.bif_polish)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self) -> None:
        if self.steps < 1 or not self.dt > 0 or self.replicas < 1 or not self.a0 > 0:
            raise ConfigurationError(
                f"invalid bifurcation parameters: steps={self.steps} dt={self.dt} "
                f"replicas={self.replicas} a0={self.a0}")
        if self.schedule not in SCHEDULES:
            raise ConfigurationError(f"schedule must be one of {SCHEDULES}, got {self.schedule}")


def _coupling_scale(model: IsingModel, with_aux: bool) -> float:
    """c0 = 0.5 * sqrt(N-1) / ||K||_F for the oscillator coupling matrix K = -2 J (+ aux row)."""
    n = model.size + (1 if with_aux else 0)
    frob = 4.0 * model.couplings_frobenius_sq()
    if with_aux:
        frob += 2.0 * float(model.lam @ model.lam)
    if frob <= 0.0 or n < 2:
        return 0.5
    return 0.5 * math.sqrt(n - 1) / math.sqrt(frob)


class BifurcationSolver(IsingSolver):
    name = "cim-bif"

    def __init__(self, params: BifurcationParams | None = None, fast_path: bool | None = None
                 ) -> None:
        self.params = params or BifurcationParams()
        self.fast_path = fast_path

    def _forces(self, model: IsingModel, x: np.ndarray, aux: np.ndarray | None):
        """Forces -dH/dx on the spin oscillators and on the auxiliary oscillator."""
        force = -2.0 * model.coupling_product(x)
        if aux is None:
            return force, None
        force -= model.lam[:, None] * aux[None, :]
        return force, -(model.lam @ x)

    def solve(self, model: IsingModel) -> SolveReport:
        p = self.params
        p.validate()
        started = time.perf_counter()
        n, replicas = model.size, p.replicas
        if n == 0:
            return make_report(model, np.zeros(0), self.name, seed=p.seed, sweeps=p.steps,
                               wall_time=time.perf_counter() - started, replica_count=replicas)
        with_aux = bool(np.any(model.lam != 0.0))
        c0 = _coupling_scale(model, with_aux)

        streams = [replica_rng(p.seed, r) for r in range(replicas)]
        x = np.column_stack([rng.uniform(-0.1, 0.1, n) for rng in streams])
        y = np.column_stack([rng.uniform(-0.1, 0.1, n) for rng in streams])
        aux = aux_y = None
        if with_aux:
            aux = np.array([rng.uniform(-0.1, 0.1) for rng in streams])
            aux_y = np.array([rng.uniform(-0.1, 0.1) for rng in streams])

        exponent = 1 if p.schedule == "linear" else 2
        trace = []
        for step in range(p.steps):
            pump = p.a0 * ((step + 1) / p.steps) ** exponent
            force, aux_force = self._forces(model, x, aux)
            y += (-(p.a0 - pump) * x + c0 * force) * p.dt
            x += p.a0 * y * p.dt
            walls = np.abs(x) > 1.0
            x[walls] = np.sign(x[walls])
            y[walls] = 0.0
            if with_aux:
                aux_y += (-(p.a0 - pump) * aux + c0 * aux_force) * p.dt
                aux += p.a0 * aux_y * p.dt
                aux_walls = np.abs(aux) > 1.0
                aux[aux_walls] = np.sign(aux[aux_walls])
                aux_y[aux_walls] = 0.0
            if step % max(1, p.steps // 100) == 0 or step == p.steps - 1:
                signs = np.where(x >= 0, 1.0, -1.0)
                if with_aux:
                    signs *= np.where(aux >= 0, 1.0, -1.0)[None, :]
                trace.append(float(np.min(_batch_energies(model, signs))))

        spins = np.where(x >= 0, 1.0, -1.0)
        if with_aux:
            # the augmented model is flip-symmetric; read the solution with s_0 = +1
            spins *= np.where(aux >= 0, 1.0, -1.0)[None, :]
        candidates = [spins[:, r] for r in range(replicas)]
        if p.polish:
            use_factor = uses_factor_layout(model, self.fast_path)
            candidates = [polish(model, c, use_factor) for c in candidates]
        best, _ = pick_best(model, candidates)
        logger.debug("bifurcation: N=%d c0=%.3e aux=%s best replica %d", n, c0, with_aux, best)
        return make_report(model, candidates[best].astype(np.int8), self.name, seed=p.seed,
                           sweeps=p.steps, wall_time=time.perf_counter() - started,
                           replica_count=replicas, energy_trace=trace,
                           extras={"c0": c0, "auxiliary_spin": with_aux, "best_replica": best,
                                   "polished": p.polish})


def _batch_energies(model: IsingModel, spins: np.ndarray) -> np.ndarray:
    quad = np.einsum("ir,ir->r", spins, model.coupling_product(spins))
    return quad + model.lam @ spins + model.offset


def solve_bifurcation(model: IsingModel, params: BifurcationParams | None = None,
                      fast_path: bool | None = None) -> SolveReport:
    """Runs ballistic simulated bifurcation on `model` and returns the best replica."""
    return BifurcationSolver(params, fast_path).solve(model)
