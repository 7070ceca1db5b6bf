"""
In this module, we run one optimization of an RIS configuration end to end.

Functions include:
1. `optimize`: Builds the channels at the design point and runs the chosen method, with optional
   spin reduction and fixed-point coupling quantization for the Ising solvers.
2. `optimize_channels`: Same, on channels that are already built.
3. `run_reduction_experiment`: Solves the full and the reduced model and compares both gains.
4. `run_size_comparison`: Gains of one method across RIS sizes.

Every returned gain is recomputed from the decoded phases on the physical channel, never taken
from a solver's internal energy.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from baselines.fresnel import fresnel_zone
from baselines.references import continuous_reference, passive
from baselines.successive import successive_refinement
from channel.channel_model import (ChannelSet, build_channels, capacity, channel_gain,
                                   channel_gain_db, composite_channel, mrt_weights)
from channel.phases import PhaseConfig, check_level
from ising.hardware import absorb_field_aux_spin, quantize_couplings
from ising.ising_model import (IsingModel, build_binary_ising, build_quaternary_ising, decode,
                               encode)
from load_config import LoadSolverConfig
from reduction.spin_reduction import ReductionReport, reduce_spins
from scene.geometry import SceneConfig, build_geometry
from solvers.annealing import AnnealingParams, SimulatedAnnealingSolver
from solvers.bifurcation import BifurcationParams, BifurcationSolver
from solvers.exhaustive import ExhaustiveSolver
from solvers.solve_report import IsingSolver, SolveReport, make_report
from utils.errors import ConfigurationError
from utils.utilities import discrete_phase_loss_db, power_to_db, stable_hash

logger = logging.getLogger(__name__)

ISING_METHODS = ("cim-sa", "cim-bif", "exhaustive")
BASELINE_METHODS = ("successive", "fresnel", "passive", "continuous")
METHODS = ISING_METHODS + BASELINE_METHODS


@dataclass
class OptimizeParams:
    """
    Knobs of `optimize`.

    Attributes:
        seed (int | None): Overrides the seed of the stochastic solvers.
        reduce (bool): Fix field-dominated spins before solving.
        reduce_threshold_scale (float): Multiplier of the reduction threshold.
        quantize_bits (int | None): Solve an auxiliary-spin, fixed-point copy of the model.
        quantize_max_spins (int): Largest model that may be densified for quantization.
        quaternary_normalized (bool): False selects the unnormalized {+-1 +-j} build.
        dense_threshold (int): Largest model that carries a dense J.
        annealing (AnnealingParams): Parameters of cim-sa.
        bifurcation (BifurcationParams): Parameters of cim-bif.
        exhaustive_max_spins (int): Size guard of the exhaustive solver.
        successive_max_sweeps (int): Passes of successive refinement.
        continuous_max_sweeps (int): Passes of the continuous reference.
    """
    seed: int | None = None
    reduce: bool = False
    reduce_threshold_scale: float = 1.0
    quantize_bits: int | None = None
    quantize_max_spins: int = 8192
    quaternary_normalized: bool = True
    dense_threshold: int = 4096
    annealing: AnnealingParams = field(default_factory=AnnealingParams)
    bifurcation: BifurcationParams = field(default_factory=BifurcationParams)
    exhaustive_max_spins: int = 24
    successive_max_sweeps: int = 50
    continuous_max_sweeps: int = 200

    @classmethod
    def from_config(cls, **overrides) -> "OptimizeParams":
        cfg = LoadSolverConfig()
        values = dict(reduce_threshold_scale=cfg.reduce_threshold_scale,
                      quantize_max_spins=cfg.quantize_max_spins,
                      dense_threshold=cfg.dense_threshold,
                      annealing=AnnealingParams.from_config(),
                      bifurcation=BifurcationParams.from_config(),
                      exhaustive_max_spins=cfg.exhaustive_max_spins,
                      successive_max_sweeps=cfg.successive_max_sweeps,
                      continuous_max_sweeps=cfg.continuous_max_sweeps)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(eq=False)
class OptimizationResult:
    """
    Outcome of `optimize`.

    Attributes:
        method (str): Method name.
        level (int): Phase levels (2 or 4).
        phases (PhaseConfig | None): Discrete mask; None for the continuous reference.
        coefficients (np.ndarray): Unit-modulus reflection coefficients actually applied.
        gain_db (float): Channel gain of `coefficients` at the design point.
        report (SolveReport): Solver report over the full model.
        channels (ChannelSet): Channels at the design point.
        reduction (ReductionReport | None): Set when the model was reduced first.
        capacity (float | None): bits/s/Hz with MRT when the scene sets a noise power.
        scene_hash (str): Hash of the scene description.
    """
    method: str
    level: int
    phases: PhaseConfig | None
    coefficients: np.ndarray
    gain_db: float
    report: SolveReport
    channels: ChannelSet
    reduction: ReductionReport | None = None
    capacity: float | None = None
    scene_hash: str = ""

    def summary(self) -> dict:
        out = {
            "scene_hash": self.scene_hash,
            "method": self.method,
            "level": int(self.level),
            "n_ris": int(self.channels.n_ris),
            "n_bs": int(self.channels.n_bs),
            "gain_db": float(self.gain_db),
            "solver": self.report.summary(),
        }
        if self.method != "continuous":
            out["theoretical_quantization_loss_db"] = discrete_phase_loss_db(self.level)
        if self.reduction is not None:
            out["reduction"] = self.reduction.summary()
        if self.capacity is not None:
            out["capacity_bps_hz"] = float(self.capacity)
        return out


def check_method(method: str, level: int) -> None:
    """
    Raises:
        ConfigurationError: Unknown method, unsupported level, or a method/level mismatch.
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown method '{method}', expected one of {METHODS}")
    check_level(level)
    if method == "fresnel" and level != 2:
        raise ConfigurationError("the Fresnel-zone design is binary only; use --level 2")
    if method == "passive" and level != 2:
        raise ConfigurationError("the passive reflector is defined for --level 2 only")


def build_model(channels: ChannelSet, level: int, params: OptimizeParams) -> IsingModel:
    if level == 2:
        return build_binary_ising(channels.h_d, channels.V, params.dense_threshold)
    return build_quaternary_ising(channels.h_d, channels.V, params.quaternary_normalized,
                                  params.dense_threshold)


def make_solver(method: str, params: OptimizeParams) -> IsingSolver:
    if method == "cim-sa":
        annealing = params.annealing
        if params.seed is not None:
            annealing = replace(annealing, seed=params.seed)
        return SimulatedAnnealingSolver(annealing)
    if method == "cim-bif":
        bifurcation = params.bifurcation
        if params.seed is not None:
            bifurcation = replace(bifurcation, seed=params.seed)
        return BifurcationSolver(bifurcation)
    if method == "exhaustive":
        return ExhaustiveSolver(params.exhaustive_max_spins)
    raise ConfigurationError(f"'{method}' is not an Ising solver")


def _solve_ising(model: IsingModel, method: str, params: OptimizeParams
                 ) -> tuple[np.ndarray, SolveReport, ReductionReport | None]:
    """Reduce, embed, quantize and solve; returns spins over the full model."""
    reduction = None
    target = model
    if params.reduce:
        reduction = reduce_spins(model, params.reduce_threshold_scale)
        target = reduction.reduced_model
    normalizer = None
    if params.quantize_bits is not None and target.size:
        if np.any(target.lam != 0.0):
            target, normalizer = absorb_field_aux_spin(target, params.quantize_max_spins)
        target = quantize_couplings(target, params.quantize_bits, params.quantize_max_spins)
    if target.size:
        inner = make_solver(method, params).solve(target)
        spins = inner.best_spins.spins
    else:
        inner = make_report(target, np.zeros(0), method, energy_trace=[float(target.offset)])
        spins = np.zeros(0, dtype=np.int8)
    if normalizer is not None:
        spins = normalizer(spins)
    if reduction is not None:
        spins = reduction.merge(spins)
    return spins, inner, reduction


def _discrete_result(channels: ChannelSet, level: int, phases: PhaseConfig, name: str,
                     params: OptimizeParams, **report_fields) -> tuple[SolveReport, float]:
    model = build_model(channels, level, params)
    report = make_report(model, encode(model, phases), name, **report_fields)
    return report, channel_gain_db(composite_channel(channels.h_d, channels.V, phases))


def optimize_channels(scene: SceneConfig, channels: ChannelSet, method: str, level: int,
                      params: OptimizeParams | None = None, geometry=None
                      ) -> OptimizationResult:
    """
    Runs `method` on prepared channels. See `optimize`.
    """
    params = params or OptimizeParams.from_config()
    check_method(method, level)
    reduction = None
    if method in ISING_METHODS:
        model = build_model(channels, level, params)
        spins, inner, reduction = _solve_ising(model, method, params)
        phases = decode(model, spins)
        extras = dict(inner.extras)
        if params.quantize_bits is not None:
            extras["quantize_bits"] = int(params.quantize_bits)
        report = make_report(model, spins, method, seed=inner.seed, sweeps=inner.sweeps,
                             wall_time=inner.wall_time, replica_count=inner.replica_count,
                             energy_trace=inner.energy_trace, extras=extras)
        coefficients = phases.coefficients
        gain_db = channel_gain_db(composite_channel(channels.h_d, channels.V, phases))
    elif method == "continuous":
        phases = None
        coefficients, gain_db = continuous_reference(channels.h_d, channels.V,
                                                     params.continuous_max_sweeps)
        report = SolveReport(best_spins=None, best_energy=-10.0 ** (gain_db / 10.0),
                             gain_db=gain_db, solver_name=method)
    else:
        if method == "successive":
            phases = successive_refinement(channels.h_d, channels.V, level,
                                           max_sweeps=params.successive_max_sweeps)
        elif method == "fresnel":
            bs, ris, ue = geometry if geometry is not None else build_geometry(scene)
            phases = fresnel_zone(bs, ris, ue, scene.wavelength)
        else:
            phases = passive(channels.n_ris)
        report, gain_db = _discrete_result(channels, level, phases, method, params)
        coefficients = phases.coefficients

    cap = None
    h = composite_channel(channels.h_d, channels.V, coefficients)
    if scene.noise_power is not None and channel_gain(h) > 0:
        cap = capacity(h, mrt_weights(h), scene.noise_power)
    logger.info("optimize %s L=%d: gain %.3f dB (N_RIS=%d)", method, level, gain_db,
                channels.n_ris)
    return OptimizationResult(method=method, level=level, phases=phases,
                              coefficients=coefficients, gain_db=gain_db, report=report,
                              channels=channels, reduction=reduction, capacity=cap,
                              scene_hash=stable_hash(scene.describe()))


def optimize(scene: SceneConfig, method: str, level: int = 2,
             params: OptimizeParams | None = None) -> OptimizationResult:
    """
    Optimizes the RIS phases of a scene for the UE at its design position.

    Args:
        scene (SceneConfig): Validated scene.
        method (str): One of `METHODS`.
        level (int): 2 (binary) or 4 (quaternary).
        params (OptimizeParams | None): Defaults come from the configuration.

    Returns:
        OptimizationResult: Mask, coefficients, physical gain and solver report.

    Raises:
        ConfigurationError: Unknown method or method/level mismatch (fresnel with L=4).
    """
    check_method(method, level)
    geometry = build_geometry(scene)
    channels = build_channels(scene, geometry=geometry)
    return optimize_channels(scene, channels, method, level, params, geometry)


@dataclass(frozen=True)
class ReductionExperiment:
    """Full versus reduced solve of the same scene."""
    gain_full_db: float
    gain_reduced_db: float
    spins_total: int
    spins_kept: int
    removal_fraction: float
    full: OptimizationResult
    reduced: OptimizationResult

    @property
    def gain_difference_db(self) -> float:
        return self.gain_reduced_db - self.gain_full_db

    def summary(self) -> dict:
        return {
            "gain_full_db": float(self.gain_full_db),
            "gain_reduced_db": float(self.gain_reduced_db),
            "gain_difference_db": float(self.gain_difference_db),
            "spins_total": int(self.spins_total),
            "spins_kept": int(self.spins_kept),
            "removal_fraction": float(self.removal_fraction),
        }


def run_reduction_experiment(scene: SceneConfig, level: int = 2, method: str = "cim-sa",
                             params: OptimizeParams | None = None) -> ReductionExperiment:
    """
    Solves the scene once on the full model and once after spin reduction.

    Args:
        scene (SceneConfig): Scene; without LoS every field is zero and nothing is removed.
        level (int): Phase levels.
        method (str): Ising solver used for both runs.
        params (OptimizeParams | None): Shared solver parameters; `reduce` is overridden.

    Returns:
        ReductionExperiment: Both gains and the removal statistics.
    """
    if method not in ISING_METHODS:
        raise ConfigurationError(f"reduction needs an Ising solver, got '{method}'")
    params = params or OptimizeParams.from_config()
    geometry = build_geometry(scene)
    channels = build_channels(scene, geometry=geometry)
    full = optimize_channels(scene, channels, method, level, replace(params, reduce=False),
                             geometry)
    reduced = optimize_channels(scene, channels, method, level, replace(params, reduce=True),
                                geometry)
    stats = reduced.reduction.summary()
    logger.info("reduction experiment: full %.3f dB, reduced %.3f dB, %.2f%% removed",
                full.gain_db, reduced.gain_db, 100 * stats["removal_fraction"])
    return ReductionExperiment(gain_full_db=full.gain_db, gain_reduced_db=reduced.gain_db,
                               spins_total=stats["spins_total"], spins_kept=stats["spins_kept"],
                               removal_fraction=stats["removal_fraction"], full=full,
                               reduced=reduced)


def run_size_comparison(scenes: list[SceneConfig], method: str = "cim-sa", level: int = 2,
                        params: OptimizeParams | None = None) -> pd.DataFrame:
    """
    Gains of one method for several RIS sizes, with the difference to the first scene and
    the 20 log10 aperture-scaling prediction.

    Returns:
        pd.DataFrame: Columns scene, n_ris, gain_db, delta_db, predicted_delta_db.
    """
    rows = []
    for scene in scenes:
        result = optimize(scene, method, level, params)
        rows.append({"scene": scene.name, "n_ris": scene.n_ris, "gain_db": result.gain_db})
    frame = pd.DataFrame(rows, columns=["scene", "n_ris", "gain_db"])
    if not frame.empty:
        frame["delta_db"] = frame["gain_db"] - frame["gain_db"].iloc[0]
        # received power grows with the square of the coherently combined aperture
        frame["predicted_delta_db"] = [power_to_db((n / frame["n_ris"].iloc[0]) ** 2)
                                       for n in frame["n_ris"]]
    return frame
