"""
Benchmarks on random small instances where the exhaustive optimum is available:
solver optimality rates, robustness of the optimum to fixed-point couplings and
how often spin reduction keeps the optimum.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from channel.channel_model import channel_gain_db, composite_channel
from ising.hardware import absorb_field_aux_spin, quantize_couplings
from ising.ising_model import IsingModel, build_binary_ising, build_quaternary_ising, decode
from reduction.spin_reduction import reduce_spins, reduction_is_safe
from solvers.annealing import AnnealingParams, solve_sa
from solvers.bifurcation import BifurcationParams, solve_bifurcation
from solvers.exhaustive import solve_exhaustive
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Instance:
    """Random channel instance: direct channel and cascade matrix."""
    h_d: np.ndarray
    V: np.ndarray

    def model(self, level: int = 2) -> IsingModel:
        if level == 2:
            return build_binary_ising(self.h_d, self.V)
        return build_quaternary_ising(self.h_d, self.V)


def random_instance(rng: np.random.Generator, n_ris: int, n_bs: int = 4,
                    los: bool = True) -> Instance:
    """Circularly-symmetric Gaussian h_d (zero without LoS) and V."""
    V = (rng.standard_normal((n_ris, n_bs)) + 1j * rng.standard_normal((n_ris, n_bs))) / 2
    if los:
        h_d = (rng.standard_normal(n_bs) + 1j * rng.standard_normal(n_bs)) / 2
    else:
        h_d = np.zeros(n_bs, dtype=complex)
    return Instance(h_d=h_d, V=V)


def random_instances(count: int, seed: int = 0, n_min: int = 4, n_max: int = 12,
                     n_bs: int = 4) -> list[Instance]:
    """`count` instances with N_RIS drawn uniformly from [n_min, n_max]."""
    if count < 1 or not 1 <= n_min <= n_max:
        raise ConfigurationError(f"invalid bench size: count={count} n in [{n_min}, {n_max}]")
    rng = np.random.default_rng(seed)
    return [random_instance(rng, int(rng.integers(n_min, n_max + 1)), n_bs)
            for _ in range(count)]


def _matches(found: float, optimum: float, rel: float = 1e-9) -> bool:
    return abs(found - optimum) <= rel * max(1e-300, abs(optimum))


def oracle_match_rate(instances: list[Instance], solver: str = "cim-sa", seed: int = 0,
                      level: int = 2) -> dict:
    """
    Fraction of instances on which a heuristic solver reaches the exhaustive optimum.

    Returns:
        dict: instances, matches, match_rate and beats (energies below the optimum, which
        would indicate a broken oracle).
    """
    matches = beats = 0
    for k, inst in enumerate(instances):
        model = inst.model(level)
        optimum = solve_exhaustive(model).best_energy
        if solver == "cim-sa":
            found = solve_sa(model, AnnealingParams(seed=seed + k)).best_energy
        elif solver == "cim-bif":
            found = solve_bifurcation(model, BifurcationParams(seed=seed + k)).best_energy
        else:
            raise ConfigurationError(f"no heuristic solver named '{solver}'")
        if _matches(found, optimum):
            matches += 1
        elif found < optimum:
            beats += 1
    count = len(instances)
    logger.info("%s matched the optimum on %d/%d instances", solver, matches, count)
    return {"solver": solver, "instances": count, "matches": matches,
            "match_rate": matches / count if count else 0.0, "beats": beats}


def quantization_robustness(instances: list[Instance], bits: int = 8, tolerance_db: float = 0.2,
                            level: int = 2) -> dict:
    """
    Solves each instance exactly before and after auxiliary-spin embedding and fixed-point
    quantization, and compares the physical gains of both optima.

    Returns:
        dict: instances, within_tolerance and worst_loss_db.
    """
    within = 0
    worst = 0.0
    for inst in instances:
        model = inst.model(level)
        exact = decode(model, solve_exhaustive(model).best_spins)
        aug, normalizer = absorb_field_aux_spin(model)
        quantized = quantize_couplings(aug, bits)
        approx = decode(model, normalizer(solve_exhaustive(quantized).best_spins))
        loss = (channel_gain_db(composite_channel(inst.h_d, inst.V, exact))
                - channel_gain_db(composite_channel(inst.h_d, inst.V, approx)))
        worst = max(worst, loss)
        if loss <= tolerance_db:
            within += 1
    logger.info("%d-bit couplings: %d/%d optima within %.2f dB", bits, within,
                len(instances), tolerance_db)
    return {"bits": bits, "instances": len(instances), "within_tolerance": within,
            "worst_loss_db": worst}


def reduction_safety(instances: list[Instance], threshold_scale: float = 1.0,
                     level: int = 2) -> dict:
    """
    How often fixing the predetermined spins keeps the global optimum.

    Returns:
        dict: instances, safe, mean_removal_fraction.
    """
    safe = 0
    fractions = []

    def oracle(m: IsingModel) -> np.ndarray:
        return solve_exhaustive(m).best_spins.spins

    for inst in instances:
        model = inst.model(level)
        report = reduce_spins(model, threshold_scale)
        fractions.append(report.removal_fraction)
        if reduction_is_safe(model, report, oracle):
            safe += 1
    return {"instances": len(instances), "safe": safe,
            "mean_removal_fraction": float(np.mean(fractions)) if fractions else 0.0}


def run_bench(count: int = 100, seed: int = 0, bits: int = 8) -> pd.DataFrame:
    """
    Runs every benchmark on the same instance set.

    Returns:
        pd.DataFrame: One row per benchmark with columns benchmark, passed, total, detail.
    """
    instances = random_instances(count, seed)
    sa = oracle_match_rate(instances, "cim-sa", seed)
    bif = oracle_match_rate(instances, "cim-bif", seed)
    quant = quantization_robustness(instances, bits)
    red = reduction_safety(instances)
    rows = [
        {"benchmark": "cim-sa optimum", "passed": sa["matches"], "total": count,
         "detail": f"beats={sa['beats']}"},
        {"benchmark": "cim-bif optimum", "passed": bif["matches"], "total": count,
         "detail": f"beats={bif['beats']}"},
        {"benchmark": f"{bits}-bit quantization", "passed": quant["within_tolerance"],
         "total": count, "detail": f"worst_loss_db={quant['worst_loss_db']:.4f}"},
        {"benchmark": "reduction keeps optimum", "passed": red["safe"], "total": count,
         "detail": f"mean_removal={red['mean_removal_fraction']:.4f}"},
    ]
    return pd.DataFrame(rows, columns=["benchmark", "passed", "total", "detail"])
