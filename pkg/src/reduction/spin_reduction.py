"""
Spin-size reduction: spins whose external field dominates their couplings are fixed to the
field-optimal value before solving, and the model shrinks to the remaining spins exactly.

For every spin vector over the kept indices S^c,
energy(reduced, s~) == energy(full, merge(s~, S, s*)).
"""
import logging
from dataclasses import dataclass

import numpy as np

from ising.ising_model import IsingModel, as_spins, energy
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReductionReport:
    """
    Outcome of a reduction.

    Attributes:
        predetermined_indices (np.ndarray): Sorted indices S of fixed spins.
        fixed_spins (np.ndarray): s*_i for i in S, same order.
        kept_indices (np.ndarray): Sorted complement S^c.
        reduced_model (IsingModel): Model over S^c.
        constant (float): C, the offset of the reduced model.
        removal_fraction (float): |S| / N.
        t_max (float): Threshold used for the selection (after scaling).
    """
    predetermined_indices: np.ndarray
    fixed_spins: np.ndarray
    kept_indices: np.ndarray
    reduced_model: IsingModel
    constant: float
    removal_fraction: float
    t_max: float

    def merge(self, reduced_spins) -> np.ndarray:
        return merge_solution(reduced_spins, self.predetermined_indices, self.fixed_spins,
                              self.predetermined_indices.size + self.kept_indices.size)

    def summary(self) -> dict:
        return {
            "spins_total": int(self.predetermined_indices.size + self.kept_indices.size),
            "spins_removed": int(self.predetermined_indices.size),
            "spins_kept": int(self.kept_indices.size),
            "removal_fraction": float(self.removal_fraction),
            "constant": float(self.constant),
            "t_max": float(self.t_max),
        }


def closed_form_spins(lam: np.ndarray) -> np.ndarray:
    """Field-optimal spins: +1 where lam_i < 0, -1 where lam_i >= 0."""
    lam = np.asarray(lam, dtype=float)
    return np.where(lam < 0, 1, -1).astype(np.int8)


def flip_susceptibility(model: IsingModel) -> np.ndarray:
    """
    T_i = -sgn(lam_i) * (lam_i + 2 * sum_{j != i} J_ij sgn(lam_j)), with sgn(0) = 0.

    Positive T_i means the couplings may overturn the field-optimal orientation of spin i.
    """
    signs = np.sign(model.lam)
    return -signs * (model.lam + 2.0 * model.coupling_product(signs))


def predetermined_set(T: np.ndarray, threshold_scale: float = 1.0) -> np.ndarray:
    """
    Indices with |T_i| > threshold_scale * max_i T_i (T_max taken over the signed values).
    """
    T = np.asarray(T, dtype=float)
    if T.size == 0:
        return np.zeros(0, dtype=np.int64)
    t_max = threshold_scale * float(T.max())
    return np.flatnonzero(np.abs(T) > t_max)


def _complement(indices: np.ndarray, n: int) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[indices] = False
    return np.flatnonzero(mask)


def reduce_model(model: IsingModel, S, fixed_spins) -> tuple[IsingModel, float]:
    """
    Fixes the spins in S and returns the model over the complement plus its constant.

    The reduced couplings are J restricted to S^c, the fields become
    lam_i + 2 sum_{j in S} J_ij s*_j, and C collects every term that only involves S.

    Args:
        model (IsingModel): Full model.
        S: Indices to fix.
        fixed_spins: Values s*_i for i in S, in the same order.

    Returns:
        tuple[IsingModel, float]: (reduced model whose offset is C, C).

    Raises:
        ConfigurationError: If S is out of range, repeats an index, or lengths differ.
    """
    n = model.size
    S = np.asarray(S, dtype=np.int64).reshape(-1)
    fixed = as_spins(fixed_spins)
    if fixed.size != S.size:
        raise ConfigurationError(f"{S.size} fixed indices but {fixed.size} fixed spins")
    if S.size and (S.min() < 0 or S.max() >= n):
        raise ConfigurationError(f"fixed indices must lie in 0..{n - 1}")
    if np.unique(S).size != S.size:
        raise ConfigurationError("fixed indices must be distinct")
    if S.size == 0:
        return model, model.offset
    kept = _complement(S, n)
    full = np.zeros(n)
    full[S] = fixed
    # J @ (s* on S, 0 elsewhere) gives sum_{j in S} J_ij s*_j for every i
    coupled = model.coupling_product(full)
    lam_reduced = model.lam[kept] + 2.0 * coupled[kept]
    constant = float(full @ coupled) + float(model.lam[S] @ fixed) + model.offset
    reduced = IsingModel(
        lam=lam_reduced,
        offset=constant,
        encoding=model.encoding,
        n_ris=model.n_ris,
        couplings=None if model.couplings is None else model.couplings[np.ix_(kept, kept)],
        factor=None if model.factor is None else model.factor[kept],
        normalized=model.normalized,
    )
    return reduced, constant


def merge_solution(reduced_spins, S, fixed_spins, n: int | None = None) -> np.ndarray:
    """
    Reassembles a full spin vector: S takes the fixed spins, the rest takes `reduced_spins`
    in increasing index order.
    """
    S = np.asarray(S, dtype=np.int64).reshape(-1)
    reduced = as_spins(reduced_spins)
    total = S.size + reduced.size if n is None else n
    if total != S.size + reduced.size:
        raise ConfigurationError(
            f"{S.size} fixed + {reduced.size} free spins do not make {total}")
    out = np.zeros(total, dtype=np.int8)
    out[S] = as_spins(fixed_spins).astype(np.int8)
    out[_complement(S, total)] = reduced.astype(np.int8)
    return out


def reduce_spins(model: IsingModel, threshold_scale: float = 1.0) -> ReductionReport:
    """
    Runs the whole reduction: susceptibilities, predetermined set, closed-form spins,
    reduced model.
    """
    T = flip_susceptibility(model)
    S = predetermined_set(T, threshold_scale)
    fixed = closed_form_spins(model.lam[S])
    reduced, constant = reduce_model(model, S, fixed)
    fraction = S.size / model.size if model.size else 0.0
    t_max = threshold_scale * float(T.max()) if T.size else 0.0
    logger.info("spin reduction: %d of %d spins fixed (%.2f%%), %d kept",
                S.size, model.size, 100 * fraction, model.size - S.size)
    return ReductionReport(
        predetermined_indices=S,
        fixed_spins=fixed,
        kept_indices=_complement(S, model.size),
        reduced_model=reduced,
        constant=constant,
        removal_fraction=fraction,
        t_max=t_max,
    )


def reduction_is_safe(model: IsingModel, report: ReductionReport, solve) -> bool:
    """
    Empirical check that fixing spins kept the optimum: compares the optimum of the full
    model with the merged optimum of the reduced model.

    Args:
        model (IsingModel): Full model.
        report (ReductionReport): Its reduction.
        solve: Callable model -> spins of a global optimum (the exhaustive solver).

    Returns:
        bool: True if both optima have the same energy (1e-9 relative).
    """
    full_best = energy(model, solve(model))
    if report.kept_indices.size:
        merged = report.merge(solve(report.reduced_model))
    else:
        merged = report.merge(np.zeros(0))
    reduced_best = energy(model, merged)
    return abs(reduced_best - full_best) <= 1e-9 * max(1e-300, abs(full_best))
