"""
Ising models of RIS phase optimization.

Both encodings reduce to the same shape: the composite channel is h = h_d + W^T s for a
complex matrix W (N spins x N_BS) and spins s in {+1, -1}^N. Binary uses W = V; quaternary
stacks real and imaginary spin halves with W = [V; -jV] / sqrt(2). Stacking the real and
imaginary parts of W gives a real factor R (N x 2 N_BS) with Re(W W^H) = R R^T, so

    -||h||^2 = s^T J s + lam^T s + offset,   J = -(R R^T - diag(R R^T)),
    lam = -2 R [Re h_d; Im h_d],             offset = -||h_d||^2 - trace(R R^T).

A model may carry the dense zero-diagonal J, the factor R, or both. Large channel-derived
models keep only R so that J is never materialized.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from channel.phases import PhaseConfig
from utils.errors import ConfigurationError, NumericalError

logger = logging.getLogger(__name__)

# channel-derived models larger than this only carry the factor
DEFAULT_DENSE_THRESHOLD = 4096

# (real spin, imaginary spin) -> quaternary phase index, see channel.phases.phase_candidates
_QUATERNARY_INDEX = {(1, 1): 0, (-1, 1): 1, (-1, -1): 2, (1, -1): 3}
_QUATERNARY_SPINS = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=np.int8)


class Encoding(str, Enum):
    BINARY = "binary"
    QUATERNARY = "quaternary"


def _frozen(arr: np.ndarray | None) -> np.ndarray | None:
    if arr is None:
        return None
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpinConfig:
    """A vector of +1/-1 spins."""
    spins: np.ndarray

    def __post_init__(self) -> None:
        spins = np.asarray(self.spins).reshape(-1)
        if spins.size and not np.all(np.abs(spins) == 1):
            raise ConfigurationError("spins must be +1 or -1")
        object.__setattr__(self, "spins", spins.astype(np.int8))

    def __len__(self) -> int:
        return int(self.spins.size)


def as_spins(spins) -> np.ndarray:
    """Returns the spin vector of a SpinConfig or array as float64."""
    if isinstance(spins, SpinConfig):
        return spins.spins.astype(float)
    return np.asarray(spins, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class IsingModel:
    """
    Immutable Ising model H(s) = s^T J s + lam^T s + offset with zero-diagonal symmetric J.

    Attributes:
        lam (np.ndarray): External fields, length N.
        offset (float): Constant term.
        encoding (Encoding): Spin encoding of the phases.
        n_ris (int): Number of RIS elements the model was built for.
        couplings (np.ndarray | None): Dense J, or None when only the factor is kept.
        factor (np.ndarray | None): Real factor R with J = -(R R^T - diag(R R^T)).
        normalized (bool): False for the unnormalized {+-1 +-j} quaternary build.
    """
    lam: np.ndarray
    offset: float
    encoding: Encoding = Encoding.BINARY
    n_ris: int = 0
    couplings: np.ndarray | None = None
    factor: np.ndarray | None = None
    normalized: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", _frozen(np.asarray(self.lam, dtype=float).reshape(-1)))
        object.__setattr__(self, "couplings", _frozen(self.couplings))
        object.__setattr__(self, "factor", _frozen(self.factor))
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        n = self.lam.size
        if self.couplings is None and self.factor is None:
            raise ConfigurationError("an Ising model needs dense couplings or a factor")
        if self.couplings is not None:
            if self.couplings.shape != (n, n):
                raise ConfigurationError(f"J shape {self.couplings.shape} does not match N={n}")
            if not np.array_equal(self.couplings, self.couplings.T):
                raise ConfigurationError("J must be exactly symmetric")
            if np.any(np.diag(self.couplings) != 0.0):
                raise ConfigurationError("J must have a zero diagonal")
        if self.factor is not None and self.factor.shape[0] != n:
            raise ConfigurationError(f"factor has {self.factor.shape[0]} rows, expected {n}")

    @property
    def size(self) -> int:
        return int(self.lam.size)

    @property
    def is_dense(self) -> bool:
        return self.couplings is not None

    @property
    def factor_row_norms(self) -> np.ndarray:
        """||R_n||^2 per spin: the diagonal removed from -R R^T."""
        if self.factor is None:
            raise ConfigurationError("model has no factor")
        return np.einsum("ij,ij->i", self.factor, self.factor)

    @property
    def J(self) -> np.ndarray:
        """Dense couplings, materialized from the factor when necessary."""
        if self.couplings is not None:
            return self.couplings
        J = -(self.factor @ self.factor.T)
        np.fill_diagonal(J, 0.0)
        # R R^T is symmetric only up to rounding
        return (J + J.T) / 2

    def with_dense(self) -> "IsingModel":
        """Returns the same model with the dense J attached."""
        if self.couplings is not None:
            return self
        return IsingModel(lam=self.lam, offset=self.offset, encoding=self.encoding,
                          n_ris=self.n_ris, couplings=self.J, factor=self.factor,
                          normalized=self.normalized)

    def coupling_product(self, x: np.ndarray) -> np.ndarray:
        """
        J @ x for a vector (N,) or a batch of column vectors (N, R).
        """
        x = np.asarray(x, dtype=float)
        if self.couplings is not None:
            return self.couplings @ x
        diag = self.factor_row_norms
        if x.ndim == 1:
            return -(self.factor @ (self.factor.T @ x)) + diag * x
        return -(self.factor @ (self.factor.T @ x)) + diag[:, None] * x

    def quadratic(self, spins) -> float:
        """s^T J s."""
        s = as_spins(spins)
        if self.couplings is not None:
            return float(s @ self.couplings @ s)
        projected = self.factor.T @ s
        return float(-(projected @ projected) + self.factor_row_norms.sum())

    def abs_row_sums(self) -> np.ndarray:
        """
        sum_j |J_ij| per row; for factor-only models the Cauchy-Schwarz bound
        ||R_i|| * sum_{j != i} ||R_j|| is returned instead.
        """
        if self.couplings is not None:
            return np.abs(self.couplings).sum(axis=1)
        norms = np.sqrt(self.factor_row_norms)
        return norms * (norms.sum() - norms)

    def couplings_frobenius_sq(self) -> float:
        """sum_ij J_ij^2, computed in the small 2N_BS space for factor-only models."""
        if self.couplings is not None:
            return float(np.sum(self.couplings ** 2))
        gram = self.factor.T @ self.factor
        return float(np.sum(gram ** 2) - np.sum(self.factor_row_norms ** 2))


def from_raw_couplings(J_raw: np.ndarray, lam: np.ndarray, offset: float = 0.0,
                       encoding: Encoding = Encoding.BINARY, n_ris: int | None = None
                       ) -> IsingModel:
    """
    Builds a dense model from an arbitrary square J: symmetrizes it and folds its diagonal
    (sigma_i^2 = 1) into the offset, leaving s^T J s unchanged for every spin vector.
    """
    J_raw = np.asarray(J_raw, dtype=float)
    if J_raw.ndim != 2 or J_raw.shape[0] != J_raw.shape[1]:
        raise ConfigurationError(f"J must be square, got {J_raw.shape}")
    J = (J_raw + J_raw.T) / 2
    diag = np.diag(J).copy()
    np.fill_diagonal(J, 0.0)
    lam = np.asarray(lam, dtype=float).reshape(-1)
    return IsingModel(lam=lam, offset=float(offset) + float(diag.sum()), encoding=encoding,
                      n_ris=lam.size if n_ris is None else n_ris, couplings=J)


def _stack_real(W: np.ndarray) -> np.ndarray:
    return np.hstack([W.real, W.imag])


def _from_channel_factor(h_d: np.ndarray, W: np.ndarray, encoding: Encoding, n_ris: int,
                         normalized: bool, dense_threshold: int) -> IsingModel:
    h_d = np.asarray(h_d, dtype=complex).reshape(-1)
    if W.shape[1] != h_d.size:
        raise ConfigurationError(f"V has {W.shape[1]} columns, h_d has {h_d.size} entries")
    R = _stack_real(W)
    h_stacked = np.concatenate([h_d.real, h_d.imag])
    lam = -2.0 * (R @ h_stacked)
    row_norms = np.einsum("ij,ij->i", R, R)
    offset = -float(h_stacked @ h_stacked) - float(row_norms.sum())
    if not (np.all(np.isfinite(lam)) and math.isfinite(offset)):
        raise NumericalError("non-finite Ising coefficients")
    model = IsingModel(lam=lam, offset=offset, encoding=encoding, n_ris=n_ris, factor=R,
                       normalized=normalized)
    if model.size <= dense_threshold:
        model = model.with_dense()
    logger.debug("built %s model: N=%d dense=%s", encoding.value, model.size, model.is_dense)
    return model


def build_binary_ising(h_d: np.ndarray, V: np.ndarray,
                       dense_threshold: int = DEFAULT_DENSE_THRESHOLD) -> IsingModel:
    """
    Ising model of binary phase shifts: J = -Re{V V^H} (diagonal folded), lam = -2 Re{V conj(h_d)}.

    Args:
        h_d (np.ndarray): Direct channel, length N_BS.
        V (np.ndarray): Cascade matrix, N_RIS x N_BS.
        dense_threshold (int, optional): Largest N for which the dense J is attached.

    Returns:
        IsingModel: Model with energy(s) = -||h(decode(s))||^2 exactly.
    """
    V = np.asarray(V, dtype=complex)
    return _from_channel_factor(h_d, V, Encoding.BINARY, V.shape[0], True, dense_threshold)


def build_quaternary_ising(h_d: np.ndarray, V: np.ndarray, normalized: bool = True,
                           dense_threshold: int = DEFAULT_DENSE_THRESHOLD) -> IsingModel:
    """
    Ising model of quaternary phase shifts over 2*N_RIS spins (real half, imaginary half).

    With phi_n = (s_n + j s_{N+n}) / sqrt(2) the quadratic block is
    (1/2) [[Re M, -Im M], [Im M, Re M]] for M = V V^H and the field block carries 1/sqrt(2).

    Args:
        h_d (np.ndarray): Direct channel.
        V (np.ndarray): Cascade matrix.
        normalized (bool, optional): False builds the unnormalized {+-1 +-j} objective whose
            coefficients have modulus sqrt(2); its energy is then not -||h||^2.
        dense_threshold (int, optional): Largest N for which the dense J is attached.

    Returns:
        IsingModel: Model with 2*N_RIS spins.
    """
    V = np.asarray(V, dtype=complex)
    scale = 1.0 / math.sqrt(2.0) if normalized else 1.0
    W = np.vstack([V, -1j * V]) * scale
    return _from_channel_factor(h_d, W, Encoding.QUATERNARY, V.shape[0], normalized,
                                dense_threshold)


def energy(model: IsingModel, spins) -> float:
    """
    Total energy s^T J s + lam^T s + offset.

    Raises:
        ConfigurationError: On a length mismatch.
    """
    s = as_spins(spins)
    if s.size != model.size:
        raise ConfigurationError(f"spin vector has {s.size} entries, model has {model.size}")
    return model.quadratic(s) + float(model.lam @ s) + model.offset


def decode(model: IsingModel, spins) -> PhaseConfig:
    """
    Converts spins to phases: binary phi_n = s_n; quaternary phi_n = (s_n + j s_{N+n}) / sqrt(2).
    """
    s = as_spins(spins).astype(np.int64)
    if s.size != model.size:
        raise ConfigurationError(f"spin vector has {s.size} entries, model has {model.size}")
    if model.encoding is Encoding.BINARY:
        return PhaseConfig(level=2, indices=(s < 0).astype(np.int64))
    real, imag = s[:model.n_ris], s[model.n_ris:]
    indices = np.array([_QUATERNARY_INDEX[(int(a), int(b))] for a, b in zip(real, imag)],
                       dtype=np.int64)
    return PhaseConfig(level=4, indices=indices)


def encode(model: IsingModel, phases: PhaseConfig) -> SpinConfig:
    """Inverse of `decode`."""
    expected = 2 if model.encoding is Encoding.BINARY else 4
    if phases.level != expected:
        raise ConfigurationError(
            f"{model.encoding.value} model needs level {expected}, got {phases.level}")
    if phases.n_ris != model.n_ris:
        raise ConfigurationError(f"phase vector has {phases.n_ris} entries, model {model.n_ris}")
    if model.encoding is Encoding.BINARY:
        return SpinConfig(np.where(phases.indices == 0, 1, -1))
    pairs = _QUATERNARY_SPINS[phases.indices]
    return SpinConfig(np.concatenate([pairs[:, 0], pairs[:, 1]]))


def spins_for_level(level: int, n_ris: int) -> int:
    """Number of spins needed for n_ris elements at a phase level."""
    return n_ris if level == 2 else 2 * n_ris
