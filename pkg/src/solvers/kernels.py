"""
Numba kernels for single-spin-flip dynamics.

Two model layouts are supported:
- dense: zero-diagonal J (N x N) and fields lam; a cached local field
  l_i = lam_i + 2 (J s)_i is updated in O(N) per accepted flip.
- factor: real R (N x M) with J = -(R R^T - diag); the projection r = R^T s is cached and a
  flip costs O(M), M = 2 N_BS for channel-derived models.

Energies returned here exclude the model offset.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def dense_fields(J, lam, s):
    n = s.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += J[i, j] * s[j]
        out[i] = lam[i] + 2.0 * acc
    return out


@njit(cache=True, nogil=True)
def _dense_energy(lam, s, field):
    e = 0.0
    for i in range(s.shape[0]):
        e += 0.5 * s[i] * (field[i] + lam[i])
    return e


@njit(cache=True, nogil=True)
def _flip_dense(J, s, field, i):
    s[i] = -s[i]
    change = 4.0 * s[i]
    for j in range(s.shape[0]):
        field[j] += change * J[j, i]


@njit(cache=True, nogil=True)
def factor_projection(R, s):
    n, m = R.shape
    r = np.zeros(m)
    for i in range(n):
        for k in range(m):
            r[k] += R[i, k] * s[i]
    return r


@njit(cache=True, nogil=True)
def _factor_energy(rowsq, lam, s, r):
    e = 0.0
    for k in range(r.shape[0]):
        e -= r[k] * r[k]
    for i in range(s.shape[0]):
        e += rowsq[i] + lam[i] * s[i]
    return e


@njit(cache=True, nogil=True)
def factor_delta(R, rowsq, lam, s, r, i):
    dot = 0.0
    for k in range(R.shape[1]):
        dot += R[i, k] * r[k]
    field = lam[i] + 2.0 * (rowsq[i] * s[i] - dot)
    return -2.0 * s[i] * field


@njit(cache=True, nogil=True)
def _flip_factor(R, s, r, i):
    s[i] = -s[i]
    change = 2.0 * s[i]
    for k in range(R.shape[1]):
        r[k] += change * R[i, k]


@njit(cache=True, nogil=True)
def anneal_dense(J, lam, spins, betas, seed):
    """Metropolis sweeps over a dense model; returns (best spins, best energy, trace)."""
    np.random.seed(seed)
    n = spins.shape[0]
    s = spins.copy()
    field = dense_fields(J, lam, s)
    e = _dense_energy(lam, s, field)
    best = s.copy()
    best_e = e
    trace = np.empty(betas.shape[0])
    for t in range(betas.shape[0]):
        beta = betas[t]
        for i in range(n):
            delta = -2.0 * s[i] * field[i]
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                _flip_dense(J, s, field, i)
                e += delta
        if e < best_e:
            best_e = e
            best[:] = s
        trace[t] = best_e
    return best, best_e, trace


@njit(cache=True, nogil=True)
def anneal_factor(R, rowsq, lam, spins, betas, seed):
    """Metropolis sweeps over a factor model; returns (best spins, best energy, trace)."""
    np.random.seed(seed)
    n = spins.shape[0]
    s = spins.copy()
    r = factor_projection(R, s)
    e = _factor_energy(rowsq, lam, s, r)
    best = s.copy()
    best_e = e
    trace = np.empty(betas.shape[0])
    for t in range(betas.shape[0]):
        beta = betas[t]
        for i in range(n):
            delta = factor_delta(R, rowsq, lam, s, r, i)
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                _flip_factor(R, s, r, i)
                e += delta
        if e < best_e:
            best_e = e
            best[:] = s
        trace[t] = best_e
    return best, best_e, trace


@njit(cache=True, nogil=True)
def descend_dense(J, lam, spins, tol, max_sweeps):
    """Zero-temperature sweeps accepting only strictly improving flips."""
    s = spins.copy()
    field = dense_fields(J, lam, s)
    for _ in range(max_sweeps):
        flipped = False
        for i in range(s.shape[0]):
            if -2.0 * s[i] * field[i] < -tol:
                _flip_dense(J, s, field, i)
                flipped = True
        if not flipped:
            break
    return s


@njit(cache=True, nogil=True)
def descend_factor(R, rowsq, lam, spins, tol, max_sweeps):
    """Zero-temperature sweeps accepting only strictly improving flips."""
    s = spins.copy()
    r = factor_projection(R, s)
    for _ in range(max_sweeps):
        flipped = False
        for i in range(s.shape[0]):
            if factor_delta(R, rowsq, lam, s, r, i) < -tol:
                _flip_factor(R, s, r, i)
                flipped = True
        if not flipped:
            break
    return s


@njit(cache=True, nogil=True)
def exhaustive_dense(J, lam, tol):
    """
    Gray-code enumeration of all 2^N configurations.

    The configuration code has bit (N-1-i) set when spin i is -1, so comparing codes orders
    spin vectors lexicographically with +1 < -1. Returns (best code, best energy).
    """
    n = lam.shape[0]
    s = np.ones(n)
    field = dense_fields(J, lam, s)
    e = _dense_energy(lam, s, field)
    best_e = e
    best_code = 0
    code = 0
    total = 1 << n
    for k in range(1, total):
        i = 0
        kk = k
        while (kk & 1) == 0:
            kk >>= 1
            i += 1
        delta = -2.0 * s[i] * field[i]
        _flip_dense(J, s, field, i)
        e += delta
        code ^= 1 << (n - 1 - i)
        if (k & 4095) == 0:
            # bound the drift of the incremental updates
            field = dense_fields(J, lam, s)
            e = _dense_energy(lam, s, field)
        if e < best_e - tol:
            best_e = e
            best_code = code
        elif e <= best_e + tol and code < best_code:
            best_e = min(best_e, e)
            best_code = code
    return best_code, best_e
