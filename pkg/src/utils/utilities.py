"""
In this module, we define small helpers shared by the channel, solver and harness packages.

Functions include:
1. `setup_logging`: Configures the root logger once from `configs/config.yml` (and `RIS_ISING_LOG_LEVEL`).
2. `power_to_db`: Converts a linear power to dB, mapping zero power to -inf.
3. `finite_db`: Replaces -inf/NaN gains by the plotting sentinel used in CSV and SVG output.
4. `discrete_phase_loss_db`: Theoretical power loss of an L-level uniform phase quantizer.
5. `stable_hash`: Deterministic short hash of a JSON-serializable description.
"""
import hashlib
import json
import logging
import math

import numpy as np

from load_config import LoadConfig

# Finite stand-in for a -inf dB gain in written tables and charts
GAIN_SENTINEL_DB = -1.0e9

_configured = False


def setup_logging(level: str | None = None) -> None:
    """
    Configures the root logger with the level and format from the configuration.

    Calling it again only updates the level, so library code and the CLI can both call it.

    Args:
        level (str | None): Optional level name overriding the configured one.
    """
    global _configured
    cfg = LoadConfig()
    resolved = (level or cfg.log_level).upper()
    if not _configured:
        logging.basicConfig(level=resolved, format=cfg.log_format)
        _configured = True
    logging.getLogger().setLevel(resolved)
    # numba logs every compilation pass at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


def power_to_db(power: float) -> float:
    """
    Converts a non-negative linear power to decibels.

    Args:
        power (float): Linear power.

    Returns:
        float: 10*log10(power), or -inf when power is zero or negative.
    """
    if power <= 0.0:
        return -math.inf
    return 10.0 * math.log10(power)


def finite_db(values):
    """
    Replaces non-finite dB values by `GAIN_SENTINEL_DB`.

    Args:
        values: Scalar or array of dB values.

    Returns:
        Same shape as the input, with -inf and NaN replaced.
    """
    arr = np.asarray(values, dtype=float)
    out = np.where(np.isfinite(arr), arr, GAIN_SENTINEL_DB)
    if out.ndim == 0:
        return float(out)
    return out


def discrete_phase_loss_db(levels: int) -> float:
    """
    Asymptotic power loss of uniform L-level phase quantization relative to continuous phases.

    The loss is -20*log10(sinc(1/L)): about 3.9 dB for L=2 and 0.9 dB for L=4.

    Args:
        levels (int): Number of phase levels L (>= 2).

    Returns:
        float: Loss in dB.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    return float(-20.0 * math.log10(np.sinc(1.0 / levels)))


def stable_hash(payload: dict, length: int = 12) -> str:
    """
    Hashes a JSON-serializable dictionary independently of key order.

    Args:
        payload (dict): Description to hash.
        length (int, optional): Number of hex digits to keep. Defaults to 12.

    Returns:
        str: Hex digest prefix.
    """
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:length]
