"""
Plain-text dump of an Ising model for cross-implementation golden tests.

Layout:

    # ris-ising model
    N <spins>
    encoding <binary|quaternary>
    n_ris <elements>
    offset <value>
    J
    <row 0: J_00>
    <row 1: J_10 J_11>
    ...
    lambda
    <lam_0 ... lam_{N-1}>

Numbers are written with 17 significant digits so a dump reloads bit-exactly.
"""
from pathlib import Path

import numpy as np

from ising.ising_model import Encoding, IsingModel
from utils.errors import ConfigurationError

_HEADER = "# ris-ising model"


def _fmt(values) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def write_model(model: IsingModel, path) -> Path:
    """Writes `model` to `path` and returns the path."""
    path = Path(path)
    J = model.J
    lines = [
        _HEADER,
        f"N {model.size}",
        f"encoding {model.encoding.value}",
        f"n_ris {model.n_ris}",
        f"offset {model.offset:.17g}",
        "J",
    ]
    lines.extend(_fmt(J[i, :i + 1]) for i in range(model.size))
    lines.append("lambda")
    lines.append(_fmt(model.lam))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_model(path) -> IsingModel:
    """
    Reads a model written by `write_model`.

    Raises:
        ConfigurationError: If the file does not follow the layout.
    """
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != _HEADER:
        raise ConfigurationError(f"{path}: missing '{_HEADER}' header")
    try:
        header = dict(line.split(maxsplit=1) for line in lines[1:5])
        n = int(header["N"])
        encoding = Encoding(header["encoding"].strip())
        n_ris = int(header["n_ris"])
        offset = float(header["offset"])
        if lines[5].strip() != "J" or lines[6 + n].strip() != "lambda":
            raise ConfigurationError(f"{path}: malformed section markers")
        J = np.zeros((n, n))
        for i in range(n):
            row = np.array(lines[6 + i].split(), dtype=float)
            if row.size != i + 1:
                raise ConfigurationError(f"{path}: row {i} has {row.size} entries")
            J[i, :i + 1] = row
        J = np.tril(J, -1) + np.tril(J, -1).T
        lam = np.array(lines[7 + n].split(), dtype=float) if n else np.zeros(0)
    except (KeyError, IndexError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{path}: cannot parse model dump ({exc})") from exc
    if lam.size != n:
        raise ConfigurationError(f"{path}: lambda has {lam.size} entries, expected {n}")
    return IsingModel(lam=lam, offset=offset, encoding=encoding, n_ris=n_ris, couplings=J)
