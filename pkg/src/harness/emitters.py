"""
In this module, we write the result artifacts of the CLI.

Functions include:
1. `emit_csv` / `read_csv`: Sweep table `d_m, <method>_db...` with six decimals.
2. `emit_svg`: Minimal line chart of a sweep, written as SVG markup.
3. `write_mask`: `element, index, theta_rad` table of an optimized configuration.
4. `write_trace`: `step, best_energy` table of a solver trace.
5. `write_report`: YAML run report.

Every writer is deterministic: identical inputs give identical bytes.
"""
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from channel.phases import PhaseConfig
from harness.sweep import SweepResult
from solvers.solve_report import SolveReport
from utils.errors import ConfigurationError
from utils.utilities import GAIN_SENTINEL_DB

logger = logging.getLogger(__name__)

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
            "#7f7f7f")
_WIDTH, _HEIGHT = 720, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 150, 30, 55


def _prepare(path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {path.parent}: {exc}") from exc
    return path


def _write_text(path, text: str) -> Path:
    path = _prepare(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %s", path)
    return path


def emit_csv(result: SweepResult, path) -> Path:
    """
    Writes a sweep as CSV with columns `d_m, <method>_db...` and six decimals.

    Non-finite gains are written as the -1e9 sentinel.

    Raises:
        ConfigurationError: If the path cannot be written.
    """
    text = result.to_frame().to_csv(index=False, float_format="%.6f", lineterminator="\n")
    return _write_text(path, text)


def read_csv(path) -> pd.DataFrame:
    """Reads a table written by `emit_csv`."""
    return pd.read_csv(path)


def _nice_step(span: float) -> float:
    raw = span / 6.0
    magnitude = 10.0 ** math.floor(math.log10(raw))
    for factor in (1.0, 2.0, 5.0, 10.0):
        if raw <= factor * magnitude:
            return factor * magnitude
    return 10.0 * magnitude


def _ticks(lo: float, hi: float) -> tuple[np.ndarray, float, float]:
    """Rounded tick positions covering [lo, hi] and the resulting axis limits."""
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    step = _nice_step(hi - lo)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count), start, stop


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _segments(xs: np.ndarray, ys: np.ndarray) -> list[list[tuple[float, float]]]:
    """Splits a curve at non-finite points so gaps are not bridged."""
    segments, current = [], []
    for x, y in zip(xs, ys):
        if np.isfinite(y) and y > GAIN_SENTINEL_DB:
            current.append((x, y))
        elif current:
            segments.append(current)
            current = []
    if current:
        segments.append(current)
    return segments


def render_svg(result: SweepResult, title: str = "Channel gain versus UE distance") -> str:
    """Builds the SVG markup of a sweep line chart (dB y-axis, distance x-axis)."""
    d = result.distances
    finite = [v[np.isfinite(v) & (v > GAIN_SENTINEL_DB)] for v in result.gains.values()]
    finite = np.concatenate(finite) if finite else np.zeros(0)
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (-100.0, 0.0)
    x_lo, x_hi = (float(d.min()), float(d.max())) if d.size else (0.0, 1.0)
    x_ticks, x_min, x_max = _ticks(x_lo, x_hi)
    y_ticks, y_min, y_max = _ticks(y_lo, y_hi)
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(x: float) -> float:
        return _LEFT + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y: float) -> float:
        return _TOP + (y_max - y) / (y_max - y_min) * plot_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_LEFT + plot_w / 2:.2f}" y="18" text-anchor="middle">{title}</text>',
    ]
    for x in x_ticks:
        px = sx(x)
        lines.append(f'<line x1="{_fmt(px)}" y1="{_TOP}" x2="{_fmt(px)}" y2="{_TOP + plot_h}" '
                     f'stroke="#e0e0e0"/>')
        lines.append(f'<text x="{_fmt(px)}" y="{_TOP + plot_h + 16}" '
                     f'text-anchor="middle">{x:g}</text>')
    for y in y_ticks:
        py = sy(y)
        lines.append(f'<line x1="{_LEFT}" y1="{_fmt(py)}" x2="{_LEFT + plot_w}" y2="{_fmt(py)}" '
                     f'stroke="#e0e0e0"/>')
        lines.append(f'<text x="{_LEFT - 6}" y="{_fmt(py + 4)}" '
                     f'text-anchor="end">{y:g}</text>')
    lines.append(f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
                 f'fill="none" stroke="black"/>')
    lines.append(f'<text x="{_LEFT + plot_w / 2:.2f}" y="{_HEIGHT - 12}" '
                 f'text-anchor="middle">d (m)</text>')
    lines.append(f'<text x="16" y="{_TOP + plot_h / 2:.2f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {_TOP + plot_h / 2:.2f})">channel gain (dB)</text>')

    for k, (name, values) in enumerate(result.gains.items()):
        color = _PALETTE[k % len(_PALETTE)]
        for segment in _segments(d, values):
            points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in segment)
            lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                         f'points="{points}"/>')
        ly = _TOP + 16 + 18 * k
        lx = _LEFT + plot_w + 12
        lines.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                     f'stroke-width="2"/>')
        lines.append(f'<text x="{lx + 26}" y="{ly + 4}">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_svg(result: SweepResult, path, title: str = "Channel gain versus UE distance") -> Path:
    """
    Writes a sweep as an SVG line chart.

    Raises:
        ConfigurationError: If the path cannot be written.
    """
    return _write_text(path, render_svg(result, title))


def write_mask(phases: PhaseConfig, path) -> Path:
    """Writes `element, index, theta_rad` rows, one per RIS element."""
    frame = pd.DataFrame({
        "element": np.arange(phases.n_ris),
        "index": phases.indices,
        "theta_rad": phases.theta,
    })
    return _write_text(path, frame.to_csv(index=False, float_format="%.9f", lineterminator="\n"))


def read_mask(path, level: int) -> PhaseConfig:
    """Reads a mask written by `write_mask`."""
    frame = pd.read_csv(path)
    if list(frame.columns) != ["element", "index", "theta_rad"]:
        raise ConfigurationError(f"{path}: not a mask file")
    return PhaseConfig(level=level, indices=frame.sort_values("element")["index"].to_numpy())


def write_trace(report: SolveReport, path) -> Path:
    """Writes the energy trace of a solve as `step, best_energy`."""
    text = report.trace_frame().to_csv(index=False, float_format="%.12e", lineterminator="\n")
    return _write_text(path, text)


def _plain(value):
    """Converts numpy scalars, arrays and non-finite floats into YAML-friendly values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_report(summary: dict, path) -> Path:
    """Writes a run summary as YAML, keys in insertion order."""
    text = yaml.safe_dump(_plain(summary), sort_keys=False, default_flow_style=False)
    return _write_text(path, text)
