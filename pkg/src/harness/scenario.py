"""
Scenario files: INI-style text with sections [bs], [ris], [ue] and [model], SI units.

    [bs]
    center = 0, 0, 0
    grid = 8, 8
    spacing = lambda/2
    normal = 0, 1, 0

    [ris]
    center = 2, 50, 0
    grid = 74, 74          ; or side_length = 0.4
    normal = -1, 0, 0

    [ue]
    position = 0, 50, 0

    [model]
    carrier_frequency = 28e9
    propagation_variant = friis_squared
    aperture_model = flat
    los_enabled = false
    noise_power = 1e-13    ; optional, capacity only

Unknown sections or keys are rejected. A bare preset name (for example `paper_5476`) resolves
to the shipped file under the configured scenarios directory.
"""
import configparser
import logging
from pathlib import Path

from load_config import LoadDirectoriesConfig
from scene.geometry import (SPEED_OF_LIGHT, ApertureModel, PropagationVariant, SceneConfig,
                            grid_from_side_length)
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

_ALLOWED = {
    "bs": {"center", "grid", "spacing", "normal"},
    "ris": {"center", "grid", "spacing", "normal", "side_length"},
    "ue": {"position"},
    "model": {"carrier_frequency", "propagation_variant", "aperture_model", "los_enabled",
              "noise_power", "name"},
}


def resolve_scenario_path(name_or_path) -> Path:
    """
    Resolves a scenario argument to an existing file: an explicit path, or a preset name
    with or without the `.scn` suffix.

    Raises:
        ConfigurationError: If nothing matches.
    """
    path = Path(name_or_path)
    if path.is_file():
        return path
    presets = Path(LoadDirectoriesConfig().scenarios_dir)
    for candidate in (presets / path.name, presets / f"{path.name}.scn"):
        if candidate.is_file():
            return candidate
    raise ConfigurationError(f"scenario not found: {name_or_path}")


def _floats(text: str, count: int, label: str) -> tuple:
    parts = [p for p in text.replace("x", ",").replace(";", ",").split(",") if p.strip()]
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigurationError(f"{label}: cannot parse '{text}'") from exc
    if len(values) != count:
        raise ConfigurationError(f"{label}: expected {count} values, got '{text}'")
    return values


def _grid(text: str, label: str) -> tuple:
    rows, cols = _floats(text, 2, label)
    if rows != int(rows) or cols != int(cols):
        raise ConfigurationError(f"{label}: grid sizes must be integers, got '{text}'")
    return int(rows), int(cols)


def _spacing(text: str, wavelength: float, label: str) -> float:
    value = text.strip().lower().replace(" ", "")
    if value.startswith("lambda"):
        divisor = value[len("lambda"):]
        if divisor == "":
            return wavelength
        if divisor.startswith("/"):
            try:
                return wavelength / float(divisor[1:])
            except ValueError as exc:
                raise ConfigurationError(f"{label}: cannot parse '{text}'") from exc
        raise ConfigurationError(f"{label}: cannot parse '{text}'")
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigurationError(f"{label}: cannot parse '{text}'") from exc


def _enum(enum_cls, text: str, label: str):
    try:
        return enum_cls(text.strip())
    except ValueError as exc:
        allowed = ", ".join(e.value for e in enum_cls)
        raise ConfigurationError(f"{label}: '{text}' is not one of {allowed}") from exc


def parse_scenario(text: str, source: str = "<string>") -> SceneConfig:
    """
    Parses scenario text into a validated `SceneConfig`.

    Raises:
        ConfigurationError: On syntax errors, unknown sections/keys or invalid values.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc
    for section in parser.sections():
        if section not in _ALLOWED:
            raise ConfigurationError(f"{source}: unknown section [{section}]")
        unknown = set(parser[section]) - _ALLOWED[section]
        if unknown:
            raise ConfigurationError(
                f"{source}: unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")

    defaults = SceneConfig()
    values = {}
    model = parser["model"] if parser.has_section("model") else {}
    if "carrier_frequency" in model:
        values["carrier_frequency"] = _floats(model["carrier_frequency"], 1,
                                              "model.carrier_frequency")[0]
    frequency = values.get("carrier_frequency", defaults.carrier_frequency)
    if not frequency > 0:
        raise ConfigurationError(f"{source}: carrier_frequency must be > 0")
    wavelength = SPEED_OF_LIGHT / frequency
    if "propagation_variant" in model:
        values["propagation_variant"] = _enum(PropagationVariant, model["propagation_variant"],
                                              "model.propagation_variant")
    if "aperture_model" in model:
        values["aperture_model"] = _enum(ApertureModel, model["aperture_model"],
                                         "model.aperture_model")
    if "los_enabled" in model:
        try:
            values["los_enabled"] = parser.getboolean("model", "los_enabled")
        except ValueError as exc:
            raise ConfigurationError(f"{source}: model.los_enabled must be a boolean") from exc
    if "noise_power" in model:
        values["noise_power"] = _floats(model["noise_power"], 1, "model.noise_power")[0]
    if "name" in model:
        values["name"] = model["name"].strip()

    for prefix in ("bs", "ris"):
        if not parser.has_section(prefix):
            continue
        sec = parser[prefix]
        if "center" in sec:
            values[f"{prefix}_center"] = _floats(sec["center"], 3, f"{prefix}.center")
        if "normal" in sec:
            values[f"{prefix}_normal"] = _floats(sec["normal"], 3, f"{prefix}.normal")
        if "spacing" in sec:
            values[f"{prefix}_spacing"] = _spacing(sec["spacing"], wavelength, f"{prefix}.spacing")
        if "grid" in sec and "side_length" in sec:
            raise ConfigurationError(f"{source}: [{prefix}] sets both grid and side_length")
        if "grid" in sec:
            values[f"{prefix}_grid"] = _grid(sec["grid"], f"{prefix}.grid")
        elif "side_length" in sec:
            spacing = values.get(f"{prefix}_spacing", wavelength / 2)
            side = _floats(sec["side_length"], 1, f"{prefix}.side_length")[0]
            per_side = grid_from_side_length(side, spacing)
            values[f"{prefix}_grid"] = (per_side, per_side)
    if parser.has_section("ue") and "position" in parser["ue"]:
        values["ue_position"] = _floats(parser["ue"]["position"], 3, "ue.position")

    values.setdefault("name", Path(source).stem)
    return SceneConfig(**values).validate()


def load_scenario(path) -> SceneConfig:
    """
    Loads and validates a scenario file (or shipped preset).

    Raises:
        ConfigurationError: Missing file or schema violation.
    """
    resolved = resolve_scenario_path(path)
    scene = parse_scenario(resolved.read_text(), source=str(resolved))
    logger.info("loaded scenario %s: N_RIS=%d N_BS=%d %.2f GHz LoS=%s", resolved.name,
                scene.n_ris, scene.n_bs, scene.carrier_frequency / 1e9, scene.los_enabled)
    return scene
