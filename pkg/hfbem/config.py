"""Reading sweep configuration files."""
from pathlib import Path
from typing import Any
from typing import Optional

import yaml

from hfbem._exceptions import ConfigurationError
from hfbem.constants import DEFAULT_D_LIST
from hfbem.constants import DEFAULT_K_LIST
from hfbem.constants import DEFAULT_MAX_NODES
from hfbem.constants import DEFAULT_PPW
from hfbem.constants import DEFAULT_REFERENCE_PPW
from hfbem.experiments import GeometrySpec
from hfbem.experiments import SweepConfig
from hfbem.types import ConfigField
from hfbem.types import GeometryKind
from hfbem.types import Method

YAML_SUFFIXES = (".yaml", ".yml")


def _parse_value(text: str, filename: str, lineno: int) -> Any:
    """YAML scalar or flow sequence; a bare `50, 100, 200` is read as a list."""
    if "," in text and not text.startswith(("[", "'", '"')):
        text = f"[{text}]"
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as ex:
        raise ConfigurationError(f"{filename}:{lineno}: cannot parse value '{text}': {ex}") from ex


def parse_key_values(text: str, filename: str = "<config>") -> dict[str, Any]:
    """Parse `key = value` lines; `#` starts a comment and blank lines are skipped."""
    data = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"{filename}:{lineno}: expected 'key = value', got '{raw.strip()}'")
        if not ConfigField.contains(key):
            raise ConfigurationError(f"{filename}:{lineno}: unknown key '{key}'")
        if key in data:
            raise ConfigurationError(f"{filename}:{lineno}: duplicate key '{key}'")
        data[key] = _parse_value(value.strip(), filename, lineno)
    return data


def open_config(filename: str) -> dict[str, Any]:
    """Open the specified configuration file, and return the dictionary."""
    path = Path(filename)
    if not path.exists():
        raise FileNotFoundError(filename)

    with open(filename, "r", encoding="utf-8", newline="\n") as fp:
        text = fp.read()
    if path.suffix.lower() not in YAML_SUFFIXES:
        return parse_key_values(text, filename)

    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{filename}: expected a mapping at the top level")
    unknown = sorted(str(k) for k in data if not ConfigField.contains(str(k)))
    if unknown:
        raise ConfigurationError(f"{filename}: unknown keys {', '.join(unknown)}")
    return data


def _number(data: dict[str, Any], field: ConfigField, default: Optional[float]) -> Optional[float]:
    value = data.get(field.value, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"'{field.value}' must be a number, got {value!r}")
    return float(value)


def _integer(data: dict[str, Any], field: ConfigField, default: Optional[int]) -> Optional[int]:
    value = data.get(field.value, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"'{field.value}' must be an integer, got {value!r}")
    return value


def _numbers(data: dict[str, Any], field: ConfigField, default: tuple) -> tuple[float, ...]:
    value = data.get(field.value, default)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, (list, tuple)) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigurationError(f"'{field.value}' must be a number or a list of numbers, got {value!r}")
    return tuple(value)


def _pair(data: dict[str, Any], field: ConfigField, default: Optional[float]) -> Optional[tuple[float, float]]:
    """A scalar applies to both shadow boundaries; a two-element list gives them separately."""
    value = data.get(field.value, default)
    if value is None:
        return None
    values = _numbers({field.value: value}, field, ())
    if len(values) == 1:
        return (float(values[0]), float(values[0]))
    if len(values) != 2:
        raise ConfigurationError(f"'{field.value}' takes one or two values, got {len(values)}")
    return (float(values[0]), float(values[1]))


def _choice(data: dict[str, Any], field: ConfigField, enum: type, default: Any) -> Any:
    value = data.get(field.value, default)
    try:
        return enum(value)
    except ValueError as ex:
        choices = ", ".join(e.value for e in enum)
        raise ConfigurationError(f"'{field.value}' must be one of {choices}, got {value!r}") from ex


def parse_sweep_config(data: dict[str, Any]) -> SweepConfig:
    """Turn a configuration mapping into a validated SweepConfig."""
    unknown = sorted(str(k) for k in data if not ConfigField.contains(str(k)))
    if unknown:
        raise ConfigurationError(f"unknown configuration keys {', '.join(unknown)}")

    base = GeometrySpec()
    geometry = GeometrySpec(
        kind=_choice(data, ConfigField.GEOMETRY, GeometryKind, base.kind.value),
        radius=_number(data, ConfigField.RADIUS, base.radius),
        semi_a=_number(data, ConfigField.SEMI_A, base.semi_a),
        semi_b=_number(data, ConfigField.SEMI_B, base.semi_b),
        rotation=_number(data, ConfigField.ROTATION, base.rotation),
    )
    incidence = _numbers(data, ConfigField.INCIDENCE, (1.0, 0.0))
    if len(incidence) != 2:
        raise ConfigurationError(f"'incidence' needs two components, got {len(incidence)}")
    degrees = _numbers(data, ConfigField.DEGREES, DEFAULT_D_LIST)
    if not all(float(d).is_integer() for d in degrees):
        raise ConfigurationError(f"'degrees' must be integers, got {list(degrees)}")

    return SweepConfig(
        geometry=geometry,
        incidence=(float(incidence[0]), float(incidence[1])),
        ks=tuple(float(k) for k in _numbers(data, ConfigField.K, DEFAULT_K_LIST)),
        degrees=tuple(int(d) for d in degrees),
        method=_choice(data, ConfigField.METHOD, Method, Method.COV.value),
        m=_integer(data, ConfigField.M, None),
        xi=_pair(data, ConfigField.XI, 1.0),
        zeta=_pair(data, ConfigField.ZETA, 1.0),
        xi_prime=_pair(data, ConfigField.XI_PRIME, None),
        zeta_prime=_pair(data, ConfigField.ZETA_PRIME, None),
        ppw=_number(data, ConfigField.PPW, DEFAULT_PPW),
        reference_ppw=_number(data, ConfigField.REFERENCE_PPW, DEFAULT_REFERENCE_PPW),
        output_dir=str(data.get(ConfigField.OUTPUT_DIR.value, "output")),
        allow_large=bool(data.get(ConfigField.ALLOW_LARGE.value, False)),
        max_nodes=_integer(data, ConfigField.MAX_NODES, DEFAULT_MAX_NODES),
        workers=_integer(data, ConfigField.WORKERS, 1),
    )


def load_sweep_config(filename: str) -> SweepConfig:
    return parse_sweep_config(open_config(filename))
