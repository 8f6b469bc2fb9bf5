"""Unit-aware parameter parsing for scenario configs.

Config files are INI documents::

    [scenario]
    name = fig3-swap

    [params]
    n = 1
    g_p = 1.1 MHz          # angular: Hz-like units mean 2*pi*f
    heating = 8100 1/s

    [solver]
    step = 0.1 ns

Values are normalized to SI at load. Angular-frequency parameters accept
``rad/s`` (taken as is) or any frequency unit (multiplied by 2*pi).
"""

import configparser
import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigError

KINDS = {
    "angular": "rad/s",
    "frequency": "Hz",
    "rate": "1/s",
    "time": "s",
    "length": "m",
    "volume": "m^3",
    "capacitance": "F",
    "voltage": "V",
    "impedance": "ohm",
    "current": "A",
    "angle": "rad",
    "field": "T",
    "psd": "T^2/Hz",
    "temperature": "K",
    "float": "1",
    "int": "1",
    "str": "",
    "bool": "",
}

_PINT_UNITS = {
    "frequency": "Hz", "rate": "1/s", "time": "s", "length": "m", "volume": "m**3",
    "capacitance": "F", "voltage": "V", "impedance": "ohm", "current": "A", "angle": "rad",
    "field": "T", "psd": "T**2/Hz", "temperature": "K",
}


@lru_cache(maxsize=1)
def _ureg():
    import pint

    return pint.UnitRegistry()


@dataclass(frozen=True)
class Param:
    default: object
    kind: str = "float"
    doc: str = ""
    is_list: bool = False

    @property
    def unit(self):
        return KINDS[self.kind]


def parse_scalar(text, kind, field="value"):
    """Parse one value of ``kind`` from text, returning SI."""
    text = str(text).strip()
    if kind == "str":
        return text
    if kind == "bool":
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{field}: expected a boolean, got {text!r}")
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{field}: expected an integer, got {text!r}") from None
    if kind == "float":
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{field}: expected a number, got {text!r}") from None
    if kind == "angular":
        return _parse_angular(text, field)
    return _to_si(text, _PINT_UNITS[kind], field)


def _to_si(text, unit, field):
    import pint

    ureg = _ureg()
    try:
        q = ureg.Quantity(text)
    except (pint.errors.PintError, ValueError, AttributeError, TypeError) as exc:
        raise ConfigError(f"{field}: cannot parse {text!r} ({exc})") from None
    if not isinstance(q, ureg.Quantity):
        return float(q)
    if q.unitless:
        return float(q.magnitude)
    try:
        return float(q.to(unit).magnitude)
    except pint.errors.DimensionalityError:
        raise ConfigError(f"{field}: {text!r} is not convertible to {unit}") from None


_TWO_PI_PREFIX = re.compile(r"^\s*2\s*\*?\s*pi\s*[*x×]?\s*", re.IGNORECASE)


def _parse_angular(text, field):
    """Angular frequency in rad/s.

    ``rad/s`` values are taken as is; plain frequency units are multiplied
    by 2*pi, as is an explicit ``2pi*`` prefix on a ``rad/s`` value.
    """
    explicit = bool(_TWO_PI_PREFIX.match(text))
    body = _TWO_PI_PREFIX.sub("", text)
    if "rad" in body:
        value = _to_si(body, "rad/s", field)
        return 2 * math.pi * value if explicit else value
    return 2 * math.pi * _to_si(body, "Hz", field)


def parse_value(text, param, field="value"):
    if param.is_list:
        parts = [p for p in re.split(r"[,;]", str(text)) if p.strip()]
        return [parse_scalar(p, param.kind, field) for p in parts]
    return parse_scalar(text, param.kind, field)


@dataclass
class ConfigFile:
    name: str
    params: dict
    solver: dict


def _line_of(lines, section, key):
    current = None
    for i, line in enumerate(lines, start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and re.match(rf"^{re.escape(key)}\s*[=:]", s):
            return i
    return None


def _strip_comment(value):
    return re.split(r"\s[#;]", value, maxsplit=1)[0].strip()


def load_config(path, schema_lookup):
    """Read ``path``; ``schema_lookup(name)`` returns the (params, solver) schemas.

    Raises :class:`ConfigError` naming the file, line and field on any problem.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    lines = text.splitlines()
    if not parser.has_option("scenario", "name"):
        raise ConfigError(f"{path}: missing [scenario] name")
    name = _strip_comment(parser.get("scenario", "name"))
    param_schema, solver_schema = schema_lookup(name)
    out = {}
    for section, schema in (("params", param_schema), ("solver", solver_schema)):
        values = {}
        if parser.has_section(section):
            for key, raw in parser.items(section):
                line = _line_of(lines, section, key)
                where = f"{path}:{line} [{section}] {key}"
                if key not in schema:
                    raise ConfigError(f"{where}: unknown field")
                values[key] = parse_value(_strip_comment(raw), schema[key], where)
        out[section] = values
    return ConfigFile(name, out["params"], out["solver"])
