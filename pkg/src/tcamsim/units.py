"""Unit-suffixed physical quantities for config files and reports.

Every physical value in a config carries an explicit unit suffix ("20aF",
"2ns", "500mV", "1kohm"); bare numbers are rejected for physical fields
because the model mixes attofarad-to-picojoule scales and silent unit bugs
are the main hazard.
"""

from __future__ import annotations

import re


class UnitError(ValueError):
    pass


_PREFIXES = {
    "a": 1e-18, "f": 1e-15, "p": 1e-12, "n": 1e-9,
    "u": 1e-6, "µ": 1e-6, "m": 1e-3, "": 1.0,
    "k": 1e3, "M": 1e6, "G": 1e9,
}

# Canonical unit -> accepted spellings, longest matched first.
_UNITS = {
    "V": ("V",),
    "F": ("F",),
    "s": ("s", "sec"),
    "A": ("A",),
    "J": ("J",),
    "W": ("W",),
    "ohm": ("ohm", "Ohm", "OHM", "Ω"),
}

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


def parse_quantity(text: str, expect: str | None = None) -> float:
    """Parse a number with an SI prefix and unit suffix into base SI units.

    expect names the required unit ("V", "F", "s", "A", "J", "W", "ohm");
    a missing or mismatched unit raises UnitError.
    """
    if not isinstance(text, str):
        raise UnitError(f"physical quantity must be a unit-suffixed string, got {text!r}")
    raw = text.strip()
    m = _NUMBER.match(raw)
    if not m:
        raise UnitError(f"cannot parse number in {text!r}")
    value = float(m.group(0))
    suffix = raw[m.end():].strip()
    if not suffix:
        raise UnitError(f"{text!r} has no unit suffix; write e.g. '2ns' or '500mV'")

    for unit, spellings in _UNITS.items():
        for spelling in sorted(spellings, key=len, reverse=True):
            if suffix.endswith(spelling):
                prefix = suffix[:-len(spelling)]
                if prefix in _PREFIXES:
                    if expect is not None and unit != expect:
                        raise UnitError(f"{text!r} has unit {unit}, expected {expect}")
                    return value * _PREFIXES[prefix]
    raise UnitError(f"unrecognized unit suffix {suffix!r} in {text!r}")


def format_quantity(value: float, unit: str) -> str:
    """Engineering-notation rendering that parse_quantity reads back losslessly."""
    if value == 0:
        return f"0{unit}"
    magnitude = abs(value)
    best_prefix, best_scale = "", 1.0
    for prefix, scale in _PREFIXES.items():
        if prefix == "µ":  # prefer the ASCII spelling on output
            continue
        if 1.0 <= magnitude / scale < 1000.0:
            best_prefix, best_scale = prefix, scale
            break
    return f"{value / best_scale:.17g}{best_prefix}{unit}"
