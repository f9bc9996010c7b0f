"""Parse command-line quantities such as ``100um``, ``15MW`` or ``0.033meV``."""
from __future__ import annotations

import argparse
import re

from .constants import AMU, EV

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")

UNITS = {
    "length": {"": 1.0, "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "power": {"": 1.0, "W": 1.0, "mW": 1e-3, "kW": 1e3, "MW": 1e6, "GW": 1e9},
    "time": {"": 1.0, "s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12,
             "fs": 1e-15, "min": 60.0},
    "energy": {"": 1.0, "J": 1.0, "mJ": 1e-3, "eV": EV, "meV": 1e-3 * EV, "ueV": 1e-6 * EV,
               "µeV": 1e-6 * EV, "neV": 1e-9 * EV},
    "mass": {"": 1.0, "kg": 1.0, "amu": AMU, "u": AMU, "Da": AMU},
    "volume": {"": 1.0, "m3": 1.0, "A3": 1e-30, "Å3": 1e-30, "cm3": 1e-6},
    "area": {"": 1.0, "m2": 1.0, "cm2": 1e-4},
    "speed": {"": 1.0, "m/s": 1.0, "mps": 1.0},
    "temperature": {"": 1.0, "K": 1.0},
    "frequency": {"": 1.0, "Hz": 1.0, "kHz": 1e3, "MHz": 1e6},
}


def parse_quantity(text, kind):
    """Return the SI value of ``text``; a bare number is taken as SI already."""
    match = _NUMBER.match(str(text))
    if not match:
        raise ValueError(f"cannot read a number from {text!r}")
    value, unit = match.groups()
    table = UNITS[kind]
    if unit not in table:
        known = ", ".join(u for u in table if u)
        raise ValueError(f"unknown {kind} unit {unit!r} in {text!r} (known: {known})")
    return float(value) * table[unit]


def quantity(kind):
    """argparse ``type=`` callable for a quantity of the given kind."""
    def convert(text):
        try:
            return parse_quantity(text, kind)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    convert.__name__ = kind
    return convert
