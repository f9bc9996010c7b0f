"""Closed-form estimates for off-resonant optical manipulation.

All functions take SI arguments. ``alpha_vol`` is the volumetric
polarizability in m**3; it is converted with alpha_SI = 4 pi eps0 alpha_vol,
the convention under which a 200 A^3 particle in a 1 W beam with a 100 um
waist sees a 3.3 neV well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C, EPS0, H, polarizability_si
from .errors import DomainError


@dataclass(frozen=True)
class GaussianBeam:
    power: float
    waist: float
    wavelength: float = 1064e-9
    focus: tuple = (0.0, 0.0, 0.0)
    axis: tuple = (1.0, 0.0, 0.0)
    rayleigh_length: float | None = None

    def __post_init__(self):
        if self.power < 0:
            raise DomainError("power must be non-negative")
        if not (self.waist > 0 and self.wavelength > 0):
            raise DomainError("waist and wavelength must be positive")
        axis = np.asarray(self.axis, dtype=float)
        norm = np.linalg.norm(axis)
        if axis.shape != (3,) or norm == 0:
            raise DomainError("axis must be a non-zero 3-vector")
        object.__setattr__(self, "axis", tuple(axis / norm))
        object.__setattr__(self, "focus", tuple(float(f) for f in self.focus))
        if self.rayleigh_length is None:
            object.__setattr__(self, "rayleigh_length",
                               math.pi * self.waist ** 2 / self.wavelength)

    @property
    def peak_intensity(self):
        return 2.0 * self.power / (math.pi * self.waist ** 2)

    @property
    def photon_energy(self):
        return H * C / self.wavelength


@dataclass(frozen=True)
class LaserPulse:
    energy: float
    duration: float
    waist: float
    wavelength: float = 1064e-9

    def __post_init__(self):
        if not (self.energy > 0 and self.duration > 0):
            raise DomainError("pulse energy and duration must be positive")

    @property
    def power(self):
        return self.energy / self.duration

    @property
    def beam(self):
        return GaussianBeam(self.power, self.waist, self.wavelength)


def dipole_potential_depth(alpha_vol, power, waist):
    """Well depth 2 alpha_SI P / (eps0 c pi w0^2) in joule."""
    if alpha_vol < 0 or power < 0 or not waist > 0:
        raise DomainError("need alpha_vol >= 0, power >= 0, waist > 0")
    return 2.0 * polarizability_si(alpha_vol) * power / (EPS0 * C * math.pi * waist ** 2)


def photons_absorbed(power, sigma_abs, tau, waist, wavelength):
    """Photons absorbed at peak intensity during ``tau``."""
    if power < 0 or sigma_abs < 0 or tau < 0 or not (waist > 0 and wavelength > 0):
        raise DomainError("invalid arguments to photons_absorbed")
    return 2.0 * power * sigma_abs * tau / (math.pi * waist ** 2 * H * C / wavelength)


def stopping_power(e_kin, alpha_vol, waist):
    """Beam power whose dipole well equals ``e_kin``."""
    if e_kin < 0 or not (alpha_vol > 0 and waist > 0):
        raise DomainError("need e_kin >= 0, alpha_vol > 0, waist > 0")
    return e_kin * EPS0 * C * math.pi * waist ** 2 / (2.0 * polarizability_si(alpha_vol))


def pulsed_deceleration(v, U, m):
    """Speed lost climbing a potential hill of height ``U``.

    A molecule that cannot climb the hill is stopped and loses all of ``v``.
    """
    if not (m > 0 and v > 0) or U < 0:
        raise DomainError("need m > 0, v > 0, U >= 0")
    rest = v * v - 2.0 * U / m
    if rest <= 0:
        return v
    return v - math.sqrt(rest)


def transverse_capture_speed(U, m):
    if U < 0 or not m > 0:
        raise DomainError("need U >= 0 and m > 0")
    return math.sqrt(2.0 * U / m)


def transit_photon_dose(power, waist, v, sigma_abs, wavelength):
    """Photons absorbed crossing the waist along a diameter at speed ``v``."""
    if power < 0 or sigma_abs < 0 or not (waist > 0 and v > 0 and wavelength > 0):
        raise DomainError("invalid arguments to transit_photon_dose")
    return sigma_abs * power * math.sqrt(2.0 / math.pi) / (H * C / wavelength * waist * v)
