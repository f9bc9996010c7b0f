"""Helical velocity selector: empirical calibration and band-pass transmission."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError
from .source import floating_mb_pdf

SHAPES = ("triangle", "gaussian")


@dataclass(frozen=True)
class SelectorParams:
    rotor_freq: float = 0.0
    calibration: float = 1.08  # (m/s) per Hz
    fwhm_rel: float = 0.05
    freq_stability: float = 1e-3
    shape: str = "triangle"
    jitter: bool = False

    def __post_init__(self):
        if not self.calibration > 0:
            raise DomainError("calibration must be positive")
        if not 0 < self.fwhm_rel < 1:
            raise DomainError(f"fwhm_rel must lie in (0, 1), got {self.fwhm_rel!r}")
        if self.rotor_freq < 0:
            raise DomainError("rotor_freq must be non-negative")
        if self.freq_stability < 0:
            raise DomainError("freq_stability must be non-negative")
        if self.shape not in SHAPES:
            raise DomainError(f"shape must be one of {SHAPES}, got {self.shape!r}")


def selector_setpoint(p):
    """Mean transmitted velocity in m/s."""
    return p.calibration * p.rotor_freq


def _shape(v, center, fwhm, shape):
    if shape == "triangle":
        # peak 1, half maximum at +-fwhm/2, zero beyond +-fwhm
        return np.clip(1.0 - np.abs(v - center) / fwhm, 0.0, None)
    return np.exp(-4.0 * math.log(2.0) * ((v - center) / fwhm) ** 2)


def transmission(v, p):
    """Transmission probability of a molecule with speed ``v``."""
    if not p.rotor_freq > 0:
        raise DomainError("transmission is undefined for a stopped rotor")
    center = selector_setpoint(p)
    out = _shape(np.asarray(v, dtype=float), center, p.fwhm_rel * center, p.shape)
    return out if out.ndim else float(out)


def apply_selector(samples, p, seed=None, rng=None):
    """Keep each sample with probability ``transmission(v)``.

    With ``p.jitter`` the setpoint of every shot is blurred by a Gaussian of
    relative width ``p.freq_stability``.
    """
    if not p.rotor_freq > 0:
        raise DomainError("rotor_freq must be positive to select")
    rng = np.random.default_rng(seed) if rng is None else rng
    samples = np.asarray(samples, dtype=float)
    center = selector_setpoint(p)
    if p.jitter:
        center = center * (1.0 + p.freq_stability * rng.standard_normal(samples.size))
    prob = _shape(samples, center, p.fwhm_rel * center, p.shape)
    keep = rng.uniform(size=samples.size) < prob
    return samples[keep]


def transmitted_fraction(source_params, p):
    """Expected kept fraction for a floating Maxwell-Boltzmann source."""
    center = selector_setpoint(p)
    half = p.fwhm_rel * center * (1.0 if p.shape == "triangle" else 3.0)
    lo, hi = max(center - half, 0.0), center + half
    val, _ = integrate.quad(lambda v: floating_mb_pdf(v, source_params) * transmission(v, p),
                            lo, hi, points=[center], limit=200)
    return val
