"""Sublimation enthalpies from temperature ramps via Arrhenius fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .constants import R_GAS
from .errors import DomainError, FitError

DECOMPOSITION_T = 650.0
HEATING_RATE = 0.7 / 60.0  # K/s
RAMP_WINDOW = (540.0, 563.0)

# (molecule, mass in u, enthalpy kJ/mol, error kJ/mol)
REFERENCE_ENTHALPIES = (
    ("perfluoroC60-n9", 6291, 217.0, 15.0),
    ("perfluoroC60-n8", 5672, 227.0, 13.0),
    ("perfluoroC60-n7", 5053, 222.0, 8.0),
    ("perfluoroC60-n6", 4434, 251.0, 16.0),
    ("perfluoroC60-n5", 3815, 220.0, 11.0),
)


@dataclass(frozen=True)
class RampSeries:
    time: np.ndarray
    temperature: np.ndarray
    count_rate: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.time, dtype=float)
        T = np.asarray(self.temperature, dtype=float)
        r = np.asarray(self.count_rate, dtype=float)
        if not (t.shape == T.shape == r.shape) or t.ndim != 1:
            raise ValueError("time, temperature and count_rate must be equal-length 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time must be strictly increasing")
        if np.any(T <= 0) or np.any(T > DECOMPOSITION_T):
            raise ValueError(f"temperatures must lie in (0, {DECOMPOSITION_T:g}] K")
        if np.any(r < 0):
            raise ValueError("count rates must be non-negative")
        object.__setattr__(self, "time", t)
        object.__setattr__(self, "temperature", T)
        object.__setattr__(self, "count_rate", r)

    def __len__(self):
        return self.time.size


@dataclass(frozen=True)
class EnthalpyResult:
    delta_H: float  # kJ/mol
    stderr: float  # kJ/mol
    prefactor_ln: float
    temperature_window: tuple
    n_points: int


def arrhenius_rate(T, delta_H, prefactor):
    """prefactor * exp(-delta_H / (R T)); delta_H in J/mol."""
    T = np.asarray(T, dtype=float)
    if np.any(T <= 0):
        raise DomainError("temperature must be positive")
    out = prefactor * np.exp(-delta_H / (R_GAS * T))
    return out if out.ndim else float(out)


def synthesize_ramp(T0, heating_rate, duration, delta_H, prefactor, noise_rel=0.0,
                    seed=None, *, sample_interval=10.0, noise="gaussian"):
    """Linear temperature ramp with Arrhenius count rates.

    ``noise="gaussian"`` multiplies each rate by ``1 + noise_rel * N(0, 1)``;
    ``noise="poisson"`` draws counts over a dwell of ``sample_interval``
    seconds instead (``noise_rel`` is then ignored).
    """
    T_end = T0 + heating_rate * duration
    if T_end > DECOMPOSITION_T:
        raise DomainError(
            f"ramp to {T_end:.1f} K exceeds decomposition temperature {DECOMPOSITION_T:g} K")
    if duration <= 0 or sample_interval <= 0:
        raise DomainError("duration and sample_interval must be positive")
    n = int(np.floor(duration / sample_interval + 1e-9)) + 1
    n = max(n, 2)
    t = np.linspace(0.0, duration, n)
    T = T0 + heating_rate * t
    rate = arrhenius_rate(T, delta_H, prefactor)
    rng = np.random.default_rng(seed)
    if noise == "gaussian":
        if noise_rel > 0:
            rate = rate * (1.0 + noise_rel * rng.standard_normal(n))
    elif noise == "poisson":
        rate = rng.poisson(rate * sample_interval) / sample_interval
    else:
        raise DomainError(f"unknown noise model {noise!r}")
    return RampSeries(t, T, np.clip(rate, 0.0, None))


def fit_enthalpy(series, min_points=10):
    """Least-squares line through ln(rate) against 1/T.

    Points with non-positive rate are dropped.
    """
    good = series.count_rate > 0
    if np.count_nonzero(good) < min_points:
        raise FitError(f"need at least {min_points} points with positive count rate, "
                       f"got {int(np.count_nonzero(good))}")
    T = series.temperature[good]
    fit = stats.linregress(1.0 / T, np.log(series.count_rate[good]))
    if not np.isfinite(fit.slope):
        raise FitError("Arrhenius fit produced a non-finite slope")
    return EnthalpyResult(
        delta_H=-fit.slope * R_GAS / 1e3,
        stderr=fit.stderr * R_GAS / 1e3,
        prefactor_ln=float(fit.intercept),
        temperature_window=(float(T.min()), float(T.max())),
        n_points=int(T.size),
    )
