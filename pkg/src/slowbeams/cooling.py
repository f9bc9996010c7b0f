"""Collective cavity cooling of a molecular ensemble by a transverse pump.

Semiclassical single-mode model: a classical field amplitude ``a`` coupled to
point particles moving along the cavity axis. The pump scatters light into
the mode with amplitude proportional to sum(cos(k x)); once the particles
bunch on one sublattice the scattering becomes coherent and the cavity loss
carries kinetic energy away.

The field equation is linear in ``a`` at fixed positions, so it is advanced
exactly over each half step; particles use velocity Verlet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import AMU, C, EPS0, HBAR, get_molecule
from .errors import DomainError, IntegrationError, StepSizeError, ThresholdNotFound

WAVELENGTH = 1064e-9
CAVITY_LENGTH = 1e-2
THRESHOLD_POWER = 1e3  # pump power mapped onto the self-organization threshold
TRANSIT_SPAN = 2.0  # envelope runs from -span to +span waists around the pump


@dataclass(frozen=True)
class CavityPump:
    kappa: float = 2 * math.pi * 1e6
    detuning: float | None = None  # defaults to -kappa
    wavenumber: float = 2 * math.pi / WAVELENGTH
    U0: float = 0.0
    eta: float = 0.0
    waist: float = 400e-6
    rescale: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if not self.wavenumber > 0:
            raise DomainError("wavenumber must be positive")
        if not self.rescale > 0:
            raise DomainError("rescale must be positive")
        if not self.waist > 0:
            raise DomainError("waist must be positive")
        if self.detuning is None:
            object.__setattr__(self, "detuning", -self.kappa)

    @property
    def shift(self):
        """Per-particle dispersive shift including the rescale factor."""
        return self.U0 * self.rescale

    @property
    def pump_rate(self):
        """Per-particle pump rate including the rescale factor."""
        return self.eta * self.rescale


@dataclass(frozen=True)
class CoolingEnsemble:
    x: np.ndarray
    v: np.ndarray
    mass: float = 5000 * AMU
    v_mean: float = 10.0
    v_spread: float = 1.5
    seed: int | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise DomainError("x and v must be 1-d arrays of equal length")
        if x.size < 2:
            raise DomainError("need at least two particles")
        if not self.mass > 0:
            raise DomainError("mass must be positive")
        if not (self.v_mean > 0 and self.v_spread > 0):
            raise DomainError("v_mean and v_spread must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.x.size

    @classmethod
    def sample(cls, n=1000, mass=5000 * AMU, v_mean=10.0, v_spread=1.5, seed=None,
               *, length=CAVITY_LENGTH, axial_drift=0.0):
        """Uniform positions over ``length``; axial velocities N(axial_drift, v_spread).

        ``v_mean`` is the forward speed through the pump, which sets the
        transit time, not the axial motion.
        """
        if n < 2:
            raise DomainError("need at least two particles")
        rng = np.random.default_rng(seed)
        x = rng.uniform(0.0, length, n)
        v = rng.normal(axial_drift, v_spread, n)
        return cls(x, v, mass, v_mean, v_spread, seed)

    def mean_kinetic_energy(self):
        return 0.5 * self.mass * float(np.mean(self.v ** 2))


@dataclass
class CoolingTrace:
    time: np.ndarray
    mean_KE_axis: np.ndarray
    photon_number: np.ndarray
    order_param: np.ndarray
    envelope: np.ndarray
    initial_v: np.ndarray = field(repr=False)
    final_x: np.ndarray = field(repr=False)
    final_v: np.ndarray = field(repr=False)
    dt: float = 0.0
    transit: bool = True

    def __post_init__(self):
        n = len(self.time)
        for name in ("mean_KE_axis", "photon_number", "order_param", "envelope"):
            if len(getattr(self, name)) != n:
                raise ValueError("trace columns must have equal length")

    @property
    def ke_ratio(self):
        return float(self.mean_KE_axis[-1] / self.mean_KE_axis[0])

    def late_order(self, fraction=0.2, min_envelope=0.5):
        """Organization reached by the end of the pumping.

        For constant coupling this is the mean order parameter over the last
        ``fraction`` of the run. During a transit the lattice dissolves again
        as the molecules leave the pump, so the peak over the samples with
        envelope >= ``min_envelope`` is used instead.
        """
        if self.transit:
            mask = self.envelope >= min_envelope
            return float(np.max(self.order_param[mask] if mask.any() else self.order_param))
        k = max(1, int(round(fraction * self.order_param.size)))
        return float(np.mean(self.order_param[-k:]))


def mode_volume(waist, length=CAVITY_LENGTH):
    return math.pi * waist ** 2 * length / 4.0


def calibrate_pump_rate(ensemble, pump):
    """Per-particle pump rate at the mean-field self-organization threshold.

    Bunching sets in when the lattice depth built by coherent scattering
    matches the thermal kinetic energy, N hbar eta^2 |D| / (kappa^2 + D^2)
    = m <dv^2>, with D the detuning shifted by the uniform-density dispersive
    term. ``pump.rescale`` is not included.
    """
    n = ensemble.n
    d_eff = pump.detuning - 0.5 * n * pump.shift
    if d_eff == 0:
        raise DomainError("effective detuning is zero; no dispersive lattice forms")
    var = ensemble.v_spread ** 2
    return math.sqrt((pump.kappa ** 2 + d_eff ** 2) * ensemble.mass * var
                     / (n * HBAR * abs(d_eff)))


def coupling_from_power(power, pump, ensemble, alpha_vol=None, *,
                        threshold_power=THRESHOLD_POWER, length=CAVITY_LENGTH):
    """Return (U0, eta) in rad/s for pump ``power``.

    U0 follows from the polarizability and the mode volume; eta is scaled as
    sqrt(power) from the threshold calibration of ``ensemble``.
    """
    if power < 0:
        raise DomainError("power must be non-negative")
    if alpha_vol is None:
        alpha_vol = get_molecule("perfluoroC60-n7").alpha_vol
    omega = C * pump.wavenumber
    alpha_si = 4.0 * math.pi * EPS0 * alpha_vol
    u0 = -alpha_si * omega / (2.0 * EPS0 * mode_volume(pump.waist, length))
    probe = replace(pump, U0=u0)
    eta = calibrate_pump_rate(ensemble, probe) * math.sqrt(power / threshold_power)
    return u0, eta


def pump_at_power(power, pump, ensemble, **kwargs):
    u0, eta = coupling_from_power(power, pump, ensemble, **kwargs)
    return replace(pump, U0=u0, eta=eta)


def order_parameter(x, k):
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise DomainError("need at least one position")
    return min(1.0, abs(float(np.sum(np.cos(k * x)))) / x.size)


def steady_state_field(x, p):
    kx = p.wavenumber * np.asarray(x, dtype=float)
    c = np.cos(kx)
    d_eff = p.detuning - p.shift * float(np.sum(c * c))
    return 1j * p.pump_rate * float(np.sum(c)) / (p.kappa - 1j * d_eff)


def transit_envelope(t, v_forward, waist, span=TRANSIT_SPAN):
    """Pump amplitude seen by a molecule crossing a Gaussian pump at ``v_forward``."""
    return np.exp(-((v_forward * np.asarray(t) - span * waist) / waist) ** 2)


def transit_time(v_forward, waist, span=TRANSIT_SPAN):
    return 2.0 * span * waist / v_forward


def max_stable_step(ensemble, p):
    """Largest step resolving 1/kappa, the Doppler phase and the lattice period."""
    k = p.wavenumber
    vmax = max(float(np.max(np.abs(ensemble.v))), ensemble.v_spread)
    d_eff = p.detuning - 0.5 * ensemble.n * p.shift
    depth = 2.0 * HBAR * p.pump_rate ** 2 * ensemble.n / math.hypot(p.kappa, d_eff)
    limits = [1.0 / p.kappa, 0.2 / (k * vmax)]
    if depth > 0:
        limits.append(0.2 / (k * math.sqrt(depth / ensemble.mass)))
    return min(limits)


def _advance_field(a, kx, p, eta, u0, h):
    c = np.cos(kx)
    s1 = float(np.sum(c))
    s2 = float(np.sum(c * c))
    lin = 1j * (p.detuning - u0 * s2) - p.kappa
    ex = np.exp(lin * h)
    return ex * a + (ex - 1.0) / lin * (1j * eta * s1)


def _force(kx, a, eta, u0, k):
    return HBAR * k * (u0 * abs(a) ** 2 * np.sin(2.0 * kx) - eta * 2.0 * a.real * np.sin(kx))


def evolve(e, p, t_end=None, dt=None, *, transit=True, a0=0j, n_records=400):
    """Integrate particles and cavity field; returns a :class:`CoolingTrace`.

    With ``transit`` the pump amplitude follows the Gaussian envelope seen by
    molecules crossing the pump waist at ``e.v_mean``; the default ``t_end``
    is then the full crossing. Without it the coupling is constant and
    ``t_end`` is required.
    """
    k = p.wavenumber
    if t_end is None:
        if not transit:
            raise DomainError("t_end is required without a transit envelope")
        t_end = transit_time(e.v_mean, p.waist)
    dt_max = max_stable_step(e, p)
    if dt is None:
        dt = dt_max
    if not (dt > 0 and t_end > dt):
        raise DomainError("need dt > 0 and t_end > dt")
    if dt > dt_max * (1 + 1e-12):
        raise StepSizeError(
            f"dt = {dt:.3g} s does not resolve the cavity decay and lattice motion; "
            f"use dt <= {dt_max:.3g} s", suggested_dt=dt_max)
    nsteps = int(math.ceil(t_end / dt))
    dt = t_end / nsteps
    stride = max(1, nsteps // n_records)

    def envelope(t):
        if not transit:
            return 1.0
        return float(transit_envelope(t, e.v_mean, p.waist))

    m = e.mass
    x = e.x.copy()
    v = e.v.copy()
    a = complex(a0)
    eta0, u00 = p.pump_rate, p.shift
    env = envelope(0.0)
    force = _force(k * x, a, eta0 * env, u00 * env * env, k)
    rows = []

    def record(t, env):
        rows.append((t, 0.5 * m * float(np.mean(v * v)), abs(a) ** 2,
                     order_parameter(x, k), env))

    record(0.0, env)
    t = 0.0
    for step in range(1, nsteps + 1):
        v += 0.5 * dt * force / m
        a = _advance_field(a, k * x, p, eta0 * env, u00 * env * env, 0.5 * dt)
        x += dt * v
        t = step * dt
        env = envelope(t)
        kx = k * x
        a = _advance_field(a, kx, p, eta0 * env, u00 * env * env, 0.5 * dt)
        force = _force(kx, a, eta0 * env, u00 * env * env, k)
        v += 0.5 * dt * force / m
        if step % stride == 0 or step == nsteps:
            if not (np.isfinite(a.real) and np.isfinite(a.imag) and np.all(np.isfinite(v))):
                raise IntegrationError(f"non-finite state at t = {t:.6g} s (step {step})",
                                       step=step)
            record(t, env)
    cols = np.array(rows)
    return CoolingTrace(cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3], cols[:, 4],
                        initial_v=e.v.copy(), final_x=x, final_v=v, dt=dt,
                        transit=transit)


@dataclass
class ThresholdScan:
    powers: np.ndarray
    late_order: np.ndarray
    estimate: float
    bracket: tuple
    traces: list = field(repr=False)


def detect_threshold(powers, e, p, t_end=None, *, transit=True, dt=None, level=0.5,
                     alpha_vol=None):
    """Smallest scanned power whose late-time order parameter exceeds ``level``.

    ``p`` is a template; its U0 and eta are replaced by the calibrated
    coupling at each power. The bracket is (largest power below the crossing,
    crossing power).
    """
    powers = np.sort(np.asarray(powers, dtype=float))
    if powers.size < 3:
        raise DomainError("need at least three powers spanning the threshold")
    traces = []
    late = []
    for power in powers:
        pump = pump_at_power(power, p, e, alpha_vol=alpha_vol)
        if t_end is None and not transit:
            raise DomainError("t_end is required without a transit envelope")
        tr = evolve(e, pump, t_end, dt, transit=transit)
        traces.append(tr)
        late.append(tr.late_order())
    late = np.array(late)
    above = np.flatnonzero(late > level)
    if above.size == 0:
        raise ThresholdNotFound(
            f"threshold above scan range (max late-time order {late.max():.2f} "
            f"at {powers[-1]:.3g} W)")
    i = int(above[0])
    lower = float(powers[i - 1]) if i > 0 else 0.0
    return ThresholdScan(powers, late, float(powers[i]), (lower, float(powers[i])), traces)
