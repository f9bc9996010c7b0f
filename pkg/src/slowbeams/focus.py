"""Trajectories of molecules through focused traveling-wave light fields.

Coordinates: the molecular beam leaves a square source at
``z = -source_distance`` and travels along +z; the light fields are focused
at the origin with their propagation axes perpendicular to z. Outside a slab
of a few waists around the foci the dipole force is negligible, so particles
are moved ballistically up to the slab, integrated with velocity Verlet inside
it and moved ballistically again to the detector plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .constants import G_ACC
from .errors import DomainError, IntegrationError
from .optics import GaussianBeam, dipole_potential_depth


@dataclass(frozen=True)
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.position, dtype=float).reshape(3)
        v = np.asarray(self.velocity, dtype=float).reshape(3)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise DomainError("particle state must be finite")
        object.__setattr__(self, "position", r)
        object.__setattr__(self, "velocity", v)


@dataclass(frozen=True)
class EnsembleSpec:
    n_particles: int = 10_000
    source_side: float = 50e-6
    source_distance: float = 3e-3
    v_mean: float = 50.0
    v_spread: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_particles < 1:
            raise DomainError("n_particles must be at least 1")
        for name in ("source_side", "source_distance", "v_mean", "v_spread"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.v_spread >= self.v_mean:
            raise DomainError("v_spread must be smaller than v_mean")


@dataclass(frozen=True)
class DetectorSpec:
    distance: float = 0.5  # from the source exit, along the beam
    half_width: float = 1e-3  # square aperture

    def __post_init__(self):
        if not (self.distance > 0 and self.half_width > 0):
            raise DomainError("detector distance and half_width must be positive")


def _as_beams(beams):
    if beams is None:
        return ()
    if isinstance(beams, GaussianBeam):
        return (beams,)
    return tuple(beams)


def _beam_geometry(pos, beam):
    rel = pos - np.asarray(beam.focus)
    axis = np.asarray(beam.axis)
    x = rel @ axis
    perp = rel - x[..., None] * axis
    rho2 = np.einsum("...i,...i->...", perp, perp)
    w2 = beam.waist ** 2 * (1.0 + (x / beam.rayleigh_length) ** 2)
    return x, perp, rho2, w2, axis


def beam_intensity(pos, beam):
    """Traveling-wave intensity of a Gaussian beam at ``pos`` (W/m^2)."""
    pos = np.asarray(pos, dtype=float)
    _, _, rho2, w2, _ = _beam_geometry(pos, beam)
    return 2.0 * beam.power / (math.pi * w2) * np.exp(-2.0 * rho2 / w2)


def gaussian_field(pos, beam, alpha_vol):
    """Potential energy (J) and force (N) of one beam at ``pos``.

    ``pos`` may be a single 3-vector or an (n, 3) array.
    """
    pos = np.asarray(pos, dtype=float)
    u0 = dipole_potential_depth(alpha_vol, beam.power, beam.waist)
    x, perp, rho2, w2, axis = _beam_geometry(pos, beam)
    w02 = beam.waist ** 2
    U = -u0 * (w02 / w2) * np.exp(-2.0 * rho2 / w2)
    dw2_dx = 2.0 * w02 * x / beam.rayleigh_length ** 2
    # grad U = U * grad ln|U|
    along = (-dw2_dx / w2 + 2.0 * rho2 * dw2_dx / w2 ** 2)
    grad = U[..., None] * (-4.0 * perp / w2[..., None] + along[..., None] * axis)
    return U, -grad


def total_field(pos, beams, alpha_vol):
    pos = np.asarray(pos, dtype=float)
    U = np.zeros(pos.shape[:-1])
    F = np.zeros(pos.shape)
    for beam in _as_beams(beams):
        if beam.power == 0:
            continue
        u, f = gaussian_field(pos, beam, alpha_vol)
        U = U + u
        F = F + f
    return U, F


def _dose_rate(pos, beams, sigma_abs):
    rate = np.zeros(pos.shape[:-1])
    for beam in _as_beams(beams):
        if beam.power == 0 or sigma_abs == 0:
            continue
        rate = rate + sigma_abs * beam_intensity(pos, beam) / beam.photon_energy
    return rate


@dataclass
class Trajectory:
    t: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    potential: np.ndarray
    photon_dose: np.ndarray
    mass: float
    gravity: bool = False

    def energy(self):
        """Total mechanical energy at every recorded sample."""
        e = 0.5 * self.mass * np.sum(self.velocity ** 2, axis=-1) + self.potential
        if self.gravity:
            e = e + self.mass * G_ACC * self.position[..., 2]
        return e


def _verlet(r, v, acc, force_fn, dt, mass, gravity):
    v = v + 0.5 * dt * acc
    r = r + dt * v
    _, f = force_fn(r)
    acc = f / mass
    if gravity:
        acc[..., 2] -= G_ACC
    v = v + 0.5 * dt * acc
    return r, v, acc


def integrate_trajectory(s0, beams, molecule, dt, t_end, *, gravity=False, record_every=1):
    """Velocity-Verlet trajectory of one molecule through ``beams``."""
    if not dt > 0 or not t_end > dt:
        raise DomainError("need dt > 0 and t_end > dt")
    beams = _as_beams(beams)
    m = molecule.mass
    alpha = molecule.alpha_vol

    def force_fn(r):
        return total_field(r, beams, alpha)

    r = s0.position.copy()
    v = s0.velocity.copy()
    U, f = force_fn(r)
    acc = f / m
    if gravity:
        acc[2] -= G_ACC
    nsteps = int(round(t_end / dt))
    nrec = nsteps // record_every + 1
    ts = np.empty(nrec)
    rs = np.empty((nrec, 3))
    vs = np.empty((nrec, 3))
    Us = np.empty(nrec)
    doses = np.empty(nrec)
    dose = 0.0
    rate = float(_dose_rate(r, beams, molecule.sigma_abs))
    ts[0], rs[0], vs[0], Us[0], doses[0] = 0.0, r, v, U, 0.0
    k = 1
    for step in range(1, nsteps + 1):
        r, v, acc = _verlet(r, v, acc, force_fn, dt, m, gravity)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise IntegrationError(f"non-finite state at step {step}", step=step)
        new_rate = float(_dose_rate(r, beams, molecule.sigma_abs))
        dose += 0.5 * dt * (rate + new_rate)
        rate = new_rate
        if step % record_every == 0:
            ts[k] = step * dt
            rs[k] = r
            vs[k] = v
            Us[k] = total_field(r, beams, alpha)[0]
            doses[k] = dose
            k += 1
    return Trajectory(ts[:k], rs[:k], vs[:k], Us[:k], doses[:k], m, gravity)


def _time_to_plane(z, vz, z_plane, gravity):
    """Flight time from height ``z`` to the plane ``z_plane``; nan if never reached."""
    dz = z_plane - z
    if not gravity:
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(vz > 0, dz / vz, np.nan)
        return t
    disc = vz * vz - 2.0 * G_ACC * dz
    with np.errstate(invalid="ignore"):
        t = (vz - np.sqrt(disc)) / G_ACC
    return np.where(disc >= 0, t, np.nan)


def _ballistic(r, v, t, gravity):
    r = r + v * t[:, None]
    v = v.copy()
    if gravity:
        r[:, 2] -= 0.5 * G_ACC * t * t
        v[:, 2] -= G_ACC * t
    return r, v


@dataclass
class EnsembleResult:
    spec: EnsembleSpec
    detector: DetectorSpec
    powers: tuple
    hit: np.ndarray
    final_velocity: np.ndarray
    detector_position: np.ndarray
    photon_dose: np.ndarray
    trajectories: dict = field(default_factory=dict)

    @property
    def n_hits(self):
        return int(np.count_nonzero(self.hit))

    @property
    def hit_fraction(self):
        return self.n_hits / self.spec.n_particles

    def transverse_histogram(self, component=0, bin_width=0.05, vmax=2.0):
        edges = np.arange(-vmax, vmax + 0.5 * bin_width, bin_width)
        counts, _ = np.histogram(self.final_velocity[:, component], bins=edges)
        return edges, counts

    def transverse_width(self, component=0):
        return float(np.std(self.final_velocity[:, component]))

    def dose_percentiles(self, q=(50, 90, 99)):
        return np.percentile(self.photon_dose, q)


def initial_states(spec):
    rng = np.random.default_rng(spec.seed)
    n = spec.n_particles
    half = 0.5 * spec.source_side
    r = np.empty((n, 3))
    v = np.empty((n, 3))
    r[:, 0] = rng.uniform(-half, half, n)
    r[:, 1] = rng.uniform(-half, half, n)
    r[:, 2] = -spec.source_distance
    v[:, 0] = rng.uniform(-spec.v_spread, spec.v_spread, n)
    v[:, 1] = rng.uniform(-spec.v_spread, spec.v_spread, n)
    v[:, 2] = spec.v_mean + rng.uniform(-spec.v_spread, spec.v_spread, n)
    return r, v


def simulate_ensemble(spec, beams, molecule, detector, *, dt=1e-8, gravity=False,
                      cutoff=6.0, n_record=20, record_every=10):
    """Fly ``spec.n_particles`` molecules from the source to the detector.

    ``cutoff`` is the half-thickness of the integrated slab in units of the
    largest beam waist. The first ``n_record`` trajectories are kept,
    decimated by ``record_every`` steps, in ``result.trajectories``.
    """
    beams = tuple(b for b in _as_beams(beams) if b.power > 0)
    for b in beams:
        if abs(b.axis[2]) > 1e-9:
            raise DomainError("beam axes must be perpendicular to the molecular beam (z)")
    m = molecule.mass
    alpha = molecule.alpha_vol
    r, v = initial_states(spec)
    n = spec.n_particles
    n_record = min(n_record, n)
    t_clock = np.zeros(n)
    dose = np.zeros(n)
    z_det = detector.distance - spec.source_distance
    records = {i: [np.concatenate([[0.0], r[i], v[i]])] for i in range(n_record)}
    alive = np.ones(n, dtype=bool)

    if beams:
        R = cutoff * max(b.waist for b in beams)
        z_in = min(b.focus[2] for b in beams) - R
        z_out = max(b.focus[2] for b in beams) + R
        if z_in <= -spec.source_distance:
            raise DomainError("source lies inside the field region; move it or reduce cutoff")
        t_in = _time_to_plane(r[:, 2], v[:, 2], z_in, gravity)
        alive &= np.isfinite(t_in)
        t_in = np.where(alive, t_in, 0.0)
        r, v = _ballistic(r, v, t_in, gravity)
        t_clock += t_in
        for i in range(n_record):
            records[i].append(np.concatenate([[t_clock[i]], r[i], v[i]]))

        def force_fn(pos):
            return total_field(pos, beams, alpha)

        _, f = force_fn(r)
        acc = f / m
        if gravity:
            acc[:, 2] -= G_ACC
        rate = _dose_rate(r, beams, molecule.sigma_abs)
        vz_min = max(float(np.min(v[alive, 2])) if alive.any() else spec.v_mean, 1e-3)
        max_steps = int(10 * (z_out - z_in) / (vz_min * dt)) + 100
        step = 0
        while np.any(alive & (r[:, 2] < z_out)):
            step += 1
            if step > max_steps:
                raise IntegrationError("particles failed to leave the field region", step=step)
            r, v, acc = _verlet(r, v, acc, force_fn, dt, m, gravity)
            bad = ~(np.all(np.isfinite(r), axis=1) & np.all(np.isfinite(v), axis=1))
            if np.any(bad):
                idx = int(np.flatnonzero(bad)[0])
                raise IntegrationError(f"non-finite state for particle {idx} at step {step}",
                                       step=step, particle=idx)
            new_rate = _dose_rate(r, beams, molecule.sigma_abs)
            dose += 0.5 * dt * (rate + new_rate)
            rate = new_rate
            t_clock += dt
            if step % record_every == 0:
                for i in range(n_record):
                    records[i].append(np.concatenate([[t_clock[i]], r[i], v[i]]))

    t_det = _time_to_plane(r[:, 2], v[:, 2], z_det, gravity)
    alive &= np.isfinite(t_det)
    t_det = np.where(alive, t_det, 0.0)
    r_det, v_det = _ballistic(r, v, t_det, gravity)
    t_clock += t_det
    for i in range(n_record):
        records[i].append(np.concatenate([[t_clock[i]], r_det[i], v_det[i]]))
    hw = detector.half_width
    hit = alive & (np.abs(r_det[:, 0]) < hw) & (np.abs(r_det[:, 1]) < hw)
    return EnsembleResult(
        spec=spec,
        detector=detector,
        powers=tuple(b.power for b in beams),
        hit=hit,
        final_velocity=v_det,
        detector_position=r_det[:, :2],
        photon_dose=dose,
        trajectories={i: np.array(rows) for i, rows in records.items()},
    )


def forward_gain(with_field, without_field):
    """Ratio of detector hit fractions with and without the light field."""
    if with_field.spec != without_field.spec or with_field.detector != without_field.detector:
        raise DomainError("both runs must share the ensemble and detector specification")
    if without_field.n_hits == 0:
        raise DomainError("no baseline hits; increase n_particles or widen the detector")
    return with_field.hit_fraction / without_field.hit_fraction


def _prob_sum_within(h, a, c):
    """P(|U1 + U2| < h) for U1 ~ U(-a, a), U2 ~ U(-c, c)."""
    def g(x):
        return 0.5 * np.maximum(x, 0.0) ** 2

    def cdf(y):
        return (g(y + a + c) - g(y + a - c) - g(y - a + c) + g(y - a - c)) / (4.0 * a * c)

    return cdf(h) - cdf(-h)


def geometric_hit_fraction(spec, detector):
    """Field-free hit fraction for the uniform source of ``spec`` (no gravity)."""
    a = 0.5 * spec.source_side
    L = detector.distance
    lo, hi = spec.v_mean - spec.v_spread, spec.v_mean + spec.v_spread

    def integrand(vz):
        p = _prob_sum_within(detector.half_width, a, spec.v_spread * L / vz)
        return p * p

    val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-10, limit=200)
    return val / (hi - lo)


def collimation_power(spec, waist, molecule):
    """Thin-lens estimate of the power that collimates the paraxial beam.

    A molecule crossing the waist at height y gets a transverse kick of
    -y * 4 U0 sqrt(pi/2) / (m w0 v); collimation cancels the divergence
    y / (source_distance / v) acquired from the source.
    """
    v = spec.v_mean
    u0 = molecule.mass * waist * v * v / (4.0 * math.sqrt(math.pi / 2.0) * spec.source_distance)
    return u0 / dipole_potential_depth(molecule.alpha_vol, 1.0, waist)


def crossed_beams(power, waist, wavelength=1064e-9, dual=False):
    """One beam along x, plus a second along y when ``dual``; both focused at the origin."""
    beams = [GaussianBeam(power, waist, wavelength, axis=(1.0, 0.0, 0.0))]
    if dual:
        beams.append(GaussianBeam(power, waist, wavelength, axis=(0.0, 1.0, 0.0)))
    return tuple(beams)
