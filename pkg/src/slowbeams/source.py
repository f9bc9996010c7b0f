"""Thermal source statistics.

Floating Maxwell-Boltzmann speed density, a rejection sampler for it, the
weighted histogram fit, and the flux / number-density bookkeeping that turns
a detector count rate into a beam density.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special, stats

from .constants import K_B, Molecule, get_molecule
from .errors import DomainError, FitError

# default source: the n = 7 compound as measured at 585 K
DEFAULT_MOLECULE = "perfluoroC60-n7"


@dataclass(frozen=True)
class SourceParams:
    temperature: float
    drift: float = 0.0
    molecule: Molecule = field(default_factory=lambda: get_molecule(DEFAULT_MOLECULE))

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be positive, got {self.temperature!r}")
        if self.drift < 0:
            raise DomainError("drift must be non-negative")

    @property
    def mass(self):
        return self.molecule.mass

    @property
    def thermal_width(self):
        """sqrt(k_B T / m), the standard deviation of the Gaussian factor."""
        return math.sqrt(K_B * self.temperature / self.mass)


@functools.lru_cache(maxsize=256)
def _normalization(drift, width):
    upper = drift + 40.0 * width
    val, _ = integrate.quad(
        lambda v: v * v * math.exp(-0.5 * ((v - drift) / width) ** 2),
        0.0, upper, points=[drift], limit=200, epsabs=0.0, epsrel=1e-12)
    return 1.0 / val


def _partial_moment(v, drift, width):
    """Closed form of int_0^v u**2 exp(-(u-d)**2 / 2s**2) du."""
    x0 = -drift / width
    x1 = (np.asarray(v, dtype=float) - drift) / width

    def antiderivative(x):
        gauss = np.exp(-0.5 * x * x)
        i0 = math.sqrt(math.pi / 2.0) * special.erf(x / math.sqrt(2.0))
        i1 = -gauss
        with np.errstate(invalid="ignore"):
            xg = np.where(np.isfinite(x), x * gauss, 0.0)
        i2 = -xg + i0
        return drift ** 2 * i0 + 2.0 * drift * width * i1 + width ** 2 * i2

    return width * (antiderivative(x1) - antiderivative(x0))


def floating_mb_pdf(v, params):
    """Normalized density v**2 exp(-m (v - v_d)**2 / 2 k_B T) on v >= 0."""
    v = np.asarray(v, dtype=float)
    s = params.thermal_width
    a = _normalization(params.drift, s)
    out = a * v * v * np.exp(-0.5 * ((v - params.drift) / s) ** 2)
    out = np.where(v >= 0, out, 0.0)
    return out if out.ndim else float(out)


def floating_mb_cdf(v, params):
    v = np.clip(np.asarray(v, dtype=float), 0.0, None)
    s = params.thermal_width
    total = _partial_moment(np.inf, params.drift, s)
    out = _partial_moment(v, params.drift, s) / total
    return out if out.ndim else float(out)


def floating_mb_mode(params):
    """Most probable speed. Exceeds the drift because of the v**2 factor."""
    d, s = params.drift, params.thermal_width
    return 0.5 * (d + math.sqrt(d * d + 8.0 * s * s))


def floating_mb_mean(params):
    s = params.thermal_width
    upper = params.drift + 40.0 * s
    val, _ = integrate.quad(lambda v: v * floating_mb_pdf(v, params), 0.0, upper,
                            points=[params.drift], limit=200)
    return val


def effusive_most_probable_speed(m, T):
    if not (m > 0 and T > 0):
        raise DomainError("mass and temperature must be positive")
    return math.sqrt(2.0 * K_B * T / m)


def sample_velocities(n, params, seed=None, *, envelope_sigmas=8.0, rng=None):
    """Draw ``n`` speeds by rejection under a flat envelope.

    The envelope covers [0, v_d + 8 sqrt(k_B T/m)]; the mass beyond that is
    below 1e-14 and is dropped.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.default_rng(seed) if rng is None else rng
    vmax = params.drift + envelope_sigmas * params.thermal_width
    peak = floating_mb_pdf(floating_mb_mode(params), params) * 1.001
    out = np.empty(n)
    filled = 0
    while filled < n:
        batch = max(1024, int(1.3 * (n - filled) * peak * vmax) + 64)
        v = rng.uniform(0.0, vmax, batch)
        u = rng.uniform(0.0, peak, batch)
        keep = v[u < floating_mb_pdf(v, params)]
        take = min(keep.size, n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def empirical_mode(samples, grid_points=2001):
    """Mode of a kernel density estimate of ``samples``."""
    samples = np.asarray(samples, dtype=float)
    kde = stats.gaussian_kde(samples)
    grid = np.linspace(samples.min(), samples.max(), grid_points)
    return float(grid[np.argmax(kde(grid))])


@dataclass(frozen=True)
class VelocityHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if edges.ndim != 1 or counts.ndim != 1 or counts.size != edges.size - 1:
            raise ValueError("need len(counts) == len(bin_edges) - 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(counts < 0) or not np.all(np.isfinite(counts)):
            raise ValueError("counts must be finite and non-negative")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_samples(cls, samples, bin_width=2.0, vmax=None):
        samples = np.asarray(samples, dtype=float)
        top = samples.max() if vmax is None else vmax
        edges = np.arange(0.0, top + bin_width, bin_width)
        counts, _ = np.histogram(samples, bins=edges)
        return cls(edges, counts.astype(float))

    @classmethod
    def from_centers(cls, centers, counts):
        """Rebuild uniform bins from their centers (the CSV representation)."""
        centers = np.asarray(centers, dtype=float)
        if centers.size < 2:
            raise ValueError("need at least two bins to infer the bin width")
        width = np.diff(centers)
        if not np.allclose(width, width[0], rtol=1e-9, atol=0):
            raise ValueError("bin centers must be uniformly spaced")
        w = width[0]
        edges = np.concatenate([centers - w / 2, [centers[-1] + w / 2]])
        return cls(edges, counts)

    @property
    def centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def widths(self):
        return np.diff(self.bin_edges)


@dataclass(frozen=True)
class VelocityFit:
    drift: float
    temperature: float
    amplitude: float
    drift_err: float
    temperature_err: float
    amplitude_err: float
    mode: float
    chi2: float
    dof: int

    @property
    def stderr(self):
        return (self.drift_err, self.temperature_err, self.amplitude_err)


def _mb_counts(v, drift, temperature, amplitude, mass):
    return amplitude * v * v * np.exp(-mass * (v - drift) ** 2 / (2.0 * K_B * temperature))


def fit_floating_mb(hist, mass, p0=None, max_nfev=2000, reweight=3):
    """Fit ``amplitude * v**2 exp(-m (v-v_d)**2 / 2kT)`` to histogram counts.

    Weights are Poisson: the first pass uses sqrt(counts) floored at 1, then
    ``reweight`` passes use the square root of the fitted model counts
    (floored at 1). Weighting by observed counts alone favours bins that
    fluctuated low and biases the fit by about one standard error at 10**4
    molecules; the model-variance passes remove that bias. Standard errors
    come from the Jacobian at the optimum without rescaling by the reduced
    chi-square. Returns a :class:`VelocityFit`.
    """
    v = hist.centers
    y = hist.counts
    if np.count_nonzero(y) < 5:
        raise FitError("need at least 5 non-empty bins for a 3-parameter fit")
    sigma = np.sqrt(np.maximum(y, 1.0))

    if p0 is None:
        w = y / y.sum()
        mean = float(np.sum(w * v))
        var = float(np.sum(w * (v - mean) ** 2))
        t0 = max(mass * var / K_B, 1.0)
        d0 = max(float(v[np.argmax(y)]) - 2.0 * K_B * t0 / (mass * max(v[np.argmax(y)], 1.0)), 0.0)
        shape = _mb_counts(v, d0, t0, 1.0, mass)
        a0 = float(np.sum(y * shape) / max(np.sum(shape * shape), 1e-300))
        p0 = (d0, t0, a0)

    # temperature and amplitude are fitted on a log scale to keep them positive
    # and to balance the parameter scales
    def model(q):
        d, lt, la = q
        return _mb_counts(v, d, math.exp(lt), math.exp(la), mass)

    q = np.array([p0[0], math.log(p0[1]), math.log(max(p0[2], 1e-300))])
    for _ in range(1 + max(int(reweight), 0)):
        try:
            res = optimize.least_squares(lambda q: (model(q) - y) / sigma, q, method="lm",
                                         max_nfev=max_nfev, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        except (ValueError, FloatingPointError) as exc:
            raise FitError(f"floating Maxwell-Boltzmann fit failed: {exc}") from exc
        if not res.success or not np.all(np.isfinite(res.x)):
            raise FitError(f"fit did not converge: {res.message}", residual=res.fun)
        q = res.x
        sigma = np.sqrt(np.maximum(model(q), 1.0))

    d, lt, la = res.x
    T, A = math.exp(lt), math.exp(la)
    J = res.jac
    try:
        cov_q = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError as exc:
        raise FitError("singular Jacobian at the optimum", residual=res.fun) from exc
    # map log-parameter covariance back to linear
    scale = np.array([1.0, T, A])
    cov = cov_q * np.outer(scale, scale)
    err = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    chi2 = float(np.sum(res.fun ** 2))
    width = math.sqrt(K_B * T / mass)
    mode = 0.5 * (d + math.sqrt(d * d + 8.0 * width * width))
    return VelocityFit(float(d), T, A, float(err[0]), float(err[1]), float(err[2]),
                       float(mode), chi2, int(v.size - 3))


@dataclass(frozen=True)
class FluxReport:
    count_rate: float = 7.5e5
    detection_efficiency: float = 1e-4
    detector_area: float = 0.075e-4
    distance_detector: float = 0.8
    mean_speed: float = 44.0

    def __post_init__(self):
        for name in ("count_rate", "detection_efficiency", "detector_area",
                     "distance_detector", "mean_speed"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.detection_efficiency > 1:
            raise DomainError("detection_efficiency cannot exceed 1")


def beam_flux_density(report, distance_query):
    """Return (flux at the detector [1/m^2/s], number density at ``distance_query`` [1/m^3]).

    The density scales from the detector distance by the free-flight inverse
    square law.
    """
    if not distance_query > 0:
        raise DomainError("distance_query must be positive")
    flux = report.count_rate / (report.detection_efficiency * report.detector_area)
    density = flux / report.mean_speed * (report.distance_detector / distance_query) ** 2
    return flux, density
