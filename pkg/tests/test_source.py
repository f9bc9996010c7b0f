import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize, stats

from slowbeams.constants import AMU, K_B
from slowbeams.errors import DomainError, FitError
from slowbeams.source import (FluxReport, SourceParams, VelocityHistogram, beam_flux_density,
                              effusive_most_probable_speed, empirical_mode, fit_floating_mb,
                              floating_mb_cdf, floating_mb_mean, floating_mb_mode, floating_mb_pdf,
                              sample_velocities)

M7 = 5053 * AMU


@pytest.fixture(scope="module")
def fig3(n7):
    return SourceParams(302.0, 51.0, n7)


@settings(max_examples=40, deadline=None)
@given(st.floats(20.0, 900.0), st.floats(0.0, 200.0))
def test_pdf_normalized(T, d):
    p = SourceParams(T, d)
    upper = d + 12 * p.thermal_width
    val, _ = integrate.quad(lambda v: floating_mb_pdf(v, p), 0.0, upper, points=[d], limit=200)
    assert val == pytest.approx(1.0, abs=1e-6)
    assert floating_mb_cdf(upper, p) == pytest.approx(1.0, abs=1e-6)


def test_mode_sits_above_drift(fig3):
    # the v**2 factor pushes the maximum well above the drift parameter
    numeric = optimize.minimize_scalar(lambda v: -floating_mb_pdf(v, fig3), bounds=(0, 200),
                                       method="bounded", options={"xatol": 1e-8}).x
    assert floating_mb_mode(fig3) == pytest.approx(numeric, abs=1e-5)
    assert floating_mb_mode(fig3) == pytest.approx(66.05, abs=0.01)
    assert floating_mb_mode(fig3) > fig3.drift


def test_zero_drift_is_effusive(n7):
    p = SourceParams(585.0, 0.0, n7)
    assert floating_mb_mode(p) == pytest.approx(math.sqrt(2 * K_B * 585.0 / n7.mass), rel=1e-14)


def test_slow_tail_positive(fig3):
    assert floating_mb_pdf(11.0, fig3) > 0.0


def test_invalid_temperature():
    with pytest.raises(DomainError):
        SourceParams(0.0, 10.0)
    with pytest.raises(DomainError):
        SourceParams(300.0, -1.0)


def test_sample_mean_within_three_standard_errors(fig3):
    v = sample_velocities(100_000, fig3, seed=3)
    se = v.std(ddof=1) / math.sqrt(v.size)
    assert abs(v.mean() - floating_mb_mean(fig3)) < 3 * se


def test_sampling_deterministic(fig3):
    assert np.array_equal(sample_velocities(1000, fig3, seed=9), sample_velocities(1000, fig3, seed=9))


def test_effusive_sample_mode(n7):
    v = sample_velocities(100_000, SourceParams(585.0, 0.0, n7), seed=4)
    assert empirical_mode(v) == pytest.approx(43.9, abs=2.0)


def test_ks_distance(fig3):
    v = sample_velocities(100_000, fig3, seed=5)
    res = stats.kstest(v, lambda x: floating_mb_cdf(x, fig3))
    assert res.statistic < 0.01


def test_effusive_speed_examples():
    assert effusive_most_probable_speed(M7, 585.0) == pytest.approx(43.9, abs=0.05)
    assert effusive_most_probable_speed(5672 * AMU, 585.0) == pytest.approx(41.4, abs=0.05)
    assert effusive_most_probable_speed(M7, 4 * 585.0) == pytest.approx(
        2 * effusive_most_probable_speed(M7, 585.0), rel=1e-14)


def test_fit_recovers_sampler_parameters(fig3):
    v = sample_velocities(1_000_000, fig3, seed=7)
    fit = fit_floating_mb(VelocityHistogram.from_samples(v, 2.0), fig3.mass)
    assert fit.drift == pytest.approx(51.0, abs=1.0)
    assert fit.temperature == pytest.approx(302.0, abs=10.0)


def test_fit_noise_free_histogram(fig3):
    edges = np.arange(0.0, 160.0, 2.0)
    centers = 0.5 * (edges[1:] + edges[:-1])
    counts = 1e6 * floating_mb_pdf(centers, fig3)
    fit = fit_floating_mb(VelocityHistogram(edges, counts), fig3.mass)
    assert fit.drift == pytest.approx(51.0, rel=1e-4)
    assert fit.temperature == pytest.approx(302.0, rel=1e-4)


def test_fit_rejects_degenerate_histogram(fig3):
    with pytest.raises(FitError):
        fit_floating_mb(VelocityHistogram([50.0, 52.0], [100.0]), fig3.mass)


def test_fit_stderr_coverage(fig3):
    # each parameter lies within two quoted standard errors in >= 95 of 100 trials
    drift_hits = temp_hits = 0
    for seed in range(100):
        v = sample_velocities(20_000, fig3, seed=1000 + seed)
        fit = fit_floating_mb(VelocityHistogram.from_samples(v, 2.0), fig3.mass)
        drift_hits += abs(fit.drift - 51.0) < 2 * fit.drift_err
        temp_hits += abs(fit.temperature - 302.0) < 2 * fit.temperature_err
    assert drift_hits >= 95
    assert temp_hits >= 95


def test_observed_count_weights_alone_are_biased(fig3):
    # the reweighting passes are what make the coverage above hold
    z_plain, z_reweighted = [], []
    for seed in range(30):
        h = VelocityHistogram.from_samples(sample_velocities(20_000, fig3, seed=2000 + seed), 2.0)
        a = fit_floating_mb(h, fig3.mass, reweight=0)
        b = fit_floating_mb(h, fig3.mass)
        z_plain.append((a.temperature - 302.0) / a.temperature_err)
        z_reweighted.append((b.temperature - 302.0) / b.temperature_err)
    assert np.mean(z_plain) < -0.5
    assert abs(np.mean(z_reweighted)) < 0.4


def test_histogram_validation():
    with pytest.raises(ValueError):
        VelocityHistogram([0.0, 1.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        VelocityHistogram([0.0, 1.0], [-1.0])
    h = VelocityHistogram.from_centers([1.0, 3.0, 5.0], [1, 2, 3])
    assert np.allclose(h.bin_edges, [0, 2, 4, 6])


def test_flux_and_density():
    rep = FluxReport()
    flux, density = beam_flux_density(rep, 3e-3)
    assert flux * 1e-4 == pytest.approx(1e11, rel=1e-12)
    assert density * 1e-6 == pytest.approx(1.6e12, rel=0.02)
    _, d2 = beam_flux_density(rep, 6e-3)
    assert d2 == pytest.approx(density / 4, rel=1e-14)
    f2, _ = beam_flux_density(FluxReport(count_rate=1.5e6), 3e-3)
    assert f2 == pytest.approx(2 * flux, rel=1e-14)
    with pytest.raises(DomainError):
        beam_flux_density(rep, 0.0)
    with pytest.raises(DomainError):
        FluxReport(detection_efficiency=2.0)
