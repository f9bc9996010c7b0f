import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize

from slowbeams.errors import DomainError
from slowbeams.selector import (SelectorParams, apply_selector, selector_setpoint, transmission,
                                transmitted_fraction)
from slowbeams.source import SourceParams, sample_velocities


@pytest.mark.parametrize("f, v", [(1.0, 1.08), (0.0, 0.0), (47.2, 50.976)])
def test_setpoint(f, v):
    assert selector_setpoint(SelectorParams(rotor_freq=f)) == pytest.approx(v, abs=1e-12)


@given(st.floats(0.0, 1e3), st.floats(0.0, 10.0))
def test_setpoint_linear(f, a):
    p = SelectorParams(rotor_freq=f)
    assert selector_setpoint(SelectorParams(rotor_freq=a * f)) == pytest.approx(
        a * selector_setpoint(p), rel=1e-14, abs=1e-300)


def test_transmission_examples():
    p = SelectorParams(rotor_freq=40.0)
    s = selector_setpoint(p)
    assert transmission(s, p) == 1.0
    assert transmission(s * 1.025, p) == pytest.approx(0.5, abs=1e-12)
    assert transmission(s * 0.975, p) == pytest.approx(0.5, abs=1e-12)
    assert transmission(s * 1.10, p) == 0.0


@pytest.mark.parametrize("shape", ["triangle", "gaussian"])
def test_fwhm_exact(shape):
    p = SelectorParams(rotor_freq=47.2, shape=shape)
    s = selector_setpoint(p)
    f = lambda v: transmission(v, p) - 0.5
    lo = optimize.brentq(f, 0.9 * s, s, xtol=1e-15, rtol=1e-15)
    hi = optimize.brentq(f, s, 1.1 * s, xtol=1e-15, rtol=1e-15)
    assert (hi - lo) / (0.05 * s) == pytest.approx(1.0, abs=1e-9)
    assert s - lo == pytest.approx(hi - s, rel=1e-9)


def test_stopped_rotor():
    with pytest.raises(DomainError):
        transmission(10.0, SelectorParams(rotor_freq=0.0))
    with pytest.raises(DomainError):
        SelectorParams(fwhm_rel=1.5)


def test_monochromatic_all_kept():
    p = SelectorParams(rotor_freq=40.0)
    v = np.full(1000, selector_setpoint(p))
    assert apply_selector(v, p, seed=1).size == 1000


def test_uniform_window_fraction():
    p = SelectorParams(rotor_freq=40.0)
    s = selector_setpoint(p)
    v = np.random.default_rng(2).uniform(0.9 * s, 1.1 * s, 200_000)
    frac = apply_selector(v, p, seed=3).size / v.size
    assert frac == pytest.approx(0.25, abs=4 * np.sqrt(0.25 * 0.75 / v.size))


def test_slow_setpoint_nonempty(n7):
    src = SourceParams(302.0, 51.0, n7)
    v = sample_velocities(200_000, src, seed=11)
    kept = apply_selector(v, SelectorParams(rotor_freq=11.0 / 1.08), seed=12)
    assert kept.size > 0
    assert kept.max() < 12.0


def test_kept_fraction_matches_quadrature(n7):
    src = SourceParams(302.0, 51.0, n7)
    p = SelectorParams(rotor_freq=47.2)
    v = sample_velocities(400_000, src, seed=13)
    kept = apply_selector(v, p, seed=14)
    expect = transmitted_fraction(src, p)
    assert kept.size <= v.size
    assert kept.size / v.size == pytest.approx(expect, abs=4 * np.sqrt(expect / v.size))


def test_jitter_deterministic():
    p = SelectorParams(rotor_freq=40.0, jitter=True)
    v = np.linspace(40, 46, 1000)
    assert np.array_equal(apply_selector(v, p, seed=5), apply_selector(v, p, seed=5))
