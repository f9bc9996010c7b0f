import math

import numpy as np
import pytest
from dataclasses import replace

from slowbeams.constants import AMU
from slowbeams.cooling import (CavityPump, CoolingEnsemble, coupling_from_power, detect_threshold,
                               evolve, max_stable_step, mode_volume, order_parameter,
                               pump_at_power, steady_state_field)
from slowbeams.errors import DomainError, StepSizeError, ThresholdNotFound

K = 2 * math.pi / 1064e-9
LAMBDA = 1064e-9


@pytest.fixture(scope="module")
def ens200():
    return CoolingEnsemble.sample(n=200, seed=0)


def test_coupling_zero_power(ens200):
    U0, eta = coupling_from_power(0.0, CavityPump(), ens200)
    assert eta == 0.0
    assert U0 < 0


def test_coupling_sqrt_power(ens200):
    _, a = coupling_from_power(250.0, CavityPump(), ens200)
    _, b = coupling_from_power(1000.0, CavityPump(), ens200)
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_mode_volume_one_centimetre_cavity():
    assert mode_volume(400e-6) * 1e9 == pytest.approx(1.26, abs=0.01)


def test_steady_state_nodes():
    x = (np.arange(10) + 0.25) * LAMBDA
    p = CavityPump(U0=-1e-3, eta=1e5)
    assert abs(steady_state_field(x, p)) < 1e-9 * 1e5 / p.kappa


def test_steady_state_antinodes_scale_as_n_squared():
    p = CavityPump(U0=-50.0, eta=1e5)
    out = []
    for n in (10, 20, 40):
        x = np.arange(n) * LAMBDA
        q = replace(p, detuning=-p.kappa + n * p.U0)  # keep the shifted detuning fixed
        a2 = abs(steady_state_field(x, q)) ** 2
        assert a2 == pytest.approx(n ** 2 * p.eta ** 2 / (p.kappa ** 2 + p.kappa ** 2), rel=1e-12)
        out.append(a2)
    assert out[1] / out[0] == pytest.approx(4.0, rel=1e-12)
    assert out[2] / out[1] == pytest.approx(4.0, rel=1e-12)


def test_random_positions_incoherent():
    p = CavityPump(eta=1e5)
    rng = np.random.default_rng(1)
    for n in (1000, 10_000, 100_000):
        vals = [abs(steady_state_field(rng.uniform(0, 1e-2, n), p)) ** 2 / n for _ in range(20)]
        # |sum cos|^2 averages n/2 for uniform phases
        assert np.mean(vals) == pytest.approx(0.5 * p.eta ** 2 / (2 * p.kappa ** 2), rel=0.5)


def test_steady_state_translation_invariant():
    p = CavityPump(U0=-30.0, eta=1e5)
    x = np.random.default_rng(2).uniform(0, 1e-3, 50)
    a = steady_state_field(x, p)
    b = steady_state_field(x + 2 * math.pi / p.wavenumber, p)
    assert abs(a - b) <= 1e-9 * abs(a)


def test_order_parameter_examples():
    assert order_parameter(np.zeros(10), K) == 1.0
    alternating = np.arange(20) * LAMBDA / 2
    assert order_parameter(alternating, K) == pytest.approx(0.0, abs=1e-12)
    x = np.random.default_rng(3).uniform(0, 1e-2, 10_000)
    assert order_parameter(x, K) < 0.05


def test_uncoupled_evolution(ens200):
    tr = evolve(ens200, CavityPump(), t_end=20e-6, transit=False)
    assert np.all(tr.photon_number == 0.0)
    assert np.all(tr.mean_KE_axis == tr.mean_KE_axis[0])


def test_frozen_particles_relax_to_steady_state():
    rng = np.random.default_rng(4)
    x = rng.uniform(0, 1e-3, 100)
    e = CoolingEnsemble(x, np.zeros_like(x), mass=5000 * AMU * 1e6)
    p = CavityPump(U0=-20.0, eta=2e5)
    tr = evolve(e, p, t_end=5.0 / p.kappa, dt=1e-9, transit=False)
    expect = abs(steady_state_field(x, p)) ** 2
    assert tr.photon_number[-1] == pytest.approx(expect, rel=0.01)


def test_step_size_refused(ens200):
    p = pump_at_power(3e3, CavityPump(), ens200)
    dt_max = max_stable_step(ens200, p)
    with pytest.raises(StepSizeError) as err:
        evolve(ens200, p, dt=10 * dt_max)
    assert err.value.suggested_dt == pytest.approx(dt_max)


def test_order_parameter_bounded(ens200):
    tr = evolve(ens200, pump_at_power(3e3, CavityPump(), ens200))
    assert np.all((tr.order_param >= 0) & (tr.order_param <= 1))


def test_fig5_ensemble_cools_above_threshold():
    e = CoolingEnsemble.sample(n=1000, seed=5)
    tr = evolve(e, pump_at_power(3e3, CavityPump(), e))
    assert tr.mean_KE_axis[-1] < tr.mean_KE_axis[0]


def test_cooling_without_dispersive_shift(ens200):
    # U0 = 0: the kappa-delayed scattered field alone extracts energy. The
    # transit envelope switches the pump on and off adiabatically, so what is
    # left over at the end is the net friction.
    p = replace(pump_at_power(3e3, CavityPump(), ens200), U0=0.0)
    tr = evolve(ens200, p)
    window = int(20e-6 / (tr.time[1] - tr.time[0]))  # many cavity lifetimes
    first = tr.mean_KE_axis[:window].mean()
    last = tr.mean_KE_axis[-window:].mean()
    assert last < first


def test_threshold_scan_brackets_calibration(ens200):
    scan = detect_threshold([1e3 / 3, 1e3, 3e3], ens200, CavityPump())
    lo, hi = scan.bracket
    assert lo <= 1e3 <= hi


def test_threshold_fine_scan():
    e = CoolingEnsemble.sample(n=200, seed=6)
    scan = detect_threshold(np.geomspace(250.0, 4000.0, 9), e, CavityPump())
    assert 500.0 <= scan.estimate <= 2000.0


def test_threshold_above_range(ens200):
    with pytest.raises(ThresholdNotFound, match="threshold above scan range"):
        detect_threshold([0.0, 0.0, 0.0], ens200, CavityPump())


def test_organization_monotone_in_power():
    for seed in range(10):
        e = CoolingEnsemble.sample(n=200, seed=100 + seed)
        scan = detect_threshold([1e3 / 3, 1e3, 3e3], e, CavityPump())
        assert np.all(np.diff(scan.late_order) >= 0)


def test_deterministic(ens200):
    p = pump_at_power(1e3, CavityPump(), ens200)
    a = evolve(ens200, p)
    b = evolve(ens200, p)
    assert np.array_equal(a.mean_KE_axis, b.mean_KE_axis)


def test_validation():
    with pytest.raises(DomainError):
        CavityPump(kappa=0.0)
    with pytest.raises(DomainError):
        CoolingEnsemble(np.zeros(1), np.zeros(1))
    with pytest.raises(DomainError):
        evolve(CoolingEnsemble.sample(10, seed=1), CavityPump(), transit=False)
