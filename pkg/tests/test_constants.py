import math

import pytest
from hypothesis import given, strategies as st

from slowbeams.constants import (AMU, CATALOGUE, EV, H, Molecule, amu_to_kg, angstrom3_to_m3,
                                 de_broglie_wavelength, ev_to_joule, get_molecule, joule_to_ev,
                                 kg_to_amu, kinetic_energy, m3_to_angstrom3, polarizability_si)
from slowbeams.errors import DomainError


def test_catalogue_n7_entry(n7):
    assert n7.mass_amu == pytest.approx(5053, rel=1e-12)
    assert n7.alpha_A3 == pytest.approx(194, rel=1e-12)
    assert n7.sigma_abs == 3e-23
    assert n7.sigma_ion == 2.7e-18


def test_catalogue_covers_table_masses():
    masses = {name: CATALOGUE[name].mass_amu for name in CATALOGUE}
    assert masses["perfluoroC60-n5"] == pytest.approx(3815)
    assert masses["perfluoroC60-n9"] == pytest.approx(6291)
    # side-chain increment of the polarizability
    assert CATALOGUE["perfluoroC60-n3"].alpha_A3 - CATALOGUE["perfluoroC60-n2"].alpha_A3 == pytest.approx(18)


def test_unknown_molecule():
    with pytest.raises(KeyError):
        get_molecule("buckyball")


def test_molecule_validation():
    with pytest.raises(DomainError):
        Molecule("x", mass=0.0)
    with pytest.raises(DomainError):
        Molecule("x", mass=1e-24, alpha_vol=-1.0)


def test_kinetic_energy_thermal_beam():
    e = kinetic_energy(5053 * AMU, 44.0)
    assert e == pytest.approx(8.12e-21, rel=2e-3)
    assert joule_to_ev(e) * 1e3 == pytest.approx(50.7, abs=0.1)


def test_kinetic_energy_slow_beam():
    e = kinetic_energy(5000 * AMU, 10.0)
    assert e == pytest.approx(4.15e-22, rel=2e-3)
    assert joule_to_ev(e) * 1e3 == pytest.approx(2.59, abs=0.01)
    assert kinetic_energy(5000 * AMU, 0.0) == 0.0


@pytest.mark.parametrize("v, pm", [(51.0, 1.55), (55.0, 1.44)])
def test_de_broglie_examples(v, pm):
    assert de_broglie_wavelength(5053 * AMU, v) * 1e12 == pytest.approx(pm, abs=0.006)


def test_de_broglie_zero_speed():
    with pytest.raises(DomainError, match="infinite wavelength"):
        de_broglie_wavelength(5053 * AMU, 0.0)


@pytest.mark.parametrize("a3, si", [(200, 2.225e-38), (194, 2.159e-38), (0, 0.0)])
def test_polarizability_si(a3, si):
    assert polarizability_si(a3 * 1e-30) == pytest.approx(si, rel=1e-3)


@given(st.floats(1e-3, 1e6))
def test_unit_roundtrips(x):
    assert kg_to_amu(amu_to_kg(x)) == pytest.approx(x, rel=1e-12)
    assert m3_to_angstrom3(angstrom3_to_m3(x)) == pytest.approx(x, rel=1e-12)
    assert joule_to_ev(ev_to_joule(x)) == pytest.approx(x, rel=1e-12)


@given(st.floats(1e-27, 1e-22), st.floats(1e-3, 1e4))
def test_kinetic_energy_even_and_debroglie_product(m, v):
    assert kinetic_energy(m, v) == kinetic_energy(m, -v)
    assert de_broglie_wavelength(m, v) * m * v == pytest.approx(H, rel=1e-14)
    assert de_broglie_wavelength(m, 2 * v) == pytest.approx(de_broglie_wavelength(m, v) / 2,
                                                            rel=1e-14)


def test_ev_is_elementary_charge():
    assert EV == pytest.approx(1.602176634e-19, rel=1e-15)
    assert math.isclose(ev_to_joule(1.0), EV)
