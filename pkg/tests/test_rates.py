import numpy as np
import pytest

import oracles
from qdpli.bath import PhononBath, phase_function
from qdpli.config import NumericsConfig
from qdpli.rates import (purcell_spectrum, se_rate_bare, se_rate_bare_grid,
                         se_rate_polaron, se_rate_polaron_grid)
from qdpli.reservoir import (FlatBackground, LorentzianCavity,
                             build_reservoir_grid, photon_correlation)
from qdpli.units import HBAR_MEV_PS

from conftest import OMEGA_X, WINDOW


def lorentzian_rate_uev(g_mev, kappa_mev, detuning_mev):
    # gamma(D) = g^2 kappa / (D^2 + (kappa/2)^2), converted to ueV
    g = g_mev / HBAR_MEV_PS
    k = kappa_mev / HBAR_MEV_PS
    d = detuning_mev / HBAR_MEV_PS
    return g * g * k / (d * d + (k / 2.0) ** 2) * HBAR_MEV_PS * 1e3


def test_bare_rate_on_resonance(cavity, cavity_grid):
    got = se_rate_bare(cavity_grid, cavity.omega_c_mev)
    exact = 4.0 * cavity.g_mev ** 2 / cavity.kappa_mev * 1e3
    assert got == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("detuning", [0.3, 0.6, 1.2])
def test_bare_rate_detuned(cavity, cavity_grid, detuning):
    got = se_rate_bare(cavity_grid, cavity.omega_c_mev - detuning)
    exact = lorentzian_rate_uev(cavity.g_mev, cavity.kappa_mev, detuning)
    assert got == pytest.approx(exact, rel=1e-3)


def test_bare_rate_flat_background():
    flat = FlatBackground(1.0, 80.0, OMEGA_X)
    grid = build_reservoir_grid(flat, WINDOW)
    got = se_rate_bare(grid, OMEGA_X)
    assert got == pytest.approx(1.0, rel=5e-3)


def test_polaron_equals_bare_without_phonons(cavity_grid):
    table = phase_function(PhononBath(0.0, 1.0, 40.0))
    omegas = np.linspace(OMEGA_X - 3.0, OMEGA_X + 3.0, 41)
    bare = se_rate_bare_grid(cavity_grid, omegas)
    dressed = se_rate_polaron_grid(table, cavity_grid, omegas)
    assert np.max(np.abs(dressed - bare) / bare) < 1e-10


def test_flat_reservoir_phonon_transparency(bath40):
    numerics = NumericsConfig(n_tau=16000)
    table = phase_function(bath40, numerics=numerics)
    flat = FlatBackground(1.0, 80.0, OMEGA_X)
    grid = build_reservoir_grid(flat, WINDOW, numerics)
    dressed = se_rate_polaron(table, grid, OMEGA_X, numerics)
    assert dressed == pytest.approx(1.0, rel=1e-2)


@pytest.mark.parametrize("dc", [0.0, 2.0, -2.0])
def test_polaron_rate_frozen_oracle(table40, cavity, cavity_grid, dc):
    got = se_rate_polaron(table40, cavity_grid, cavity.omega_c_mev + dc)
    assert got == pytest.approx(oracles.GAMMA_TILDE_CAVITY_40K[dc], rel=1e-3)


def test_phonons_reduce_on_peak_enhance_off_peak(table40, cavity, cavity_grid):
    on_bare = se_rate_bare(cavity_grid, cavity.omega_c_mev)
    on_dressed = se_rate_polaron(table40, cavity_grid, cavity.omega_c_mev)
    assert on_dressed < on_bare
    for dc in (2.0, -2.0):
        off_bare = se_rate_bare(cavity_grid, cavity.omega_c_mev + dc)
        off_dressed = se_rate_polaron(table40, cavity_grid,
                                      cavity.omega_c_mev + dc)
        assert off_dressed > off_bare


def test_frequency_domain_swap_identity(table40, cavity, cavity_grid):
    # same tau integral fed by the omega-quadrature correlation (swapped
    # integration order) and by the closed-form correlation: the swap
    # must not move the result
    from qdpli.bath import phonon_correlation
    from qdpli.reservoir import lorentzian_correlation
    omega_l = cavity.omega_c_mev - 0.8
    tau = np.linspace(0.0, 10.0, 1001)
    c = phonon_correlation(table40, tau)
    j_quad = photon_correlation(cavity_grid, omega_l, tau)
    j_closed = lorentzian_correlation(cavity, omega_l, tau)
    swapped = 2.0 * np.trapezoid((c * j_quad).real, tau) * HBAR_MEV_PS * 1e3
    same_order = 2.0 * np.trapezoid((c * j_closed).real, tau) * HBAR_MEV_PS * 1e3
    assert swapped == pytest.approx(same_order, rel=1e-3)
    # and both sit within the truncated tail of the production rate
    direct = se_rate_polaron(table40, cavity_grid, omega_l)
    assert swapped == pytest.approx(direct, rel=1e-2)


def test_rates_nonnegative_across_window(table40, cavity_grid, waveguide_grid):
    omegas = np.linspace(OMEGA_X - 3.0, OMEGA_X + 3.0, 121)
    for grid in (cavity_grid, waveguide_grid):
        assert np.all(se_rate_bare_grid(grid, omegas) >= 0.0)
        assert np.all(se_rate_polaron_grid(table40, grid, omegas) >= 0.0)


def test_tau_step_convergence(bath40, cavity, cavity_grid):
    base = NumericsConfig()
    fine = NumericsConfig(n_tau=2 * base.n_tau)
    t1 = phase_function(bath40, numerics=base)
    t2 = phase_function(bath40, numerics=fine)
    for dc in (0.0, 1.5):
        a = se_rate_polaron(t1, cavity_grid, cavity.omega_c_mev + dc, base)
        b = se_rate_polaron(t2, cavity_grid, cavity.omega_c_mev + dc, fine)
        assert a == pytest.approx(b, rel=1e-4)


def test_purcell_no_phonon_degeneracy(cavity_grid):
    table = phase_function(PhononBath(0.0, 1.0, 40.0))
    omegas = np.linspace(OMEGA_X - 2.0, OMEGA_X + 4.0, 101)
    spec = purcell_spectrum(table, cavity_grid, omegas, 1.0)
    assert np.allclose(spec.pf_phonon, spec.pf_bare, rtol=1e-12)
    assert np.all(spec.pf_bare > 0.0)
    assert np.all(spec.pf_phonon > 0.0)


def test_purcell_bare_symmetry_about_cavity(cavity, cavity_grid, table40):
    d = np.linspace(-2.0, 2.0, 81)
    spec = purcell_spectrum(table40, cavity_grid, cavity.omega_c_mev + d, 1.0)
    assert np.allclose(spec.pf_bare, spec.pf_bare[::-1], rtol=1e-6)


def test_purcell_phonon_curve_is_smoothed(cavity, cavity_grid):
    for temperature in (10.0, 40.0):
        table = phase_function(PhononBath(0.06, 1.0, temperature))
        d = np.linspace(-3.0, 3.0, 241)
        spec = purcell_spectrum(table, cavity_grid, cavity.omega_c_mev + d, 1.0)
        assert np.max(spec.pf_phonon) <= np.max(spec.pf_bare)


def test_purcell_crossing(table40, cavity, cavity_grid):
    d = np.array([-2.0, 0.0, 2.0])
    spec = purcell_spectrum(table40, cavity_grid, cavity.omega_c_mev + d, 1.0)
    assert spec.pf_phonon[1] < spec.pf_bare[1]
    assert spec.pf_phonon[0] > spec.pf_bare[0]
    assert spec.pf_phonon[2] > spec.pf_bare[2]
