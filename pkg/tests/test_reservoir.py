import numpy as np
import pytest

import oracles
from qdpli.config import NumericsConfig
from qdpli.errors import ConfigError
from qdpli.reservoir import (CoupledCavityWaveguide, FlatBackground,
                             LorentzianCavity, build_reservoir_grid,
                             correlation_envelope, flat_correlation,
                             lorentzian_correlation, photon_correlation,
                             photon_spectral_density)
from qdpli.units import HBAR_MEV_PS

from conftest import OMEGA_X, WINDOW


def test_type_validation():
    with pytest.raises(ConfigError):
        LorentzianCavity(0.0, 0.6, 1441.0)
    with pytest.raises(ConfigError):
        LorentzianCavity(0.05, -0.6, 1441.0)
    with pytest.raises(ConfigError):
        CoupledCavityWaveguide(1441.0, 1439.0, 0.02, 0.02, coupling_scale=1.0)
    with pytest.raises(ConfigError):
        CoupledCavityWaveguide(1439.0, 1441.0, 0.02, 0.02)  # no coupling route
    with pytest.raises(ConfigError):
        FlatBackground(-1.0, 12.0, 1440.0)


def test_lorentzian_peak_and_half_width(cavity):
    g = cavity.g_mev / HBAR_MEV_PS
    k = cavity.kappa_mev / HBAR_MEV_PS
    peak = photon_spectral_density(cavity.omega_c_mev, cavity)
    assert peak == pytest.approx(g * g * 2.0 / (np.pi * k), rel=1e-12)
    half = photon_spectral_density(cavity.omega_c_mev + cavity.kappa_mev / 2,
                                   cavity)
    assert half == pytest.approx(0.5 * peak, rel=1e-12)


def test_lorentzian_grid_area_within_one_percent(cavity_grid, cavity):
    g2 = (cavity.g_mev / HBAR_MEV_PS) ** 2
    assert abs(cavity_grid.area / g2 - 1.0) < 0.01
    assert np.all(cavity_grid.j_angular >= 0.0)


def test_waveguide_shape_against_complex_oracle():
    wg = CoupledCavityWaveguide(1439.0, 1441.0, 0.02, 0.02, coupling_scale=1.0)
    for omega, frozen in oracles.WAVEGUIDE_SHAPE.items():
        got = photon_spectral_density(omega, wg)
        # J = scale * omega * shape with the sign fixed to the positive branch
        assert got == pytest.approx(omega * frozen, rel=1e-10)
        live = oracles.waveguide_shape(omega, 1439.0, 1441.0, 0.02, 0.02)
        assert abs(live) == pytest.approx(frozen, rel=1e-12)


def test_waveguide_edge_enhancement():
    # moving toward the band edge raises the density of states
    wg = CoupledCavityWaveguide(1439.0, 1441.0, 0.02, 0.02, coupling_scale=1.0)
    mid = photon_spectral_density(1440.0, wg)
    near_edge = photon_spectral_density(1440.8, wg)
    nearer = photon_spectral_density(1440.98, wg)
    assert mid < near_edge < nearer


def test_waveguide_nonnegative_and_tails(waveguide, waveguide_grid):
    assert np.all(waveguide_grid.j_angular >= 0.0)
    peak = waveguide_grid.peak_j
    # evanescent tails die off outside the band
    ku = waveguide.kappa_u_mev
    outside = photon_spectral_density(waveguide.omega_u_mev + 5 * ku, waveguide)
    assert outside < 0.25 * peak
    far = photon_spectral_density(waveguide.omega_u_mev + 2.0, waveguide)
    assert far < 1e-3 * peak


def test_waveguide_peak_purcell_back_solve(waveguide, waveguide_grid):
    gamma_peak = 2.0 * np.pi * waveguide_grid.peak_j * HBAR_MEV_PS * 1e3
    assert gamma_peak == pytest.approx(30.0, rel=0.05)


def test_waveguide_dipole_route_positive_scale():
    wg = CoupledCavityWaveguide(1439.0, 1441.0, 0.02, 0.02,
                                dipole_debye=50.0, refractive_index=3.4,
                                v_eff_um3=0.1)
    assert wg.coupling_scale > 0.0
    wg2 = CoupledCavityWaveguide(1439.0, 1441.0, 0.02, 0.02,
                                 dipole_debye=50.0, refractive_index=3.4,
                                 v_eff_lambda3=1.7)
    assert wg2.coupling_scale > 0.0


def test_waveguide_undamped_tails_rejected():
    wg = CoupledCavityWaveguide(1439.0, 1441.0, 2000.0, 2000.0,
                                coupling_scale=1.0)
    with pytest.raises(ConfigError):
        build_reservoir_grid(wg, WINDOW)


def test_lorentzian_correlation_quadrature_matches_closed_form(cavity,
                                                               cavity_grid):
    g2 = (cavity.g_mev / HBAR_MEV_PS) ** 2
    kappa_ang = cavity.kappa_mev / HBAR_MEV_PS
    tau = np.linspace(0.0, 10.0 / kappa_ang, 401)
    omega_l = OMEGA_X - 0.5
    quad = photon_correlation(cavity_grid, omega_l, tau)
    closed = lorentzian_correlation(cavity, omega_l, tau)
    assert quad[0].real == pytest.approx(g2, rel=0.01)
    assert np.max(np.abs(quad - closed)) < 1e-3 * g2


def test_lorentzian_correlation_envelope_monotone(cavity):
    tau = np.linspace(0.0, 12.0, 500)
    env = np.abs(lorentzian_correlation(cavity, OMEGA_X, tau))
    assert np.all(np.diff(env) <= 0.0)


def test_correlation_quadrature_density_convergence(cavity):
    base = NumericsConfig()
    fine = base.doubled()
    tau = np.linspace(0.0, 8.0, 161)
    g1 = build_reservoir_grid(cavity, WINDOW, base)
    g2 = build_reservoir_grid(cavity, WINDOW, fine)
    j1 = photon_correlation(g1, OMEGA_X, tau)
    j2 = photon_correlation(g2, OMEGA_X, tau)
    scale = np.max(np.abs(j1))
    assert np.max(np.abs(j1 - j2)) < 1e-4 * scale


def test_flat_correlation_delta_like():
    flat = FlatBackground(1.0, 80.0, OMEGA_X)
    tau = np.linspace(0.0, 10.0, 4001)
    j = flat_correlation(flat, OMEGA_X, tau)
    # sharply peaked at tau=0 and integrating back to gamma_b
    assert np.argmax(np.abs(j)) == 0
    gamma = 2.0 * np.trapezoid(j.real, tau) * HBAR_MEV_PS * 1e3
    assert gamma == pytest.approx(1.0, rel=5e-3)


def test_envelope_matches_direct_sum(waveguide_grid):
    tau = np.linspace(0.0, 3.0, 7)
    env = correlation_envelope(waveguide_grid, tau)
    x = (waveguide_grid.omega_mev - waveguide_grid.omega_ref_mev) / HBAR_MEV_PS
    direct = np.array([
        np.sum(waveguide_grid.weights_angular * waveguide_grid.j_angular
               * np.exp(-1j * x * t)) for t in tau])
    assert np.allclose(env, direct, rtol=1e-12, atol=1e-15)
