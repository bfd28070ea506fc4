import numpy as np
import pytest

import oracles
from qdpli.bath import (PhononBath, cross_dephasing, phase_function,
                        phonon_correlation, phonon_rates_grid,
                        phonon_scattering_rates, phonon_spectral_density)
from qdpli.config import NumericsConfig
from qdpli.errors import ConfigError, DomainError, NumericsError
from qdpli.units import HBAR_MEV_PS, KB_MEV_PER_K


def test_bath_validation():
    with pytest.raises(ConfigError):
        PhononBath(-0.1, 1.0, 4.0)
    with pytest.raises(ConfigError):
        PhononBath(0.06, 0.0, 4.0)
    with pytest.raises(ConfigError):
        PhononBath(0.06, 1.0, -4.0)
    PhononBath(0.0, 1.0, 0.0)  # phonon-free limit is accepted


def test_spectral_density_zero_at_origin(bath40):
    assert phonon_spectral_density(0.0, bath40) == 0.0


def test_spectral_density_zero_coupling():
    bath = PhononBath(0.0, 1.0, 40.0)
    omegas = np.linspace(0.0, 8.0, 100)
    assert np.all(phonon_spectral_density(omegas, bath) == 0.0)


def test_spectral_density_argmax(bath40):
    # d/dw [w^3 exp(-w^2/2wb^2)] = 0 at w = sqrt(3) wb
    omegas = np.linspace(0.01, 6.0, 240001)
    j = phonon_spectral_density(omegas, bath40)
    w_star = omegas[np.argmax(j)]
    assert w_star == pytest.approx(np.sqrt(3.0) * 1.0, abs=2 * (omegas[1] - omegas[0]))


def test_ordinary_convention_scales_by_two_pi_squared(bath40):
    j_ang = phonon_spectral_density(1.3, bath40, convention="angular")
    j_ord = phonon_spectral_density(1.3, bath40, convention="ordinary")
    assert j_ord == pytest.approx(j_ang / (2 * np.pi) ** 2, rel=1e-14)


def test_phase_zero_coupling_degenerate():
    table = phase_function(PhononBath(0.0, 1.0, 40.0))
    assert table.b_avg == 1.0
    assert table.polaron_shift_mev == 0.0
    assert np.all(table.phi == 0.0)


def test_phase_value_checks_and_b_avg(table40):
    assert table40.phi_zero == pytest.approx(oracles.PHI_ZERO_40K, rel=1e-10)
    assert table40.b_avg == pytest.approx(oracles.B_AVG[40.0], rel=1e-6)
    # live oracle recomputation (independent quadrature)
    assert table40.b_avg == pytest.approx(oracles.b_avg(40.0), rel=1e-6)
    assert abs(table40.phi[0].imag) < 1e-10
    assert np.max(table40.phi.real) <= table40.phi_zero + 1e-10


@pytest.mark.parametrize("temperature", [0.0, 4.0, 10.0, 20.0, 40.0])
def test_b_avg_frozen_by_temperature(temperature):
    table = phase_function(PhononBath(0.06, 1.0, temperature))
    assert table.b_avg == pytest.approx(oracles.B_AVG[temperature], rel=1e-6)


def test_b_avg_strictly_decreasing_in_temperature():
    values = [phase_function(PhononBath(0.06, 1.0, t)).b_avg
              for t in (4.0, 10.0, 20.0, 40.0)]
    assert all(0.0 < b <= 1.0 for b in values)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_polaron_shift_analytic_and_temperature_independent(table40):
    sigma = 1.0 / HBAR_MEV_PS
    analytic = 0.06 * np.sqrt(np.pi / 2.0) * sigma ** 3 * HBAR_MEV_PS
    assert table40.polaron_shift_mev == pytest.approx(analytic, rel=1e-10)
    assert table40.polaron_shift_mev == pytest.approx(
        oracles.POLARON_SHIFT_MEV, rel=1e-10)
    cold = phase_function(PhononBath(0.06, 1.0, 4.0))
    assert cold.polaron_shift_mev == pytest.approx(
        table40.polaron_shift_mev, rel=1e-12)
    assert table40.polaron_shift_mev > 0.0


def test_phase_conjugate_symmetry(bath40):
    # cos is even and sin odd in tau, so phi(-tau) = conj(phi(tau))
    from qdpli.bath import _phi_on_grid
    taus = np.array([-2.3, -0.7, 0.7, 2.3])
    phi, _, _ = _phi_on_grid(taus, bath40, 0.06, 512, 8.0 / HBAR_MEV_PS)
    assert phi[0] == pytest.approx(np.conj(phi[3]), rel=1e-12)
    assert phi[1] == pytest.approx(np.conj(phi[2]), rel=1e-12)


def test_phase_against_closed_form_split(bath40, table40):
    # Dawson-function split evaluated on a few nodes
    for tau in (0.3, 1.0, 2.5, 7.0):
        k = int(np.argmin(np.abs(table40.tau_grid - tau)))
        live = oracles.phi(float(table40.tau_grid[k]), 40.0)
        assert table40.phi[k] == pytest.approx(live, abs=1e-8)


def test_phase_tail_criterion_raises_for_short_grid():
    with pytest.raises(NumericsError):
        phase_function(PhononBath(0.06, 1.0, 0.0), tau_max=1.5)


def test_correlation_at_zero_and_bounds(table40):
    assert phonon_correlation(table40, 0.0) == pytest.approx(1.0 + 0.0j, abs=1e-14)
    taus = np.linspace(0.0, 10.0, 1001)
    c = phonon_correlation(table40, taus)
    assert np.all(np.abs(c) <= 1.0 + 1e-12)


def test_correlation_long_time_limit(table40):
    c_end = phonon_correlation(table40, table40.tau_grid[-1])
    assert abs(abs(c_end) - table40.b_avg ** 2) < 1e-3 * table40.b_avg ** 2


def test_correlation_domain_error(table40):
    with pytest.raises(DomainError):
        phonon_correlation(table40, -0.1)
    with pytest.raises(DomainError):
        phonon_correlation(table40, table40.tau_grid[-1] + 0.1)


@pytest.mark.parametrize("delta,temperature", [(-1.0, 40.0), (0.0, 40.0),
                                               (-1.0, 10.0), (-1.0, 0.0)])
def test_scattering_rates_frozen(delta, temperature):
    table = phase_function(PhononBath(0.06, 1.0, temperature))
    gp, gm = phonon_scattering_rates(table, 0.4, delta)
    ref_p, ref_m = oracles.GAMMA_PM[(delta, temperature)]
    assert gp == pytest.approx(ref_p, rel=1e-3)
    # zero-temperature absorption is zero to the noise floor
    if ref_m < 1e-9:
        assert gm <= 1e-9
    else:
        assert gm == pytest.approx(ref_m, rel=1e-3)


def test_scattering_rates_live_oracle(table40):
    gp, gm = phonon_scattering_rates(table40, 0.4, -1.0)
    ref_p, ref_m = oracles.gamma_pm_uev(0.4, -1.0, 40.0)
    assert gp == pytest.approx(ref_p, rel=1e-4)
    assert gm == pytest.approx(ref_m, rel=1e-4)


def test_blue_detuning_favours_excitation(table40):
    gp, gm = phonon_scattering_rates(table40, 0.4, -1.0)
    assert gp > gm


def test_scattering_symmetry_on_grid(table40):
    delta = np.linspace(-3.0, 3.0, 241)
    gp, gm, _ = phonon_rates_grid(table40, 0.4, delta)
    assert np.allclose(gp, gm[::-1], rtol=1e-8, atol=1e-18)


def test_detailed_balance_ratio(table40):
    # emission/absorption sidebands obey the thermal-equilibrium ratio
    for delta in (0.5, 1.0, 2.0):
        gp, gm, _ = phonon_rates_grid(table40, 0.4, [-delta])
        expected = np.exp(delta / (KB_MEV_PER_K * 40.0))
        assert gp[0] / gm[0] == pytest.approx(expected, rel=2e-2)


def test_rates_zero_coupling_exact():
    table = phase_function(PhononBath(0.0, 1.0, 40.0))
    gp, gm, gcd = phonon_rates_grid(table, 0.4, np.linspace(-3, 3, 41))
    assert np.all(gp == 0.0)
    assert np.all(gm == 0.0)
    assert np.all(gcd == 0.0)


def test_rates_nonnegative_full_window():
    for temperature in (10.0, 40.0):
        table = phase_function(PhononBath(0.06, 1.0, temperature))
        gp, gm, _ = phonon_rates_grid(table, 0.4, np.linspace(-3.0, 3.0, 601))
        assert np.min(gp) >= 0.0
        assert np.min(gm) >= 0.0


def test_eta_squared_scaling_exact(table40):
    delta = np.array([-1.3, 0.2, 2.1])
    gp1, gm1, gcd1 = phonon_rates_grid(table40, 0.4, delta)
    gp2, gm2, gcd2 = phonon_rates_grid(table40, 1.2, delta)
    assert np.allclose(gp2, 9.0 * gp1, rtol=1e-13)
    assert np.allclose(gm2, 9.0 * gm1, rtol=1e-13)
    assert np.allclose(gcd2, 9.0 * gcd1, rtol=1e-13)


def test_cross_dephasing_frozen_and_live(table40):
    assert cross_dephasing(table40, 0.4, 0.0) == pytest.approx(
        oracles.GAMMA_CD[(0.0, 40.0)], rel=1e-3)
    assert cross_dephasing(table40, 0.4, 1.0) == pytest.approx(
        oracles.GAMMA_CD[(1.0, 40.0)], rel=1e-3)
    live = oracles.gamma_cd_uev(0.4, 0.0, 40.0)
    assert cross_dephasing(table40, 0.4, 0.0) == pytest.approx(live, rel=1e-4)


def test_cross_dephasing_even(table40):
    for delta in (0.4, 1.7):
        assert cross_dephasing(table40, 0.4, delta) == pytest.approx(
            cross_dephasing(table40, 0.4, -delta), rel=1e-12)


def test_cross_dephasing_genuinely_negative_far_detuned(table40):
    # the cosine quadrature changes sign at large detuning; the frozen
    # oracle agrees, so this is signal rather than noise
    val = cross_dephasing(table40, 0.4, 3.0)
    assert val == pytest.approx(oracles.GAMMA_CD[(3.0, 40.0)], rel=1e-3)
    assert val < 0.0


def test_quadrature_doubling_convergence(bath40):
    base = NumericsConfig()
    fine = NumericsConfig(n_tau=2 * base.n_tau, n_omega=2 * base.n_omega)
    delta = np.array([-1.0, 0.0, 0.7])
    t1 = phase_function(bath40, numerics=base)
    t2 = phase_function(bath40, numerics=fine)
    assert t2.b_avg == pytest.approx(t1.b_avg, rel=1e-4)
    r1 = phonon_rates_grid(t1, 0.4, delta)
    r2 = phonon_rates_grid(t2, 0.4, delta)
    for a, b in zip(r1, r2):
        assert np.allclose(a, b, rtol=1e-4, atol=1e-18)
