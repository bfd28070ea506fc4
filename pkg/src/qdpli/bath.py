"""Acoustic-phonon bath: spectral density, displacement phase, scattering rates.

The bath couples to the exciton through a cubic spectral density with a
Gaussian cutoff,

    J_pn(w) = a_p w^3 exp(-w^2 / (2 w_b^2)),

and everything downstream derives from the independent-boson phase

    phi(t) = int_0^inf dw J_pn(w)/w^2 [coth(hbar w / 2 kB T) cos(w t) - i sin(w t)].

<B> = exp(-phi(0)/2) renormalises the coherent drive, C_pn(t) =
exp(phi(t) - phi(0)) is the phonon correlation function, and the
drive-induced scattering rates are Fourier-type integrals of exp(phi)-1.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _numerics
from .config import DEFAULT_NUMERICS, PHONON_CONVENTIONS
from .errors import ConfigError, DomainError, NumericsError
from .units import HBAR_MEV_PS, UNITS, thermal_coth

__all__ = [
    "PhononBath",
    "PhaseTable",
    "phonon_spectral_density",
    "phase_function",
    "phonon_correlation",
    "phonon_scattering_rates",
    "phonon_rates_grid",
    "cross_dephasing",
]


@dataclass(frozen=True)
class PhononBath:
    """Ohmic-cubed bath parameters.

    alpha_p is the coupling constant that multiplies w^3 with w in rad/ps
    (the number usually quoted for InAs dots, 0.06 ps^2).  The
    'ordinary' frequency convention treats the stored value as quoted
    against cyclic frequencies instead, which rescales it by (2 pi)^-2.
    alpha_p = 0 is the phonon-free limit and is accepted.
    """

    alpha_p: float
    omega_b_mev: float
    temperature_k: float

    def __post_init__(self):
        if self.alpha_p < 0.0:
            raise ConfigError("alpha_p must be >= 0", key="alpha_p")
        if self.omega_b_mev <= 0.0:
            raise ConfigError("omega_b must be > 0", key="omega_b_mev")
        if self.temperature_k < 0.0:
            raise ConfigError("temperature must be >= 0", key="temperature_k")

    def effective_alpha(self, convention="angular"):
        if convention not in PHONON_CONVENTIONS:
            raise ConfigError(
                f"unknown phonon frequency convention {convention!r}",
                key="phonon_frequency_convention",
            )
        if convention == "angular":
            return self.alpha_p
        return self.alpha_p / (2.0 * np.pi) ** 2

    @property
    def omega_b_angular(self):
        return self.omega_b_mev / HBAR_MEV_PS

    def with_temperature(self, temperature_k):
        return PhononBath(self.alpha_p, self.omega_b_mev, temperature_k)


def phonon_spectral_density(omega_mev, bath, convention="angular"):
    """J_pn at an energy omega >= 0 in meV, returned in rad/ps.

    Evaluated in angular-frequency variables; vanishes at omega = 0.
    """
    omega = np.asarray(omega_mev, dtype=float)
    if np.any(omega < 0.0):
        raise DomainError("phonon_spectral_density requires omega >= 0")
    alpha = bath.effective_alpha(convention)
    w = omega / HBAR_MEV_PS
    sigma = bath.omega_b_angular
    out = alpha * w ** 3 * np.exp(-(w ** 2) / (2.0 * sigma ** 2))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PhaseTable:
    """phi sampled on a uniform time grid, plus derived bath constants.

    polaron_shift_mev reports int J_pn/w dw; user-facing detunings are
    treated as already polaron-shifted, so the shift is informational.
    alpha_eff is kept for the closed-form algebraic phi tail used by the
    scattering-rate integrals beyond tau_max.
    """

    tau_grid: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    phi_zero: float
    b_avg: float
    polaron_shift_mev: float
    alpha_eff: float
    sigma_angular: float
    bath: PhononBath
    tail_residual: float
    quad_residual: float


def _phi_on_grid(tau, bath, alpha, n_omega, omega_cut):
    """Gauss-Legendre evaluation of phi on the given tau grid."""
    sigma = bath.omega_b_angular
    w, wt = _numerics.gauss_legendre_nodes(n_omega, 0.0, omega_cut)
    kernel = alpha * w * np.exp(-(w ** 2) / (2.0 * sigma ** 2))
    coth = thermal_coth(w * HBAR_MEV_PS, bath.temperature_k)
    wc = wt * kernel * coth   # weights for the cosine part
    ws = wt * kernel          # weights for the sine part
    arg = np.outer(tau, w)
    phi = np.cos(arg) @ wc - 1j * (np.sin(arg) @ ws)
    phi_zero = float(np.sum(wc))
    shift = float(np.sum(wt * kernel * w)) * HBAR_MEV_PS
    return phi, phi_zero, shift


def phase_function(bath, tau_max=None, n_tau=None, n_omega=None,
                   numerics=DEFAULT_NUMERICS):
    """Build the PhaseTable by quadrature over (0, omega_cut].

    The frequency cutoff is omega_cutoff_factor * omega_b, where the
    Gaussian factor is below 1e-13.  A doubling check on the quadrature
    and a tail check on |C_pn(tau_max)| guard convergence.
    """
    tau_max = numerics.tau_max_ps if tau_max is None else tau_max
    n_tau = numerics.n_tau if n_tau is None else n_tau
    n_omega = numerics.n_omega if n_omega is None else n_omega
    if tau_max <= 0.0:
        raise DomainError("tau_max must be positive")
    if n_tau < 2 or n_omega < 2:
        raise DomainError("grid sizes must be at least 2")

    alpha = bath.effective_alpha(numerics.phonon_frequency_convention)
    sigma = bath.omega_b_angular
    omega_cut = numerics.omega_cutoff_factor * sigma
    tau = np.linspace(0.0, tau_max, n_tau)

    phi, phi_zero, shift = _phi_on_grid(tau, bath, alpha, n_omega, omega_cut)

    # doubling check on phi(0) and a sample of the grid
    probe = tau[:: max(1, n_tau // 16)]
    phi2, phi_zero2, _ = _phi_on_grid(probe, bath, alpha, 2 * n_omega, omega_cut)
    scale = max(abs(phi_zero), 1e-30)
    residual = max(
        abs(phi_zero2 - phi_zero) / scale,
        float(np.max(np.abs(phi2 - phi[:: max(1, n_tau // 16)]))) / scale,
    ) if alpha > 0.0 else 0.0
    if residual > numerics.quad_rel_tol:
        raise NumericsError(
            f"phase quadrature not converged (residual {residual:.3e} "
            f"doubling n_omega={n_omega})", residual=residual)

    if np.max(phi.real) > phi_zero + 1e-10:
        raise NumericsError("Re phi exceeds phi(0); quadrature inconsistent",
                            residual=float(np.max(phi.real) - phi_zero))

    # |C(tau_max)| must have relaxed to <B>^2 within tail_tol
    tail = abs(np.exp(phi[-1].real) - 1.0)
    if alpha > 0.0 and tail > numerics.tail_tol:
        raise NumericsError(
            f"phi tail not converged at tau_max={tau_max} ps "
            f"(|C|/<B>^2 - 1 = {tail:.3e})", residual=tail)

    return PhaseTable(
        tau_grid=tau,
        phi=phi,
        phi_zero=phi_zero,
        b_avg=float(np.exp(-0.5 * phi_zero)),
        polaron_shift_mev=shift,
        alpha_eff=alpha,
        sigma_angular=sigma,
        bath=bath,
        tail_residual=tail,
        quad_residual=residual,
    )


def phonon_correlation(table, tau):
    """C_pn(tau) = exp(phi(tau) - phi(0)), phi linearly interpolated."""
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0.0) or np.any(t > table.tau_grid[-1]):
        raise DomainError("tau outside the tabulated range")
    phi = (np.interp(t, table.tau_grid, table.phi.real)
           + 1j * np.interp(t, table.tau_grid, table.phi.imag))
    out = np.exp(phi - table.phi_zero)
    return out if out.ndim else complex(out)


def _phi_tail_transform(table, nus):
    """int_{tau_max}^inf phi(t) exp(i nu t) dt beyond the grid.

    At T = 0 the integrand w exp(-w^2/2s^2) is odd at the origin and phi
    acquires the algebraic tail -a (1/t^2 + 3/(s^2 t^4)).  At T > 0 the
    full kernel w coth(hbar w/2 kB T) exp(...) is even and analytic, so
    phi decays exponentially on the scale hbar/(2 pi kB T): the thermal
    part cancels the zero-point tail order by order and no correction is
    added (default tau_max covers T down to roughly 1 K; the C_pn tail
    residual check guards shorter grids).
    """
    if table.bath.temperature_k > 0.0:
        return np.zeros(np.atleast_1d(np.asarray(nus)).shape, dtype=complex)
    tau_c = float(table.tau_grid[-1])
    t2, t4 = _numerics.exp_tail_moments(nus, tau_c, orders=(2, 4))
    return -table.alpha_eff * (t2 + 3.0 / table.sigma_angular ** 2 * t4)


def _sideband_integrals(table, nus, chunk=256, threads=1):
    """I_p(nu) = int_0^inf (e^phi - 1) e^{i nu t} dt and the matching
    I_m(nu) with integrand (1 - e^{-phi})."""
    w = _numerics.trapezoid_weights(table.tau_grid)
    f_p = np.exp(table.phi) - 1.0
    f_m = 1.0 - np.exp(-table.phi)
    ip, im = _numerics.oscillatory_sums(
        table.tau_grid, w, [f_p, f_m], nus, chunk=chunk, threads=threads)
    tail = _phi_tail_transform(table, nus)
    return ip + tail, im + tail


def _rate_prefactor_uev(table, eta_x_uev):
    # 2 <B>^2 eta^2 with eta in rad/ps, converted so the tau-integral in ps
    # yields a rate in microeV.
    eta_mev = eta_x_uev * 1e-3
    return 2e3 * table.b_avg ** 2 * eta_mev ** 2 / HBAR_MEV_PS


def phonon_rates_grid(table, eta_x_uev, delta_xl_mev, chunk=256, threads=1):
    """Gamma+, Gamma- and gamma_cd (microeV) on a laser-detuning grid (meV).

    Gamma+- = 2 <B>^2 eta^2 Re int_0^inf e^{-+ i Dxl t} (e^phi - 1) dt,
    gamma_cd = 2 <B>^2 eta^2 Re int_0^inf cos(Dxl t) (1 - e^{-phi}) dt.
    """
    delta = np.atleast_1d(np.asarray(delta_xl_mev, dtype=float))
    dtil = delta / HBAR_MEV_PS
    nus = np.concatenate([-dtil, dtil])
    ip, im = _sideband_integrals(table, nus, chunk=chunk, threads=threads)
    n = delta.size
    pref = _rate_prefactor_uev(table, eta_x_uev)
    g_plus = pref * ip[:n].real
    g_minus = pref * ip[n:].real
    g_cd = 0.5 * pref * (im[:n].real + im[n:].real)

    scale = max(float(np.max(g_plus)), float(np.max(g_minus)), 1e-30)
    worst = min(float(np.min(g_plus)), float(np.min(g_minus)))
    # noise floor of the truncated tail expansion; genuine sign errors are O(scale)
    if worst < -(1e-5 * scale + 1e-12):
        raise NumericsError(
            f"negative phonon scattering rate ({worst:.3e} ueV); "
            "quadrature failure", residual=worst)
    # values below the validated noise floor are clamped to zero
    return np.maximum(g_plus, 0.0), np.maximum(g_minus, 0.0), g_cd


def phonon_scattering_rates(table, eta_x_uev, delta_xl_mev):
    """(Gamma+, Gamma-) in microeV at a single detuning."""
    gp, gm, _ = phonon_rates_grid(table, eta_x_uev, [delta_xl_mev])
    return float(gp[0]), float(gm[0])


def cross_dephasing(table, eta_x_uev, delta_xl_mev):
    """gamma_cd in microeV at a single detuning; even in the detuning."""
    _, _, gcd = phonon_rates_grid(table, eta_x_uev, [delta_xl_mev])
    return float(gcd[0])
