"""Spontaneous-emission rates and Purcell spectra.

The phonon-dressed rate is the time-domain overlap of the phonon and
photon correlation functions,

    gamma~ = 2 Re int_0^inf C_pn(tau) J_ph(tau) dtau,

and the bare rate is the same integral with C_pn = 1.  Numerically the
dressed rate is split as

    gamma~ = 2 Re int (C_pn - <B>^2) J_ph dtau  +  <B>^2 gamma_bare,

so the remaining integrand decays on the phonon timescale and the grid
never has to resolve the photon lifetime.  The bare rate itself is a
tau-quadrature with a closed-form tail for the cavity and flat variants;
for the waveguide (whose memory can exceed any practical grid) it uses
the exact Fourier identity gamma = 2 pi J_ph(w_L).
"""

from dataclasses import dataclass, field

import numpy as np

from . import _numerics
from .bath import phonon_correlation
from .config import DEFAULT_NUMERICS
from .errors import ConfigError
from .reservoir import (CoupledCavityWaveguide, FlatBackground,
                        LorentzianCavity, correlation_envelope,
                        photon_spectral_density)
from .units import HBAR_MEV_PS

__all__ = [
    "se_rate_bare",
    "se_rate_bare_grid",
    "se_rate_polaron",
    "se_rate_polaron_grid",
    "PurcellSpectrum",
    "purcell_spectrum",
]

_TO_UEV = HBAR_MEV_PS * 1e3  # rad/ps -> microeV


def _tau_axis(numerics):
    return np.linspace(0.0, numerics.tau_max_ps, numerics.n_tau)


def _bare_sums(grid, omega_l, tau, weights, extra=None, chunk=256, threads=1,
               envelope=None):
    """Trapezoid of J_ph(tau) [optionally times extra(tau)] against each
    laser frequency, plus the closed-form remainder beyond the grid.
    Returns complex integrals in angular units."""
    res = grid.reservoir
    omega_l = np.atleast_1d(np.asarray(omega_l, dtype=float))
    tau_c = float(tau[-1])
    f_extra = np.ones_like(tau) if extra is None else extra

    if isinstance(res, LorentzianCavity):
        g2 = (res.g_mev / HBAR_MEV_PS) ** 2
        k = res.kappa_mev / HBAR_MEV_PS
        nus = (omega_l - res.omega_c_mev) / HBAR_MEV_PS
        f = g2 * np.exp(-0.5 * k * tau) * f_extra
        (val,) = _numerics.oscillatory_sums(tau, weights, [f], nus,
                                            chunk=chunk, threads=threads)
        if extra is None:
            lam = 1j * nus - 0.5 * k
            val = val + g2 * np.exp(lam * tau_c) / (-lam)
        return val

    if isinstance(res, FlatBackground):
        level = res.gamma_b_uev * 1e-3 / HBAR_MEV_PS / (2.0 * np.pi)
        half = 0.5 * res.bandwidth_mev / HBAR_MEV_PS
        nus = (omega_l - res.center_mev) / HBAR_MEV_PS
        env = np.where(tau == 0.0, 2.0 * half,
                       2.0 * np.sin(half * tau) / np.where(tau == 0.0, 1.0, tau))
        f = level * env * f_extra
        (val,) = _numerics.oscillatory_sums(tau, weights, [f], nus,
                                            chunk=chunk, threads=threads)
        if extra is None:
            # int_tc^inf e^{i mu t}/t dt = E1(-i mu tc) for each band edge
            for s, mu in ((1.0, nus + half), (-1.0, nus - half)):
                ok = np.abs(mu) * tau_c > 1e-9
                (t1,) = _numerics.exp_tail_moments(np.where(ok, mu, 1.0),
                                                   tau_c, orders=(1,))
                val = val + np.where(ok, s * level / 1j * t1, 0.0)
        return val

    if isinstance(res, CoupledCavityWaveguide):
        if envelope is None:
            envelope = correlation_envelope(grid, tau, chunk=chunk,
                                            threads=threads)
        nus = (omega_l - grid.omega_ref_mev) / HBAR_MEV_PS
        f = envelope * f_extra
        (val,) = _numerics.oscillatory_sums(tau, weights, [f], nus,
                                            chunk=chunk, threads=threads)
        return val

    raise ConfigError(f"unknown reservoir type {type(res).__name__}")


def se_rate_bare_grid(grid, omega_l_mev, numerics=DEFAULT_NUMERICS,
                      chunk=None, threads=1, envelope=None):
    """Phonon-free SE rate (microeV) at each laser frequency (meV)."""
    omega_l = np.atleast_1d(np.asarray(omega_l_mev, dtype=float))
    chunk = numerics.chunk if chunk is None else chunk
    res = grid.reservoir
    if isinstance(res, CoupledCavityWaveguide):
        # exact Fourier identity; a tau grid may not cover the band memory
        j = np.asarray(photon_spectral_density(omega_l, res), dtype=float)
        return 2.0 * np.pi * j * _TO_UEV
    tau = _tau_axis(numerics)
    w = _numerics.trapezoid_weights(tau)
    val = _bare_sums(grid, omega_l, tau, w, chunk=chunk, threads=threads,
                     envelope=envelope)
    return 2.0 * val.real * _TO_UEV


def se_rate_bare(grid, omega_l_mev, numerics=DEFAULT_NUMERICS):
    """gamma = 2 int Re J_ph(tau) dtau at a single laser frequency."""
    return float(se_rate_bare_grid(grid, [omega_l_mev], numerics)[0])


def se_rate_polaron_grid(table, grid, omega_l_mev, numerics=DEFAULT_NUMERICS,
                         chunk=None, threads=1, envelope=None,
                         bare=None):
    """Phonon-dressed SE rate (microeV) at each laser frequency (meV).

    Reduces identically to the bare rate when the bath coupling is zero,
    because the residual integrand C_pn - <B>^2 vanishes.
    """
    omega_l = np.atleast_1d(np.asarray(omega_l_mev, dtype=float))
    chunk = numerics.chunk if chunk is None else chunk
    tau = table.tau_grid
    w = _numerics.trapezoid_weights(tau)
    b2 = table.b_avg ** 2
    resid = np.exp(table.phi - table.phi_zero) - b2
    if bare is None:
        bare = se_rate_bare_grid(grid, omega_l, numerics, chunk=chunk,
                                 threads=threads, envelope=envelope)
    if isinstance(grid.reservoir, CoupledCavityWaveguide) and envelope is None:
        envelope = correlation_envelope(grid, tau, chunk=chunk, threads=threads)
    val = _bare_sums(grid, omega_l, tau, w, extra=resid, chunk=chunk,
                     threads=threads, envelope=envelope)
    return 2.0 * val.real * _TO_UEV + b2 * bare


def se_rate_polaron(table, grid, omega_l_mev, numerics=DEFAULT_NUMERICS):
    """gamma~ = 2 int Re[C_pn(tau) J_ph(tau)] dtau at one laser frequency."""
    return float(se_rate_polaron_grid(table, grid, [omega_l_mev], numerics)[0])


@dataclass(frozen=True)
class PurcellSpectrum:
    """Purcell factor with and without phonon dressing across a window."""

    omega_l_mev: np.ndarray = field(repr=False)
    detuning_mev: np.ndarray = field(repr=False)
    pf_bare: np.ndarray = field(repr=False)
    pf_phonon: np.ndarray = field(repr=False)
    feature_omega_mev: float
    gamma_b_uev: float


def purcell_spectrum(table, grid, omega_l_mev, gamma_b_uev,
                     background_add=True, numerics=DEFAULT_NUMERICS,
                     threads=1):
    """PF = gamma~/gamma_b (and bare gamma/gamma_b) at each frequency.

    With background_add the unstructured background gamma_b is added to
    both rates; the broadband background is phonon-transparent, so it
    enters the dressed rate unmodified.
    """
    omega_l = np.asarray(omega_l_mev, dtype=float)
    if gamma_b_uev <= 0.0:
        raise ConfigError("gamma_b must be > 0 for a Purcell factor",
                          key="gamma_b_uev")
    envelope = None
    if isinstance(grid.reservoir, CoupledCavityWaveguide):
        envelope = correlation_envelope(grid, table.tau_grid,
                                        chunk=numerics.chunk, threads=threads)
    bare = se_rate_bare_grid(grid, omega_l, numerics, threads=threads,
                             envelope=envelope)
    dressed = se_rate_polaron_grid(table, grid, omega_l, numerics,
                                   threads=threads, envelope=envelope,
                                   bare=bare)
    off = gamma_b_uev if background_add else 0.0
    if not background_add and (np.any(bare + off <= 0.0)
                               or np.any(dressed + off <= 0.0)):
        raise ConfigError("Purcell factor undefined where the rate vanishes")
    feature = grid.peak_omega_mev
    if isinstance(grid.reservoir, CoupledCavityWaveguide):
        feature = 0.5 * (grid.reservoir.omega_l_mev + grid.reservoir.omega_u_mev)
    return PurcellSpectrum(
        omega_l_mev=omega_l,
        detuning_mev=omega_l - feature,
        pf_bare=(bare + off) / gamma_b_uev,
        pf_phonon=(dressed + off) / gamma_b_uev,
        feature_omega_mev=feature,
        gamma_b_uev=gamma_b_uev,
    )
