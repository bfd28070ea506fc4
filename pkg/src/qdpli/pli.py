"""Steady-state exciton population and photoluminescence-intensity spectra.

Under weak cw driving the population has the closed form

    n_x = 1/2 [ 1 + (G+ - G- - gamma~) / (G+ + G- + gamma~ + S) ],
    S   = 4 <B>^2 eta^2 (Gpol + gamma_cd) / (Gpol^2 + Dxl^2 - gamma_cd^2),
    Gpol = (G+ + G- + gamma~ + gamma') / 2,

with the laser-exciton detuning Dxl = w_x - w_L.  The PLI is reported as
n_x directly (the detected intensity is proportional to it).  The SE
rate entering the formula samples the photonic environment at the laser
frequency, so sweeping the laser maps out the local density of states,
modified by phonon dressing.
"""

from dataclasses import dataclass, field

import numpy as np

from .bath import phase_function, phonon_rates_grid
from .config import DEFAULT_NUMERICS
from .errors import DomainError, SingularityError
from .rates import se_rate_bare_grid, se_rate_polaron_grid
from .reservoir import (CoupledCavityWaveguide, LorentzianCavity,
                        correlation_envelope, photon_spectral_density)

__all__ = [
    "RateSet",
    "pure_dephasing",
    "exciton_population",
    "DipMetric",
    "PLIResult",
    "pli_spectrum",
    "pli_dip_metric",
    "temperature_sweep",
]


@dataclass(frozen=True)
class RateSet:
    """All derived rates at one laser detuning, in microeV.

    gamma_cd can come out genuinely negative at large detunings; values
    from the quadrature itself are accepted by flagging
    quadrature_signed_cd, otherwise a -1e-6 ueV floor applies.
    """

    gamma_plus: float
    gamma_minus: float
    gamma_cd: float
    gamma_tilde: float
    gamma_bare: float
    gamma_prime: float
    gamma_b: float
    quadrature_signed_cd: bool = False

    def __post_init__(self):
        for name in ("gamma_plus", "gamma_minus", "gamma_tilde",
                     "gamma_bare", "gamma_prime", "gamma_b"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be >= 0")
        if not self.quadrature_signed_cd and self.gamma_cd < -1e-6:
            raise DomainError("gamma_cd below the -1e-6 ueV tolerance")


def pure_dephasing(temperature_k):
    """gamma'(T) = 3 + 0.95 (T - 1) microeV, clamped below 1 K."""
    if temperature_k < 0.0:
        raise DomainError("temperature must be >= 0")
    if temperature_k < 1.0:
        return 3.0
    return 3.0 + 0.95 * (temperature_k - 1.0)


def _population(gp, gm, gt, gcd, gprime, b_avg, eta_x_uev, delta_xl_mev):
    """Vector core of the steady-state formula (rates in ueV, Dxl in meV)."""
    gp = np.asarray(gp, dtype=float)
    gpol = 0.5 * (gp + gm + gt + gprime)
    delta_uev = np.asarray(delta_xl_mev, dtype=float) * 1e3
    sat_den = gpol ** 2 + delta_uev ** 2 - np.asarray(gcd, dtype=float) ** 2
    if np.any(sat_den <= 0.0):
        bad = np.asarray(delta_xl_mev, dtype=float)[
            np.atleast_1d(sat_den <= 0.0)][0]
        raise SingularityError(
            f"saturation denominator vanished at Dxl = {bad} meV",
            residual=float(np.min(sat_den)))
    sat = 4.0 * b_avg ** 2 * eta_x_uev ** 2 * (gpol + gcd) / sat_den
    den = gp + gm + gt + sat
    if np.any(den <= 0.0):
        bad = np.asarray(delta_xl_mev, dtype=float)[np.atleast_1d(den <= 0.0)][0]
        raise SingularityError(
            f"population denominator vanished at Dxl = {bad} meV",
            residual=float(np.min(den)))
    return 0.5 * (1.0 + (gp - gm - gt) / den)


def exciton_population(rates, b_avg, eta_x_uev, delta_xl_mev):
    """Steady-state n_x for a single RateSet; gamma' enters only through
    the polarisation decay inside the saturation term."""
    n = _population(rates.gamma_plus, rates.gamma_minus, rates.gamma_tilde,
                    rates.gamma_cd, rates.gamma_prime, b_avg, eta_x_uev,
                    np.asarray([delta_xl_mev]))
    return float(n[0])


@dataclass(frozen=True)
class DipMetric:
    """Depth of the reservoir-induced PLI dip.

    depth = n_x at the recovery maximum beyond the dip (moving away from
    the zero-phonon line, within the search bound) minus n_x at the dip
    minimum.  depth = 0 with absent positions when no dip exists.
    """

    depth: float
    dip_position_mev: float = None
    peak_position_mev: float = None


@dataclass(frozen=True)
class PLIResult:
    """PLI curves over the laser-detuning axis (Dxl = w_x - w_L, meV)."""

    delta_xl_mev: np.ndarray = field(repr=False)
    n_x_no_reservoir: np.ndarray = field(repr=False)
    n_x_bare: np.ndarray = field(repr=False)
    n_x_phonon: np.ndarray = field(repr=False)
    lineshape: np.ndarray = field(repr=False)
    gamma_plus: np.ndarray = field(repr=False)
    gamma_minus: np.ndarray = field(repr=False)
    gamma_cd: np.ndarray = field(repr=False)
    gamma_tilde: np.ndarray = field(repr=False)
    gamma_bare: np.ndarray = field(repr=False)
    b_avg: float
    gamma_prime_uev: float
    dip_bare: DipMetric = None
    dip_phonon: DipMetric = None

    def rate_set(self, index, gamma_b_uev):
        return RateSet(
            gamma_plus=float(self.gamma_plus[index]),
            gamma_minus=float(self.gamma_minus[index]),
            gamma_cd=float(self.gamma_cd[index]),
            gamma_tilde=float(self.gamma_tilde[index]),
            gamma_bare=float(self.gamma_bare[index]),
            gamma_prime=self.gamma_prime_uev,
            gamma_b=gamma_b_uev,
            quadrature_signed_cd=True,
        )


def _feature_interval_delta(grid, omega_x_mev):
    """Reservoir dip-search window mapped onto the Dxl axis.

    For a cavity: 2 kappa around the mode.  For a waveguide the band can
    straddle the zero-phonon line, so the window tracks one mode edge:
    the edge blue of the line when there is one (the aligned feature),
    otherwise the edge nearest to it.
    """
    res = grid.reservoir
    if isinstance(res, LorentzianCavity):
        lo = res.omega_c_mev - 2.0 * res.kappa_mev
        hi = res.omega_c_mev + 2.0 * res.kappa_mev
    elif isinstance(res, CoupledCavityWaveguide):
        edges = [(res.omega_u_mev, res.kappa_u_mev),
                 (res.omega_l_mev, res.kappa_l_mev)]
        blue = [e for e in edges if e[0] > omega_x_mev]
        if blue:
            edge, kap = min(blue, key=lambda e: e[0] - omega_x_mev)
        else:
            edge, kap = min(edges, key=lambda e: abs(e[0] - omega_x_mev))
        lo, hi = edge - 10.0 * kap, edge + 10.0 * kap
    else:
        return None
    return (omega_x_mev - hi, omega_x_mev - lo)


def pli_dip_metric(delta_xl_mev, n_x, feature_delta_interval,
                   search_beyond_mev=3.0):
    """Locate the PLI dip inside the reservoir feature window.

    The dip is the interior local minimum of n_x nearest the feature
    centre (the window can also contain the falling sideband tail, which
    is not a dip); the reference maximum is the largest n_x beyond the
    dip moving away from the zero-phonon line, bounded to
    search_beyond_mev.  No local minimum means no dip: depth 0.
    """
    if feature_delta_interval is None:
        return DipMetric(depth=0.0)
    delta = np.asarray(delta_xl_mev, dtype=float)
    n = np.asarray(n_x, dtype=float)
    lo, hi = feature_delta_interval
    inside = np.nonzero((delta >= lo) & (delta <= hi))[0]
    inside = inside[(inside > 0) & (inside < delta.size - 1)]
    if inside.size == 0:
        return DipMetric(depth=0.0)
    local = inside[(n[inside - 1] >= n[inside]) & (n[inside + 1] >= n[inside])]
    if local.size == 0:
        return DipMetric(depth=0.0)
    center = 0.5 * (lo + hi)
    k = int(local[np.argmin(np.abs(delta[local] - center))])
    d_dip = delta[k]
    if center < 0.0:
        sel = (delta < d_dip) & (delta >= d_dip - search_beyond_mev)
    else:
        sel = (delta > d_dip) & (delta <= d_dip + search_beyond_mev)
    if not np.any(sel):
        return DipMetric(depth=0.0)
    j = np.nonzero(sel)[0][np.argmax(n[sel])]
    depth = float(n[j] - n[k])
    if depth <= 0.0:
        return DipMetric(depth=0.0)
    return DipMetric(depth=depth, dip_position_mev=float(d_dip),
                     peak_position_mev=float(delta[j]))


def pli_spectrum(table, grid, drive, gamma_b_uev, background_add=True,
                 numerics=DEFAULT_NUMERICS, threads=1):
    """PLI curves over the detuning grid of `drive`.

    Emits the no-reservoir curve, the curves with the bare and the
    phonon-dressed SE rate, and the reservoir lineshape sampled at the
    laser frequency (normalised to unit peak).  Phonon scattering and
    cross dephasing act in every variant; only the SE rate differs.
    """
    delta = np.asarray(drive.delta_xl_grid_mev, dtype=float)
    omega_l = drive.omega_x_mev - delta
    gp, gm, gcd = phonon_rates_grid(table, drive.eta_x_uev, delta,
                                    chunk=numerics.chunk, threads=threads)
    gprime = pure_dephasing(table.bath.temperature_k)

    if grid is not None:
        envelope = None
        if isinstance(grid.reservoir, CoupledCavityWaveguide):
            envelope = correlation_envelope(grid, table.tau_grid,
                                            chunk=numerics.chunk,
                                            threads=threads)
        bare = se_rate_bare_grid(grid, omega_l, numerics, threads=threads,
                                 envelope=envelope)
        dressed = se_rate_polaron_grid(table, grid, omega_l, numerics,
                                       threads=threads, envelope=envelope,
                                       bare=bare)
        off = gamma_b_uev if background_add else 0.0
        line = np.asarray(photon_spectral_density(omega_l, grid.reservoir),
                          dtype=float)
        peak = float(np.max(line))
        lineshape = line / peak if peak > 0.0 else line
    else:
        bare = np.zeros_like(delta)
        dressed = np.zeros_like(delta)
        off = gamma_b_uev
        lineshape = np.zeros_like(delta)

    args = (gcd, gprime, table.b_avg, drive.eta_x_uev, delta)
    n_free = _population(gp, gm, np.full_like(delta, gamma_b_uev), *args)
    n_bare = _population(gp, gm, bare + off, *args)
    n_phonon = _population(gp, gm, dressed + off, *args)

    interval = None if grid is None else _feature_interval_delta(
        grid, drive.omega_x_mev)
    return PLIResult(
        delta_xl_mev=delta,
        n_x_no_reservoir=n_free,
        n_x_bare=n_bare,
        n_x_phonon=n_phonon,
        lineshape=lineshape,
        gamma_plus=gp,
        gamma_minus=gm,
        gamma_cd=gcd,
        gamma_tilde=dressed + off if grid is not None else np.full_like(delta, gamma_b_uev),
        gamma_bare=bare + off if grid is not None else np.full_like(delta, gamma_b_uev),
        b_avg=table.b_avg,
        gamma_prime_uev=gprime,
        dip_bare=pli_dip_metric(delta, n_bare, interval),
        dip_phonon=pli_dip_metric(delta, n_phonon, interval),
    )


def temperature_sweep(bath, grid, drive, gamma_b_uev, t_grid_k,
                      background_add=True, numerics=DEFAULT_NUMERICS,
                      threads=1):
    """Dip depth versus temperature for the bare and dressed SE rates.

    The phase table is rebuilt at every temperature; the reservoir and
    drive are held fixed.
    """
    t_grid = np.asarray(t_grid_k, dtype=float)
    if t_grid.size == 0 or np.any(np.diff(t_grid) <= 0.0):
        raise DomainError("temperature grid must be strictly increasing")
    depth_bare, depth_phonon = [], []
    for t_k in t_grid:
        table = phase_function(bath.with_temperature(float(t_k)),
                               numerics=numerics)
        result = pli_spectrum(table, grid, drive, gamma_b_uev,
                              background_add=background_add,
                              numerics=numerics, threads=threads)
        depth_bare.append(result.dip_bare.depth)
        depth_phonon.append(result.dip_phonon.depth)
    return t_grid, np.asarray(depth_bare), np.asarray(depth_phonon)
