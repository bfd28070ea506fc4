"""Photonic reservoirs: spectral densities J_ph(w) and correlation functions.

Three variants are supported:

* flat background   J = gamma_b / (2 pi) inside a band (unstructured slab)
* Lorentzian cavity J = g^2 (kappa/2) / pi / ((w - w_c)^2 + (kappa/2)^2)
* coupled-cavity waveguide, from the nearest-neighbour tight-binding band,
    J = -pref(w)/pi * Im[ 1 / sqrt((w - wt_u)(w - wt_l*)) ]
  with complex band edges wt_{u,l} = w_{u,l} +/- i kappa_{u,l}.  The square
  root is split into per-factor principal roots, which keeps the branch
  continuous across the band; an overall sign fixed at construction makes
  J >= 0 (the closed form only pins the sign through positivity).

Internally J is expressed in rad/ps against angular frequencies.
"""

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import _numerics
from .config import DEFAULT_NUMERICS
from .errors import ConfigError, NumericsError
from .units import HBAR_MEV_PS

__all__ = [
    "FlatBackground",
    "LorentzianCavity",
    "CoupledCavityWaveguide",
    "PhotonReservoir",
    "ReservoirGrid",
    "photon_spectral_density",
    "build_reservoir_grid",
    "lorentzian_correlation",
    "flat_correlation",
    "correlation_envelope",
    "photon_correlation",
]

# SI constants for the dipole-coupling prefactor
_DEBYE_CM = 3.33564e-30          # C m
_HBAR_JS = 1.054571817e-34       # J s
_EPS0 = 8.8541878128e-12         # F / m
_EV_J = 1.602176634e-19


@dataclass(frozen=True)
class FlatBackground:
    """Unstructured background with rate gamma_b inside a finite band."""

    gamma_b_uev: float
    bandwidth_mev: float
    center_mev: float

    def __post_init__(self):
        if self.gamma_b_uev < 0.0:
            raise ConfigError("gamma_b must be >= 0", key="gamma_b_uev")
        if self.bandwidth_mev <= 0.0:
            raise ConfigError("bandwidth must be > 0", key="bandwidth_mev")


@dataclass(frozen=True)
class LorentzianCavity:
    """Single damped cavity mode with coupling g and linewidth kappa."""

    g_mev: float
    kappa_mev: float
    omega_c_mev: float

    def __post_init__(self):
        if self.g_mev <= 0.0:
            raise ConfigError("cavity coupling g must be > 0", key="g_mev")
        if self.kappa_mev <= 0.0:
            raise ConfigError("cavity linewidth kappa must be > 0", key="kappa_mev")


@dataclass(frozen=True)
class CoupledCavityWaveguide:
    """Tight-binding band between omega_l and omega_u with damped edges.

    The dipole/mode-volume prefactor collapses into a single scalar
    coupling_scale = d^2/(2 hbar eps0 n_b^2 V_eff) in rad/ps.  It can be
    given directly, derived from (dipole_debye, refractive_index,
    v_eff_um3 or v_eff_lambda3), or back-solved from a target peak
    Purcell factor via `from_peak_purcell`.
    """

    omega_l_mev: float
    omega_u_mev: float
    kappa_u_mev: float
    kappa_l_mev: float
    dipole_debye: float = None
    refractive_index: float = None
    v_eff_um3: float = None
    v_eff_lambda3: float = None
    coupling_scale: float = None
    sign: int = field(default=0)   # fixed at construction by positivity

    def __post_init__(self):
        if not self.omega_l_mev < self.omega_u_mev:
            raise ConfigError("band edges require omega_l < omega_u",
                              key="omega_l_mev")
        if self.kappa_u_mev <= 0.0 or self.kappa_l_mev <= 0.0:
            raise ConfigError("edge dampings must be > 0", key="kappa_u_mev")
        if self.coupling_scale is None:
            object.__setattr__(self, "coupling_scale", self._dipole_scale())
        if self.coupling_scale <= 0.0:
            raise ConfigError("coupling scale must be > 0", key="coupling_scale")
        if self.sign == 0:
            object.__setattr__(self, "sign", self._resolve_sign())

    def _dipole_scale(self):
        if (self.dipole_debye is None or self.refractive_index is None
                or (self.v_eff_um3 is None and self.v_eff_lambda3 is None)):
            raise ConfigError(
                "waveguide needs either coupling_scale or dipole_debye, "
                "refractive_index and a mode volume", key="coupling_scale")
        if self.refractive_index < 1.0:
            raise ConfigError("refractive index must be >= 1",
                              key="refractive_index")
        v_um3 = self.v_eff_um3
        if v_um3 is None:
            # (lambda/n)^3 at the band centre
            e_j = 0.5 * (self.omega_l_mev + self.omega_u_mev) * 1e-3 * _EV_J
            lam = 2.0 * math.pi * _HBAR_JS * 299792458.0 / e_j
            v_um3 = self.v_eff_lambda3 * (lam / self.refractive_index) ** 3 * 1e18
        if v_um3 <= 0.0:
            raise ConfigError("mode volume must be > 0", key="v_eff_um3")
        d = self.dipole_debye * _DEBYE_CM
        scale_si = d * d / (2.0 * _HBAR_JS * _EPS0
                            * self.refractive_index ** 2 * v_um3 * 1e-18)
        return scale_si * 1e-12  # 1/s -> rad/ps

    def _raw_shape(self, omega_mev):
        """w * (-1/pi) Im[1/sqrt(...)] before the sign fix, dimensionless."""
        w = np.asarray(omega_mev, dtype=float) / HBAR_MEV_PS
        wu = self.omega_u_mev / HBAR_MEV_PS
        wl = self.omega_l_mev / HBAR_MEV_PS
        ku = self.kappa_u_mev / HBAR_MEV_PS
        kl = self.kappa_l_mev / HBAR_MEV_PS
        root = np.sqrt(w - wu - 1j * ku) * np.sqrt(w - wl - 1j * kl)
        return w * (-1.0 / np.pi) * np.imag(1.0 / root)

    def _resolve_sign(self):
        probe = np.linspace(self.omega_l_mev, self.omega_u_mev, 101)[1:-1]
        s = self._raw_shape(probe)
        return 1 if np.sum(s) >= 0.0 else -1

    @classmethod
    def from_peak_purcell(cls, omega_l_mev, omega_u_mev, kappa_u_mev,
                          kappa_l_mev, peak_purcell, gamma_b_uev):
        """Back-solve coupling_scale so the peak of 2 pi J equals
        peak_purcell * gamma_b."""
        if peak_purcell <= 0.0:
            raise ConfigError("peak_purcell must be > 0", key="peak_purcell")
        trial = cls(omega_l_mev, omega_u_mev, kappa_u_mev, kappa_l_mev,
                    coupling_scale=1.0)
        probe = _edge_probe_grid(trial)
        peak_shape = float(np.max(trial.sign * trial._raw_shape(probe)))
        gamma_b_ang = gamma_b_uev * 1e-3 / HBAR_MEV_PS
        scale = peak_purcell * gamma_b_ang / (2.0 * np.pi * peak_shape)
        return cls(omega_l_mev, omega_u_mev, kappa_u_mev, kappa_l_mev,
                   coupling_scale=scale)


def _edge_probe_grid(res):
    grids = [np.linspace(res.omega_l_mev, res.omega_u_mev, 2001)]
    for edge, kap in ((res.omega_u_mev, res.kappa_u_mev),
                      (res.omega_l_mev, res.kappa_l_mev)):
        grids.append(np.linspace(edge - 5 * kap, edge + 5 * kap, 2001))
    return np.unique(np.concatenate(grids))


PhotonReservoir = Union[FlatBackground, LorentzianCavity, CoupledCavityWaveguide]


def photon_spectral_density(omega_mev, reservoir):
    """J_ph at omega (meV), in rad/ps.  Accepts arrays."""
    w = np.asarray(omega_mev, dtype=float) / HBAR_MEV_PS
    if isinstance(reservoir, FlatBackground):
        c = reservoir.center_mev / HBAR_MEV_PS
        half = 0.5 * reservoir.bandwidth_mev / HBAR_MEV_PS
        level = reservoir.gamma_b_uev * 1e-3 / HBAR_MEV_PS / (2.0 * np.pi)
        out = np.where(np.abs(w - c) <= half, level, 0.0)
    elif isinstance(reservoir, LorentzianCavity):
        g = reservoir.g_mev / HBAR_MEV_PS
        k = reservoir.kappa_mev / HBAR_MEV_PS
        wc = reservoir.omega_c_mev / HBAR_MEV_PS
        out = g * g / np.pi * (k / 2.0) / ((w - wc) ** 2 + (k / 2.0) ** 2)
    elif isinstance(reservoir, CoupledCavityWaveguide):
        out = reservoir.sign * reservoir.coupling_scale * \
            reservoir._raw_shape(omega_mev)
    else:
        raise ConfigError(f"unknown reservoir type {type(reservoir).__name__}")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ReservoirGrid:
    """Frequency grid with J evaluated and validated on it.

    The grid covers the scenario window, is refined near spectral
    features, and is extended until J has decayed to the configured
    fraction of its peak, so frequency-domain quadratures of J are
    accurate (a Lorentzian needs wings of ~kappa/tail_rel^0.5).
    """

    reservoir: PhotonReservoir
    omega_mev: np.ndarray = field(repr=False)
    j_angular: np.ndarray = field(repr=False)
    weights_angular: np.ndarray = field(repr=False)
    omega_ref_mev: float
    peak_omega_mev: float
    peak_j: float
    feature_interval_mev: tuple

    @property
    def area(self):
        """int J dw in (rad/ps)^2."""
        return float(self.weights_angular @ self.j_angular)


def _feature_zones(reservoir, numerics):
    """(interval, spacing) pairs needing fine resolution, plus the
    half-extent at which the spectral tails are considered resolved."""
    fine = 1e-3 / numerics.points_per_uev_core
    if isinstance(reservoir, LorentzianCavity):
        k = reservoir.kappa_mev
        zones = [((reservoir.omega_c_mev - 3 * k, reservoir.omega_c_mev + 3 * k), fine)]
        extent = 0.5 * k / math.sqrt(numerics.reservoir_tail_rel)
        feature = (reservoir.omega_c_mev - 3 * k, reservoir.omega_c_mev + 3 * k)
        anchor = reservoir.omega_c_mev
    elif isinstance(reservoir, CoupledCavityWaveguide):
        zones = [((reservoir.omega_l_mev, reservoir.omega_u_mev),
                  min(fine * 32, 0.002))]
        for edge, kap in ((reservoir.omega_u_mev, reservoir.kappa_u_mev),
                          (reservoir.omega_l_mev, reservoir.kappa_l_mev)):
            zones.append(((edge - 10 * kap, edge + 10 * kap), fine))
        extent = None  # determined by probing below
        feature = (reservoir.omega_l_mev - 10 * reservoir.kappa_l_mev,
                   reservoir.omega_u_mev + 10 * reservoir.kappa_u_mev)
        anchor = 0.5 * (reservoir.omega_l_mev + reservoir.omega_u_mev)
    else:
        zones = []
        extent = 0.0
        feature = (reservoir.center_mev - 0.5 * reservoir.bandwidth_mev,
                   reservoir.center_mev + 0.5 * reservoir.bandwidth_mev)
        anchor = reservoir.center_mev
    return zones, extent, feature, anchor


def build_reservoir_grid(reservoir, window_mev, numerics=DEFAULT_NUMERICS):
    """Evaluate and validate J on a refined, extended frequency grid."""
    lo, hi = float(window_mev[0]), float(window_mev[1])
    if not lo < hi:
        raise ConfigError("frequency window is empty", key="window")
    zones, extent, feature, anchor = _feature_zones(reservoir, numerics)

    if isinstance(reservoir, FlatBackground):
        lo_x, hi_x = feature  # the band is the whole support
        lo, hi = min(lo, lo_x), max(hi, hi_x)
    elif extent is not None:
        lo, hi = min(lo, anchor - extent), max(hi, anchor + extent)
    else:
        # probe outward until the tails are below tail_rel of the peak
        peak = float(np.max(photon_spectral_density(_edge_probe_grid(reservoir),
                                                    reservoir)))
        pad = 2.0
        while pad < 4096.0:
            edges = np.array([feature[0] - pad, feature[1] + pad])
            if np.max(photon_spectral_density(edges, reservoir)) \
                    <= numerics.reservoir_tail_rel * peak:
                break
            pad *= 2.0
        else:
            raise ConfigError("waveguide tails do not decay within 4 eV "
                              "of the band; check edge dampings", key="kappa_u_mev")
        lo, hi = min(lo, feature[0] - pad), max(hi, feature[1] + pad)

    # wing resolution bound: phases across one step stay small for all
    # correlation times up to tau_max
    wing = 0.3 * HBAR_MEV_PS / numerics.tau_max_ps
    base = 1.0 / numerics.points_per_mev_base
    win_lo, win_hi = max(float(window_mev[0]), lo), min(float(window_mev[1]), hi)
    pieces = [np.arange(lo, hi, min(wing, base * 8))]
    if win_lo < win_hi:
        pieces.append(np.arange(win_lo, win_hi, base))
    for (zlo, zhi), spacing in zones:
        zlo, zhi = max(zlo, lo), min(zhi, hi)
        if zlo < zhi:
            pieces.append(np.arange(zlo, zhi, spacing))
    pieces.append(np.asarray([hi]))
    if isinstance(reservoir, FlatBackground):
        pieces.append(np.asarray(feature))
    omega = np.unique(np.concatenate(pieces))

    j = np.asarray(photon_spectral_density(omega, reservoir), dtype=float)
    peak_idx = int(np.argmax(j))
    peak_j = float(j[peak_idx])
    if peak_j <= 0.0 and not isinstance(reservoir, FlatBackground):
        raise ConfigError("reservoir spectral density vanishes on the grid")
    if float(np.min(j)) < -1e-12 * max(peak_j, 1e-30):
        raise ConfigError(
            "branch-choice failure: negative spectral density on the grid",
            key="reservoir")
    j = np.maximum(j, 0.0)

    if not isinstance(reservoir, FlatBackground):
        edge_j = max(float(j[0]), float(j[-1]))
        if edge_j > 10.0 * numerics.reservoir_tail_rel * peak_j:
            raise ConfigError(
                "window too narrow: spectral tails not resolved at the "
                "grid edges", key="window")

    weights = _numerics.trapezoid_weights(omega / HBAR_MEV_PS)
    grid = ReservoirGrid(
        reservoir=reservoir,
        omega_mev=omega,
        j_angular=j,
        weights_angular=weights,
        omega_ref_mev=0.5 * (omega[0] + omega[-1]),
        peak_omega_mev=float(omega[peak_idx]),
        peak_j=peak_j,
        feature_interval_mev=feature,
    )

    if isinstance(reservoir, LorentzianCavity):
        g2 = (reservoir.g_mev / HBAR_MEV_PS) ** 2
        if abs(grid.area / g2 - 1.0) > 0.01:
            raise NumericsError(
                f"Lorentzian area off by {abs(grid.area / g2 - 1.0):.2e} "
                "(normalisation check)", residual=abs(grid.area / g2 - 1.0))
    return grid


def lorentzian_correlation(res, omega_l_mev, tau):
    """Closed form J_ph(tau) = g^2 exp[i(w_L - w_c) tau - kappa tau / 2]."""
    g = res.g_mev / HBAR_MEV_PS
    lam = (1j * (omega_l_mev - res.omega_c_mev) - 0.5 * res.kappa_mev) / HBAR_MEV_PS
    return g * g * np.exp(lam * np.asarray(tau, dtype=float))


def flat_correlation(res, omega_l_mev, tau):
    """Closed form for the banded flat reservoir (a sinc spike at tau=0)."""
    t = np.asarray(tau, dtype=float)
    level = res.gamma_b_uev * 1e-3 / HBAR_MEV_PS / (2.0 * np.pi)
    half = 0.5 * res.bandwidth_mev / HBAR_MEV_PS
    nu0 = (omega_l_mev - res.center_mev) / HBAR_MEV_PS
    env = np.where(t == 0.0, 2.0 * half,
                   2.0 * np.sin(half * np.where(t == 0.0, 1.0, t))
                   / np.where(t == 0.0, 1.0, t))
    return level * env * np.exp(1j * nu0 * t)


def correlation_envelope(grid, tau_grid, chunk=256, threads=1):
    """F(tau) = int J(w) exp[-i (w - w_ref) tau] dw by quadrature."""
    x = (grid.omega_mev - grid.omega_ref_mev) / HBAR_MEV_PS
    (env,) = _numerics.oscillatory_sums(
        x, grid.weights_angular, [grid.j_angular],
        -np.asarray(tau_grid, dtype=float), chunk=chunk, threads=threads)
    return env


def photon_correlation(grid, omega_l_mev, tau_grid, chunk=256, threads=1,
                       envelope=None):
    """J_ph(tau) = int J(w) exp[i(w_L - w) tau] dw on the tau grid."""
    tau = np.asarray(tau_grid, dtype=float)
    if envelope is None:
        envelope = correlation_envelope(grid, tau, chunk=chunk, threads=threads)
    rot = np.exp(1j * (omega_l_mev - grid.omega_ref_mev) / HBAR_MEV_PS * tau)
    return envelope * rot
