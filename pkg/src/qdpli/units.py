"""Unit system and physical constants.

Every public quantity in the package is expressed in meV (energies and
rates, as hbar*rate), ps (times) and K (temperatures).  Angular
frequencies in rad/ps appear internally only, obtained as E/hbar.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: hbar in meV ps (CODATA)
HBAR_MEV_PS = 0.6582119569
#: Boltzmann constant in meV/K (CODATA)
KB_MEV_PER_K = 0.08617333


@dataclass(frozen=True)
class UnitSystem:
    """Fixed constants; a single instance is shared by the whole package."""

    hbar: float = HBAR_MEV_PS
    kb: float = KB_MEV_PER_K

    def energy_to_angular(self, energy_mev):
        """meV -> rad/ps."""
        return np.asarray(energy_mev, dtype=float) / self.hbar

    def angular_to_energy(self, omega_rad_ps):
        """rad/ps -> meV."""
        return np.asarray(omega_rad_ps, dtype=float) * self.hbar

    def kelvin_to_mev(self, temperature_k):
        return self.kb * temperature_k


UNITS = UnitSystem()


def thermal_coth(omega_mev, temperature_k):
    """coth(omega / (2 kB T)) for an energy omega > 0 in meV.

    The T = 0 limit is handled analytically (coth -> 1) rather than by
    evaluating 1/tanh at an infinite argument.  Accepts arrays in omega.
    """
    omega = np.asarray(omega_mev, dtype=float)
    if np.any(omega <= 0.0):
        raise DomainError("thermal_coth requires omega > 0")
    if temperature_k < 0.0:
        raise DomainError("thermal_coth requires temperature >= 0")
    if temperature_k == 0.0:
        out = np.ones_like(omega)
        return out if out.ndim else float(out)
    x = omega / (2.0 * KB_MEV_PER_K * temperature_k)
    out = 1.0 / np.tanh(x)
    return out if out.ndim else float(out)
