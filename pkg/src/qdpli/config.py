"""Numerics controls shared across the computation pipeline."""

from dataclasses import dataclass, replace

from .errors import ConfigError

#: conventions for interpreting the phonon coupling constant, see PhononBath
PHONON_CONVENTIONS = ("angular", "ordinary")


@dataclass(frozen=True)
class NumericsConfig:
    """Grid sizes and tolerances for all quadratures.

    tau_max_ps / n_tau control the shared time grid for correlation
    functions; n_omega is the Gauss-Legendre node count for phonon-bath
    integrals.  The photon-reservoir frequency grid is refined to
    points_per_uev_core near spectral features and extended until the
    spectral density has dropped to reservoir_tail_rel of its peak.
    """

    tau_max_ps: float = 10.0
    n_tau: int = 4000
    n_omega: int = 512
    omega_cutoff_factor: float = 8.0       # phonon integrals end at this * omega_b
    tail_tol: float = 1e-3                 # |C(tau_max)| - <B>^2 criterion
    quad_rel_tol: float = 1e-7             # doubling-check tolerance
    points_per_uev_core: float = 16.0      # resolution near reservoir features
    points_per_mev_base: float = 200.0     # resolution elsewhere in the window
    window_half_width_mev: float = 6.0
    reservoir_tail_rel: float = 1e-6       # required spectral decay at grid edges
    refine_factor: int = 4                 # detuning-grid refinement near features
    chunk: int = 256                       # fixed block size for phase matrices
    phonon_frequency_convention: str = "angular"

    def __post_init__(self):
        if self.tau_max_ps <= 0.0:
            raise ConfigError("tau_max_ps must be positive", key="tau_max_ps")
        if self.n_tau < 2 or self.n_omega < 2:
            raise ConfigError("grid sizes must be at least 2", key="n_tau")
        if self.phonon_frequency_convention not in PHONON_CONVENTIONS:
            raise ConfigError(
                f"phonon_frequency_convention must be one of {PHONON_CONVENTIONS}",
                key="phonon_frequency_convention",
            )

    def doubled(self):
        """Copy with doubled quadrature densities (convergence checks)."""
        return replace(
            self,
            n_tau=2 * self.n_tau,
            n_omega=2 * self.n_omega,
            points_per_uev_core=2 * self.points_per_uev_core,
            points_per_mev_base=2 * self.points_per_mev_base,
        )


DEFAULT_NUMERICS = NumericsConfig()
