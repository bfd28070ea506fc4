"""Phonon-dressed quantum-dot emission rates and PLI spectra."""

__version__ = "0.1.0"

from .bath import (PhaseTable, PhononBath, cross_dephasing, phase_function,
                   phonon_correlation, phonon_rates_grid,
                   phonon_scattering_rates, phonon_spectral_density)
from .bloch import (BlochState, bloch_steady_state, bloch_steady_state_batch,
                    verify_population_formula)
from .config import DEFAULT_NUMERICS, NumericsConfig
from .errors import (ConfigError, DomainError, NumericsError, QdpliError,
                     SingularityError)
from .pli import (DipMetric, PLIResult, RateSet, exciton_population,
                  pli_dip_metric, pli_spectrum, pure_dephasing,
                  temperature_sweep)
from .rates import (PurcellSpectrum, purcell_spectrum, se_rate_bare,
                    se_rate_bare_grid, se_rate_polaron, se_rate_polaron_grid)
from .reservoir import (CoupledCavityWaveguide, FlatBackground,
                        LorentzianCavity, ReservoirGrid, build_reservoir_grid,
                        photon_correlation, photon_spectral_density)
from .scenario import (DriveConfig, Scenario, bundled_scenario_path,
                       load_scenario, parse_scenario)
from .units import HBAR_MEV_PS, KB_MEV_PER_K, UnitSystem, thermal_coth
