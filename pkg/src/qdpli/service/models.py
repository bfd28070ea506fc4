"""Request/response schemas for the HTTP service.

Models stay close to the scenario-file keys; physical validation lives
in the domain types, whose errors surface as HTTP 422 responses.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BathModel(StrictModel):
    alpha_p: float
    omega_b_mev: float = 1.0
    temperature_k: float = 4.0
    phonon_frequency_convention: str = "angular"


class ReservoirModel(StrictModel):
    """Tagged union over the reservoir variants, offsets relative to the
    zero-phonon line."""

    type: str
    # lorentzian
    g_mev: Optional[float] = None
    kappa_mev: Optional[float] = None
    offset_mev: Optional[float] = None
    # waveguide
    upper_edge_offset_mev: Optional[float] = None
    band_width_mev: Optional[float] = None
    kappa_u_mev: Optional[float] = None
    kappa_l_mev: Optional[float] = None
    dipole_debye: Optional[float] = None
    refractive_index: Optional[float] = None
    v_eff_um3: Optional[float] = None
    v_eff_lambda3: Optional[float] = None
    peak_purcell: Optional[float] = None
    # flat
    bandwidth_mev: Optional[float] = None
    center_offset_mev: Optional[float] = None


class DriveModel(StrictModel):
    eta_x_uev: float = 0.4
    omega_x_mev: float = 1440.0
    delta_min_mev: float = -3.0
    delta_max_mev: float = 3.0
    n_delta: int = Field(default=1201, ge=2)


class NumericsModel(StrictModel):
    tau_max_ps: Optional[float] = None
    n_tau: Optional[int] = None
    n_omega: Optional[int] = None
    tail_tol: Optional[float] = None
    quad_rel_tol: Optional[float] = None
    window_half_width_mev: Optional[float] = None
    points_per_uev_core: Optional[float] = None
    points_per_mev_base: Optional[float] = None
    reservoir_tail_rel: Optional[float] = None
    refine_factor: Optional[int] = None


class PhononSummaryRequest(StrictModel):
    bath: BathModel
    numerics: Optional[NumericsModel] = None


class PhononSummaryResponse(StrictModel):
    b_avg: float
    phi_zero: float
    polaron_shift_mev: float
    tail_residual: float


class PhononRatesRequest(StrictModel):
    bath: BathModel
    eta_x_uev: float
    delta_xl_mev: List[float]
    numerics: Optional[NumericsModel] = None


class PhononRatesResponse(StrictModel):
    gamma_plus_uev: List[float]
    gamma_minus_uev: List[float]
    gamma_cd_uev: List[float]


class PurcellRequest(StrictModel):
    bath: BathModel
    reservoir: ReservoirModel
    omega_x_mev: float = 1440.0
    gamma_b_uev: float = 1.0
    background_add: bool = True
    span_mev: float = 3.0
    n_points: int = Field(default=601, ge=2)
    numerics: Optional[NumericsModel] = None


class PurcellResponse(StrictModel):
    detuning_mev: List[float]
    pf_bare: List[float]
    pf_phonon: List[float]
    feature_omega_mev: float


class PLIRequest(StrictModel):
    bath: BathModel
    reservoir: Optional[ReservoirModel] = None
    drive: DriveModel
    gamma_b_uev: float = 1.0
    background_add: bool = True
    numerics: Optional[NumericsModel] = None


class DipModel(StrictModel):
    depth: float
    dip_position_mev: Optional[float] = None
    peak_position_mev: Optional[float] = None


class PLIResponse(StrictModel):
    delta_xl_mev: List[float]
    n_x_no_reservoir: List[float]
    n_x_bare: List[float]
    n_x_phonon: List[float]
    lineshape: List[float]
    gamma_plus_uev: List[float]
    gamma_minus_uev: List[float]
    gamma_cd_uev: List[float]
    gamma_tilde_uev: List[float]
    b_avg: float
    gamma_prime_uev: float
    dip_bare: DipModel
    dip_phonon: DipModel


class VerifyRequest(StrictModel):
    n_draws: int = Field(default=20, ge=1, le=200)
    seed: int = 20240611
    tol: float = 1e-10


class VerifyResponse(StrictModel):
    passed: bool
    max_abs_error: float
    n_draws: int
    seed: int
    target_abs: float


class ScenarioRunRequest(StrictModel):
    scenario_text: str
    verify: bool = False
    convergence_report: bool = False


class ScenarioRunResponse(StrictModel):
    files: Dict[str, str]
    manifest: dict
