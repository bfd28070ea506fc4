"""FastAPI application wrapping the computation pipeline.

Stateless: every request carries the full problem description, so the
service can be scaled horizontally and responses are reproducible.
"""

import dataclasses

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..bath import phase_function, phonon_rates_grid
from ..bloch import verify_population_formula
from ..config import DEFAULT_NUMERICS
from ..errors import ConfigError, DomainError, NumericsError
from ..pli import pli_spectrum
from ..rates import purcell_spectrum
from ..reservoir import (CoupledCavityWaveguide, FlatBackground,
                         LorentzianCavity, build_reservoir_grid)
from ..runner import render_artifacts
from ..scenario import DriveConfig, parse_scenario, refined_grid, \
    feature_intervals_mev
from ..bath import PhononBath
from . import models

app = FastAPI(title="qdpli", description="Phonon-dressed quantum-dot "
              "emission rates and PLI spectra", version="0.1.0")


@app.exception_handler(ConfigError)
@app.exception_handler(DomainError)
async def _config_error(request: Request, exc):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(NumericsError)
async def _numerics_error(request: Request, exc):
    return JSONResponse(status_code=500, content={
        "detail": str(exc), "residual": exc.residual})


def _numerics(model):
    if model is None:
        return DEFAULT_NUMERICS
    overrides = {k: v for k, v in model.model_dump().items() if v is not None}
    return dataclasses.replace(DEFAULT_NUMERICS, **overrides)


def _bath(model):
    return PhononBath(alpha_p=model.alpha_p, omega_b_mev=model.omega_b_mev,
                      temperature_k=model.temperature_k)


def _numerics_with_convention(req_numerics, bath_model):
    num = _numerics(req_numerics)
    return dataclasses.replace(
        num, phonon_frequency_convention=bath_model.phonon_frequency_convention)


def _reservoir(model, omega_x):
    kind = model.type.lower()

    def need(name):
        val = getattr(model, name)
        if val is None:
            raise ConfigError(f"reservoir type '{kind}' requires '{name}'",
                              key=name)
        return val

    if kind == "none":
        return None
    if kind == "lorentzian":
        return LorentzianCavity(g_mev=need("g_mev"),
                                kappa_mev=need("kappa_mev"),
                                omega_c_mev=omega_x + need("offset_mev"))
    if kind == "flat":
        center = omega_x + (model.center_offset_mev or 0.0)
        return FlatBackground(gamma_b_uev=1.0,
                              bandwidth_mev=need("bandwidth_mev"),
                              center_mev=center)
    if kind == "waveguide":
        upper = omega_x + need("upper_edge_offset_mev")
        width = need("band_width_mev")
        args = dict(omega_l_mev=upper - width, omega_u_mev=upper,
                    kappa_u_mev=need("kappa_u_mev"),
                    kappa_l_mev=need("kappa_l_mev"))
        if model.peak_purcell is not None:
            return CoupledCavityWaveguide.from_peak_purcell(
                peak_purcell=model.peak_purcell, gamma_b_uev=1.0, **args)
        return CoupledCavityWaveguide(
            dipole_debye=model.dipole_debye,
            refractive_index=model.refractive_index,
            v_eff_um3=model.v_eff_um3,
            v_eff_lambda3=model.v_eff_lambda3, **args)
    raise ConfigError(f"unknown reservoir type '{kind}'", key="type")


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/phonon/summary", response_model=models.PhononSummaryResponse)
def phonon_summary(req: models.PhononSummaryRequest):
    numerics = _numerics_with_convention(req.numerics, req.bath)
    table = phase_function(_bath(req.bath), numerics=numerics)
    return models.PhononSummaryResponse(
        b_avg=table.b_avg,
        phi_zero=table.phi_zero,
        polaron_shift_mev=table.polaron_shift_mev,
        tail_residual=table.tail_residual,
    )


@app.post("/phonon/rates", response_model=models.PhononRatesResponse)
def phonon_rates(req: models.PhononRatesRequest):
    numerics = _numerics_with_convention(req.numerics, req.bath)
    table = phase_function(_bath(req.bath), numerics=numerics)
    gp, gm, gcd = phonon_rates_grid(table, req.eta_x_uev,
                                    np.asarray(req.delta_xl_mev, dtype=float),
                                    chunk=numerics.chunk)
    return models.PhononRatesResponse(
        gamma_plus_uev=gp.tolist(),
        gamma_minus_uev=gm.tolist(),
        gamma_cd_uev=gcd.tolist(),
    )


@app.post("/purcell", response_model=models.PurcellResponse)
def purcell(req: models.PurcellRequest):
    numerics = _numerics_with_convention(req.numerics, req.bath)
    table = phase_function(_bath(req.bath), numerics=numerics)
    reservoir = _reservoir(req.reservoir, req.omega_x_mev)
    if reservoir is None:
        raise ConfigError("a structured reservoir is required", key="type")
    half = numerics.window_half_width_mev
    grid = build_reservoir_grid(
        reservoir, (req.omega_x_mev - half, req.omega_x_mev + half), numerics)
    lo, hi = grid.feature_interval_mev
    center = 0.5 * (lo + hi)
    axis = refined_grid(center - req.span_mev, center + req.span_mev,
                        req.n_points, feature_intervals_mev(reservoir),
                        numerics.refine_factor)
    spec = purcell_spectrum(table, grid, axis, req.gamma_b_uev,
                            req.background_add, numerics)
    return models.PurcellResponse(
        detuning_mev=spec.detuning_mev.tolist(),
        pf_bare=spec.pf_bare.tolist(),
        pf_phonon=spec.pf_phonon.tolist(),
        feature_omega_mev=spec.feature_omega_mev,
    )


@app.post("/pli", response_model=models.PLIResponse)
def pli(req: models.PLIRequest):
    numerics = _numerics_with_convention(req.numerics, req.bath)
    table = phase_function(_bath(req.bath), numerics=numerics)
    reservoir = None if req.reservoir is None else \
        _reservoir(req.reservoir, req.drive.omega_x_mev)
    grid = None
    if reservoir is not None:
        half = numerics.window_half_width_mev
        grid = build_reservoir_grid(
            reservoir, (req.drive.omega_x_mev - half,
                        req.drive.omega_x_mev + half), numerics)
    refine = tuple((req.drive.omega_x_mev - hi_f, req.drive.omega_x_mev - lo_f)
                   for (lo_f, hi_f) in feature_intervals_mev(reservoir))
    delta = refined_grid(req.drive.delta_min_mev, req.drive.delta_max_mev,
                         req.drive.n_delta, refine, numerics.refine_factor)
    drive = DriveConfig(eta_x_uev=req.drive.eta_x_uev,
                        omega_x_mev=req.drive.omega_x_mev,
                        delta_xl_grid_mev=delta)
    result = pli_spectrum(table, grid, drive, req.gamma_b_uev,
                          req.background_add, numerics)

    def dip(d):
        return models.DipModel(depth=d.depth,
                               dip_position_mev=d.dip_position_mev,
                               peak_position_mev=d.peak_position_mev)

    return models.PLIResponse(
        delta_xl_mev=result.delta_xl_mev.tolist(),
        n_x_no_reservoir=result.n_x_no_reservoir.tolist(),
        n_x_bare=result.n_x_bare.tolist(),
        n_x_phonon=result.n_x_phonon.tolist(),
        lineshape=result.lineshape.tolist(),
        gamma_plus_uev=result.gamma_plus.tolist(),
        gamma_minus_uev=result.gamma_minus.tolist(),
        gamma_cd_uev=result.gamma_cd.tolist(),
        gamma_tilde_uev=result.gamma_tilde.tolist(),
        b_avg=result.b_avg,
        gamma_prime_uev=result.gamma_prime_uev,
        dip_bare=dip(result.dip_bare),
        dip_phonon=dip(result.dip_phonon),
    )


@app.post("/verify", response_model=models.VerifyResponse)
def verify(req: models.VerifyRequest):
    report = verify_population_formula(n_draws=req.n_draws, seed=req.seed,
                                       tol=req.tol)
    return models.VerifyResponse(
        passed=report["passed"],
        max_abs_error=report["max_abs_error"],
        n_draws=report["n_draws"],
        seed=report["seed"],
        target_abs=report["target_abs"],
    )


@app.post("/scenario/run", response_model=models.ScenarioRunResponse)
def scenario_run(req: models.ScenarioRunRequest):
    scenario = parse_scenario(req.scenario_text)
    files, manifest = render_artifacts(
        scenario, convergence_report=req.convergence_report)
    if req.verify:
        report = verify_population_formula()
        manifest["verify"] = {k: v for k, v in report.items()
                              if k != "errors"}
    manifest["output_dir"] = scenario.output_dir
    return models.ScenarioRunResponse(files=files, manifest=manifest)
