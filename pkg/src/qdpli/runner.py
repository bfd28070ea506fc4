"""Scenario execution: spectra, CSV/SVG artifacts and the run manifest.

Artifacts are rendered to strings first (shared by the CLI and the HTTP
service, and written atomically), and a JSON manifest records the
scenario hash, numerics settings and convergence residuals.  Outputs
are deterministic: re-running a scenario reproduces identical bytes.
"""

import dataclasses
import json
import os

import numpy as np

from .bath import phase_function, phonon_rates_grid
from .bloch import verify_population_formula
from .csvio import format_csv
from .errors import ConfigError
from .pli import pli_spectrum, temperature_sweep
from .rates import purcell_spectrum, se_rate_bare_grid, se_rate_polaron_grid
from .reservoir import build_reservoir_grid
from .scenario import feature_intervals_mev, load_scenario, refined_grid
from .svgplot import render_plot
from .units import HBAR_MEV_PS, KB_MEV_PER_K

__all__ = ["render_artifacts", "run_scenario"]

_PLI_HEADER = ["delta_xL_meV", "n_x_no_reservoir", "n_x_bare_gamma",
               "n_x_phonon_gamma", "J_ph_lineshape", "gamma_plus_ueV",
               "gamma_minus_ueV", "gamma_cd_ueV", "gamma_tilde_ueV"]

_PLI_STYLE = {
    "columns": ["n_x_no_reservoir", "n_x_bare_gamma", "n_x_phonon_gamma",
                "J_ph_lineshape"],
    "normalize": ["J_ph_lineshape"],
    "xlabel": "laser-exciton detuning (meV)",
    "ylabel": "exciton population n_x",
}
_PF_STYLE = {
    "xlabel": "detuning from reservoir feature (meV)",
    "ylabel": "Purcell factor",
}
_DIP_STYLE = {
    "xlabel": "temperature (K)",
    "ylabel": "PLI dip depth",
}


def _dip_dict(dip):
    return {
        "depth": dip.depth,
        "dip_position_mev": dip.dip_position_mev,
        "peak_position_mev": dip.peak_position_mev,
    }


def _purcell_axis(scenario, grid):
    lo, hi = grid.feature_interval_mev
    center = 0.5 * (lo + hi)
    n_base = max(601, scenario.drive.delta_xl_grid_mev.size // 2)
    return refined_grid(center - 3.0, center + 3.0, n_base,
                        feature_intervals_mev(scenario.reservoir),
                        scenario.numerics.refine_factor)


def _convergence_report(scenario, grid, pli, threads):
    """Re-run the rate pipeline with doubled quadrature densities on the
    same axes and report the largest changes."""
    fine = scenario.numerics.doubled()
    bath = scenario.bath
    drive = scenario.drive
    table2 = phase_function(bath, numerics=fine)
    gp2, gm2, gcd2 = phonon_rates_grid(table2, drive.eta_x_uev,
                                       drive.delta_xl_grid_mev,
                                       chunk=fine.chunk, threads=threads)
    changes = {}

    def rel(a, b):
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-9)
        return float(np.max(np.abs(a - b) / scale))

    changes["gamma_plus"] = rel(pli.gamma_plus, gp2)
    changes["gamma_minus"] = rel(pli.gamma_minus, gm2)
    changes["gamma_cd"] = rel(pli.gamma_cd, gcd2)

    nx_changes = {}
    if grid is not None:
        grid2 = build_reservoir_grid(scenario.reservoir, scenario.window_mev,
                                     fine)
        omega_l = drive.omega_x_mev - drive.delta_xl_grid_mev
        bare2 = se_rate_bare_grid(grid2, omega_l, fine, threads=threads)
        dressed2 = se_rate_polaron_grid(table2, grid2, omega_l, fine,
                                        threads=threads, bare=bare2)
        off = scenario.gamma_b_uev if scenario.background_add else 0.0
        changes["gamma_bare"] = rel(pli.gamma_bare, bare2 + off)
        changes["gamma_tilde"] = rel(pli.gamma_tilde, dressed2 + off)
        pli2 = pli_spectrum(table2, grid2, drive, scenario.gamma_b_uev,
                            scenario.background_add, fine, threads=threads)
    else:
        pli2 = pli_spectrum(table2, None, drive, scenario.gamma_b_uev,
                            scenario.background_add, fine, threads=threads)
    for name in ("n_x_no_reservoir", "n_x_bare", "n_x_phonon"):
        nx_changes[name] = float(np.max(np.abs(
            getattr(pli, name) - getattr(pli2, name))))
    return {
        "max_rate_rel_change": max(changes.values()),
        "max_nx_abs_change": max(nx_changes.values()),
        "rate_rel_changes": changes,
        "nx_abs_changes": nx_changes,
    }


def render_artifacts(scenario, threads=1, convergence_report=False):
    """Compute all spectra for a scenario; return ({filename: text}, manifest)."""
    numerics = scenario.numerics
    table = phase_function(scenario.bath, numerics=numerics)
    grid = None
    if scenario.reservoir is not None:
        grid = build_reservoir_grid(scenario.reservoir, scenario.window_mev,
                                    numerics)

    pli = pli_spectrum(table, grid, scenario.drive, scenario.gamma_b_uev,
                       scenario.background_add, numerics, threads=threads)

    files = {}
    want_csv = "csv" in scenario.formats
    want_svg = "svg" in scenario.formats

    pli_csv = format_csv(_PLI_HEADER, [
        pli.delta_xl_mev, pli.n_x_no_reservoir, pli.n_x_bare,
        pli.n_x_phonon, pli.lineshape, pli.gamma_plus, pli.gamma_minus,
        pli.gamma_cd, pli.gamma_tilde])
    if want_csv:
        files["pli.csv"] = pli_csv
    if want_svg:
        from .csvio import read_csv
        header, data = read_csv(pli_csv, from_text=True)
        files["pli.svg"] = render_plot(header, data,
                                       dict(_PLI_STYLE, title=scenario.name))

    manifest = {
        "scenario": scenario.name,
        "scenario_sha256": scenario.sha256,
        "units": {"hbar_mev_ps": HBAR_MEV_PS, "kb_mev_per_k": KB_MEV_PER_K},
        "numerics": dataclasses.asdict(numerics),
        "bath": {
            "b_avg": table.b_avg,
            "polaron_shift_mev": table.polaron_shift_mev,
            "phase_quad_residual": table.quad_residual,
            "phase_tail_residual": table.tail_residual,
        },
        "drive": {
            "eta_x_uev": scenario.drive.eta_x_uev,
            "omega_x_mev": scenario.drive.omega_x_mev,
            "n_delta": int(scenario.drive.delta_xl_grid_mev.size),
        },
        "gamma_prime_uev": pli.gamma_prime_uev,
        "dips": {"bare": _dip_dict(pli.dip_bare),
                 "phonon": _dip_dict(pli.dip_phonon)},
        "threads": threads,
    }

    if grid is not None:
        axis = _purcell_axis(scenario, grid)
        spec = purcell_spectrum(table, grid, axis, scenario.gamma_b_uev,
                                scenario.background_add, numerics,
                                threads=threads)
        pf_csv = format_csv(["detuning_meV", "pf_bare", "pf_phonon"],
                            [spec.detuning_mev, spec.pf_bare, spec.pf_phonon])
        if want_csv:
            files["purcell.csv"] = pf_csv
        if want_svg:
            from .csvio import read_csv
            header, data = read_csv(pf_csv, from_text=True)
            files["purcell.svg"] = render_plot(
                header, data, dict(_PF_STYLE, title=scenario.name))
        manifest["reservoir"] = {
            "type": type(scenario.reservoir).__name__,
            "grid_points": int(grid.omega_mev.size),
            "peak_omega_mev": grid.peak_omega_mev,
            "peak_pf_bare": float(np.max(spec.pf_bare)),
            "peak_pf_phonon": float(np.max(spec.pf_phonon)),
        }

    if scenario.t_grid_k:
        t_grid, bare_d, phonon_d = temperature_sweep(
            scenario.bath, grid, scenario.drive, scenario.gamma_b_uev,
            scenario.t_grid_k, scenario.background_add, numerics,
            threads=threads)
        dip_csv = format_csv(
            ["temperature_K", "dip_depth_bare", "dip_depth_phonon"],
            [t_grid, bare_d, phonon_d])
        if want_csv:
            files["dip_vs_T.csv"] = dip_csv
        if want_svg:
            from .csvio import read_csv
            header, data = read_csv(dip_csv, from_text=True)
            files["dip_vs_T.svg"] = render_plot(
                header, data, dict(_DIP_STYLE, title=scenario.name))
        manifest["dip_vs_temperature"] = {
            "temperature_k": list(map(float, t_grid)),
            "dip_depth_bare": list(map(float, bare_d)),
            "dip_depth_phonon": list(map(float, phonon_d)),
        }

    if convergence_report:
        manifest["convergence"] = _convergence_report(scenario, grid, pli,
                                                      threads)
    return files, manifest


def run_scenario(path, out_dir=None, threads=1, convergence_report=False,
                 verify=False):
    """Execute a scenario file and write its artifacts.

    Returns (exit_code, manifest); exit codes: 0 success, 2 when the
    --verify oracle suite fails.  Configuration and numerics errors
    propagate as exceptions for the CLI to map onto exit codes.
    """
    scenario = load_scenario(path)
    files, manifest = render_artifacts(scenario, threads=threads,
                                       convergence_report=convergence_report)
    exit_code = 0
    if verify:
        report = verify_population_formula()
        manifest["verify"] = {k: v for k, v in report.items() if k != "errors"}
        manifest["verify"]["max_draw_errors"] = [float(e) for e in
                                                 report["errors"]]
        if not report["passed"]:
            exit_code = 2

    target = out_dir if out_dir is not None else scenario.output_dir
    os.makedirs(target, exist_ok=True)
    written = []
    for name in sorted(files):
        full = os.path.join(target, name)
        with open(full, "w", encoding="utf-8", newline="") as fh:
            fh.write(files[name])
        written.append(name)
    manifest["outputs"] = written
    with open(os.path.join(target, "run_manifest.json"), "w",
              encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return exit_code, manifest
