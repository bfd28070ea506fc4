"""Scenario files: a strict, sectioned key-value format.

A scenario fully determines a run:

    [bath]        alpha_p, omega_b_mev, temperature_k, optional t_grid_k
    [reservoir]   type = lorentzian | waveguide | flat | none, parameters,
                  position relative to the zero-phonon line, gamma_b_uev,
                  background_add
    [drive]       eta_x_uev, omega_x_mev, detuning grid bounds and size
    [numerics]    optional overrides of the quadrature controls
    [output]      optional output directory and formats

Unknown sections or keys are rejected so figure reproductions stay
auditable; full-line comments start with '#'.
"""

import configparser
import dataclasses
import hashlib
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .bath import PhononBath
from .config import DEFAULT_NUMERICS, NumericsConfig
from .errors import ConfigError
from .reservoir import (CoupledCavityWaveguide, FlatBackground,
                        LorentzianCavity)

__all__ = ["DriveConfig", "Scenario", "parse_scenario", "load_scenario",
           "bundled_scenario_path", "refined_grid"]


@dataclass(frozen=True)
class DriveConfig:
    """Weak cw drive and the laser-detuning grid (Dxl = w_x - w_L)."""

    eta_x_uev: float
    omega_x_mev: float
    delta_xl_grid_mev: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.eta_x_uev <= 0.0:
            raise ConfigError("eta_x must be > 0", key="eta_x_uev")
        grid = np.asarray(self.delta_xl_grid_mev, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0.0):
            raise ConfigError("detuning grid must be strictly increasing",
                              key="delta_xl_grid_mev")
        object.__setattr__(self, "delta_xl_grid_mev", grid)


def refined_grid(lo, hi, n_base, refine_intervals=(), factor=4):
    """Uniform grid with denser sampling inside the given intervals."""
    base = np.linspace(lo, hi, n_base)
    pieces = [base]
    if factor > 1:
        step = (hi - lo) / (n_base - 1) / factor
        for (ilo, ihi) in refine_intervals:
            ilo, ihi = max(ilo, lo), min(ihi, hi)
            if ilo < ihi:
                pieces.append(np.arange(ilo, ihi + 0.5 * step, step))
    return np.unique(np.concatenate(pieces))


@dataclass(frozen=True)
class Scenario:
    """Parsed, validated scenario ready to run."""

    name: str
    bath: PhononBath
    t_grid_k: tuple
    reservoir: object            # PhotonReservoir or None
    background_add: bool
    gamma_b_uev: float
    drive: DriveConfig
    numerics: NumericsConfig
    output_dir: str
    formats: tuple
    sha256: str

    @property
    def window_mev(self):
        half = self.numerics.window_half_width_mev
        return (self.drive.omega_x_mev - half, self.drive.omega_x_mev + half)


_SCHEMA = {
    "bath": {"alpha_p", "omega_b_mev", "temperature_k", "t_grid_k",
             "phonon_frequency_convention"},
    "reservoir": {"type", "g_mev", "kappa_mev", "offset_mev",
                  "upper_edge_offset_mev", "band_width_mev", "kappa_u_mev",
                  "kappa_l_mev", "dipole_debye", "refractive_index",
                  "v_eff_um3", "v_eff_lambda3", "peak_purcell",
                  "bandwidth_mev", "center_offset_mev", "gamma_b_uev",
                  "background_add"},
    "drive": {"eta_x_uev", "omega_x_mev", "delta_min_mev", "delta_max_mev",
              "n_delta"},
    "numerics": {"tau_max_ps", "n_tau", "n_omega", "tail_tol",
                 "quad_rel_tol", "window_half_width_mev",
                 "points_per_uev_core", "points_per_mev_base",
                 "reservoir_tail_rel", "refine_factor"},
    "output": {"dir", "formats"},
}

_REQUIRED = {
    "bath": {"alpha_p", "omega_b_mev", "temperature_k"},
    "reservoir": {"type"},
    "drive": {"eta_x_uev", "omega_x_mev", "delta_min_mev", "delta_max_mev",
              "n_delta"},
}


class _Section:
    def __init__(self, name, raw):
        self.name = name
        self.raw = dict(raw)

    def _get(self, key, conv, default=None, required=False):
        if key not in self.raw:
            if required:
                raise ConfigError(f"[{self.name}] missing required key "
                                  f"'{key}'", key=key)
            return default
        text = self.raw.pop(key)
        try:
            return conv(text)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"[{self.name}] invalid value for '{key}': {text!r} ({exc})",
                key=key) from exc

    def number(self, key, default=None, required=False):
        return self._get(key, float, default, required)

    def integer(self, key, default=None, required=False):
        return self._get(key, lambda s: int(s, 10), default, required)

    def text(self, key, default=None, required=False):
        return self._get(key, str.strip, default, required)

    def flag(self, key, default=None):
        def conv(s):
            s = s.strip().lower()
            if s in ("true", "yes", "on", "1"):
                return True
            if s in ("false", "no", "off", "0"):
                return False
            raise ValueError("expected a boolean")
        return self._get(key, conv, default)

    def numbers(self, key, default=None):
        def conv(s):
            vals = tuple(float(p) for p in s.replace(",", " ").split())
            if not vals:
                raise ValueError("expected a list of numbers")
            return vals
        return self._get(key, conv, default)

    def reject_leftovers(self):
        if self.raw:
            key = sorted(self.raw)[0]
            raise ConfigError(f"[{self.name}] unknown key '{key}'", key=key)


def _build_reservoir(sec, omega_x, gamma_b_uev):
    kind = sec.text("type", required=True).lower()
    if kind == "none":
        return None
    if kind == "lorentzian":
        offset = sec.number("offset_mev", required=True)
        return LorentzianCavity(
            g_mev=sec.number("g_mev", required=True),
            kappa_mev=sec.number("kappa_mev", required=True),
            omega_c_mev=omega_x + offset,
        )
    if kind == "flat":
        return FlatBackground(
            gamma_b_uev=gamma_b_uev,
            bandwidth_mev=sec.number("bandwidth_mev", required=True),
            center_mev=omega_x + sec.number("center_offset_mev", 0.0),
        )
    if kind == "waveguide":
        upper = omega_x + sec.number("upper_edge_offset_mev", required=True)
        width = sec.number("band_width_mev", required=True)
        if width <= 0.0:
            raise ConfigError("band_width_mev must be > 0",
                              key="band_width_mev")
        args = dict(
            omega_l_mev=upper - width,
            omega_u_mev=upper,
            kappa_u_mev=sec.number("kappa_u_mev", required=True),
            kappa_l_mev=sec.number("kappa_l_mev", required=True),
        )
        peak = sec.number("peak_purcell")
        if peak is not None:
            return CoupledCavityWaveguide.from_peak_purcell(
                peak_purcell=peak, gamma_b_uev=gamma_b_uev, **args)
        return CoupledCavityWaveguide(
            dipole_debye=sec.number("dipole_debye"),
            refractive_index=sec.number("refractive_index"),
            v_eff_um3=sec.number("v_eff_um3"),
            v_eff_lambda3=sec.number("v_eff_lambda3"),
            **args)
    raise ConfigError(f"unknown reservoir type '{kind}'", key="type")


def feature_intervals_mev(reservoir):
    """Regions of rapid spectral variation, for detuning-grid refinement."""
    if reservoir is None or isinstance(reservoir, FlatBackground):
        return ()
    if isinstance(reservoir, LorentzianCavity):
        k = reservoir.kappa_mev
        return ((reservoir.omega_c_mev - 3 * k, reservoir.omega_c_mev + 3 * k),)
    return ((reservoir.omega_l_mev - 10 * reservoir.kappa_l_mev,
             reservoir.omega_u_mev + 10 * reservoir.kappa_u_mev),)


def parse_scenario(text, name="scenario"):
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse scenario: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", key=section)
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"[{section}] unknown key '{key}'", key=key)
    for section, req in _REQUIRED.items():
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}]",
                              key=section)
        for key in req:
            if key not in parser[section]:
                raise ConfigError(f"[{section}] missing required key '{key}'",
                                  key=key)

    bath_sec = _Section("bath", parser["bath"])
    bath = PhononBath(
        alpha_p=bath_sec.number("alpha_p", required=True),
        omega_b_mev=bath_sec.number("omega_b_mev", required=True),
        temperature_k=bath_sec.number("temperature_k", required=True),
    )
    t_grid = bath_sec.numbers("t_grid_k", default=())
    convention = bath_sec.text("phonon_frequency_convention", "angular")
    bath_sec.reject_leftovers()

    num_kwargs = {"phonon_frequency_convention": convention}
    if parser.has_section("numerics"):
        num_sec = _Section("numerics", parser["numerics"])
        for key in ("tau_max_ps", "tail_tol", "quad_rel_tol",
                    "window_half_width_mev", "points_per_uev_core",
                    "points_per_mev_base", "reservoir_tail_rel"):
            val = num_sec.number(key)
            if val is not None:
                num_kwargs[key] = val
        for key in ("n_tau", "n_omega", "refine_factor"):
            val = num_sec.integer(key)
            if val is not None:
                num_kwargs[key] = val
        num_sec.reject_leftovers()
    numerics = dataclasses.replace(DEFAULT_NUMERICS, **num_kwargs)

    drive_sec = _Section("drive", parser["drive"])
    omega_x = drive_sec.number("omega_x_mev", required=True)
    d_lo = drive_sec.number("delta_min_mev", required=True)
    d_hi = drive_sec.number("delta_max_mev", required=True)
    n_delta = drive_sec.integer("n_delta", required=True)
    eta = drive_sec.number("eta_x_uev", required=True)
    drive_sec.reject_leftovers()
    if not d_lo < d_hi:
        raise ConfigError("delta_min_mev must be below delta_max_mev",
                          key="delta_min_mev")
    if n_delta < 2:
        raise ConfigError("n_delta must be at least 2", key="n_delta")

    res_sec = _Section("reservoir", parser["reservoir"])
    gamma_b = res_sec.number("gamma_b_uev", 1.0)
    if gamma_b <= 0.0:
        raise ConfigError("gamma_b_uev must be > 0", key="gamma_b_uev")
    background_add = res_sec.flag("background_add", True)
    reservoir = _build_reservoir(res_sec, omega_x, gamma_b)
    res_sec.reject_leftovers()

    refine = tuple((omega_x - hi_f, omega_x - lo_f)
                   for (lo_f, hi_f) in feature_intervals_mev(reservoir))
    delta_grid = refined_grid(d_lo, d_hi, n_delta, refine,
                              numerics.refine_factor)
    drive = DriveConfig(eta_x_uev=eta, omega_x_mev=omega_x,
                        delta_xl_grid_mev=delta_grid)

    out_dir, formats = "out", ("csv", "svg")
    if parser.has_section("output"):
        out_sec = _Section("output", parser["output"])
        out_dir = out_sec.text("dir", out_dir)
        fmt = out_sec.text("formats")
        if fmt is not None:
            formats = tuple(p.strip().lower() for p in fmt.split(",") if p.strip())
            bad = set(formats) - {"csv", "svg"}
            if bad:
                raise ConfigError(f"unknown output format {sorted(bad)[0]!r}",
                                  key="formats")
        out_sec.reject_leftovers()

    if t_grid and np.any(np.diff(t_grid) <= 0.0):
        raise ConfigError("t_grid_k must be strictly increasing",
                          key="t_grid_k")

    return Scenario(
        name=name,
        bath=bath,
        t_grid_k=tuple(t_grid),
        reservoir=reservoir,
        background_add=background_add,
        gamma_b_uev=gamma_b,
        drive=drive,
        numerics=numerics,
        output_dir=out_dir,
        formats=formats,
        sha256=hashlib.sha256(text.encode()).hexdigest(),
    )


def load_scenario(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        raise
    name = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_scenario(text, name=name)


def bundled_scenario_path(name):
    """Filesystem path of a scenario shipped with the package."""
    ref = resources.files("qdpli").joinpath("scenarios", f"{name}.scenario")
    if not ref.is_file():
        raise ConfigError(f"no bundled scenario named '{name}'", key=name)
    return str(ref)
