import numpy as np
import pytest

from qdpli.errors import DomainError
from qdpli.units import HBAR_MEV_PS, KB_MEV_PER_K, UNITS, thermal_coth

from oracles import COTH_01MEV_40K


def test_zero_temperature_limit_is_one():
    assert thermal_coth(1.0, 0.0) == 1.0
    assert thermal_coth(0.001, 0.0) == 1.0


def test_large_argument_asymptote():
    # coth -> 1 + 2 exp(-omega/(kB T)); within 1e-12 once omega >= 29 kB T
    T = 40.0
    for factor in (29.0, 40.0, 100.0):
        val = thermal_coth(factor * KB_MEV_PER_K * T, T)
        assert abs(val - 1.0) < 1e-12


def test_value_against_high_precision_oracle():
    import mpmath as mp
    mp.mp.dps = 40
    live = float(mp.coth(mp.mpf("0.1") / (2 * mp.mpf(str(KB_MEV_PER_K)) * 40)))
    assert live == pytest.approx(COTH_01MEV_40K, rel=1e-14)
    assert thermal_coth(0.1, 40.0) == pytest.approx(COTH_01MEV_40K, rel=1e-12)


def test_monotone_decreasing_and_bounded_below():
    omegas = np.linspace(0.01, 20.0, 500)
    vals = thermal_coth(omegas, 25.0)
    assert np.all(np.diff(vals) < 0.0)
    assert np.all(vals >= 1.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        thermal_coth(0.0, 10.0)
    with pytest.raises(DomainError):
        thermal_coth(-1.0, 10.0)
    with pytest.raises(DomainError):
        thermal_coth(1.0, -1.0)


def test_unit_round_trips():
    for e in (1e-6, 0.5, 1.0, 1440.0):
        back = UNITS.angular_to_energy(UNITS.energy_to_angular(e))
        assert back == pytest.approx(e, rel=1e-12)
    assert UNITS.kelvin_to_mev(1.0) == KB_MEV_PER_K
    assert HBAR_MEV_PS == pytest.approx(0.6582119569)
