import math

import pytest
from hypothesis import given, strategies as st

from conftest import PARAMS, profile
from fogalloc.errors import ConfigurationError
from fogalloc.system import (SystemParams, channel_gain, dbm_to_watts, fog_compute_time,
                             local_compute_time, shannon_rate, transmission_rate, transmission_time,
                             watts_to_dbm)

# mpmath at 40 digits
BR_50 = 114657843.7483052146
BR_100 = 99657850.06009246815
T_TR_2MB_50 = 0.13954562092692851531


def test_local_compute_examples():
    assert local_compute_time(0, PARAMS) == 0
    assert local_compute_time(1e9, PARAMS) == pytest.approx(0.4166666666666667, rel=1e-15)
    assert local_compute_time(2.4e9, PARAMS) == 1.0


def test_channel_gain_examples():
    assert channel_gain(1, 3) == 1
    assert channel_gain(50, 3) == pytest.approx(8e-6, rel=1e-15)
    assert channel_gain(100, 3) == pytest.approx(1e-6, rel=1e-15)
    for bad in (0.0, -3.0):
        with pytest.raises(ValueError):
            channel_gain(bad)


def test_rate_examples():
    assert shannon_rate(5e6, 0.0, 1.0, 1e-13) == 0.0
    assert shannon_rate(5e6, 1.0, 1.0, 1.0) == 5e6
    assert transmission_rate(profile(dist=(50.0,)), 0, PARAMS) == pytest.approx(BR_50, rel=1e-12)
    assert transmission_rate(profile(dist=(50.0, 100.0)), 1, PARAMS) == pytest.approx(BR_100, rel=1e-12)


def test_transmission_time_examples():
    assert transmission_time(0, BR_50) == 0
    assert transmission_time(1.6e7, BR_50) == pytest.approx(T_TR_2MB_50, rel=1e-12)
    assert transmission_time(BR_50, BR_50) == 1.0
    with pytest.raises(ZeroDivisionError):
        transmission_time(1.0, 0.0)


def test_fog_compute_examples():
    assert fog_compute_time(1e9, 1, PARAMS) == pytest.approx(1e9 / 22.4e9, rel=1e-15)
    assert fog_compute_time(1e9, 8, PARAMS) == pytest.approx(0.35714285714285715, rel=1e-15)
    assert fog_compute_time(0, 5, PARAMS) == 0
    with pytest.raises(ValueError):
        fog_compute_time(1e9, 0, PARAMS)


def test_noise_conversion():
    assert dbm_to_watts(-100) == pytest.approx(1e-13, rel=1e-12)
    assert dbm_to_watts(30) == 1.0


def test_params_validation():
    with pytest.raises(ConfigurationError):
        SystemParams(lambda1=1.5, lambda2=1.0)
    with pytest.raises(ConfigurationError):
        SystemParams(bandwidth_hz=0)
    SystemParams(lambda1=2.0, lambda2=0.0)


def test_profile_validation():
    with pytest.raises(ConfigurationError):
        profile(rho=0.0)
    with pytest.raises(ConfigurationError):
        profile(dist=(0.0,))
    with pytest.raises(ConfigurationError):
        profile(mcycles=0.0)


@given(st.floats(1, 5e9), st.integers(1, 1000))
def test_fog_time_linear_in_occupancy(beta, n):
    assert fog_compute_time(beta, n, PARAMS) == pytest.approx(n * fog_compute_time(beta, 1, PARAMS), rel=1e-14)


@given(st.floats(1, 1000), st.floats(1.001, 10))
def test_rate_decreases_with_distance(d, factor):
    near = transmission_rate(profile(dist=(d,)), 0, PARAMS)
    far = transmission_rate(profile(dist=(d * factor,)), 0, PARAMS)
    assert far < near


@given(st.floats(1e-4, 10), st.floats(1.001, 10))
def test_rate_increases_with_power(w, factor):
    g = channel_gain(75.0)
    assert shannon_rate(5e6, w * factor, g, 1e-13) > shannon_rate(5e6, w, g, 1e-13)


@given(st.floats(1e-20, 1e6))
def test_dbm_round_trip(x):
    assert math.isclose(dbm_to_watts(watts_to_dbm(x)), x, rel_tol=1e-12)
