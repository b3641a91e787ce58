import pytest
from hypothesis import given, strategies as st

from fogalloc.criticality import (SensorReading, SensorSpec, criticality_from_readings,
                                  normalize_criticality, overall_criticality, patient_criticality,
                                  severity_index)
from fogalloc.errors import ConfigurationError

HR = SensorSpec("hr", 2.0, 60.0, 100.0)


@pytest.mark.parametrize("theta, expected", [(80.0, 0.0), (60.0, 0.0625), (110.0, 0.09375)])
def test_severity_examples(theta, expected):
    assert severity_index(SensorReading("hr", theta), HR) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("x, d, expected", [(0.0, 0.5, 0.0), (2.0, 0.0625, 0.125), (1.0, 0.09375, 0.09375)])
def test_overall_criticality_examples(x, d, expected):
    spec = SensorSpec("s", x, 60.0, 100.0)
    assert overall_criticality(spec, d) == expected


@pytest.mark.parametrize("parts, expected", [([], 0.0), ([0.125, 0.09375], 0.21875), ([0.5], 0.5)])
def test_patient_criticality_examples(parts, expected):
    assert patient_criticality(parts) == expected


def test_invalid_specs_rejected():
    with pytest.raises(ConfigurationError):
        SensorSpec("bad", 1.0, 100.0, 60.0)
    with pytest.raises(ConfigurationError):
        SensorSpec("bad", -1.0, 60.0, 100.0)
    with pytest.raises(ConfigurationError):
        SensorReading("hr", float("nan"))


def test_pipeline_and_normalisation():
    specs = {"hr": HR, "temp": SensorSpec("temp", 1.0, 60.0, 100.0)}
    readings = [SensorReading("hr", 60.0), SensorReading("temp", 110.0)]
    assert criticality_from_readings(readings, specs) == pytest.approx(0.21875)
    assert criticality_from_readings(readings, specs, rho_max=0.4375) == pytest.approx(0.5)
    assert normalize_criticality(0.3) == 0.3
    with pytest.raises(ConfigurationError):
        criticality_from_readings([SensorReading("bp", 1.0)], specs)
    with pytest.raises(ConfigurationError):
        normalize_criticality(0.3, 0.0)


bounds = st.tuples(st.floats(-500, 500), st.floats(0.5, 500)).map(lambda t: (t[0], t[0] + t[1]))


@given(bounds, st.floats(0, 1000))
def test_reflection_about_midpoint(lims, x):
    lo, hi = lims
    spec = SensorSpec("s", 1.0, lo, hi)
    mid = (lo + hi) / 2
    a = severity_index(SensorReading("s", mid + x), spec)
    b = severity_index(SensorReading("s", mid - x), spec)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)
    assert a >= 0


@given(st.lists(st.floats(0, 10), max_size=10), st.floats(0, 10))
def test_adding_a_sensor_never_lowers_criticality(parts, extra):
    assert patient_criticality(parts + [extra]) >= patient_criticality(parts)


@given(st.lists(st.tuples(st.floats(0, 5), st.floats(-200, 200)), min_size=1, max_size=6),
       st.floats(0.01, 100))
def test_scaling_weights_scales_criticality(sensors, kappa):
    specs = {str(i): SensorSpec(str(i), x, 60.0, 100.0) for i, (x, _) in enumerate(sensors)}
    scaled = {k: SensorSpec(k, s.medical_criticality * kappa, 60.0, 100.0) for k, s in specs.items()}
    readings = [SensorReading(str(i), th) for i, (_, th) in enumerate(sensors)]
    base = criticality_from_readings(readings, specs)
    assert criticality_from_readings(readings, scaled) == pytest.approx(kappa * base, rel=1e-12, abs=1e-300)
