"""Sensor severity and patient criticality.

A reading far from its healthy reference range yields a large severity; the
sensor's medical criticality weights it, and a patient's criticality is the
sum over all of their sensors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError


@dataclass(frozen=True)
class SensorSpec:
    id: str
    medical_criticality: float
    theta_lower: float
    theta_upper: float

    def __post_init__(self):
        if not self.medical_criticality >= 0:
            raise ConfigurationError(f"sensor {self.id}: medical_criticality must be >= 0")
        if not self.theta_upper > self.theta_lower:
            raise ConfigurationError(f"sensor {self.id}: theta_upper must exceed theta_lower")
        if abs(self.theta_upper) + abs(self.theta_lower) <= 0:
            raise ConfigurationError(f"sensor {self.id}: reference range has zero magnitude")


@dataclass(frozen=True)
class SensorReading:
    sensor_id: str
    theta: float
    time_slot: int = 0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ConfigurationError(f"reading for {self.sensor_id}: theta must be finite")


def severity_index(reading: SensorReading, spec: SensorSpec) -> float:
    """Normalised squared deviation of ``reading`` from the range in ``spec``.

    Zero at the range midpoint, growing as the value drifts to or past
    either limit.
    """
    denom = (abs(spec.theta_upper) + abs(spec.theta_lower)) ** 2
    if denom == 0:
        raise ConfigurationError(f"sensor {spec.id}: zero severity denominator")
    theta = reading.theta
    return abs((spec.theta_upper - theta) ** 2 - (theta - spec.theta_lower) ** 2) / denom


def overall_criticality(spec: SensorSpec, severity: float) -> float:
    return spec.medical_criticality * severity


def patient_criticality(contributions: Iterable[float]) -> float:
    return math.fsum(contributions)


def normalize_criticality(rho: float, rho_max: float | None = None) -> float:
    """Scale ``rho`` into [0, 1] by ``rho_max``; identity when no maximum is given."""
    if rho_max is None:
        return rho
    if rho_max <= 0:
        raise ConfigurationError("rho_max must be positive")
    return rho / rho_max


def criticality_from_readings(
    readings: Sequence[SensorReading],
    specs: Mapping[str, SensorSpec],
    rho_max: float | None = None,
) -> float:
    """Run the full sensor pipeline for one patient and one time slot."""
    parts = []
    for r in readings:
        try:
            spec = specs[r.sensor_id]
        except KeyError:
            raise ConfigurationError(f"reading references unknown sensor {r.sensor_id!r}") from None
        parts.append(overall_criticality(spec, severity_index(r, spec)))
    return normalize_criticality(patient_criticality(parts), rho_max)
