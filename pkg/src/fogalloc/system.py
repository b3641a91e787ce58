"""Radio link and compute latency model for local devices and fog servers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import ConfigurationError


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


MB_BITS = 8e6          # decimal megabyte
MEGACYCLE = 1e6


@dataclass(frozen=True)
class SystemParams:
    """Physical and weighting parameters shared by every patient and server.

    Defaults reproduce the reference simulation setup (5 MHz channel,
    -100 dBm noise, 0.1 W transmit power, 22.4 GHz fog servers, 2.4 GHz
    local devices, 250 ms latency budget, equal objective weights).
    """
    bandwidth_hz: float = 5e6
    noise_watts: float = 1e-13
    tx_power_watts: float = 0.1
    path_loss_exponent: float = 3.0
    fog_capacity_hz: float = 22.4e9
    local_capacity_hz: float = 2.4e9
    latency_budget_s: float = 0.25
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        for name in ("bandwidth_hz", "noise_watts", "tx_power_watts", "path_loss_exponent",
                     "fog_capacity_hz", "local_capacity_hz", "latency_budget_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive and finite, got {value!r}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ConfigurationError("objective weights must be non-negative")
        if abs(self.lambda1 + self.lambda2 - 2.0) > 1e-12:
            raise ConfigurationError("objective weights must sum to 2")


@dataclass(frozen=True)
class PatientProfile:
    id: int
    criticality: float
    data_bits: float
    cpu_cycles: float
    distance_m: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "distance_m", tuple(float(d) for d in self.distance_m))
        for name in ("criticality", "data_bits", "cpu_cycles"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.criticality > 0 and math.isfinite(self.criticality)):
            raise ConfigurationError(f"patient {self.id}: criticality must be > 0")
        if not self.data_bits >= 0:
            raise ConfigurationError(f"patient {self.id}: data_bits must be >= 0")
        if not self.cpu_cycles > 0:
            raise ConfigurationError(f"patient {self.id}: cpu_cycles must be > 0")
        if any(not d > 0 for d in self.distance_m):
            raise ConfigurationError(f"patient {self.id}: distances must be > 0")


def latency_bound(profile: PatientProfile, params: SystemParams) -> float:
    """Largest latency the patient tolerates: delta over criticality."""
    return params.latency_budget_s / profile.criticality


def local_compute_time(cpu_cycles: float, params: SystemParams) -> float:
    return cpu_cycles / params.local_capacity_hz


def channel_gain(distance_m: float, path_loss_exponent: float = 3.0) -> float:
    if not distance_m > 0:
        raise ValueError(f"distance must be positive, got {distance_m!r}")
    return distance_m ** (-path_loss_exponent)


def shannon_rate(bandwidth_hz: float, tx_power_watts: float, gain: float, noise_watts: float) -> float:
    return bandwidth_hz * math.log2(1.0 + tx_power_watts * gain / noise_watts)


def transmission_rate(profile: PatientProfile, fs_index: int, params: SystemParams) -> float:
    """Achievable uplink rate in bit/s between the patient's device and server ``fs_index``."""
    gain = channel_gain(profile.distance_m[fs_index], params.path_loss_exponent)
    return shannon_rate(params.bandwidth_hz, params.tx_power_watts, gain, params.noise_watts)


def transmission_time(data_bits: float, rate_bps: float) -> float:
    if rate_bps <= 0:
        raise ZeroDivisionError("transmission rate must be positive")
    return data_bits / rate_bps


def fog_compute_time(cpu_cycles: float, occupancy: int, params: SystemParams) -> float:
    """Compute time when the server's capacity is split evenly over ``occupancy`` patients."""
    if occupancy < 1:
        raise ValueError("occupancy counts the patient itself and must be >= 1")
    return cpu_cycles * occupancy / params.fog_capacity_hz
