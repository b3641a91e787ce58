"""Seeded scenario generation and the JSON scenario file format.

Every patient draws from its own PCG64 stream keyed by ``(seed, patient id)``,
so growing the number of patients or servers keeps the draws of existing
patients (and their first servers) unchanged.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .criticality import SensorReading, SensorSpec, criticality_from_readings
from .economics import PricingConfig, check_pricing
from .errors import ConfigurationError, ScenarioParseError
from .system import MB_BITS, MEGACYCLE, PatientProfile, SystemParams, dbm_to_watts

SCHEMA_VERSION = 1
PRNG_NAME = "numpy.PCG64/SeedSequence(seed, spawn_key=(patient,))"

Range = Tuple[float, float]


@dataclass(frozen=True)
class ScenarioConfig:
    num_patients: int = 20
    num_fs: int = 3
    data_mb_range: Range = (1.0, 3.0)
    cycles_megacycle_range: Range = (100.0, 1000.0)
    distance_m_range: Range = (50.0, 100.0)
    criticality_range: Range = (0.0, 1.0)
    criticality_median: Optional[float] = None
    params: SystemParams = field(default_factory=SystemParams)
    pricing: PricingConfig = field(default_factory=PricingConfig)
    seed: int = 0

    def __post_init__(self):
        if self.num_patients < 0:
            raise ConfigurationError("num_patients must be >= 0")
        if self.num_fs < 1:
            raise ConfigurationError("num_fs must be >= 1")
        for name in ("data_mb_range", "cycles_megacycle_range", "distance_m_range", "criticality_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ConfigurationError(f"{name}: lower end exceeds upper end")
            object.__setattr__(self, name, (float(lo), float(hi)))
        lo, hi = self.criticality_range
        if lo < 0 or hi > 1 or hi <= 0:
            raise ConfigurationError("criticality_range must lie within (0, 1]")
        if self.cycles_megacycle_range[0] <= 0 or self.distance_m_range[0] <= 0:
            raise ConfigurationError("cycle and distance ranges must be positive")
        if self.data_mb_range[0] < 0:
            raise ConfigurationError("data_mb_range must be non-negative")
        if self.criticality_median is not None and not 0 < self.criticality_median < 1:
            raise ConfigurationError("criticality_median must lie strictly between 0 and 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        for key, value in d.items():
            if isinstance(value, tuple):
                d[key] = list(value)
        return d


@dataclass
class Scenario:
    profiles: List[PatientProfile]
    params: SystemParams
    pricing: PricingConfig
    num_fs: int
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_fs < 1:
            raise ConfigurationError("num_fs must be >= 1")
        ids = [p.id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("patient ids must be unique")
        for prof in self.profiles:
            if len(prof.distance_m) != self.num_fs:
                raise ConfigurationError(
                    f"patient {prof.id}: {len(prof.distance_m)} distances for {self.num_fs} servers")
        check_pricing(self.pricing, self.num_fs, len(self.profiles))

    @property
    def num_patients(self) -> int:
        return len(self.profiles)


def _patient_stream(seed: int, patient: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(patient,))))


def _uniform(u: float, lo: float, hi: float) -> float:
    return lo + (hi - lo) * u


def _uniform_open_low(u: float, lo: float, hi: float) -> float:
    # (lo, hi]: criticality must stay strictly positive
    return hi - (hi - lo) * u


def _sample(config: ScenarioConfig, median: Optional[float]) -> List[PatientProfile]:
    P, F = config.num_patients, config.num_fs
    middle = P // 2
    profiles = []
    for p in range(P):
        u = _patient_stream(config.seed, p).random(3 + F)
        if median is None:
            rho = _uniform_open_low(u[0], *config.criticality_range)
        elif p < middle:
            rho = median * (1.0 - u[0])
        elif p == middle:
            rho = median
        else:
            rho = _uniform_open_low(u[0], median, 1.0)
        data_mb = _uniform(u[1], *config.data_mb_range)
        mcycles = _uniform(u[2], *config.cycles_megacycle_range)
        dist = tuple(_uniform(x, *config.distance_m_range) for x in u[3:])
        profiles.append(PatientProfile(p, float(rho), data_mb * MB_BITS, mcycles * MEGACYCLE, dist))
    return profiles


def generate(config: ScenarioConfig) -> Scenario:
    """Draw a scenario; uses the median protocol when ``config.criticality_median`` is set."""
    check_pricing(config.pricing, config.num_fs, config.num_patients)
    profiles = _sample(config, config.criticality_median)
    return Scenario(profiles, config.params, config.pricing, config.num_fs, _provenance(config))


def generate_with_median(config: ScenarioConfig, median: float) -> Scenario:
    """Fixed patient order with the middle patient at ``median``.

    Patients before the middle one draw criticality below the median and
    those after it draw above.
    """
    return generate(replace(config, criticality_median=median))


def _provenance(config: ScenarioConfig) -> Dict[str, Any]:
    return {"generator": "fogalloc.scenario", "prng": PRNG_NAME, "seed": config.seed,
            "config": config.to_dict()}


# -- file format ------------------------------------------------------------

def _params_doc(params: SystemParams) -> Dict[str, float]:
    return asdict(params)


def _pricing_doc(pricing: PricingConfig) -> Dict[str, float]:
    return {
        "fog_price": pricing.fog_price,
        "local_price": pricing.local_price,
        "per_cycle_cost_per_megacycle": pricing.per_cycle_cost,
        "fixed_fs_cost": pricing.fixed_fs_cost,
        "fog_price_max": pricing.m_max,
        "local_price_max": pricing.l_max,
        "beta_max_megacycles": pricing.beta_max_megacycles,
    }


def to_document(scenario: Scenario) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "num_fs": scenario.num_fs,
        "system": _params_doc(scenario.params),
        "pricing": _pricing_doc(scenario.pricing),
        "patients": [
            {"id": p.id, "criticality": p.criticality, "data_bits": p.data_bits,
             "cpu_cycles": p.cpu_cycles, "distance_m": list(p.distance_m)}
            for p in scenario.profiles
        ],
        "provenance": scenario.provenance,
    }


def save(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(to_document(scenario), indent=2) + "\n", encoding="utf-8")


def load(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(str(path), f"not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    return from_document(doc)


def _number(d: Dict[str, Any], key: str, where: str, default=None) -> float:
    if key not in d:
        if default is not None:
            return default
        raise ScenarioParseError(f"{where}.{key}", "missing")
    return _as_number(d[key], f"{where}.{key}")


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioParseError(where, f"expected a finite number, got {value!r}")
    return float(value)


def _either(d: Dict[str, Any], where: str, plain: str, scaled: str, factor) -> float:
    if plain in d:
        return _number(d, plain, where)
    if scaled in d:
        return factor(_number(d, scaled, where))
    raise ScenarioParseError(f"{where}.{plain}", f"missing (give {plain} or {scaled})")


def _section(doc, key) -> Dict[str, Any]:
    sec = doc.get(key)
    if not isinstance(sec, dict):
        raise ScenarioParseError(key, "missing or not an object")
    return sec


def _system_from(doc) -> SystemParams:
    sec = _section(doc, "system")
    defaults = SystemParams()
    kwargs = {}
    for f in fields(SystemParams):
        if f.name == "noise_watts":
            continue
        kwargs[f.name] = _number(sec, f.name, "system", getattr(defaults, f.name))
    if "noise_watts" in sec or "noise_dbm" in sec:
        kwargs["noise_watts"] = _either(sec, "system", "noise_watts", "noise_dbm", dbm_to_watts)
    return SystemParams(**kwargs)


def _pricing_from(doc) -> PricingConfig:
    sec = _section(doc, "pricing")
    d = PricingConfig()
    return PricingConfig(
        fog_price=_number(sec, "fog_price", "pricing"),
        local_price=_number(sec, "local_price", "pricing"),
        per_cycle_cost=_number(sec, "per_cycle_cost_per_megacycle", "pricing", d.per_cycle_cost),
        fixed_fs_cost=_number(sec, "fixed_fs_cost", "pricing", d.fixed_fs_cost),
        m_max=_number(sec, "fog_price_max", "pricing", max(d.m_max, _number(sec, "fog_price", "pricing"))),
        l_max=_number(sec, "local_price_max", "pricing", max(d.l_max, _number(sec, "local_price", "pricing"))),
        beta_max_megacycles=_number(sec, "beta_max_megacycles", "pricing", d.beta_max_megacycles),
    )


def _criticality_from(entry, where) -> float:
    if "criticality" in entry:
        return _number(entry, "criticality", where)
    sensors = entry.get("sensors")
    if not isinstance(sensors, list) or not sensors:
        raise ScenarioParseError(f"{where}.criticality", "missing (give criticality or sensors)")
    specs, readings = {}, []
    for k, s in enumerate(sensors):
        sw = f"{where}.sensors[{k}]"
        if not isinstance(s, dict):
            raise ScenarioParseError(sw, "expected an object")
        sid = str(s.get("id", k))
        specs[sid] = SensorSpec(sid, _number(s, "medical_criticality", sw),
                                _number(s, "theta_lower", sw), _number(s, "theta_upper", sw))
        readings.append(SensorReading(sid, _number(s, "theta", sw)))
    rho_max = entry.get("criticality_max")
    if rho_max is not None:
        rho_max = _number(entry, "criticality_max", where)
    return criticality_from_readings(readings, specs, rho_max)


def from_document(doc: Dict[str, Any]) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioParseError("<root>", "expected an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioParseError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    num_fs = doc.get("num_fs")
    if isinstance(num_fs, bool) or not isinstance(num_fs, int) or num_fs < 1:
        raise ScenarioParseError("num_fs", f"expected a positive integer, got {num_fs!r}")
    params = _system_from(doc)
    pricing = _pricing_from(doc)
    patients = doc.get("patients")
    if not isinstance(patients, list):
        raise ScenarioParseError("patients", "missing or not a list")
    profiles = []
    for i, entry in enumerate(patients):
        where = f"patients[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioParseError(where, "expected an object")
        pid = entry.get("id", i)
        if isinstance(pid, bool) or not isinstance(pid, int):
            raise ScenarioParseError(f"{where}.id", f"expected an integer, got {pid!r}")
        dist = entry.get("distance_m")
        if not isinstance(dist, list) or len(dist) != num_fs:
            raise ScenarioParseError(f"{where}.distance_m", f"expected a list of {num_fs} numbers")
        distances = tuple(_as_number(d, f"{where}.distance_m[{k}]") for k, d in enumerate(dist))
        try:
            profiles.append(PatientProfile(
                id=pid,
                criticality=_criticality_from(entry, where),
                data_bits=_either(entry, where, "data_bits", "data_mb", lambda x: x * MB_BITS),
                cpu_cycles=_either(entry, where, "cpu_cycles", "cpu_megacycles", lambda x: x * MEGACYCLE),
                distance_m=distances,
            ))
        except ScenarioParseError:
            raise
        except ConfigurationError as exc:
            raise ScenarioParseError(where, str(exc)) from exc
    provenance = doc.get("provenance", {})
    if not isinstance(provenance, dict):
        raise ScenarioParseError("provenance", "expected an object")
    return Scenario(profiles, params, pricing, num_fs, provenance)
