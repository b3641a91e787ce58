"""Criticality- and utility-aware allocation of patients to fog servers."""
from .allocation import (LOCAL, Allocation, Instance, Objective, cost_J, delta_assign, delta_one_way,
                         delta_two_way, is_feasible, latency_violations, n_max, patient_latency,
                         room_for, utility_U, violators)
from .criticality import (SensorReading, SensorSpec, criticality_from_readings, overall_criticality,
                          patient_criticality, severity_index)
from .economics import PricingConfig, ProfitBreakdown, check_pricing, profit_breakdown, validate_pricing
from .errors import BudgetExceededError, ConfigurationError, InfeasibleInstanceError, ScenarioParseError
from .scenario import Scenario, ScenarioConfig, generate, generate_with_median, load, save
from .solvers import SolveReport, solve_base, solve_exact, solve_umpma
from .system import PatientProfile, SystemParams

__version__ = "0.1.0"

__all__ = [
    "LOCAL",
    "Allocation",
    "Instance",
    "Objective",
    "cost_J",
    "delta_assign",
    "delta_one_way",
    "delta_two_way",
    "is_feasible",
    "latency_violations",
    "n_max",
    "patient_latency",
    "room_for",
    "utility_U",
    "violators",
    "SensorReading",
    "SensorSpec",
    "criticality_from_readings",
    "overall_criticality",
    "patient_criticality",
    "severity_index",
    "PricingConfig",
    "ProfitBreakdown",
    "check_pricing",
    "profit_breakdown",
    "validate_pricing",
    "BudgetExceededError",
    "ConfigurationError",
    "InfeasibleInstanceError",
    "ScenarioParseError",
    "Scenario",
    "ScenarioConfig",
    "generate",
    "generate_with_median",
    "load",
    "save",
    "SolveReport",
    "solve_base",
    "solve_exact",
    "solve_umpma",
    "PatientProfile",
    "SystemParams",
]
