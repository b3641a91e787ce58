"""Flat-rate pricing: revenue, expenditure and profit of the medical centre."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigurationError
from .system import MEGACYCLE, PatientProfile

_EPS = 1e-9


@dataclass(frozen=True)
class PricingConfig:
    """Per-slot prices and costs.

    ``per_cycle_cost`` is charged per Megacycle of fog computation, and
    ``beta_max_megacycles`` is the largest workload the centre expects to
    price for.
    """
    fog_price: float = 200.0
    local_price: float = 100.0
    per_cycle_cost: float = 0.1
    fixed_fs_cost: float = 0.0
    m_max: float = 200.0
    l_max: float = 100.0
    beta_max_megacycles: float = 1000.0

    def fog_margin(self, cpu_cycles: float) -> float:
        """Profit change when one patient moves from its local device to a fog server."""
        return self.fog_price - self.local_price - self.per_cycle_cost * cpu_cycles / MEGACYCLE


@dataclass(frozen=True)
class ProfitBreakdown:
    revenue: float
    expenditure: float
    profit: float


def validate_pricing(pricing: PricingConfig, num_fs: int, num_patients: int) -> Optional[str]:
    """Return ``None`` when the pricing is admissible, else the first violated rule."""
    m, l = pricing.fog_price, pricing.local_price
    if l < 0:
        return "local_price >= 0"
    if l > pricing.l_max:
        return f"local_price <= l_max ({l} > {pricing.l_max})"
    if m < 0:
        return "fog_price >= 0"
    if m > pricing.m_max:
        return f"fog_price <= m_max ({m} > {pricing.m_max})"
    if not m > l:
        return f"fog_price > local_price ({m} <= {l})"
    if pricing.per_cycle_cost < 0 or pricing.fixed_fs_cost < 0 or pricing.beta_max_megacycles < 0:
        return "costs and beta_max must be non-negative"
    fixed_share = pricing.fixed_fs_cost * num_fs / num_patients if num_patients > 0 else 0.0
    need = pricing.per_cycle_cost * pricing.beta_max_megacycles + fixed_share
    if m - l < need - _EPS * max(1.0, abs(need)):
        return f"fog_price - local_price >= per_cycle_cost*beta_max + fixed_fs_cost*F/P ({m - l} < {need})"
    return None


def check_pricing(pricing: PricingConfig, num_fs: int, num_patients: int) -> None:
    problem = validate_pricing(pricing, num_fs, num_patients)
    if problem is not None:
        raise ConfigurationError(f"pricing violation: {problem}")


def profit_breakdown(on_fog: Sequence[bool], profiles: Sequence[PatientProfile],
                     pricing: PricingConfig, num_fs: int) -> ProfitBreakdown:
    """Revenue, expenditure and profit for a set of fog/local decisions.

    ``on_fog[p]`` is true when patient ``p`` computes on any fog server; which
    server does not matter for profit.
    """
    revenue = 0.0
    fog_cycles_mc = 0.0
    for fog, prof in zip(on_fog, profiles):
        if fog:
            revenue += pricing.fog_price
            fog_cycles_mc += prof.cpu_cycles / MEGACYCLE
        else:
            revenue += pricing.local_price
    expenditure = pricing.fixed_fs_cost * num_fs + pricing.per_cycle_cost * fog_cycles_mc
    return ProfitBreakdown(revenue, expenditure, revenue - expenditure)
