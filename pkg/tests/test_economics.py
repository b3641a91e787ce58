import random

import pytest
from hypothesis import given, strategies as st

from conftest import PARAMS, profile, random_allocation, scenario
from fogalloc.allocation import LOCAL, Allocation, utility_U
from fogalloc.economics import PricingConfig, check_pricing, profit_breakdown, validate_pricing
from fogalloc.errors import ConfigurationError

TABLE = PricingConfig()


def three_patients():
    return [profile(i, mcycles=mc) for i, mc in enumerate((100.0, 500.0, 1000.0))]


def test_profit_examples():
    empty = profit_breakdown([], [], TABLE, 2)
    assert (empty.revenue, empty.expenditure, empty.profit) == (0, 0, 0)
    fog = profit_breakdown([True] * 3, three_patients(), TABLE, 2)
    assert (fog.revenue, fog.expenditure, fog.profit) == pytest.approx((600, 160, 440))
    loc = profit_breakdown([False] * 3, three_patients(), TABLE, 2)
    assert (loc.revenue, loc.expenditure, loc.profit) == (300, 0, 300)


def test_fixed_cost_charged_per_server():
    pr = PricingConfig(fixed_fs_cost=5.0, fog_price=200.0, m_max=200.0, per_cycle_cost=0.05)
    assert profit_breakdown([False], [profile()], pr, 4).expenditure == 20.0


def test_validate_pricing_examples():
    assert validate_pricing(TABLE, 3, 20) is None
    problem = validate_pricing(PricingConfig(fog_price=150.0), 3, 20)
    assert problem is not None and "per_cycle_cost*beta_max" in problem
    problem = validate_pricing(PricingConfig(fog_price=100.0), 3, 20)
    assert problem is not None and problem.startswith("fog_price > local_price")


@pytest.mark.parametrize("kw, rule", [
    (dict(local_price=-1.0), "local_price >= 0"),
    (dict(local_price=120.0, fog_price=200.0), "local_price <= l_max"),
    (dict(fog_price=250.0), "fog_price <= m_max"),
    (dict(per_cycle_cost=-0.1), "non-negative"),
])
def test_each_rule_is_named(kw, rule):
    assert rule in validate_pricing(PricingConfig(**kw), 3, 20)


def test_fixed_cost_share_enters_constraint():
    pr = PricingConfig(fixed_fs_cost=10.0)
    assert validate_pricing(pr, 2, 20) is not None          # needs 100 + 1
    assert validate_pricing(PricingConfig(fixed_fs_cost=10.0, per_cycle_cost=0.09), 2, 20) is None
    with pytest.raises(ConfigurationError):
        check_pricing(pr, 2, 20)


def test_single_move_changes_profit_by_margin():
    s = scenario(12, 3, seed=4)
    rng = random.Random(1)
    for _ in range(200):
        alloc = random_allocation(rng, 12, 3)
        local = alloc.local_patients()
        if not local:
            continue
        p = rng.choice(local)
        before = profit_breakdown(alloc.fog_flags(), s.profiles, s.pricing, 3).profit
        alloc.place(p, rng.randrange(3))
        after = profit_breakdown(alloc.fog_flags(), s.profiles, s.pricing, 3).profit
        margin = s.pricing.fog_margin(s.profiles[p].cpu_cycles)
        assert after - before == pytest.approx(margin, abs=1e-9)
        assert margin >= -1e-12


@given(st.lists(st.integers(-1, 2), min_size=1, max_size=12), st.permutations([0, 1, 2]))
def test_profit_ignores_which_server(assignment, perm):
    profs = [profile(i, mcycles=100.0 + 77.0 * i, dist=(60.0, 70.0, 80.0)) for i in range(len(assignment))]
    relabelled = [f if f == LOCAL else perm[f] for f in assignment]
    a = utility_U(Allocation.from_assignment(assignment, 3), profs, PARAMS, TABLE, 3)
    b = utility_U(Allocation.from_assignment(relabelled, 3), profs, PARAMS, TABLE, 3)
    assert a.profit == b.profit
