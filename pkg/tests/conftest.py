import random

import pytest

from fogalloc import LOCAL, Allocation, ScenarioConfig, generate
from fogalloc.system import PatientProfile, SystemParams

PARAMS = SystemParams()


def profile(pid=0, rho=0.5, data_mb=2.0, mcycles=1000.0, dist=(50.0,)):
    return PatientProfile(pid, rho, data_mb * 8e6, mcycles * 1e6, tuple(dist))


def scenario(P, F, seed, **kw):
    return generate(ScenarioConfig(num_patients=P, num_fs=F, seed=seed, **kw))


def random_allocation(rng: random.Random, P, F, p_local=0.3):
    return Allocation.from_assignment(
        [LOCAL if rng.random() < p_local else rng.randrange(F) for _ in range(P)], F)


@pytest.fixture
def params():
    return PARAMS


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def record(number, title, ok, detail):
    ACCEPTANCE[number] = (title, ok, detail)
    print(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
