import math

import pytest
from hypothesis import HealthCheck, settings

from giant_emitters.model import ModelParams

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

C12 = 2 * math.cos(math.pi / 12)
C5_12 = 2 * math.cos(5 * math.pi / 12)

# the seven reference scenarios used for oracle comparisons
SCENARIOS = {
    "small_delta0": ModelParams(delta=0.0),
    "small_delta1.5": ModelParams(delta=1.5),
    "small_delta2": ModelParams(delta=2.0),
    "giant_d2_delta0": ModelParams(nc=2, d=2, delta=0.0),
    "giant_d12_bic": ModelParams(nc=2, d=12, delta=C5_12),
    "giant_d12_oscillating": ModelParams(nc=2, d=12, delta=C12),
    "giant_d30_delta2": ModelParams(nc=2, d=30, delta=2.0),
}


@pytest.fixture(scope="session")
def scenarios():
    return SCENARIOS


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(test_acceptance.RESULTS):
        ok, detail = test_acceptance.RESULTS[number]
        terminalreporter.write_line(f"CRITERION {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
