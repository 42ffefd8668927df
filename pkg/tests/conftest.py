import numpy as np
import pytest

from bernoulli_sets import SecondOrderPrediction


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_prediction(rng, k, m, concentration=1.0):
    return SecondOrderPrediction.from_vectors(list(rng.dirichlet(np.full(k, concentration), size=m)))


# criterion number -> (passed, description, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, desc, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {desc}: {detail}")
