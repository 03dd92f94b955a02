import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mldecode.code import LinearCode, hamming
from oracles import all_codewords, random_code

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def small_codes():
    """Hamming (7,4), (15,11) and five random (16,8) codes."""
    codes = [hamming(3), hamming(4)]
    rng = np.random.default_rng(2024)
    for i in range(5):
        codes.append(LinearCode(random_code(16, 8, rng), name=f"random16_8_{i}"))
    return codes


@pytest.fixture(scope="session")
def codes_with_words():
    return [(c, all_codewords(c.H_dense)) for c in small_codes()]


@pytest.fixture(scope="session")
def hamming7():
    c = hamming(3)
    return c, all_codewords(c.H_dense)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
