import numpy as np
import pytest
from hypothesis import settings

from wptwave.channel import ChannelResponse
from wptwave.metrics import DiodeParams

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def paper_diode():
    """Rounded textbook constants with a unit antenna resistance."""
    return DiodeParams(r_ant=1.0, k2=0.0034, k4=0.3829)


def random_response(rng, n, scale=1.0):
    return ChannelResponse(scale * rng.rayleigh(1.0, n), rng.uniform(-np.pi, np.pi, n))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
