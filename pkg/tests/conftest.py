import numpy as np
import pytest
from hypothesis import settings

from opucsum.verblunsky import VerblunskySequence

# numba-compiled kernels load on first call, so wall-clock deadlines are noise
settings.register_profile("opucsum", deadline=None)
settings.load_profile("opucsum")

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Record one line per acceptance criterion; printed in the terminal summary."""

    def record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def random_sequence(rng, N, radius=0.9):
    """Uniform in the disk of the given radius."""
    r = radius * np.sqrt(rng.random(N))
    return VerblunskySequence(r * np.exp(2j * np.pi * rng.random(N)))
