import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

HEX_LENGTHS = np.array([1.0, 1.3, 0.9, 1.7, 1.1, 1.45])
QUAD_LENGTHS = np.array([1.0, 1.2, 0.9, 1.4])


def square():
    return np.array([0, 1, 1 + 1j, 1j])


def centered_square():
    return square() - (0.5 + 0.5j)


def regular(n, step=1, radius=1.0, center=0j):
    k = np.arange(n)
    return center + radius * np.exp(2j * np.pi * step * k / n)


def random_cocyclic(rng, n, center=0j, radius=1.0):
    theta = np.sort(rng.uniform(0, 2 * np.pi, n))
    return center + radius * np.exp(1j * theta)


def edge_lengths(z):
    return np.abs(np.roll(z, -1) - z)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_acceptance_lines: list[str] = []


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _acceptance_lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
