import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pdecert.grid import Field, GridSpec

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")


def band_limited(grid, seed, kmax=4, components=1):
    """Random real field built from modes with |m_j| <= kmax (no Nyquist content)."""
    rng = np.random.default_rng(seed)
    shape = (components,) + grid.shape
    spec = np.zeros(shape, dtype=complex)
    m = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
    keep = np.abs(m) <= kmax
    mask = np.ones(grid.shape, dtype=bool)
    for j in range(grid.n):
        s = [1] * grid.n
        s[j] = grid.N
        mask = mask & keep.reshape(s)
    spec[:, mask] = rng.standard_normal((components, mask.sum())) + 1j * rng.standard_normal((components, mask.sum()))
    vals = np.fft.ifftn(spec, axes=tuple(range(1, grid.n + 1))).real
    return Field(grid, values=vals / np.abs(vals).max())


@pytest.fixture
def grid1():
    return GridSpec(1, 256, 40.0)


@pytest.fixture
def grid2():
    return GridSpec(2, 64, 2 * np.pi)


@pytest.fixture
def grid3():
    return GridSpec(3, 16, 2 * np.pi)


ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Record a one-line pass/fail summary for an acceptance criterion."""
    def record(number, ok, text):
        ACCEPTANCE_LINES[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {text}"
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
