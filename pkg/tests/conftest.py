import numpy as np
import pytest

from oscnl import CompositeSpace, DensityMatrix, StateVector


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_pure(space: CompositeSpace, rng) -> StateVector:
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return StateVector(space, v / np.linalg.norm(v))


def random_density(space: CompositeSpace, rng, rank: int = 3) -> DensityMatrix:
    G = rng.normal(size=(space.dim, rank)) + 1j * rng.normal(size=(space.dim, rank))
    m = G @ G.conj().T
    m = m / np.trace(m)
    return DensityMatrix(space, 0.5 * (m + m.conj().T))


def bell_10_01() -> StateVector:
    space = CompositeSpace.from_dims((2, 2), ("a", "b"))
    v = np.zeros(4, dtype=complex)
    v[space.index((1, 0))] = v[space.index((0, 1))] = 1 / np.sqrt(2)
    return StateVector(space, v)


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
