import numpy as np
import pytest

from src.core.angular_pdf import AngularPdf, mixture, piecewise_pdf, uniform_pdf
from src.core.arcs import TWO_PI
from src.core.simulator import Scenario, User

HALF_PI = np.pi / 2


def quadrant_user(quadrant: int) -> AngularPdf:
    """0.9 of the mass on one quadrant (0-based), 0.1 spread over the other three."""
    edges = [0.0, HALF_PI, np.pi, 3 * HALF_PI, TWO_PI]
    masses = [0.1 / 3] * 4
    masses[quadrant] = 0.9
    return piecewise_pdf(edges, masses)


def random_pdf(rng: np.random.Generator, max_pieces: int = 6) -> AngularPdf:
    pieces = int(rng.integers(1, max_pieces + 1))
    inner = np.sort(rng.uniform(0.05, TWO_PI - 0.05, pieces - 1))
    edges = np.concatenate([[0.0], inner, [TWO_PI]])
    if np.any(np.diff(edges) < 1e-3):
        return uniform_pdf()
    masses = rng.dirichlet(np.ones(pieces))
    return piecewise_pdf(edges, masses)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def uniform():
    return uniform_pdf()


@pytest.fixture
def quadrant_users():
    return [quadrant_user(0), quadrant_user(2)]


@pytest.fixture
def quadrant_mixture(quadrant_users):
    return mixture(quadrant_users, [0.5, 0.5])


@pytest.fixture
def quadrant_scenario(quadrant_users):
    return Scenario(users=tuple(User(pdf=p, weight=0.5) for p in quadrant_users), b=4, constraint="contiguous")


@pytest.fixture
def uniform_scenario(uniform):
    return Scenario(users=(User(pdf=uniform, weight=1.0),), b=4, constraint="unconstrained")


@pytest.fixture
def make_random_pdf(rng):
    return lambda max_pieces=6: random_pdf(rng, max_pieces)
