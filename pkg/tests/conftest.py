import numpy as np
import pytest

from bubblelab import DomainGrid, Sphere
from bubblelab.fields import great_circle_wrap, planted_bubble, random_smooth_field

S2 = Sphere(2)


@pytest.fixture(scope="session")
def sphere2():
    return S2


@pytest.fixture(scope="session")
def grid64():
    return DomainGrid(64, 64)


@pytest.fixture(scope="session")
def wrap64(grid64):
    return great_circle_wrap(grid64, S2)


@pytest.fixture(scope="session")
def smooth64(grid64):
    return random_smooth_field(grid64, S2, seed=7)


@pytest.fixture(scope="session")
def bubble256():
    return planted_bubble(DomainGrid(256, 256), S2, 0.02)


def wrap_face_gradsq(n: int, lx: float = 1.0, turns: int = 1) -> float:
    """Exact discrete face density of the great-circle wrap on an n-node axis:
    the chord-length formula (2 sin(pi k h / L) / h)^2."""
    h = lx / n
    return (2.0 * np.sin(np.pi * turns * h / lx) / h) ** 2
