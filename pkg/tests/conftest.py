import pytest

from fuzzdyn.dynamics.sampling import make_rng
from fuzzdyn.dynamics.spaces import rational_plane_universe, finite_map
from fuzzdyn.gallery.examples import build_example
from fuzzdyn.gallery.shift import shift_map, shift_universe


@pytest.fixture
def rng():
    return make_rng(7)


@pytest.fixture
def example1():
    return build_example(1)


@pytest.fixture
def example2():
    return build_example(2)


@pytest.fixture
def example3():
    return build_example(3)


@pytest.fixture
def shift_system():
    universe = shift_universe()
    return universe, shift_map(2, universe)


@pytest.fixture
def segment():
    """Four points on a line, l1 distance, f sends 0 -> 1 -> 2 -> 3 -> 3."""
    points = [(0, 0), (1, 0), (2, 0), (3, 0)]
    universe = rational_plane_universe(points, name="segment")
    system = finite_map(universe, {(0, 0): (1, 0), (1, 0): (2, 0), (2, 0): (3, 0), (3, 0): (3, 0)})
    return universe, system
