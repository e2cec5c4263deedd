"""
Hypothesis strategies for small rational universes and the objects living on them.
"""
from fractions import Fraction

from hypothesis import strategies as st

from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.hyper import CompactSet
from fuzzdyn.dynamics.sampling import RandomUniverse
from fuzzdyn.dynamics.spaces import rational_plane_universe

coordinates = st.integers(min_value=0, max_value=16).map(lambda k: Fraction(k, 4))
plane_points = st.tuples(coordinates, coordinates)
levels = st.integers(min_value=1, max_value=8).map(lambda k: Fraction(k, 8))


@st.composite
def universes(draw, min_points: int = 2, max_points: int = 8) -> RandomUniverse:
    points = tuple(sorted(draw(st.sets(plane_points, min_size=min_points, max_size=max_points))))
    return RandomUniverse(rational_plane_universe(points), points)


@st.composite
def compact_sets(draw, space: RandomUniverse) -> CompactSet:
    chosen = draw(st.sets(st.sampled_from(space.points), min_size=1))
    return CompactSet(space.universe, frozenset(chosen))


@st.composite
def fuzzy_sets(draw, space: RandomUniverse) -> StepFuzzySet:
    support = sorted(draw(st.sets(st.sampled_from(space.points), min_size=1)))
    membership = {p: draw(levels) for p in support}
    membership[draw(st.sampled_from(support))] = Fraction(1)
    return StepFuzzySet.from_mapping(space.universe, membership)


@st.composite
def fuzzy_pairs(draw, max_points: int = 8) -> tuple:
    space = draw(universes(max_points=max_points))
    return space, draw(fuzzy_sets(space)), draw(fuzzy_sets(space))


@st.composite
def fuzzy_triples(draw, max_points: int = 6) -> tuple:
    space = draw(universes(max_points=max_points))
    return space, draw(fuzzy_sets(space)), draw(fuzzy_sets(space)), draw(fuzzy_sets(space))
