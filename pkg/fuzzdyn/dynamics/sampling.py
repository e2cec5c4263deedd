"""
Seeded random instances on small rational universes.

All randomness goes through a ``numpy.random.Generator`` so that one seed fixes
every sampled universe, compact set and fuzzy set of a run.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.hyper import CompactSet
from fuzzdyn.dynamics.spaces import PointUniverse, SystemMap, finite_map, rational_plane_universe
from fuzzdyn.errors import DomainError

LEVEL_DENOMINATOR = 8
COORDINATE_DENOMINATOR = 4


@dataclass(frozen=True)
class RandomUniverse:
    """A finite rational universe together with its explicit point list."""
    universe: PointUniverse
    points: tuple


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_universe(rng: np.random.Generator, max_points: int = 20) -> RandomUniverse:
    """
    Up to ``max_points`` distinct points of the grid (1/4)ℤ² ∩ [0, 4]² with the l1 distance.
    """
    if max_points < 1:
        raise DomainError(f"max_points must be ≥ 1, got {max_points}")
    size = int(rng.integers(2, max_points + 1)) if max_points > 1 else 1
    side = 4 * COORDINATE_DENOMINATOR + 1
    cells = rng.choice(side * side, size=size, replace=False)
    points = tuple(sorted((Fraction(int(c) // side, COORDINATE_DENOMINATOR),
                           Fraction(int(c) % side, COORDINATE_DENOMINATOR)) for c in cells))
    return RandomUniverse(rational_plane_universe(points), points)


def random_compact(rng: np.random.Generator, space: RandomUniverse, max_size: Optional[int] = None) -> CompactSet:
    points = space.points
    top = len(points) if max_size is None else min(max_size, len(points))
    size = int(rng.integers(1, top + 1))
    picked = rng.choice(len(points), size=size, replace=False)
    return CompactSet(space.universe, frozenset(points[int(i)] for i in picked))


def random_levels(rng: np.random.Generator, count: int) -> list:
    """``count`` distinct levels on the 1/8 grid, sorted, the largest equal to 1."""
    count = max(1, min(count, LEVEL_DENOMINATOR))
    lower = rng.choice(np.arange(1, LEVEL_DENOMINATOR), size=count - 1, replace=False)
    return sorted(Fraction(int(k), LEVEL_DENOMINATOR) for k in lower) + [Fraction(1)]


def random_fuzzy(rng: np.random.Generator, space: RandomUniverse, max_levels: int = 5,
                 support: Optional[CompactSet] = None) -> StepFuzzySet:
    """
    Random normal step fuzzy set with at most ``max_levels`` distinct levels.
    Every chosen level is used by at least one support point.
    """
    support = support if support is not None else random_compact(rng, space)
    points = list(support)
    count = int(rng.integers(1, min(max_levels, len(points)) + 1))
    levels = random_levels(rng, count)
    order = rng.permutation(len(points))
    membership = {}
    for position, index in enumerate(order):
        if position < len(levels):
            membership[points[int(index)]] = levels[position]
        else:
            membership[points[int(index)]] = levels[int(rng.integers(0, len(levels)))]
    return StepFuzzySet.from_mapping(space.universe, membership)


def random_map(rng: np.random.Generator, space: RandomUniverse) -> SystemMap:
    """Random self-map of a finite universe."""
    points = space.points
    images = rng.integers(0, len(points), size=len(points))
    return finite_map(space.universe, {p: points[int(i)] for p, i in zip(points, images)}, name="random")


def random_nested_pair(rng: np.random.Generator, space: RandomUniverse) -> tuple:
    """(K, L) with K a proper subset of L; needs at least two points."""
    if len(space.points) < 2:
        raise DomainError("A strict nested pair needs at least two points")
    L = random_compact(rng, space)
    while len(L) < 2:
        L = random_compact(rng, space)
    inner = list(L)
    size = int(rng.integers(1, len(inner)))
    picked = rng.choice(len(inner), size=size, replace=False)
    return CompactSet(space.universe, frozenset(inner[int(i)] for i in picked)), L


def random_alpha_beta(rng: np.random.Generator) -> tuple:
    """0 < β < α < 1 on the 1/8 grid."""
    beta, alpha = sorted(rng.choice(np.arange(1, LEVEL_DENOMINATOR), size=2, replace=False))
    return Fraction(int(alpha), LEVEL_DENOMINATOR), Fraction(int(beta), LEVEL_DENOMINATOR)
