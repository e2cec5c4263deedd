"""
Normal step fuzzy sets, their α-levels and the Zadeh extension.

A step fuzzy set is a membership map with finite support and finitely many
levels, the largest of which is exactly 1. Its α-levels are finite sets, so
``u_α`` for α in (α_{l-1}, α_l] is the CompactSet of points with level ≥ α_l.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, hyper_apply, same_universe
from fuzzdyn.dynamics.spaces import (Number, Point, PointUniverse, SystemMap, close,
                                     is_exact, parse_number, point_label, sorted_points)
from fuzzdyn.errors import DomainError, NormalityError


def as_level(value, exact: bool = True) -> Number:
    """
    Membership level in (0, 1]; strings and floats become Fractions on exact universes.
    """
    level = parse_number(value)
    if exact and isinstance(level, float):
        level = Fraction(repr(level))
    if isinstance(level, int):
        level = Fraction(level)
    if not 0 < level <= 1:
        raise DomainError(f"Membership level {value!r} is outside (0, 1]")
    return level


@dataclass(frozen=True)
class StepFuzzySet:
    """
    A normal fuzzy set with finite support.

    ``membership`` is stored as a tuple of (point, level) sorted by point so that
    equal fuzzy sets compare and hash equal. Points outside it have level 0.
    """
    universe: PointUniverse = field(repr=False)
    membership: tuple

    def __post_init__(self):
        if not self.membership:
            raise DomainError("A fuzzy set needs a non-empty support")
        points = [p for p, _ in self.membership]
        if len(set(points)) != len(points):
            raise DomainError("Duplicate support points in fuzzy set")
        self.universe.require(*points)
        top = max(level for _, level in self.membership)
        if not close(top, 1):
            raise NormalityError(f"Fuzzy set is not normal: highest level is {top}")

    @classmethod
    def from_mapping(cls, universe: PointUniverse, mapping: Mapping) -> "StepFuzzySet":
        """
        Build from a point -> level map, dropping zero levels.
        :param universe: PointUniverse
        :param mapping: levels in [0, 1]; at least one must equal 1
        :return: StepFuzzySet
        """
        items = {}
        for p, value in mapping.items():
            if parse_number(value) == 0:
                continue
            items[p] = as_level(value, universe.exact)
        ordered = tuple((p, items[p]) for p in sorted_points(items))
        return cls(universe, ordered)

    @cached_property
    def levels_of(self) -> dict:
        return dict(self.membership)

    def __call__(self, x: Point) -> Number:
        return self.levels_of.get(x, 0)

    @cached_property
    def levels(self) -> tuple:
        """Distinct jump levels in increasing order, the last one being 1."""
        return tuple(sorted(set(level for _, level in self.membership)))

    @cached_property
    def support(self) -> CompactSet:
        return CompactSet(self.universe, frozenset(self.levels_of))

    @property
    def core(self) -> CompactSet:
        return level_set(self, self.levels[-1])

    @property
    def label(self) -> str:
        return "{" + ";".join(f"{point_label(p)}:{point_label(level)}" for p, level in self.membership) + "}"


def from_levels(levels: Sequence[tuple]) -> StepFuzzySet:
    """
    u = max α_l χ_{K_l} for increasing levels 0 < α_1 < ... < α_N = 1.
    :param levels: list of (α_l, CompactSet K_l)
    :return: StepFuzzySet
    """
    if not levels:
        raise DomainError("from_levels needs at least one (level, set) pair")
    alphas = [parse_number(alpha) for alpha, _ in levels]
    sets = [K for _, K in levels]
    for K in sets:
        if not isinstance(K, CompactSet):
            raise DomainError(f"Level sets must be CompactSets, got {type(K).__name__}")
    universe = same_universe(*sets)
    if any(a >= b for a, b in zip(alphas, alphas[1:])) or alphas[0] <= 0:
        raise DomainError(f"Levels must be strictly increasing and positive: {alphas}")
    if not close(alphas[-1], 1):
        raise NormalityError(f"The last level must be 1, got {alphas[-1]}")
    membership: dict = {}
    for alpha, K in zip(alphas, sets):
        for x in K.points:
            membership[x] = max(membership.get(x, 0), alpha)
    return StepFuzzySet.from_mapping(universe, membership)


def characteristic(K: CompactSet) -> StepFuzzySet:
    """χ_K."""
    return StepFuzzySet.from_mapping(K.universe, {x: 1 for x in K.points})


def level_set(u: StepFuzzySet, alpha: Number) -> CompactSet:
    """
    α-level of u; the 0-level is the support.
    :param u: StepFuzzySet
    :param alpha: level in [0, 1]
    :return: CompactSet {x : u(x) ≥ α}, never empty
    """
    alpha = parse_number(alpha)
    if not 0 <= alpha <= 1:
        raise DomainError(f"Level {alpha} is outside [0, 1]")
    if alpha == 0:
        return u.support
    exact = is_exact(alpha) and u.universe.exact
    return CompactSet(u.universe, frozenset(
        x for x, level in u.membership if level >= alpha or (not exact and close(level, alpha))))


def levels_in_window(u: StepFuzzySet, low: Number, high: Number, closed: bool = False) -> list:
    """
    One representative level per distinct α-level of u with α in (low, high],
    or in [low, high] when ``closed``.
    :return: list of (α, CompactSet u_α), increasing in α
    """
    low, high = parse_number(low), parse_number(high)
    if high < low or (high == low and not closed):
        return []
    window = []
    if closed and low == 0:
        window.append((low, u.support))
    previous = 0
    for a in u.levels:
        reaches = a >= low if closed else a > low
        if previous < high and reaches:
            alpha = min(a, high)
            window.append((alpha, level_set(u, alpha)))
        previous = a
    return window


def merged_levels(u: StepFuzzySet, v: StepFuzzySet) -> tuple:
    """Sorted union of the jump levels of u and v."""
    return tuple(sorted(set(u.levels) | set(v.levels)))


@dataclass(frozen=True)
class LevelDecomposition:
    """
    Breakpoints 0 = α_0 < α_1 < ... < α_N = 1 and the level set carried on each
    interval (α_{l-1}, α_l], i.e. ``level_sets[l-1] = u_{α_l}``.
    """
    breakpoints: tuple
    level_sets: tuple = field(repr=False)

    def reconstruct(self) -> StepFuzzySet:
        return from_levels(list(zip(self.breakpoints[1:], self.level_sets)))

    def max_gap(self, u: StepFuzzySet) -> Number:
        """
        Largest of d_H(u_0, u_{α_1}) and d_H(u_α, u_{α_l}) over α in (α_{l-1}, α_l].
        Zero for exact jump levels.
        """
        gaps = [hausdorff(u.support, self.level_sets[0])]
        for upper, K in zip(self.breakpoints[1:], self.level_sets):
            gaps.append(hausdorff(level_set(u, upper), K))
        return max(gaps)


def discretize_levels(u: StepFuzzySet, eps: Number) -> LevelDecomposition:
    """
    Level grid on which every α-level of u is within eps of a grid level set.
    For step fuzzy sets the jump levels themselves work with zero error.
    :param u: StepFuzzySet
    :param eps: positive tolerance
    :return: LevelDecomposition
    """
    if parse_number(eps) <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    breakpoints = (Fraction(0),) + u.levels if u.universe.exact else (0.0,) + u.levels
    return LevelDecomposition(breakpoints, tuple(level_set(u, a) for a in u.levels))


def zadeh_apply(system: SystemMap, u: StepFuzzySet) -> StepFuzzySet:
    """
    Zadeh extension f̂(u)(x') = max{u(y) : f(y) = x'}.
    Its α-levels are f̄(u_α) for every α.
    :param system: SystemMap
    :param u: StepFuzzySet
    :return: StepFuzzySet
    """
    same_universe(system, u)
    image: dict = {}
    for y, level in u.membership:
        x = system(y)
        image[x] = max(image.get(x, 0), level)
    return StepFuzzySet.from_mapping(u.universe, image)


def zadeh_iterate(system: SystemMap, u: StepFuzzySet, n: int) -> StepFuzzySet:
    if n < 0:
        raise DomainError(f"Number of iterations must be non-negative, got {n}")
    for _ in range(n):
        u = zadeh_apply(system, u)
    return u


def commutes_with_levels(system: SystemMap, u: StepFuzzySet, alphas: Iterable[Number]) -> bool:
    """level_set(f̂(u), α) == f̄(level_set(u, α)) for every given α."""
    image = zadeh_apply(system, u)
    return all(level_set(image, a).points == hyper_apply(system, level_set(u, a)).points
               for a in alphas)
