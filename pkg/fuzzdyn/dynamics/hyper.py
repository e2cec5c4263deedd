"""
Compact (finite) sets, the Hausdorff metric and the hyperextension f̄(K) = f(K).
"""
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from fuzzdyn.dynamics.spaces import (Number, Point, PointUniverse, SystemMap, le,
                                     point_label, sorted_points)
from fuzzdyn.errors import DomainError


@dataclass(frozen=True)
class CompactSet:
    """A non-empty finite set of points of one universe."""
    universe: PointUniverse = field(repr=False)
    points: frozenset

    def __post_init__(self):
        if not isinstance(self.points, frozenset):
            object.__setattr__(self, "points", frozenset(self.points))
        if not self.points:
            raise DomainError("Compact sets must be non-empty")
        self.universe.require(*self.points)

    @classmethod
    def of(cls, universe: PointUniverse, points: Iterable[Point]) -> "CompactSet":
        return cls(universe, frozenset(points))

    def __iter__(self) -> Iterator[Point]:
        return iter(sorted_points(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: Point) -> bool:
        return p in self.points

    @property
    def label(self) -> str:
        return "{" + ";".join(point_label(p) for p in self) + "}"

    def union(self, other: "CompactSet") -> "CompactSet":
        same_universe(self, other)
        return CompactSet(self.universe, self.points | other.points)

    def issubset(self, other: "CompactSet") -> bool:
        same_universe(self, other)
        return self.points <= other.points


def same_universe(*objects) -> PointUniverse:
    """Universe shared by all objects; DomainError if they differ."""
    universe = objects[0].universe
    for obj in objects[1:]:
        if obj.universe is not universe and obj.universe != universe:
            raise DomainError(f"Objects live in different universes: "
                              f"'{universe.name}' and '{obj.universe.name}'")
    return universe


def directed_hausdorff(K: CompactSet, L: CompactSet) -> Number:
    """max over a in K of min over b in L of d(a, b)."""
    d = same_universe(K, L).metric
    return max(min(d(a, b) for b in L.points) for a in K.points)


def hausdorff(K: CompactSet, L: CompactSet) -> Number:
    """
    Hausdorff distance between two compact sets.
    :param K: CompactSet
    :param L: CompactSet over the same universe
    :return: max of both directed distances, exact on rational universes
    """
    if K.points == L.points:
        same_universe(K, L)
        return 0
    return max(directed_hausdorff(K, L), directed_hausdorff(L, K))


def within_dilation(K: CompactSet, L: CompactSet, eps: Number) -> bool:
    """True iff every point of K lies within eps (inclusive) of some point of L."""
    d = same_universe(K, L).metric
    return all(any(le(d(a, b), eps) for b in L.points) for a in K.points)


def hyper_apply(system: SystemMap, K: CompactSet) -> CompactSet:
    """
    f̄(K) = f(K), duplicates removed.
    :param system: SystemMap
    :param K: CompactSet over the system's universe
    :return: image set
    """
    same_universe(system, K)
    return CompactSet(K.universe, frozenset(system(p) for p in K.points))


def hyper_iterate(system: SystemMap, K: CompactSet, n: int) -> CompactSet:
    if n < 0:
        raise DomainError(f"Number of iterations must be non-negative, got {n}")
    for _ in range(n):
        K = hyper_apply(system, K)
    return K
