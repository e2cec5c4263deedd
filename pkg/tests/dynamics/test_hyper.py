from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzdyn.dynamics.hyper import (CompactSet, directed_hausdorff, hausdorff, hyper_apply, hyper_iterate,
                                    within_dilation)
from fuzzdyn.dynamics.spaces import rational_plane_universe
from fuzzdyn.errors import DomainError
from tests.strategies import compact_sets, universes


def test_hausdorff_of_nested_segment_sets(segment):
    universe, _ = segment
    K = CompactSet.of(universe, [(0, 0)])
    L = CompactSet.of(universe, [(0, 0), (3, 0)])
    assert directed_hausdorff(K, L) == 0
    assert directed_hausdorff(L, K) == 3
    assert hausdorff(K, L) == 3


def test_within_dilation_is_inclusive(segment):
    universe, _ = segment
    K = CompactSet.of(universe, [(2, 0)])
    L = CompactSet.of(universe, [(0, 0)])
    assert within_dilation(K, L, 2)
    assert not within_dilation(K, L, Fraction(3, 2))


def test_hyper_apply_merges_images(segment):
    universe, system = segment
    K = CompactSet.of(universe, [(2, 0), (3, 0)])
    assert hyper_apply(system, K).points == frozenset([(3, 0)])
    assert hyper_iterate(system, CompactSet.of(universe, [(0, 0)]), 2).points == frozenset([(2, 0)])


def test_compact_sets_must_be_non_empty_and_inside(segment):
    universe, _ = segment
    with pytest.raises(DomainError):
        CompactSet.of(universe, [])
    with pytest.raises(DomainError):
        CompactSet.of(universe, [(7, 7)])


def test_universe_mismatch_is_rejected(segment):
    universe, _ = segment
    other = rational_plane_universe([(0, 0)], name="other")
    with pytest.raises(DomainError):
        hausdorff(CompactSet.of(universe, [(0, 0)]), CompactSet.of(other, [(0, 0)]))


def test_label_lists_points_in_order(segment):
    universe, _ = segment
    assert CompactSet.of(universe, [(2, 0), (0, 0)]).label == "{0,0;2,0}"


@settings(max_examples=60, derandomize=True)
@given(universes().flatmap(lambda s: compact_sets(s).flatmap(
    lambda K: compact_sets(s).flatmap(lambda L: compact_sets(s).map(lambda M: (K, L, M))))))
def test_hausdorff_is_a_metric(sets):
    K, L, M = sets
    assert hausdorff(K, L) == hausdorff(L, K)
    assert (hausdorff(K, L) == 0) == (K.points == L.points)
    assert hausdorff(K, M) <= hausdorff(K, L) + hausdorff(L, M)


@settings(max_examples=60, derandomize=True)
@given(universes().flatmap(lambda s: st.tuples(*(compact_sets(s) for _ in range(4)))))
def test_hausdorff_of_unions_is_bounded_by_the_parts(sets):
    K1, K2, K3, K4 = sets
    assert hausdorff(K1.union(K2), K3.union(K4)) <= max(hausdorff(K1, K3), hausdorff(K2, K4))


@settings(max_examples=60, derandomize=True)
@given(universes().flatmap(lambda s: st.tuples(compact_sets(s), compact_sets(s))))
def test_hausdorff_splits_through_the_union(sets):
    K, L = sets
    both = K.union(L)
    assert K.issubset(both) and L.issubset(both)
    assert hausdorff(K, L) == max(hausdorff(both, L), hausdorff(K, both))
