from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from fuzzdyn.dynamics.fuzzy import (StepFuzzySet, characteristic, commutes_with_levels, discretize_levels,
                                    from_levels, level_set, levels_in_window, merged_levels, zadeh_apply,
                                    zadeh_iterate)
from fuzzdyn.dynamics.hyper import CompactSet, hyper_apply
from fuzzdyn.dynamics.sampling import random_map
from fuzzdyn.errors import DomainError, NormalityError
from tests.strategies import fuzzy_pairs


@pytest.fixture
def staircase(segment):
    universe, _ = segment
    return StepFuzzySet.from_mapping(universe, {(0, 0): 1, (1, 0): "1/2", (2, 0): "1/4", (3, 0): 0})


def test_from_mapping_drops_zero_levels(staircase):
    assert staircase((3, 0)) == 0
    assert staircase.support.points == frozenset([(0, 0), (1, 0), (2, 0)])
    assert staircase.levels == (Fraction(1, 4), Fraction(1, 2), Fraction(1))


def test_level_sets(staircase):
    assert level_set(staircase, 0).points == staircase.support.points
    assert level_set(staircase, Fraction(1, 3)).points == frozenset([(0, 0), (1, 0)])
    assert level_set(staircase, 1).points == frozenset([(0, 0)])
    assert staircase.core.points == frozenset([(0, 0)])
    with pytest.raises(DomainError):
        level_set(staircase, Fraction(3, 2))


def test_non_normal_sets_are_rejected(segment):
    universe, _ = segment
    with pytest.raises(NormalityError):
        StepFuzzySet.from_mapping(universe, {(0, 0): "1/2"})


def test_from_levels_rebuilds_the_staircase(segment, staircase):
    universe, _ = segment
    u = from_levels([(Fraction(1, 4), CompactSet.of(universe, [(0, 0), (1, 0), (2, 0)])),
                     (Fraction(1, 2), CompactSet.of(universe, [(0, 0), (1, 0)])),
                     (1, CompactSet.of(universe, [(0, 0)]))])
    assert u == staircase
    with pytest.raises(DomainError):
        from_levels([(Fraction(1, 2), u.support), (Fraction(1, 4), u.core)])


def test_levels_in_window(staircase):
    open_window = levels_in_window(staircase, Fraction(1, 4), Fraction(3, 4))
    assert [a for a, _ in open_window] == [Fraction(1, 2), Fraction(3, 4)]
    closed = levels_in_window(staircase, 0, 1, closed=True)
    assert closed[0][1].points == staircase.support.points
    assert levels_in_window(staircase, Fraction(1, 2), Fraction(1, 4)) == []


def test_discretize_levels_has_zero_gap(staircase):
    decomposition = discretize_levels(staircase, Fraction(1, 10))
    assert decomposition.reconstruct() == staircase
    assert decomposition.max_gap(staircase) == 0


def test_zadeh_apply_takes_the_max_over_preimages(segment, staircase):
    _, system = segment
    image = zadeh_iterate(system, staircase, 2)
    assert image((2, 0)) == 1
    assert image((3, 0)) == Fraction(1, 2)
    assert zadeh_apply(system, characteristic(staircase.core)) == characteristic(
        hyper_apply(system, staircase.core))


def test_merged_levels(staircase, segment):
    universe, _ = segment
    v = StepFuzzySet.from_mapping(universe, {(3, 0): 1, (2, 0): "1/3"})
    assert merged_levels(staircase, v) == (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1))


@settings(max_examples=50, derandomize=True)
@given(fuzzy_pairs())
def test_zadeh_extension_commutes_with_levels(instance):
    space, u, _ = instance
    system = random_map(np.random.default_rng(len(space.points)), space)
    assert commutes_with_levels(system, u, [Fraction(k, 8) for k in range(1, 9)])
