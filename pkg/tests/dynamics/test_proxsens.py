from fractions import Fraction

import pytest

from fuzzdyn.dynamics.chaos import DistanceTrace, Level
from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.hyper import CompactSet
from fuzzdyn.dynamics.metrics import sup_distance
from fuzzdyn.dynamics.proxsens import (CandidateGenerator, GridPerturbation, LiftedGenerator, PointScan,
                                       collective_sensitivity_check, collective_witness, is_proximal,
                                       lift_proximal_tuple, project_proximal_pair, proximal_coverage,
                                       proximal_min, sensitivity_extract_level, sensitivity_search,
                                       strong_sensitivity_window)
from fuzzdyn.dynamics.spaces import SystemMap, finite_map, real_line_universe
from fuzzdyn.errors import DomainError, GeneratorContractError, UnsupportedOperation


@pytest.fixture
def doubling():
    line = real_line_universe()
    return SystemMap(line, lambda x: 2 * x, name="doubling")


@pytest.fixture
def escape(segment):
    """Fixes everything except (1, 0), which jumps to (3, 0)."""
    universe, _ = segment
    table = {(0, 0): (0, 0), (1, 0): (3, 0), (2, 0): (2, 0), (3, 0): (3, 0)}
    return finite_map(universe, table, name="escape")


class FarAway(CandidateGenerator):
    def candidates(self, universe, center, delta):
        yield (3, 0)


def test_proximal_min_reports_first_index():
    trace = DistanceTrace(Level.BASE, None, ("x", "y"), (2, 1, 0, 0))
    assert proximal_min(trace) == (0, 3)
    assert is_proximal(trace)


def test_doubling_separates_small_perturbations(doubling):
    witness = sensitivity_search("base", doubling, 0.0, Fraction(1, 8), 1, 10, GridPerturbation(8))
    assert witness.neighbor == 1 / 64
    assert witness.n == 7
    assert witness.revalidate(doubling)
    assert witness.to_dict()["n"] == 7


def test_contracting_map_has_no_witness(segment):
    _, system = segment
    assert sensitivity_search("base", system, (0, 0), 2, 1, 10, PointScan([(1, 0)])) is None


def test_generators_must_stay_in_the_ball(segment):
    _, system = segment
    with pytest.raises(GeneratorContractError):
        sensitivity_search("base", system, (0, 0), 1, 1, 4, FarAway())


def test_fuzzy_search_needs_a_metric(segment):
    universe, system = segment
    u = StepFuzzySet.from_mapping(universe, {(0, 0): 1})
    with pytest.raises(DomainError):
        sensitivity_search("fuzzy", system, u, 1, 1, 4, PointScan([(1, 0)]))


def test_lifted_generator_adds_and_replaces(segment):
    universe, _ = segment
    center = StepFuzzySet.from_mapping(universe, {(0, 0): 1, (2, 0): "1/2"})
    candidates = list(LiftedGenerator(PointScan([(1, 0)])).candidates(universe, center, 2))
    assert len(candidates) == 4
    assert all(sup_distance(center, c) < 2 for c in candidates)
    sets = list(LiftedGenerator(PointScan([(1, 0)])).candidates(universe, CompactSet.of(universe, [(0, 0)]), 2))
    assert [K.label for K in sets] == ["{0,0;1,0}", "{1,0}"]


def test_strong_window_on_doubling(doubling):
    report = strong_sensitivity_window("base", doubling, 0.0, Fraction(1, 8), 1, 1, 4, GridPerturbation(8))
    assert report.coverage == Fraction(1, 4)
    assert report.witnesses[4] is not None
    late = strong_sensitivity_window("base", doubling, 0.0, Fraction(1, 8), 1, 7, 9, GridPerturbation(8))
    assert late.coverage == 1


def test_collective_check_on_segment(segment):
    _, system = segment
    report = collective_sensitivity_check(system, [(0, 0)], [(1, 0)], 0, Fraction(1, 2), 2)
    assert report.passed
    assert (report.left_index, report.right_index) == (1, 1)
    with pytest.raises(UnsupportedOperation):
        collective_witness(system, [(0, 0)], (1, 0), 1, 1, 2)


def test_extract_level_from_fuzzy_witness(segment, escape):
    universe, _ = segment
    K = CompactSet.of(universe, [(0, 0)])
    v = StepFuzzySet.from_mapping(universe, {(0, 0): 1, (1, 0): "1/4"})
    alpha, witness = sensitivity_extract_level("sup", escape, K, v, 1, 2, Fraction(3, 2))
    assert alpha == 0
    assert witness.separation == 3
    assert witness.revalidate(escape)
    with pytest.raises(DomainError):
        sensitivity_extract_level("sup", escape, K, v, 1, 1, 2)


def test_supports_inherit_proximality(segment):
    universe, system = segment
    u = StepFuzzySet.from_mapping(universe, {(0, 0): 1, (1, 0): "1/2"})
    v = StepFuzzySet.from_mapping(universe, {(3, 0): 1})
    report = project_proximal_pair(system, u, v, 4, "skorokhod")
    assert report.passed
    assert report.support_min == 0
    with pytest.raises(DomainError):
        project_proximal_pair(system, u, v, 4, "endograph")


def test_proximal_coverage(segment):
    _, system = segment
    points = [(0, 0), (1, 0), (2, 0), (3, 0)]
    report = proximal_coverage("base", system, [((0, 0), (3, 0))], 2, 4, PointScan(points))
    assert report.coverage == 1
    assert report.cells[0]["found"]["index"] == 3


def test_lifted_tuples_respect_component_bound(segment):
    universe, system = segment
    Ks = [CompactSet.of(universe, [(0, 0), (1, 0)]), CompactSet.of(universe, [(0, 0)])]
    Ls = [CompactSet.of(universe, [(3, 0)]), CompactSet.of(universe, [(2, 0)])]
    report = lift_proximal_tuple(system, Ks, Ls, [Fraction(1, 2), 1], 3)
    assert report.passed
    assert report.fuzzy[-1] == 0
    with pytest.raises(DomainError):
        lift_proximal_tuple(system, Ks, Ls[:1], [1], 3)
