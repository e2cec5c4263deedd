from fractions import Fraction

from fuzzdyn.dynamics.checks import (SuiteReport, extraction_suite, level_bound_suite, lift_suite,
                                     metric_identity_suite, skorokhod_grid_bound, skorokhod_oracle_suite)
from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.metrics import skorokhod_distance


def test_suite_report_collects_failures():
    report = SuiteReport("demo", trials=2)
    report.record("a", 0, True)
    report.record("a", 1, False, "broken")
    assert not report.passed
    assert report.to_dict()["evaluations"] == {"a": 2}
    assert report.to_dict()["violations"] == [{"check": "a", "trial": 1, "detail": "broken"}]


def test_metric_identities_hold(rng):
    report = metric_identity_suite(rng, trials=60, max_points=8)
    assert report.passed, report.violations[:3]
    assert report.evaluations["chain"] == 60


def test_level_bounds_hold(rng):
    report = level_bound_suite(rng, trials=80, max_points=8)
    assert report.passed, report.violations[:3]
    assert sum(report.evaluations.values()) > 0


def test_grid_bound_is_exact_on_grid_levels(segment):
    universe, _ = segment
    u = StepFuzzySet.from_mapping(universe, {(0, 0): 1, (1, 0): "1/2"})
    v = StepFuzzySet.from_mapping(universe, {(0, 0): 1, (1, 0): "1/4"})
    assert skorokhod_grid_bound(u, v, grid=8) == skorokhod_distance(u, v) == Fraction(1, 4)


def test_skorokhod_oracle(rng):
    report = skorokhod_oracle_suite(rng, trials=30, grid=16, max_points=6)
    assert report.passed, report.violations[:3]


def test_extraction_finds_a_level(rng):
    report = extraction_suite(rng, trials=20, max_points=10)
    assert report.passed, report.violations[:3]


def test_lifted_tuples_are_dominated(rng):
    report = lift_suite(rng, trials=30, max_points=8)
    assert report.passed, report.violations[:3]
    assert report.evaluations["lift"] == 30
