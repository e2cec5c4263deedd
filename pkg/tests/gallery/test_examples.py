from fractions import Fraction

import pytest

from fuzzdyn.dynamics.chaos import Level, distance_trace
from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.sampling import make_rng
from fuzzdyn.errors import ConfigurationError, PreconditionError
from fuzzdyn.gallery.density import DensitySetSpec
from fuzzdyn.gallery.examples import (build_example, column_margin, example1_exhaustive, example_settings,
                                      structural_checkpoints, transfer_suite, verify_example1,
                                      verify_example2, verify_example3)


def test_example1_distances(example1):
    universe, system = example1
    assert universe.distance((3, 0), (7, 1)) == 4
    assert universe.distance((4, 0), (4, 1)) == Fraction(1, 4)
    assert universe.distance((6, 0), (6, 1)) == 1
    assert universe.distance((0, 0), (0, 1)) == 1
    assert system((3, 1)) == (4, 1)
    assert not universe.contains((3, Fraction(1, 2)))
    assert not universe.contains((3, True))


def test_example2_distances(example2):
    universe, _ = example2
    assert universe.distance((16, 0), (16, 1)) == 16
    assert universe.distance((3, 0), (3, Fraction(1, 2))) == Fraction(1, 8)
    assert universe.distance((1, 0), (3, 0)) == 6


def test_example3_distances(example3):
    universe, _ = example3
    assert universe.distance((2, 0), (2, Fraction(1, 3))) == 2
    assert universe.distance((5, 0), (5, 1)) == 1
    assert universe.distance((2, 1), (5, 1)) == 3


def test_example3_base_trace_follows_the_density_set(example3):
    _, system = example3
    trace = distance_trace(Level.BASE, system, (0, 0), (0, 1), 8)
    assert trace.values == (1, 2, 2, 1, 1, 1, 1, 2)


def test_examples_reject_unsuitable_density_sets():
    with pytest.raises(ConfigurationError):
        build_example(2, DensitySetSpec("doubling-blocks"))
    with pytest.raises(ConfigurationError):
        build_example(3, DensitySetSpec("squared-exponents"))
    with pytest.raises(ConfigurationError):
        example_settings(4)


@pytest.mark.parametrize("which", [1, 3])
def test_finite_density_sets_are_rejected(which):
    with pytest.raises(ConfigurationError):
        build_example(which, DensitySetSpec.custom([1, 2, 3]))


def test_column_margin(example2):
    universe, _ = example2
    u = StepFuzzySet.from_mapping(universe, {(0, 0): 1})
    v = StepFuzzySet.from_mapping(universe, {(0, 0): Fraction(1, 2), (0, 1): 1})
    w = StepFuzzySet.from_mapping(universe, {(1, 0): 1})
    assert column_margin(u, v) == 0
    assert column_margin(u, w) == 1


def test_structural_checkpoints_skip_the_burn_in():
    A = DensitySetSpec("doubling-blocks")
    assert structural_checkpoints(A, 1024) == (31, 63, 127, 255, 511, 1023)
    assert structural_checkpoints(A, 1024, [1000])[0] == 1000


def test_example1_short_horizon_claims():
    report = verify_example1(horizon=5040, checkpoints=[720, 5039], samples=5)
    for claim in ("1.density", "1.bridge", "1.base-constant", "1.hyper-constant", "1.transfer"):
        assert report[claim].passed, claim
    assert report["1.density"].evidence["oracle"]["5039"] == Fraction(4420, 5039)


def test_example1_checkpoints_must_fit():
    with pytest.raises(PreconditionError):
        verify_example1(horizon=100, checkpoints=[5039])


def test_example1_exhaustive_small_window():
    report = example1_exhaustive(window=2, horizon=4)
    assert report.passed
    assert report["1.exhaustive-count"].evidence == {"sets": 63, "column_sets": 7}


def test_example2_needs_a_long_horizon():
    with pytest.raises(PreconditionError):
        verify_example2(horizon=1024)


def test_example3_claims():
    report = verify_example3(trials=20)
    assert report.passed, report.failed
    assert abs(report["3.phi"].evidence["phi_lower"] - Fraction(1, 3)) <= 0.05


def test_transfer_suite(rng):
    report = transfer_suite(rng, trials=12, horizon=16)
    assert report.passed, report.violations[:3]
    assert set(report.evaluations) == {"transfer-example-1", "transfer-example-3", "transfer-shift"}


@pytest.mark.integration_test
def test_example1_full_horizon():
    report = verify_example1()
    assert report.passed, report.failed


@pytest.mark.integration_test
def test_example1_exhaustive_configured_window():
    assert example1_exhaustive().passed


@pytest.mark.integration_test
def test_example2_full_horizon():
    report = verify_example2()
    assert report.passed, report.failed
    assert report["2.mean-low"].evidence["mean"] <= 0.01


@pytest.mark.integration_test
def test_example3_full_trials():
    assert verify_example3().passed


@pytest.mark.integration_test
def test_transfer_suite_large():
    assert transfer_suite(make_rng(11), trials=300).passed
