from dataclasses import replace
from fractions import Fraction

import pytest

from fuzzdyn.dynamics.spaces import (PointKind, distance, finite_map, iterate, jsonable, orbit, parse_number,
                                     point_label, rational_plane_universe, real_line_universe, validate_metric)
from fuzzdyn.errors import DomainError


def test_parse_number_keeps_exact_values():
    assert parse_number("3/4") == Fraction(3, 4)
    assert parse_number("0.25") == Fraction(1, 4)
    assert parse_number(2) == 2
    assert isinstance(parse_number(0.5), float)


def test_parse_number_rejects_garbage():
    with pytest.raises(DomainError):
        parse_number("three")
    with pytest.raises(DomainError):
        parse_number(True)


def test_point_label_formats():
    assert point_label((3, Fraction(1, 2))) == "3,1/2"
    assert point_label(Fraction(4, 2)) == "2"


def test_distance_checks_membership(segment):
    universe, _ = segment
    assert distance(universe, (0, 0), (3, 0)) == 3
    with pytest.raises(DomainError):
        distance(universe, (0, 0), (9, 9))


def test_iterate_and_orbit(segment):
    _, system = segment
    assert iterate(system, (0, 0), 0) == (0, 0)
    assert iterate(system, (0, 0), 5) == (3, 0)
    assert orbit(system, (1, 0), 3) == [(1, 0), (2, 0), (3, 0), (3, 0)]
    with pytest.raises(DomainError):
        iterate(system, (0, 0), -1)


def test_finite_map_requires_closed_table():
    universe = rational_plane_universe([(0, 0), (1, 0)])
    with pytest.raises(DomainError):
        finite_map(universe, {(0, 0): (5, 5)})


def test_validate_metric_passes_on_l1(segment):
    universe, _ = segment
    report = validate_metric(universe, [(0, 0), (1, 0), (2, 0), (3, 0)])
    assert report.passed
    assert report.pairs_checked == 6
    assert report.triples_checked == 24


def test_validate_metric_reports_broken_triangle():
    squared = rational_plane_universe([(0, 0), (1, 0), (2, 0)])
    broken = replace(squared, metric=lambda p, q: (p[0] - q[0]) ** 2)
    report = validate_metric(broken, [(0, 0), (1, 0), (2, 0)])
    assert not report.passed
    assert {v.axiom for v in report.violations} == {"triangle"}


def test_real_line_universe_is_linear_and_inexact():
    line = real_line_universe()
    assert line.kind is PointKind.REAL_LINE
    assert line.linear
    assert not line.exact
    assert line.add(0.5, 0.25) == 0.75


def test_jsonable_writes_fractions_as_strings():
    assert jsonable({"a": Fraction(1, 3), "b": [1, 0.5]}) == {"a": "1/3", "b": [1, 0.5]}
