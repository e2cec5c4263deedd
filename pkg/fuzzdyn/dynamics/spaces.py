"""
Point universes, their metric oracles and the base dynamical system.

A universe is never enumerated: it is described by a membership predicate and a
distance oracle, and only the points a computation touches are materialised.
Exact universes return ``int``/``Fraction`` distances; float universes are
compared with the package tolerance.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations, permutations
from typing import Any, Callable, Iterable, Optional, Sequence, Union

import loguru

from fuzzdyn import config
from fuzzdyn.errors import DomainError

logger = loguru.logger

Number = Union[int, Fraction, float]
Point = Any

FLOAT_TOL: float = float(config["defaults"]["float_tolerance"])


class PointKind(str, Enum):
    FINITE = "finite-enumerated"
    NAT_BINARY = "pair-of-naturals-and-binary"
    NAT_RATIONAL = "pair-of-naturals-and-rational"
    SEQUENCE = "finitely-supported-rational-sequence"
    REAL_LINE = "real-line"


def parse_number(value: Any) -> Number:
    """
    Parse a level, threshold or coordinate.
    Strings like "3/4" or "0.25" become exact Fractions, ints stay ints, floats stay floats.
    :param value: str, int, float or Fraction
    :return: number
    """
    if isinstance(value, bool):
        raise DomainError(f"Boolean {value!r} is not a number")
    if isinstance(value, (int, Fraction, float)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise DomainError(f"Cannot parse {value!r} as a rational number")
    raise DomainError(f"Cannot parse {value!r} as a number")


def is_exact(*values: Number) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def close(a: Number, b: Number, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a, b):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=0.0, abs_tol=tol)


def le(a: Number, b: Number, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a, b):
        return a <= b
    return float(a) <= float(b) + tol


def lt(a: Number, b: Number, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a, b):
        return a < b
    return float(a) < float(b) - tol


def sorted_points(points: Iterable[Point]) -> list:
    """Deterministic order for heterogeneous point collections."""
    points = list(points)
    try:
        return sorted(points)
    except TypeError:
        return sorted(points, key=repr)


def point_label(p: Point) -> str:
    """
    Compact textual id of a point, also used by the fuzzy text format.
    Tuples become comma separated coordinates, Fractions are written p/q.
    """
    if hasattr(p, "label"):
        return p.label
    if isinstance(p, tuple):
        return ",".join(point_label(c) for c in p)
    if isinstance(p, Fraction):
        return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"
    if isinstance(p, float):
        return repr(p)
    return str(p)


@dataclass(frozen=True)
class PointUniverse:
    """
    A metric space (X, d) described by oracles.

    ``metric`` is the raw distance oracle and assumes both arguments belong to
    the universe; ``distance`` checks membership first. Linear universes also
    carry ``add`` and ``zero``.
    """
    name: str
    kind: PointKind
    metric: Callable[[Point, Point], Number] = field(repr=False)
    membership: Callable[[Point], bool] = field(repr=False)
    exact: bool = True
    add: Optional[Callable[[Point, Point], Point]] = field(default=None, repr=False)
    zero: Optional[Point] = None

    def contains(self, p: Point) -> bool:
        try:
            return bool(self.membership(p))
        except (TypeError, ValueError):
            return False

    def require(self, *points: Point) -> None:
        for p in points:
            if not self.contains(p):
                raise DomainError(f"Point {p!r} does not belong to universe '{self.name}'")

    def distance(self, p: Point, q: Point) -> Number:
        self.require(p, q)
        return self.metric(p, q)

    @property
    def linear(self) -> bool:
        return self.add is not None and self.zero is not None


def distance(universe: PointUniverse, p: Point, q: Point) -> Number:
    """
    Distance between two points of a universe.
    :param universe: PointUniverse
    :param p: point of the universe
    :param q: point of the universe
    :return: d(p, q), exact when the oracle is rational-valued
    """
    return universe.distance(p, q)


@dataclass(frozen=True)
class MetricViolation:
    axiom: str
    points: tuple
    values: tuple

    def to_dict(self) -> dict:
        return {"axiom": self.axiom,
                "points": [point_label(p) for p in self.points],
                "values": [str(v) for v in self.values]}


@dataclass(frozen=True)
class MetricReport:
    universe: str
    sample_size: int
    pairs_checked: int
    triples_checked: int
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"universe": self.universe, "sample_size": self.sample_size,
                "pairs_checked": self.pairs_checked, "triples_checked": self.triples_checked,
                "passed": self.passed, "violations": [v.to_dict() for v in self.violations]}


def validate_metric(universe: PointUniverse, sample: Sequence[Point]) -> MetricReport:
    """
    Check the metric axioms exhaustively over a finite sample.

    Identity and symmetry are checked on every pair, the triangle inequality on
    every ordered triple. Findings are reported, never raised.
    :param universe: universe whose oracle is checked
    :param sample: non-empty list of points of the universe
    :return: MetricReport
    """
    if not sample:
        raise DomainError("validate_metric needs a non-empty sample")
    universe.require(*sample)
    points = list(dict.fromkeys(sample))
    d = universe.metric
    violations = []
    for p in points:
        dpp = d(p, p)
        if not close(dpp, 0):
            violations.append(MetricViolation("identity", (p, p), (dpp,)))
    pairs = 0
    for p, q in combinations(points, 2):
        pairs += 1
        dpq, dqp = d(p, q), d(q, p)
        if lt(dpq, 0) or lt(dqp, 0):
            violations.append(MetricViolation("non-negativity", (p, q), (dpq, dqp)))
        if not close(dpq, dqp):
            violations.append(MetricViolation("symmetry", (p, q), (dpq, dqp)))
        if close(dpq, 0):
            violations.append(MetricViolation("identity", (p, q), (dpq,)))
    triples = 0
    for p, q, r in permutations(points, 3):
        triples += 1
        dpr, dpq, dqr = d(p, r), d(p, q), d(q, r)
        if not le(dpr, dpq + dqr):
            violations.append(MetricViolation("triangle", (p, q, r), (dpr, dpq, dqr)))
    if violations:
        logger.warning(f"Metric of '{universe.name}' violates {len(violations)} axiom instance(s)")
    return MetricReport(universe.name, len(points), pairs, triples, tuple(violations))


@dataclass(frozen=True)
class SystemMap:
    """A deterministic self-map f of a universe."""
    universe: PointUniverse
    apply: Callable[[Point], Point] = field(repr=False)
    name: str = "f"

    def __call__(self, p: Point) -> Point:
        return self.apply(p)


def iterate(system: SystemMap, p: Point, n: int) -> Point:
    """
    n-th iterate f^n(p); f^0(p) = p.
    :param system: SystemMap
    :param p: point of the system's universe
    :param n: non-negative number of steps
    :return: f^n(p)
    """
    if n < 0:
        raise DomainError(f"Number of iterations must be non-negative, got {n}")
    system.universe.require(p)
    for _ in range(n):
        p = system(p)
    return p


def orbit(system: SystemMap, p: Point, n: int) -> list:
    """Orbit segment [p, f(p), ..., f^n(p)]."""
    system.universe.require(p)
    points = [p]
    for _ in range(n):
        points.append(system(points[-1]))
    return points


def identity_map(universe: PointUniverse) -> SystemMap:
    return SystemMap(universe, lambda p: p, name="id")


def l1(p: tuple, q: tuple) -> Number:
    return sum(abs(a - b) for a, b in zip(p, q))


def finite_universe(points: Iterable[Point], metric: Callable[[Point, Point], Number],
                    name: str = "finite", exact: bool = True) -> PointUniverse:
    """Universe made of an explicit finite point list."""
    members = frozenset(points)
    if not members:
        raise DomainError("A finite universe needs at least one point")
    return PointUniverse(name, PointKind.FINITE, metric, members.__contains__, exact=exact)


def rational_plane_universe(points: Iterable[tuple], name: str = "rational-plane") -> PointUniverse:
    """Finite set of rational points of the plane with the l1 distance."""
    return finite_universe(points, l1, name=name)


def finite_map(universe: PointUniverse, table: dict, name: str = "f") -> SystemMap:
    """Self-map of a finite universe given by its value table."""
    for p, q in table.items():
        universe.require(p, q)
    return SystemMap(universe, table.__getitem__, name=name)


def real_line_universe(name: str = "real-line") -> PointUniverse:
    """The real line with |x - y| in 64-bit floats."""
    return PointUniverse(name, PointKind.REAL_LINE,
                         lambda x, y: abs(float(x) - float(y)),
                         lambda x: isinstance(x, float) and math.isfinite(x),
                         exact=False,
                         add=lambda x, y: float(x) + float(y),
                         zero=0.0)


def jsonable(value: Any) -> Any:
    """Numbers in reports: exact values as "p/q" strings, floats as floats."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return point_label(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if hasattr(value, "item"):
        return value.item()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return point_label(value)
