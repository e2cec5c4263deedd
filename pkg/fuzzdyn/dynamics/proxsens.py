"""
Proximality and sensitivity diagnostics at the base, hyperspace and fuzzy levels.

Searches are deterministic: candidates come from explicit generator objects
and are tried in the order the generator yields them. A search that finds
nothing only says so for the given horizon and generator.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

import loguru

from fuzzdyn.dynamics.chaos import (DistanceTrace, Level, distance_trace, level_distance, object_label,
                                    stepper)
from fuzzdyn.dynamics.fuzzy import (StepFuzzySet, characteristic, from_levels, level_set,
                                    levels_in_window, zadeh_iterate)
from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, hyper_iterate
from fuzzdyn.dynamics.metrics import FuzzyMetric, fuzzy_distance, sup_distance
from fuzzdyn.dynamics.spaces import (FLOAT_TOL, Number, Point, PointUniverse, SystemMap, iterate,
                                     jsonable, le, lt, parse_number, point_label)
from fuzzdyn.errors import (DomainError, GeneratorContractError, InvariantViolation,
                            PreconditionError, UnsupportedOperation)

logger = loguru.logger


def proximal_min(trace: DistanceTrace) -> tuple:
    """
    Smallest value of a trace and the first index j attaining it.
    :param trace: DistanceTrace d_1..d_n
    :return: (value, j)
    """
    values = trace.values
    j = min(range(trace.horizon), key=values.__getitem__)
    return values[j], j + 1


def is_proximal(trace: DistanceTrace, tol: Number = 0) -> bool:
    return le(proximal_min(trace)[0], tol)


def _orbit_point(level: Level, system: SystemMap, obj, n: int):
    if level is Level.BASE:
        return iterate(system, obj, n)
    if level is Level.HYPER:
        return hyper_iterate(system, obj, n)
    return zadeh_iterate(system, obj, n)


@dataclass(frozen=True)
class LiftReport:
    """Sup distances of the lifted pair against the largest component distance, n = 0..horizon."""
    u: StepFuzzySet
    v: StepFuzzySet
    fuzzy: tuple
    components: tuple

    @property
    def passed(self) -> bool:
        return all(le(a, b) for a, b in zip(self.fuzzy, self.components))

    @property
    def equalities(self) -> int:
        return sum(1 for a, b in zip(self.fuzzy, self.components) if a == b)

    def to_dict(self) -> dict:
        return {"u": self.u.label, "v": self.v.label, "horizon": len(self.fuzzy) - 1,
                "passed": self.passed, "equalities": self.equalities,
                "sup": jsonable(self.fuzzy), "component_max": jsonable(self.components)}


def lift_proximal_tuple(system: SystemMap, Ks: Sequence[CompactSet], Ls: Sequence[CompactSet],
                        breakpoints: Sequence, horizon: int) -> LiftReport:
    """
    Build u' = max α_l χ_{K_l} and v' = max α_l χ_{L_l} and compare
    d∞(f̂^n u', f̂^n v') with max_l d_H(f̄^n K_l, f̄^n L_l) for n = 0..horizon.
    :param system: SystemMap
    :param Ks: K_1..K_N
    :param Ls: L_1..L_N
    :param breakpoints: 0 < α_1 < ... < α_N = 1
    :param horizon: last n checked
    :return: LiftReport
    """
    if not Ks or len(Ks) != len(Ls) or len(Ks) != len(breakpoints):
        raise DomainError(f"Need N ≥ 1 sets and breakpoints on each side, got "
                          f"{len(Ks)}, {len(Ls)} and {len(breakpoints)}")
    if horizon < 0:
        raise DomainError(f"horizon must be ≥ 0, got {horizon}")
    u = from_levels(list(zip(breakpoints, Ks)))
    v = from_levels(list(zip(breakpoints, Ls)))
    Ks, Ls = list(Ks), list(Ls)
    fu, fv = u, v
    fuzzy, components = [], []
    for n in range(horizon + 1):
        fuzzy.append(sup_distance(fu, fv))
        components.append(max(hausdorff(K, L) for K, L in zip(Ks, Ls)))
        Ks = [hyper_iterate(system, K, 1) for K in Ks]
        Ls = [hyper_iterate(system, L, 1) for L in Ls]
        fu, fv = zadeh_iterate(system, fu, 1), zadeh_iterate(system, fv, 1)
    report = LiftReport(u, v, tuple(fuzzy), tuple(components))
    if not report.passed:
        logger.error(f"Lifted pair exceeds its component bound: {report.to_dict()}")
    return report


@dataclass(frozen=True)
class SensitivityWitness:
    """
    A neighbour within δ of the center whose orbit separates by more than ε at time n.
    """
    level: Level
    metric: Optional[FuzzyMetric]
    center: object
    neighbor: object
    n: int
    delta: Number
    epsilon: Number
    start: Number
    separation: Number

    def revalidate(self, system: SystemMap) -> bool:
        """Recompute both distances from scratch."""
        dist = level_distance(self.level, system.universe, self.metric)
        start = dist(self.center, self.neighbor)
        after = dist(_orbit_point(self.level, system, self.center, self.n),
                     _orbit_point(self.level, system, self.neighbor, self.n))
        return lt(start, self.delta) and lt(self.epsilon, after)

    def to_dict(self) -> dict:
        return {"level": self.level.value, "metric": self.metric.value if self.metric else None,
                "center": object_label(self.center), "neighbor": object_label(self.neighbor), "n": self.n,
                "delta": jsonable(self.delta), "epsilon": jsonable(self.epsilon),
                "start": jsonable(self.start), "separation": jsonable(self.separation)}


class CandidateGenerator(ABC):
    """Strategy yielding points within δ of a center, in a fixed order."""

    @abstractmethod
    def candidates(self, universe: PointUniverse, center, delta: Number) -> Iterator:
        ...


class BasisPerturbation(CandidateGenerator):
    """
    center + scale·δ·e_k for k = 0..count-1 on a linear universe.
    ``vector_factory(k, c)`` returns c·e_k as a point of the universe.
    """

    def __init__(self, vector_factory: Callable[[int, Number], Point], count: int,
                 scale: Number = Fraction(1, 2)):
        if count < 1:
            raise DomainError(f"count must be ≥ 1, got {count}")
        self.vector_factory = vector_factory
        self.count = count
        self.scale = parse_number(scale)

    def candidates(self, universe: PointUniverse, center, delta: Number) -> Iterator:
        if not universe.linear:
            raise UnsupportedOperation(f"Universe '{universe.name}' does not support addition")
        for k in range(self.count):
            yield universe.add(center, self.vector_factory(k, self.scale * delta))


class CoordinateFlip(CandidateGenerator):
    """(n_1, t) for each t in ``values`` other than the center's second coordinate, if within δ."""

    def __init__(self, values: Iterable):
        self.values = tuple(values)

    def candidates(self, universe: PointUniverse, center, delta: Number) -> Iterator:
        n1, n2 = center
        for t in self.values:
            q = (n1, t)
            if t != n2 and universe.contains(q) and lt(universe.metric(center, q), delta):
                yield q


class GridPerturbation(CandidateGenerator):
    """center + (k/steps)·δ for k = ±1..±(steps-1) on the real line, nearest first."""

    def __init__(self, steps: int = 8):
        if steps < 2:
            raise DomainError(f"steps must be ≥ 2, got {steps}")
        self.steps = steps

    def candidates(self, universe: PointUniverse, center, delta: Number) -> Iterator:
        if not universe.linear:
            raise UnsupportedOperation(f"Universe '{universe.name}' does not support addition")
        for k in range(1, self.steps):
            for sign in (1, -1):
                yield universe.add(center, sign * float(delta) * k / self.steps)


class PointScan(CandidateGenerator):
    """The listed points lying within δ of the center, in list order."""

    def __init__(self, points: Iterable[Point]):
        self.points = tuple(points)

    def candidates(self, universe: PointUniverse, center, delta: Number) -> Iterator:
        for q in self.points:
            if q != center and lt(universe.metric(center, q), delta):
                yield q


class LiftedGenerator(CandidateGenerator):
    """
    Compact or fuzzy neighbours from point neighbours: each support point p
    gets every base candidate q added at p's level, or replaced by q.
    Both moves stay within d(p, q) in the Hausdorff and all four fuzzy metrics.
    """

    def __init__(self, base: CandidateGenerator):
        self.base = base

    def candidates(self, universe: PointUniverse, center, delta: Number) -> Iterator:
        if isinstance(center, CompactSet):
            membership = {p: 1 for p in center.points}
        elif isinstance(center, StepFuzzySet):
            membership = dict(center.membership)
        else:
            raise DomainError(f"LiftedGenerator perturbs CompactSets or StepFuzzySets, got {type(center).__name__}")
        seen = {center}
        for p in sorted(membership, key=point_label):
            for q in self.base.candidates(universe, p, delta):
                added = dict(membership)
                added[q] = max(added.get(q, 0), membership[p])
                replaced = {x: a for x, a in membership.items() if x != p}
                replaced[q] = max(replaced.get(q, 0), membership[p])
                for mapping in (added, replaced):
                    candidate = self._build(universe, center, mapping)
                    if candidate not in seen:
                        seen.add(candidate)
                        yield candidate

    @staticmethod
    def _build(universe: PointUniverse, center, mapping: dict):
        if isinstance(center, CompactSet):
            return CompactSet(universe, frozenset(mapping))
        return StepFuzzySet.from_mapping(universe, mapping)


def _prepare_search(level, system: SystemMap, center, delta, epsilon, metric, generator):
    level = Level.parse(level)
    metric = FuzzyMetric.parse(metric) if metric is not None else None
    if level is Level.FUZZY and metric is None:
        raise DomainError("Fuzzy level searches need a metric")
    delta, epsilon = parse_number(delta), parse_number(epsilon)
    if delta <= 0 or epsilon <= 0:
        raise DomainError(f"δ and ε must be positive, got δ = {delta}, ε = {epsilon}")
    if level is not Level.BASE and not isinstance(generator, LiftedGenerator):
        generator = LiftedGenerator(generator)
    return level, metric if level is Level.FUZZY else None, delta, epsilon, generator


def _checked_candidates(level: Level, system: SystemMap, center, delta: Number, metric,
                        generator: CandidateGenerator) -> Iterator:
    dist = level_distance(level, system.universe, metric)
    for candidate in generator.candidates(system.universe, center, delta):
        if level is Level.BASE:
            system.universe.require(candidate)
        start = dist(center, candidate)
        if not lt(start, delta):
            raise GeneratorContractError(f"{type(generator).__name__} yielded {object_label(candidate)} at "
                                         f"distance {start} from the center, δ = {delta}")
        yield candidate, start


def sensitivity_search(level, system: SystemMap, center, delta, epsilon, horizon: int,
                       generator: CandidateGenerator, metric=None) -> Optional[SensitivityWitness]:
    """
    First candidate, in generator order, and first time n ≤ horizon at which
    the orbits separate by more than ε.
    :param level: Level or its name
    :param system: base SystemMap
    :param center: point, CompactSet or StepFuzzySet
    :param delta: radius of the candidate ball
    :param epsilon: separation to exceed
    :param horizon: last time tried
    :param generator: CandidateGenerator; point generators are lifted for hyper and fuzzy levels
    :param metric: FuzzyMetric for fuzzy searches
    :return: SensitivityWitness or None
    """
    level, metric, delta, epsilon, generator = _prepare_search(level, system, center, delta, epsilon,
                                                               metric, generator)
    if horizon < 1:
        raise DomainError(f"horizon must be ≥ 1, got {horizon}")
    step = stepper(level, system)
    dist = level_distance(level, system.universe, metric)
    tried = 0
    for candidate, start in _checked_candidates(level, system, center, delta, metric, generator):
        tried += 1
        a, b = center, candidate
        for n in range(1, horizon + 1):
            a, b = step(a), step(b)
            separation = dist(a, b)
            if lt(epsilon, separation):
                logger.debug(f"Candidate {object_label(candidate)} separates by {separation} at n = {n}")
                return SensitivityWitness(level, metric, center, candidate, n, delta, epsilon, start,
                                          separation)
    logger.warning(f"No {level.value} witness for ε = {epsilon} among {tried} candidate(s) "
                   f"up to n = {horizon}")
    return None


@dataclass(frozen=True)
class WindowReport:
    n_from: int
    n_to: int
    witnesses: dict = field(repr=False)

    @property
    def coverage(self) -> Fraction:
        found = sum(1 for w in self.witnesses.values() if w is not None)
        return Fraction(found, self.n_to - self.n_from + 1)

    def to_dict(self) -> dict:
        return {"n_from": self.n_from, "n_to": self.n_to, "coverage": jsonable(self.coverage),
                "witnesses": {str(n): w.to_dict() if w else None for n, w in sorted(self.witnesses.items())}}


def strong_sensitivity_window(level, system: SystemMap, center, delta, epsilon, n_from: int, n_to: int,
                              generator: CandidateGenerator, metric=None) -> WindowReport:
    """
    For every n in [n_from, n_to], the first candidate separating by more than ε at exactly time n.
    """
    level, metric, delta, epsilon, generator = _prepare_search(level, system, center, delta, epsilon,
                                                               metric, generator)
    if not 1 <= n_from <= n_to:
        raise DomainError(f"Need 1 ≤ n_from ≤ n_to, got [{n_from}, {n_to}]")
    checked = list(_checked_candidates(level, system, center, delta, metric, generator))
    step = stepper(level, system)
    dist = level_distance(level, system.universe, metric)
    orbits = []
    for candidate, _ in checked:
        a, b = _orbit_point(level, system, center, n_from - 1), _orbit_point(level, system, candidate, n_from - 1)
        separations = []
        for _ in range(n_from, n_to + 1):
            a, b = step(a), step(b)
            separations.append(dist(a, b))
        orbits.append(separations)
    witnesses = {}
    for offset, n in enumerate(range(n_from, n_to + 1)):
        witnesses[n] = None
        for (candidate, start), separations in zip(checked, orbits):
            if lt(epsilon, separations[offset]):
                witnesses[n] = SensitivityWitness(level, metric, center, candidate, n, delta, epsilon,
                                                  start, separations[offset])
                break
    report = WindowReport(n_from, n_to, witnesses)
    logger.info(f"Sensitivity window [{n_from}, {n_to}] covered {report.coverage}")
    return report


@dataclass(frozen=True)
class CollectiveReport:
    n: int
    epsilon: Number
    delta: Number
    cs1: bool
    left_index: Optional[int]
    right_index: Optional[int]

    @property
    def passed(self) -> bool:
        return self.cs1 and (self.left_index is not None or self.right_index is not None)

    def to_dict(self) -> dict:
        return {"n": self.n, "epsilon": jsonable(self.epsilon), "delta": jsonable(self.delta),
                "cs1": self.cs1, "left_index": self.left_index, "right_index": self.right_index,
                "passed": self.passed}


def collective_sensitivity_check(system: SystemMap, xs: Sequence[Point], ys: Sequence[Point], n: int,
                                 epsilon, delta) -> CollectiveReport:
    """
    CS1: d(x_j, y_j) < δ for all j.
    CS2: some j0 with d(f^n x_{j0}, f^n y_j) > ε for all j, or d(f^n x_j, f^n y_{j0}) > ε for all j.
    Indices in the report are 1-based.
    """
    if len(xs) != len(ys) or not xs:
        raise DomainError(f"Need two non-empty families of equal size, got {len(xs)} and {len(ys)}")
    epsilon, delta = parse_number(epsilon), parse_number(delta)
    d = system.universe.metric
    cs1 = all(lt(d(x, y), delta) for x, y in zip(xs, ys))
    fx = [iterate(system, x, n) for x in xs]
    fy = [iterate(system, y, n) for y in ys]
    left = next((j0 + 1 for j0 in range(len(xs)) if all(lt(epsilon, d(fx[j0], b)) for b in fy)), None)
    right = next((j0 + 1 for j0 in range(len(ys)) if all(lt(epsilon, d(a, fy[j0])) for a in fx)), None)
    return CollectiveReport(n, epsilon, delta, cs1, left, right)


def collective_witness(system: SystemMap, xs: Sequence[Point], x_tilde: Point, n: int, epsilon, delta) -> tuple:
    """
    Perturb a finite family with one small vector x̃ whose orbit escapes:
    y_j = x_j + x̃ if d(T^n x_1, T^n x_j) ≤ ε/2, else y_j = x_j.
    :param system: linear SystemMap on a universe with addition
    :param xs: distinct points x_1..x_N
    :param x_tilde: d(x̃, 0) < δ and d(T^n x̃, 0) > ε
    :return: (ys, CollectiveReport checked at ε/2 with j0 = 1)
    """
    universe = system.universe
    if not universe.linear:
        raise UnsupportedOperation(f"Universe '{universe.name}' does not support addition")
    if len(set(xs)) != len(xs) or not xs:
        raise DomainError("collective_witness needs a non-empty family of distinct points")
    epsilon, delta = parse_number(epsilon), parse_number(delta)
    zero = universe.zero
    if not lt(universe.distance(x_tilde, zero), delta):
        raise PreconditionError(f"d(x̃, 0) must be < δ = {delta}")
    if not lt(epsilon, universe.metric(iterate(system, x_tilde, n), zero)):
        raise PreconditionError(f"d(T^{n} x̃, 0) must exceed ε = {epsilon}")
    d = universe.metric
    first = iterate(system, xs[0], n)
    ys = [universe.add(x, x_tilde) if le(d(first, iterate(system, x, n)), epsilon / 2) else x for x in xs]
    report = collective_sensitivity_check(system, xs, ys, n, epsilon / 2, delta)
    if report.left_index != 1 or not report.cs1:
        raise InvariantViolation(f"Collective perturbation failed to separate: {report.to_dict()}")
    return ys, report


def _extraction_window(metric: FuzzyMetric, epsilon: Number) -> tuple:
    if metric in (FuzzyMetric.SUP, FuzzyMetric.SKOROKHOD):
        return 0, 1, True
    if metric is FuzzyMetric.SENDOGRAPH:
        return 0, 1 - epsilon, True
    return epsilon, 1 - epsilon, False


def sensitivity_extract_level(metric, system: SystemMap, K: CompactSet, v: StepFuzzySet, n: int,
                              epsilon, delta) -> tuple:
    """
    Turn a fuzzy witness (χ_K, v) into a hyperspace witness (K, v_α).
    α is searched in [0, 1] for sup and skorokhod, [0, 1-ε] for sendograph and
    (ε, 1-ε] for endograph.
    :param metric: FuzzyMetric
    :param K: CompactSet
    :param v: StepFuzzySet with metric(χ_K, v) < δ and metric(f̂^n χ_K, f̂^n v) > ε
    :param n: time of the fuzzy separation
    :return: (α, SensitivityWitness at the hyper level)
    """
    metric = FuzzyMetric.parse(metric)
    epsilon, delta = parse_number(epsilon), parse_number(delta)
    bound = {FuzzyMetric.ENDOGRAPH: Fraction(1, 2), FuzzyMetric.SENDOGRAPH: 1}.get(metric)
    if not 0 < delta < epsilon or (bound is not None and not epsilon < bound):
        raise DomainError(f"Need 0 < δ < ε{f' < {bound}' if bound is not None else ''} "
                          f"for {metric.value}, got δ = {delta}, ε = {epsilon}")
    chi = characteristic(K)
    start = fuzzy_distance(metric, chi, v)
    if not lt(start, delta):
        raise DomainError(f"{metric.value}(χ_K, v) = {start} is not below δ = {delta}")
    fK = hyper_iterate(system, K, n)
    fv = zadeh_iterate(system, v, n)
    after = fuzzy_distance(metric, characteristic(fK), fv)
    if not lt(epsilon, after):
        raise DomainError(f"{metric.value} at time {n} is {after}, not above ε = {epsilon}")
    low, high, closed = _extraction_window(metric, epsilon)
    for alpha, v_alpha in levels_in_window(v, low, high, closed):
        near = hausdorff(K, v_alpha)
        far = hausdorff(fK, level_set(fv, alpha))
        if lt(near, delta) and lt(epsilon, far):
            return alpha, SensitivityWitness(Level.HYPER, None, K, v_alpha, n, delta, epsilon, near, far)
    raise InvariantViolation(f"No level of {v.label} in the {metric.value} window separates {K.label} "
                             f"by more than {epsilon} at n = {n}")


@dataclass(frozen=True)
class ProjectionReport:
    metric: FuzzyMetric
    supports: tuple = field(repr=False)
    fuzzy: tuple = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(le(h, d) for h, d in zip(self.supports, self.fuzzy))

    @property
    def support_min(self) -> Number:
        return min(self.supports)

    def to_dict(self) -> dict:
        return {"metric": self.metric.value, "horizon": len(self.fuzzy) - 1, "passed": self.passed,
                "support_min": jsonable(self.support_min), "fuzzy_min": jsonable(min(self.fuzzy))}


def project_proximal_pair(system: SystemMap, u: StepFuzzySet, v: StepFuzzySet, horizon: int,
                          metric) -> ProjectionReport:
    """
    d_H(f̄^n u_0, f̄^n v_0) ≤ metric(f̂^n u, f̂^n v) for n = 0..horizon, so the
    supports inherit any proximal evidence of (u, v).
    """
    metric = FuzzyMetric.parse(metric)
    if metric is FuzzyMetric.ENDOGRAPH:
        raise DomainError("Supports are only dominated by the sup, skorokhod and sendograph metrics")
    supports, fuzzy = [], []
    for _ in range(horizon + 1):
        supports.append(hausdorff(u.support, v.support))
        fuzzy.append(fuzzy_distance(metric, u, v))
        u, v = zadeh_iterate(system, u, 1), zadeh_iterate(system, v, 1)
    report = ProjectionReport(metric, tuple(supports), tuple(fuzzy))
    if not report.passed:
        logger.error(f"Support distances exceed the {metric.value} distance")
    return report


@dataclass(frozen=True)
class CoverageReport:
    epsilon: Number
    horizon: int
    cells: tuple

    @property
    def coverage(self) -> Fraction:
        return Fraction(sum(1 for c in self.cells if c["found"] is not None), len(self.cells))

    def to_dict(self) -> dict:
        return {"epsilon": jsonable(self.epsilon), "horizon": self.horizon,
                "coverage": jsonable(self.coverage), "cells": list(self.cells)}


def proximal_coverage(level, system: SystemMap, mesh: Sequence[tuple], epsilon, horizon: int,
                      generator: CandidateGenerator, tol: Number = FLOAT_TOL, metric=None) -> CoverageReport:
    """
    For each mesh pair (a, b), look for a proximal pair (a', b') with a' and b'
    within ε of a and b; the pair is proximal when its trace minimum is ≤ tol.
    :return: CoverageReport, coverage = fraction of mesh pairs with a proximal neighbour pair
    """
    if not mesh:
        raise DomainError("proximal_coverage needs a non-empty mesh")
    level, metric, epsilon, _, generator = _prepare_search(level, system, mesh[0][0], epsilon, epsilon,
                                                           metric, generator)
    cells = []
    for a, b in mesh:
        near_a = [a] + [c for c, _ in _checked_candidates(level, system, a, epsilon, metric, generator)]
        near_b = [b] + [c for c, _ in _checked_candidates(level, system, b, epsilon, metric, generator)]
        found = None
        for x in near_a:
            for y in near_b:
                if x == y:
                    continue
                value, j = proximal_min(distance_trace(level, system, x, y, horizon, metric))
                if le(value, tol):
                    found = {"a": object_label(x), "b": object_label(y), "min": jsonable(value), "index": j}
                    break
            if found:
                break
        cells.append({"a": object_label(a), "b": object_label(b), "found": found})
    report = CoverageReport(epsilon, horizon, tuple(cells))
    logger.info(f"Proximal coverage {report.coverage} over {len(mesh)} mesh pair(s)")
    return report
