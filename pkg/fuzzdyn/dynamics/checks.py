"""
Randomised identity suites for the fuzzy metrics.

Each suite draws its instances from a seeded generator, evaluates every stated
identity or implication exactly and collects the failing instances. Suites
never raise on a failed identity; the caller decides what a violation means.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import loguru
import numpy as np

from fuzzdyn import config
from fuzzdyn.dynamics.fuzzy import StepFuzzySet, characteristic, levels_in_window, zadeh_iterate
from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, hyper_iterate
from fuzzdyn.dynamics.metrics import (FuzzyMetric, cloud_distance, endograph_distance,
                                      fuzzy_distance, graph_cloud, level_hausdorff_matrix,
                                      sendograph_distance, skorokhod_distance, sup_distance)
from fuzzdyn.dynamics.proxsens import lift_proximal_tuple, sensitivity_extract_level
from fuzzdyn.dynamics.sampling import (LEVEL_DENOMINATOR, RandomUniverse, random_compact, random_fuzzy,
                                      random_levels, random_map, random_universe)
from fuzzdyn.dynamics.spaces import Number, point_label
from fuzzdyn.errors import DomainError, InvariantViolation

logger = loguru.logger

BRUTE_FORCE_GRID: int = int(config["skorokhod"]["brute_force_grid"])


@dataclass(frozen=True)
class Violation:
    check: str
    trial: int
    detail: str

    def to_dict(self) -> dict:
        return {"check": self.check, "trial": self.trial, "detail": self.detail}


@dataclass
class SuiteReport:
    name: str
    trials: int = 0
    evaluations: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def record(self, check: str, trial: int, holds: bool, detail: str = "") -> None:
        self.evaluations[check] = self.evaluations.get(check, 0) + 1
        if not holds:
            self.violations.append(Violation(check, trial, detail))

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"suite": self.name, "trials": self.trials, "passed": self.passed,
                "evaluations": dict(sorted(self.evaluations.items())),
                "violations": [v.to_dict() for v in self.violations]}


def _describe(*objects) -> str:
    return " ".join(getattr(o, "label", str(o)) for o in objects)


def metric_identity_suite(rng: np.random.Generator, trials: int, max_points: int = 20,
                          max_levels: int = 5, resolution: int = 8) -> SuiteReport:
    """
    The chain of inequalities between the four metrics, their values on
    characteristic functions, the level-set lower bounds, the metric axioms on
    random triples and agreement of the closed forms with graph clouds.
    :param rng: seeded generator
    :param trials: number of random instances
    :param resolution: level grid of the graph-cloud oracle
    :return: SuiteReport
    """
    report = SuiteReport("metric-identities", trials)
    for t in range(trials):
        space = random_universe(rng, max_points)
        u = random_fuzzy(rng, space, max_levels)
        v = random_fuzzy(rng, space, max_levels)
        w = random_fuzzy(rng, space, max_levels)
        K, L = random_compact(rng, space), random_compact(rng, space)
        x = space.points[int(rng.integers(0, len(space.points)))]
        _check_pair(report, t, u, v, resolution)
        _check_characteristics(report, t, space, K, L, x, u)
        _check_axioms(report, t, u, v, w)
    if report.violations:
        logger.warning(f"{report.name}: {len(report.violations)} violation(s) in {trials} trials")
    return report


def _check_pair(report: SuiteReport, t: int, u: StepFuzzySet, v: StepFuzzySet, resolution: int) -> None:
    dE, dS = endograph_distance(u, v), sendograph_distance(u, v)
    d0, dinf = skorokhod_distance(u, v), sup_distance(u, v)
    report.record("chain", t, dE <= dS <= d0 <= dinf, _describe(u, v) + f" E={dE} S={dS} 0={d0} inf={dinf}")
    report.record("endograph-bounded", t, dE <= 1, f"E={dE}")
    h0 = hausdorff(u.support, v.support)
    h1 = hausdorff(u.core, v.core)
    report.record("support-below-sendograph", t, h0 <= dS, f"H0={h0} S={dS}")
    report.record("levels-below-skorokhod", t, max(h0, h1) <= d0, f"H0={h0} H1={h1} 0={d0}")
    base = u.support.union(v.support)
    for which, closed in ((FuzzyMetric.SENDOGRAPH, dS), (FuzzyMetric.ENDOGRAPH, dE)):
        cloud = cloud_distance(u.universe, graph_cloud(u, which, resolution, base),
                               graph_cloud(v, which, resolution, base))
        report.record(f"cloud-{which.value}", t, abs(cloud - closed) <= Fraction(1, resolution),
                      f"cloud={cloud} closed={closed}")


def _check_characteristics(report: SuiteReport, t: int, space: RandomUniverse,
                           K: CompactSet, L: CompactSet, x, u: StepFuzzySet) -> None:
    chi_K, chi_L = characteristic(K), characteristic(L)
    hKL = hausdorff(K, L)
    report.record("characteristic-endograph", t, endograph_distance(chi_K, chi_L) == min(hKL, 1),
                  _describe(K, L))
    for metric in (FuzzyMetric.SUP, FuzzyMetric.SKOROKHOD, FuzzyMetric.SENDOGRAPH):
        report.record(f"characteristic-{metric.value}", t, fuzzy_distance(metric, chi_K, chi_L) == hKL,
                      _describe(K, L))
    point = characteristic(CompactSet(space.universe, frozenset([x])))
    farthest = max(space.universe.metric(x, y) for y in u.support.points)
    values = [fuzzy_distance(m, point, u) for m in (FuzzyMetric.SENDOGRAPH, FuzzyMetric.SKOROKHOD, FuzzyMetric.SUP)]
    report.record("singleton-distances", t, all(val == farthest for val in values),
                  f"x={point_label(x)} values={values} farthest={farthest}")
    expected = max(hausdorff(K, u.support), hausdorff(K, u.core))
    report.record("characteristic-vs-fuzzy", t,
                  skorokhod_distance(chi_K, u) == expected and sup_distance(chi_K, u) == expected,
                  _describe(K, u))


def _check_axioms(report: SuiteReport, t: int, u: StepFuzzySet, v: StepFuzzySet, w: StepFuzzySet) -> None:
    for metric in FuzzyMetric:
        duv, dvu = fuzzy_distance(metric, u, v), fuzzy_distance(metric, v, u)
        dvw, duw = fuzzy_distance(metric, v, w), fuzzy_distance(metric, u, w)
        report.record(f"symmetry-{metric.value}", t, duv == dvu, f"{duv} != {dvu}")
        report.record(f"identity-{metric.value}", t, fuzzy_distance(metric, u, u) == 0
                      and (duv > 0) == (u != v), _describe(u, v))
        report.record(f"triangle-{metric.value}", t, duw <= duv + dvw, f"{duw} > {duv} + {dvw}")


def _near_fuzzy(rng: np.random.Generator, space: RandomUniverse, K: CompactSet) -> StepFuzzySet:
    """A fuzzy set that keeps K at high levels and adds a few faint points."""
    membership = {}
    top = [Fraction(k, 8) for k in (6, 7, 8)]
    for p in K:
        membership[p] = top[int(rng.integers(0, len(top)))]
    membership[next(iter(K))] = Fraction(1)
    for p in space.points:
        if p not in membership and rng.random() < 0.2:
            membership[p] = Fraction(int(rng.integers(1, 3)), 8)
    return StepFuzzySet.from_mapping(space.universe, membership)


def _epsilon_samples(bound: Number) -> list:
    if bound <= 0:
        return []
    bound = Fraction(bound)
    return [bound / 2, bound * Fraction(63, 64)]


def level_bound_suite(rng: np.random.Generator, trials: int, max_points: int = 20) -> SuiteReport:
    """
    Level-set bounds for fuzzy sets close to a characteristic function:
      endograph-upper    E(χ_K, u) = δ < 1/2 ⇒ d_H(K, u_α) ≤ δ on (δ, 1-δ]
      sendograph-upper   S(χ_K, u) = δ < 1   ⇒ d_H(K, u_α) ≤ δ on [0, 1-δ]
      sendograph-lower   ε < min(S, 1)       ⇒ d_H(K, u_α) > ε for some α in [0, 1-ε]
      endograph-lower    ε < min(E, 1/2)     ⇒ d_H(K, u_α) > ε for some α in (ε, 1-ε]
    Half of the instances are built near χ_K so that the hypotheses bite.
    """
    report = SuiteReport("level-bounds", trials)
    half = Fraction(1, 2)
    for t in range(trials):
        space = random_universe(rng, max_points)
        K = random_compact(rng, space)
        u = _near_fuzzy(rng, space, K) if rng.random() < 0.5 else random_fuzzy(rng, space)
        chi = characteristic(K)
        dE, dS = endograph_distance(chi, u), sendograph_distance(chi, u)
        detail = _describe(K, u)
        if dE < half:
            report.record("endograph-upper", t,
                          all(hausdorff(K, S) <= dE for _, S in levels_in_window(u, dE, 1 - dE)), detail)
        if dS < 1:
            report.record("sendograph-upper", t,
                          all(hausdorff(K, S) <= dS for _, S in levels_in_window(u, 0, 1 - dS, closed=True)),
                          detail)
        for eps in _epsilon_samples(min(dS, 1)):
            report.record("sendograph-lower", t,
                          any(hausdorff(K, S) > eps for _, S in levels_in_window(u, 0, 1 - eps, closed=True)),
                          detail + f" eps={eps}")
        for eps in _epsilon_samples(min(dE, half)):
            report.record("endograph-lower", t,
                          any(hausdorff(K, S) > eps for _, S in levels_in_window(u, eps, 1 - eps)),
                          detail + f" eps={eps}")
    if report.violations:
        logger.warning(f"{report.name}: {len(report.violations)} violation(s) in {trials} trials")
    return report


def skorokhod_grid_bound(u: StepFuzzySet, v: StepFuzzySet, grid: Optional[int] = None) -> Number:
    """
    Brute-force Skorokhod value over piecewise-linear reparametrizations whose
    knots send the jump levels of v to points of {k/grid} ∪ {jump levels of u}.

    ξ is determined by the images c_1 < ... < c_q = 1 of the jump levels
    b_1 < ... < b_q of v. On (c_{k-1}, c_k] the fuzzy set ξ∘v carries v's k-th
    level set, so the cost is a max over consecutive segments and is minimised
    by dynamic programming over k. The result bounds the exact distance from
    above and exceeds it by at most 1/grid.
    """
    grid = BRUTE_FORCE_GRID if grid is None else grid
    if grid < 1:
        raise DomainError(f"grid must be ≥ 1, got {grid}")
    a, b = u.levels, v.levels
    H = level_hausdorff_matrix(u, v)
    bounds = (Fraction(0),) + tuple(a)
    points = sorted({Fraction(k, grid) for k in range(grid + 1)} | set(a))

    def segment(lo: Number, hi: Number, k: int) -> Number:
        cost = 0
        for i in range(len(a)):
            if bounds[i] < hi and bounds[i + 1] > lo:
                cost = max(cost, H[i][k])
        return cost

    best = {Fraction(0): Fraction(0)}
    for k, bk in enumerate(b):
        targets = [Fraction(1)] if k == len(b) - 1 else [c for c in points if 0 < c < 1]
        step = {}
        for c in targets:
            candidates = [max(cost, segment(prev, c, k)) for prev, cost in best.items() if prev < c]
            if candidates:
                step[c] = max(min(candidates), abs(c - bk))
        best = step
    return best[Fraction(1)]


def skorokhod_oracle_suite(rng: np.random.Generator, trials: int, grid: Optional[int] = None,
                           max_points: int = 20) -> SuiteReport:
    """Exact Skorokhod distance against the grid brute force on random step pairs."""
    grid = BRUTE_FORCE_GRID if grid is None else grid
    report = SuiteReport("skorokhod-oracle", trials)
    for t in range(trials):
        space = random_universe(rng, max_points)
        u, v = random_fuzzy(rng, space), random_fuzzy(rng, space)
        exact, brute = skorokhod_distance(u, v), skorokhod_grid_bound(u, v, grid)
        report.record("grid-bound", t, exact <= brute <= exact + Fraction(1, grid),
                      _describe(u, v) + f" exact={exact} grid={brute}")
    return report


def _perturbed_characteristic(rng: np.random.Generator, space: RandomUniverse, K: CompactSet) -> StepFuzzySet:
    """χ_K with one nearby outside point at a random level and some points of K lowered."""
    d = space.universe.metric
    outside = sorted((p for p in space.points if p not in K), key=lambda p: min(d(p, k) for k in K.points))
    membership = {p: Fraction(1) for p in K.points}
    lowered = [p for p in K if rng.random() < 0.3][:len(K) - 1]
    for p in lowered:
        membership[p] = Fraction(int(rng.integers(6, 8)), LEVEL_DENOMINATOR)
    if outside:
        q = outside[int(rng.integers(0, min(3, len(outside))))]
        membership[q] = Fraction(int(rng.integers(1, LEVEL_DENOMINATOR)), LEVEL_DENOMINATOR)
    return StepFuzzySet.from_mapping(space.universe, membership)


def extraction_suite(rng: np.random.Generator, trials: int, max_points: int = 20,
                     max_time: int = 4) -> SuiteReport:
    """
    Forward-constructed fuzzy witnesses (χ_K, v) for each metric in turn: with
    d = metric(χ_K, v) and d' = metric(f̂^n χ_K, f̂^n v) capped by the metric's
    ε bound, δ and ε split (d, d') in thirds. Every instance must yield a level.
    Draws that cannot be split are redrawn, at most 50 times per trial.
    """
    report = SuiteReport("sensitivity-extraction", trials)
    bounds = {FuzzyMetric.ENDOGRAPH: Fraction(1, 2), FuzzyMetric.SENDOGRAPH: Fraction(1)}
    metrics = list(FuzzyMetric)
    for t in range(trials):
        metric = metrics[t % len(metrics)]
        for _ in range(50):
            space = random_universe(rng, max_points)
            system = random_map(rng, space)
            K = random_compact(rng, space, max_size=max(1, len(space.points) // 2))
            v = _perturbed_characteristic(rng, space, K)
            n = int(rng.integers(1, max_time + 1))
            near = fuzzy_distance(metric, characteristic(K), v)
            far = fuzzy_distance(metric, characteristic(hyper_iterate(system, K, n)), zadeh_iterate(system, v, n))
            top = min(far, bounds[metric]) if metric in bounds else far
            if near < top:
                break
        else:
            logger.warning(f"Trial {t}: no usable {metric.value} instance")
            continue
        delta, epsilon = near + (top - near) / 3, near + 2 * (top - near) / 3
        detail = f"{metric.value} K={K.label} v={v.label} n={n} δ={delta} ε={epsilon}"
        try:
            alpha, witness = sensitivity_extract_level(metric, system, K, v, n, epsilon, delta)
            report.record(f"extract-{metric.value}", t, witness.revalidate(system), detail + f" α={alpha}")
        except InvariantViolation as e:
            report.record(f"extract-{metric.value}", t, False, f"{detail}: {e}")
    if report.violations:
        logger.warning(f"{report.name}: {len(report.violations)} failure(s) in {trials} trials")
    return report


def lift_suite(rng: np.random.Generator, trials: int, max_points: int = 12, horizon: int = 8) -> SuiteReport:
    """Sup distance of lifted tuples stays below the largest component Hausdorff distance."""
    report = SuiteReport("lift-domination", trials)
    for t in range(trials):
        space = random_universe(rng, max_points)
        system = random_map(rng, space)
        N = int(rng.integers(1, 4))
        Ks = [random_compact(rng, space) for _ in range(N)]
        Ls = [random_compact(rng, space) for _ in range(N)]
        result = lift_proximal_tuple(system, Ks, Ls, random_levels(rng, N), horizon)
        report.record("lift", t, result.passed, f"u={result.u.label} v={result.v.label}")
    return report
