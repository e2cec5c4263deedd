"""
Distance traces, densities, distributional functions and finite-horizon pair
classification.

Asymptotic quantities are replaced by statistics over a checkpoint schedule:
liminf/limsup become inf/sup of the ratios observed at the checkpoints. The
resulting verdicts are evidence at the given horizon, never proofs.
"""
import bisect
import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Optional, Protocol, Sequence, runtime_checkable

import loguru
import numpy as np
import pandas as pd

from fuzzdyn import config
from fuzzdyn.dynamics.fuzzy import (StepFuzzySet, characteristic, from_levels, level_set,
                                    zadeh_apply)
from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, hyper_apply
from fuzzdyn.dynamics.metrics import FuzzyMetric, Reparametrization, fuzzy_distance
from fuzzdyn.dynamics.spaces import (FLOAT_TOL, Number, Point, PointUniverse, SystemMap, close,
                                     is_exact, jsonable, le, parse_number, point_label)
from fuzzdyn.errors import ConfigurationError, DomainError, PreconditionError

logger = loguru.logger

AMBIGUITY = 1e-12


class Level(str, Enum):
    BASE = "base"
    HYPER = "hyper"
    FUZZY = "fuzzy"

    @classmethod
    def parse(cls, value) -> "Level":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"Unknown system level {value!r}; choose from {[m.value for m in cls]}")


def object_label(obj) -> str:
    return getattr(obj, "label", None) or point_label(obj)


@dataclass(frozen=True)
class DistanceTrace:
    """
    d_j = dist(F^j a, F^j b) for j = 1..n at one system level.
    Exact traces keep ints/Fractions; float traces store floats.
    """
    level: Level
    metric: Optional[FuzzyMetric]
    pair: tuple
    values: tuple = field(repr=False)
    exact: bool = True

    def __post_init__(self):
        if not self.values:
            raise DomainError("A distance trace needs at least one value")

    @property
    def horizon(self) -> int:
        return len(self.values)

    @property
    def name(self) -> str:
        return self.level.value if self.metric is None else f"{self.level.value}:{self.metric.value}"

    @cached_property
    def array(self) -> np.ndarray:
        return np.fromiter((float(v) for v in self.values), dtype=float, count=len(self.values))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"j": np.arange(1, self.horizon + 1), "d_j": self.array})


def _check_level_objects(level: Level, system: SystemMap, a, b, metric) -> None:
    expected = {Level.BASE: None, Level.HYPER: CompactSet, Level.FUZZY: StepFuzzySet}[level]
    if expected is None:
        if isinstance(a, (CompactSet, StepFuzzySet)) or isinstance(b, (CompactSet, StepFuzzySet)):
            raise DomainError("Base level traces compare two points")
        system.universe.require(a, b)
        return
    if not isinstance(a, expected) or not isinstance(b, expected):
        raise DomainError(f"{level.value} level traces compare two {expected.__name__}s, "
                          f"got {type(a).__name__} and {type(b).__name__}")
    if a.universe != system.universe or b.universe != system.universe:
        raise DomainError("Trace objects and system live in different universes")
    if level is Level.FUZZY and metric is None:
        raise DomainError("Fuzzy level traces need a metric")


def stepper(level: Level, system: SystemMap) -> Callable:
    """One application of f, f̄ or f̂."""
    if level is Level.BASE:
        return system
    if level is Level.HYPER:
        return lambda K: hyper_apply(system, K)
    return lambda u: zadeh_apply(system, u)


def level_distance(level: Level, universe: PointUniverse, metric: Optional[FuzzyMetric]) -> Callable:
    if level is Level.BASE:
        return universe.metric
    if level is Level.HYPER:
        return hausdorff
    return lambda u, v: fuzzy_distance(metric, u, v)


def distance_trace(level, system: SystemMap, a, b, horizon: int, metric=None,
                   exact: bool = True) -> DistanceTrace:
    """
    Orbit distances of a pair at the base, hyperspace or fuzzy level.
    :param level: Level or its name
    :param system: base SystemMap
    :param a: point, CompactSet or StepFuzzySet, as demanded by level
    :param b: same type as a
    :param horizon: number of steps n ≥ 1
    :param metric: FuzzyMetric for fuzzy level traces
    :param exact: keep exact values; False stores floats, computed exactly per step
    :return: DistanceTrace with values d_1..d_n
    """
    level = Level.parse(level)
    metric = FuzzyMetric.parse(metric) if metric is not None else None
    if horizon < 1:
        raise DomainError(f"horizon must be ≥ 1, got {horizon}")
    _check_level_objects(level, system, a, b, metric)
    step = stepper(level, system)
    dist = level_distance(level, system.universe, metric)
    pair = (object_label(a), object_label(b))
    values = []
    for _ in range(horizon):
        a, b = step(a), step(b)
        d = dist(a, b)
        values.append(d if exact else float(d))
    trace = DistanceTrace(level, metric if level is Level.FUZZY else None, pair,
                          tuple(values), exact and system.universe.exact)
    logger.debug(f"Built {trace.name} trace of length {horizon}")
    return trace


@runtime_checkable
class CountingSet(Protocol):
    """A set of naturals with an exact prefix count |A ∩ [1, m]|."""

    def __contains__(self, j: int) -> bool: ...

    def count(self, m: int) -> int: ...


@dataclass(frozen=True)
class DensityEstimate:
    checkpoints: tuple
    ratios: tuple

    @property
    def lower(self) -> Fraction:
        return min(self.ratios)

    @property
    def upper(self) -> Fraction:
        return max(self.ratios)

    def ratio(self, m: int) -> Fraction:
        return self.ratios[self.checkpoints.index(m)]

    def to_dict(self) -> dict:
        return {"checkpoints": list(self.checkpoints), "ratios": jsonable(self.ratios),
                "lower": jsonable(self.lower), "upper": jsonable(self.upper)}


def _prefix_counter(A, top: int) -> Callable[[int], int]:
    # builtin sequences also expose count(), with another meaning
    if isinstance(A, CountingSet) and not isinstance(A, (list, tuple, set, frozenset, range)):
        return A.count
    if callable(A):
        hits = np.fromiter((bool(A(j)) for j in range(1, top + 1)), dtype=bool, count=top)
        cumulative = np.concatenate(([0], np.cumsum(hits)))
        return lambda m: int(cumulative[m])
    members = sorted(set(int(j) for j in A if j >= 1))
    return lambda m: bisect.bisect_right(members, m)


def density_estimate(A, horizon: int, checkpoints: Sequence[int]) -> DensityEstimate:
    """
    Exact ratios |A ∩ [1, m]| / m at each checkpoint.
    :param A: CountingSet, membership predicate or iterable of naturals
    :param horizon: n; every checkpoint must satisfy 1 ≤ m ≤ n
    :param checkpoints: naturals
    :return: DensityEstimate whose lower/upper proxy liminf/limsup
    """
    checkpoints = tuple(sorted(set(int(m) for m in checkpoints)))
    if not checkpoints:
        raise PreconditionError("density_estimate needs at least one checkpoint")
    if checkpoints[0] < 1 or checkpoints[-1] > horizon:
        raise PreconditionError(f"Checkpoints must lie in [1, {horizon}], got {checkpoints}")
    count = _prefix_counter(A, checkpoints[-1])
    return DensityEstimate(checkpoints, tuple(Fraction(count(m), m) for m in checkpoints))


BURN_IN_DIVISOR: int = int(config["classifier"]["burn_in_divisor"])


def default_burn_in(horizon: int) -> int:
    return horizon // BURN_IN_DIVISOR


def checkpoint_schedule(horizon: int, structural: Iterable[int] = (), burn_in: Optional[int] = None) -> tuple:
    """
    Geometric checkpoints ⌈n/2^i⌉ down to the burn-in, plus the structural ones.
    Structural checkpoints beyond the horizon are dropped.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be ≥ 1, got {horizon}")
    burn_in = default_burn_in(horizon) if burn_in is None else burn_in
    points = set()
    m, i = horizon, 0
    while m >= max(burn_in, 1):
        points.add(m)
        i += 1
        nxt = -(-horizon // 2 ** i)
        if nxt == m:
            break
        m = nxt
    for s in structural:
        if 1 <= s <= horizon:
            points.add(int(s))
        else:
            logger.debug(f"Structural checkpoint {s} is outside [1, {horizon}], dropped")
    return tuple(sorted(points))


def parse_grid(deltas: Iterable) -> tuple:
    grid = tuple(parse_number(d) for d in deltas)
    if not grid:
        raise DomainError("The δ-grid is empty")
    if any(d <= 0 for d in grid):
        raise DomainError(f"δ-grid values must be positive: {grid}")
    if any(x >= y for x, y in zip(grid, grid[1:])):
        raise DomainError(f"δ-grid must be strictly increasing: {grid}")
    return grid


def default_grid() -> tuple:
    return tuple(sorted({parse_number(d) for d in config["defaults"]["delta_grid"]}))


def with_epsilon(grid: Iterable, epsilon: Number) -> tuple:
    """The grid with ε inserted."""
    values = list(grid)
    if not any(close(d, epsilon) for d in values):
        values.append(epsilon)
    return tuple(sorted(values))


def below(trace: DistanceTrace, delta: Number) -> np.ndarray:
    """Boolean mask of d_j < δ; exact traces settle near-ties exactly."""
    arr = trace.array
    target = float(delta)
    if trace.exact and is_exact(delta):
        mask = arr < target
        ambiguous = np.flatnonzero(np.abs(arr - target) <= AMBIGUITY * max(1.0, abs(target)))
        for i in ambiguous:
            mask[i] = trace.values[i] < delta
        return mask
    return arr < target - FLOAT_TOL


def cesaro_means(trace: DistanceTrace) -> np.ndarray:
    """M_m = (1/m) Σ_{j≤m} d_j for m = 1..n."""
    return np.cumsum(trace.array) / np.arange(1, trace.horizon + 1)


@dataclass(frozen=True)
class DistributionalProfile:
    """
    Φ̂(δ) and Φ̂*(δ) over a δ-grid, the checkpoint ratios behind them and the
    Cesàro means of the trace.
    """
    trace_name: str
    pair: tuple
    horizon: int
    deltas: tuple
    checkpoints: tuple
    ratios: tuple = field(repr=False)
    lower: tuple
    upper: tuple
    burn_in: int
    means: np.ndarray = field(repr=False, compare=False)
    minimum: Number = 0
    argmin: int = 1
    tail_max: Number = 0

    def index(self, delta: Number) -> int:
        for i, d in enumerate(self.deltas):
            if close(d, delta):
                return i
        raise DomainError(f"δ = {delta} is not on the grid {self.deltas}")

    def on_grid(self, delta: Number) -> bool:
        return any(close(d, delta) for d in self.deltas)

    def phi(self, delta: Number) -> Fraction:
        return self.lower[self.index(delta)]

    def phi_star(self, delta: Number) -> Fraction:
        return self.upper[self.index(delta)]

    @property
    def tail_means(self) -> np.ndarray:
        return self.means[max(self.burn_in, 1) - 1:]

    @property
    def mean_min(self) -> float:
        return float(self.tail_means.min())

    @property
    def mean_max(self) -> float:
        return float(self.tail_means.max())

    def mean(self, m: int) -> float:
        return float(self.means[m - 1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"delta": [point_label(d) for d in self.deltas],
                             "phi_lower": [float(x) for x in self.lower],
                             "phi_upper": [float(x) for x in self.upper]})

    def to_dict(self) -> dict:
        return {"trace": self.trace_name, "pair": list(self.pair), "horizon": self.horizon,
                "burn_in": self.burn_in, "checkpoints": list(self.checkpoints),
                "deltas": jsonable(self.deltas), "phi_lower": jsonable(self.lower),
                "phi_upper": jsonable(self.upper), "mean_min": self.mean_min,
                "mean_max": self.mean_max, "minimum": jsonable(self.minimum), "argmin": self.argmin,
                "tail_max": jsonable(self.tail_max)}


def distributional_profile(trace: DistanceTrace, deltas: Iterable, structural: Iterable[int] = (),
                           burn_in: Optional[int] = None) -> DistributionalProfile:
    """
    Finite-horizon distributional functions of a trace.
    :param trace: DistanceTrace
    :param deltas: sorted positive δ-grid
    :param structural: extra checkpoints such as block edges of a density set
    :param burn_in: first checkpoint admitted to the geometric schedule and the tail statistics
    :return: DistributionalProfile with Φ̂(δ) = inf and Φ̂*(δ) = sup of the checkpoint ratios
    """
    grid = parse_grid(deltas)
    n = trace.horizon
    burn_in = default_burn_in(n) if burn_in is None else burn_in
    checkpoints = checkpoint_schedule(n, structural, burn_in)
    index = np.array(checkpoints) - 1
    ratios, lower, upper = [], [], []
    for delta in grid:
        counts = np.cumsum(below(trace, delta))[index]
        row = tuple(Fraction(int(c), m) for c, m in zip(counts, checkpoints))
        ratios.append(row)
        lower.append(min(row))
        upper.append(max(row))
    values = trace.values
    if trace.exact:
        argmin = min(range(n), key=values.__getitem__)
    else:
        argmin = int(np.argmin(trace.array))
    tail = values[max(burn_in, 1) - 1:]
    return DistributionalProfile(trace.name, trace.pair, n, grid, checkpoints, tuple(ratios),
                                 tuple(lower), tuple(upper), burn_in, cesaro_means(trace),
                                 values[argmin], argmin + 1, max(tail))


@dataclass(frozen=True)
class ClassifierConfig:
    epsilon: Number
    prox_tol: float
    zero_tol: float
    one_tol: float
    sep_margin: float
    mean_zero_tol: float
    c: Number
    min_horizon: int = 1
    d3_window: Optional[tuple] = None

    @classmethod
    def from_config(cls, overrides: Optional[dict] = None) -> "ClassifierConfig":
        """
        Classifier thresholds from the package config, with optional overrides.
        """
        settings = dict(config["classifier"])
        settings.pop("burn_in_divisor", None)
        for key, value in (overrides or {}).items():
            if key not in {f.name for f in dataclasses.fields(cls)}:
                raise ConfigurationError(f"Unknown classifier setting {key!r}")
            settings[key] = value
        window = settings.get("d3_window")
        try:
            return cls(epsilon=parse_number(settings["epsilon"]),
                       prox_tol=float(settings["prox_tol"]),
                       zero_tol=float(settings["zero_tol"]),
                       one_tol=float(settings["one_tol"]),
                       sep_margin=float(settings["sep_margin"]),
                       mean_zero_tol=float(settings["mean_zero_tol"]),
                       c=parse_number(settings["c"]),
                       min_horizon=int(settings.get("min_horizon", 1)),
                       d3_window=tuple(parse_number(x) for x in window) if window else None)
        except (KeyError, DomainError) as e:
            raise ConfigurationError(f"Invalid classifier configuration: {e}")

    def with_epsilon(self, epsilon: Number) -> "ClassifierConfig":
        return dataclasses.replace(self, epsilon=parse_number(epsilon))

    def to_dict(self) -> dict:
        return jsonable(dataclasses.asdict(self))


@dataclass(frozen=True)
class Evidence:
    """A surrogate flag and the numbers it was decided on. ``flag`` is None when the grid is too coarse."""
    flag: Optional[bool]
    values: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.flag is None:
            return "insufficient-grid"
        return "true" if self.flag else "false"

    def to_dict(self) -> dict:
        return {"flag": self.status, **jsonable(self.values)}


FLAGS = ("proximal", "ly", "mly", "d1", "d1_5", "d2", "d2_5", "d3")


@dataclass(frozen=True)
class PairVerdict:
    pair: tuple
    trace_name: str
    horizon: int
    config: ClassifierConfig
    evidence: dict

    @property
    def flags(self) -> dict:
        return {name: self.evidence[name].flag for name in FLAGS}

    def __getitem__(self, name: str) -> Evidence:
        return self.evidence[name]

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "trace": self.trace_name, "horizon": self.horizon,
                "config": self.config.to_dict(),
                "evidence": {name: self.evidence[name].to_dict() for name in FLAGS}}


def classify_pair(profile: DistributionalProfile, config: Optional[ClassifierConfig] = None) -> PairVerdict:
    """
    Finite-horizon surrogates of the pair notions.
      proximal  min trace value ≤ prox_tol
      ly        proximal and some tail value ≥ ε
      mly       max tail mean ≥ ε and min tail mean ≤ mean_zero_tol
      d1        Φ̂(ε) ≤ zero_tol and Φ̂*(δ) ≥ 1 - one_tol on the whole grid
      d1_5      Φ̂ at the smallest grid δ ≤ zero_tol, same condition on Φ̂*
      d2        Φ̂(ε) ≤ 1 - ε, same condition on Φ̂*
      d2_5      Φ̂(δ) < c < Φ̂*(δ) for every grid δ ≤ ε
      d3        Φ̂(δ) + sep_margin ≤ Φ̂*(δ) for every grid δ in (a, b)
    d1 and d2 need ε on the grid; d2_5 and d3 need a non-empty window.
    :param profile: DistributionalProfile
    :param config: ClassifierConfig, package defaults when omitted
    :return: PairVerdict
    """
    config = config or ClassifierConfig.from_config()
    if profile.horizon < config.min_horizon:
        raise PreconditionError(f"Profile horizon {profile.horizon} is below the classifier "
                                f"minimum {config.min_horizon}")
    eps = config.epsilon
    evidence = {}
    proximal = le(profile.minimum, config.prox_tol)
    evidence["proximal"] = Evidence(proximal, {"min": profile.minimum, "index": profile.argmin,
                                               "prox_tol": config.prox_tol})
    evidence["ly"] = Evidence(proximal and le(eps, profile.tail_max),
                              {"min": profile.minimum, "tail_max": profile.tail_max, "epsilon": eps})
    evidence["mly"] = Evidence(le(eps, profile.mean_max) and le(profile.mean_min, config.mean_zero_tol),
                               {"mean_min": profile.mean_min, "mean_max": profile.mean_max, "epsilon": eps})
    min_upper = min(profile.upper)
    upper_ok = min_upper >= 1 - config.one_tol
    if profile.on_grid(eps):
        phi_eps = profile.phi(eps)
        evidence["d1"] = Evidence(phi_eps <= config.zero_tol and upper_ok,
                                  {"epsilon": eps, "phi_lower": phi_eps, "min_phi_upper": min_upper})
        evidence["d2"] = Evidence(phi_eps <= 1 - eps and upper_ok,
                                  {"epsilon": eps, "phi_lower": phi_eps, "min_phi_upper": min_upper})
    else:
        logger.warning(f"ε = {eps} is not on the δ-grid; d1/d2 left undecided")
        evidence["d1"] = Evidence(None, {"epsilon": eps})
        evidence["d2"] = Evidence(None, {"epsilon": eps})
    evidence["d1_5"] = Evidence(profile.lower[0] <= config.zero_tol and upper_ok,
                                {"delta": profile.deltas[0], "phi_lower": profile.lower[0],
                                 "min_phi_upper": min_upper})
    window = [i for i, d in enumerate(profile.deltas) if le(d, eps)]
    if window:
        gap = min(min(config.c - profile.lower[i], profile.upper[i] - config.c) for i in window)
        evidence["d2_5"] = Evidence(all(profile.lower[i] < config.c < profile.upper[i] for i in window),
                                    {"epsilon": eps, "c": config.c, "min_gap": gap, "deltas": len(window)})
    else:
        logger.warning(f"No grid δ ≤ {eps}; d2_5 left undecided")
        evidence["d2_5"] = Evidence(None, {"epsilon": eps, "c": config.c})
    a, b = config.d3_window if config.d3_window else (0, eps)
    window = [i for i, d in enumerate(profile.deltas) if a < d < b]
    if window:
        separation = min(profile.upper[i] - profile.lower[i] for i in window)
        evidence["d3"] = Evidence(separation >= config.sep_margin,
                                  {"a": a, "b": b, "min_separation": separation, "deltas": len(window)})
    else:
        logger.warning(f"No grid δ in ({a}, {b}); d3 left undecided")
        evidence["d3"] = Evidence(None, {"a": a, "b": b})
    return PairVerdict(profile.pair, profile.trace_name, profile.horizon, config, evidence)


@dataclass(frozen=True)
class BridgeViolation:
    n: int
    delta: Number
    inequality: str
    lhs: float
    rhs: float

    def to_dict(self) -> dict:
        return jsonable(dataclasses.asdict(self))


@dataclass(frozen=True)
class BridgeReport:
    """Both mean/count inequalities checked for every n ≤ horizon and grid δ."""
    bound: Number
    horizon: int
    deltas: tuple
    checked: int
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"bound": jsonable(self.bound), "horizon": self.horizon, "deltas": jsonable(self.deltas),
                "checked": self.checked, "passed": self.passed,
                "violations": [v.to_dict() for v in self.violations[:20]]}


def bridge_check(trace: DistanceTrace, bound: Number, deltas: Iterable) -> BridgeReport:
    """
    For a trace bounded by r, every n and grid δ satisfy
        δ·(1/n)#{j ≤ n : d_j ≥ δ} ≤ M_n ≤ δ + r·(1/n)#{j ≤ n : d_j ≥ δ}
    :param trace: DistanceTrace
    :param bound: r > 0 with every d_j ≤ r
    :param deltas: δ-grid
    :return: BridgeReport listing violations (first 20 serialised)
    """
    r = parse_number(bound)
    if r <= 0:
        raise PreconditionError(f"The bound must be positive, got {r}")
    largest = max(trace.values)
    if not le(largest, r):
        raise PreconditionError(f"Trace value {largest} exceeds the bound {r}")
    grid = parse_grid(deltas)
    n = np.arange(1, trace.horizon + 1)
    means = cesaro_means(trace)
    tol = FLOAT_TOL * max(1.0, float(r))
    violations = []
    for delta in grid:
        frequency = np.cumsum(~below(trace, delta)) / n
        lower = float(delta) * frequency
        upper = float(delta) + float(r) * frequency
        for i in np.flatnonzero(lower > means + tol):
            violations.append(BridgeViolation(int(i) + 1, delta, "count-below-mean", lower[i], means[i]))
        for i in np.flatnonzero(means > upper + tol):
            violations.append(BridgeViolation(int(i) + 1, delta, "mean-below-count", means[i], upper[i]))
    if violations:
        logger.warning(f"Bridge inequalities fail {len(violations)} time(s) on {trace.name} trace")
    return BridgeReport(r, trace.horizon, grid, trace.horizon * len(grid), tuple(violations))


def u_alpha_family(K: CompactSet, L: CompactSet, alphas: Iterable) -> list:
    """
    u^α = max{χ_K, αχ_L} for each α: level set L up to α, K above it.
    :param K: CompactSet, proper subset of L
    :param L: CompactSet
    :param alphas: levels strictly inside (0, 1)
    :return: list of StepFuzzySet in the order of alphas
    """
    if not K.issubset(L) or K.points == L.points:
        raise DomainError(f"u^α needs a strict nested pair, got {K.label} and {L.label}")
    family = []
    for alpha in alphas:
        alpha = parse_number(alpha)
        if not 0 < alpha < 1:
            raise DomainError(f"α = {alpha} is outside (0, 1)")
        family.append(from_levels([(alpha, L), (1, K)]))
    return family


def xi_map(alpha: Number, beta: Number) -> Reparametrization:
    """
    The two-piece linear homeomorphism of [0, 1] with ξ(α) = β; sup|ξ - id| = α - β.
    """
    alpha, beta = parse_number(alpha), parse_number(beta)
    if not 0 < beta < alpha < 1:
        raise DomainError(f"xi_map needs 0 < β < α < 1, got α = {alpha}, β = {beta}")
    return Reparametrization(((alpha, beta),))


@dataclass(frozen=True)
class TransferReport:
    horizon: int
    alpha: Number
    beta: Number
    hyper: tuple = field(repr=False)
    discrepancies: dict = field(default_factory=dict)
    levels_commute: bool = True
    exact: bool = True

    @property
    def passed(self) -> bool:
        tolerance = 0 if self.exact else FLOAT_TOL
        return self.levels_commute and all(v <= tolerance for v in self.discrepancies.values())

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "alpha": jsonable(self.alpha), "beta": jsonable(self.beta),
                "passed": self.passed, "levels_commute": self.levels_commute,
                "max_discrepancy": jsonable(self.discrepancies)}


def transfer_check(system: SystemMap, K: CompactSet, L: CompactSet, alpha: Number, beta: Number,
                   horizon: int) -> TransferReport:
    """
    Along j = 0..horizon compare the fuzzy distances of (f̂^j u^β, f̂^j u^α) with
    h_j = d_H(f̄^j K, f̄^j L): the sup metric equals h_j, the other three equal
    min(h_j, α - β). Level sets of f̂^j u^α are checked against f̄^j L and f̄^j K.
    """
    alpha, beta = parse_number(alpha), parse_number(beta)
    if not 0 < beta < alpha < 1:
        raise DomainError(f"transfer_check needs 0 < β < α < 1, got α = {alpha}, β = {beta}")
    if horizon < 0:
        raise DomainError(f"horizon must be ≥ 0, got {horizon}")
    u_alpha, u_beta = u_alpha_family(K, L, [alpha, beta])
    gap = alpha - beta
    worst = {m: 0 for m in FuzzyMetric}
    hyper, commute = [], True
    for j in range(horizon + 1):
        h = hausdorff(K, L)
        hyper.append(h)
        for metric in FuzzyMetric:
            expected = h if metric is FuzzyMetric.SUP else min(h, gap)
            worst[metric] = max(worst[metric], abs(fuzzy_distance(metric, u_beta, u_alpha) - expected))
        commute = commute and level_set(u_alpha, alpha).points == L.points \
            and level_set(u_alpha, 1).points == K.points
        K, L = hyper_apply(system, K), hyper_apply(system, L)
        u_alpha, u_beta = zadeh_apply(system, u_alpha), zadeh_apply(system, u_beta)
    report = TransferReport(horizon, alpha, beta, tuple(hyper),
                            {m.value: v for m, v in worst.items()}, commute, system.universe.exact)
    if not report.passed:
        logger.warning(f"Transfer formulas fail for α = {alpha}, β = {beta}: {report.discrepancies}")
    return report


def transfer_trace(trace: DistanceTrace, alpha: Number, beta: Number, metric) -> DistanceTrace:
    """
    Fuzzy trace of (u^β, u^α) derived from the hyper trace of (K, L), or from
    the base trace of (x, y) with K = {x}, L = {x, y}.
    """
    metric = FuzzyMetric.parse(metric)
    alpha, beta = parse_number(alpha), parse_number(beta)
    if not 0 < beta < alpha < 1:
        raise DomainError(f"transfer_trace needs 0 < β < α < 1, got α = {alpha}, β = {beta}")
    if trace.level is Level.FUZZY:
        raise DomainError("transfer_trace derives fuzzy traces from base or hyper traces")
    pair = (f"u^{point_label(beta)}", f"u^{point_label(alpha)}")
    if metric is FuzzyMetric.SUP:
        values = trace.values
    elif trace.exact:
        gap = alpha - beta
        values = tuple(min(d, gap) for d in trace.values)
    else:
        values = tuple(np.minimum(trace.array, float(alpha - beta)).tolist())
    return DistanceTrace(Level.FUZZY, metric, pair, values, trace.exact)


@dataclass(frozen=True)
class VerdictMatrix:
    """Verdicts for every unordered pair of a finite family."""
    labels: tuple
    verdicts: dict = field(repr=False)
    profiles: dict = field(repr=False, compare=False)

    def aggregate(self) -> dict:
        """All-pairs flags; None when some pair is undecided."""
        out = {}
        for name in FLAGS:
            flags = [v.evidence[name].flag for v in self.verdicts.values()]
            out[name] = None if any(f is None for f in flags) else all(flags)
        return out

    def count(self, name: str) -> int:
        return sum(1 for v in self.verdicts.values() if v.evidence[name].flag)

    def uniform_curve(self) -> dict:
        """sup over pairs of Φ̂(δ) for every δ of the common grid."""
        grids = {p.deltas for p in self.profiles.values()}
        common = set.intersection(*(set(g) for g in grids)) if grids else set()
        return {d: max(p.phi(d) for p in self.profiles.values()) for d in sorted(common)}

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for (i, j), verdict in sorted(self.verdicts.items()):
            for name in FLAGS:
                ev = verdict.evidence[name]
                rows.append({"pair_i": self.labels[i], "pair_j": self.labels[j], "flag": name,
                             "status": ev.status,
                             "evidence": ";".join(f"{k}={point_label(jsonable(v))}"
                                                  for k, v in sorted(ev.values.items()))})
        return pd.DataFrame(rows, columns=["pair_i", "pair_j", "flag", "status", "evidence"])

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "aggregate": {k: jsonable(v) for k, v in self.aggregate().items()},
                "counts": {name: self.count(name) for name in FLAGS},
                "uniform_curve": {point_label(d): jsonable(v) for d, v in self.uniform_curve().items()},
                "pairs": [dict(i=i, j=j, **v.to_dict()) for (i, j), v in sorted(self.verdicts.items())]}


def verdict_matrix(labels: Sequence[str], traces: dict, deltas: Iterable,
                   config: Optional[ClassifierConfig] = None, structural: Iterable[int] = (),
                   pair_epsilon: Optional[Callable[[int, int], Number]] = None,
                   burn_in: Optional[int] = None) -> VerdictMatrix:
    """
    Classify precomputed traces keyed by index pairs (i, j), i < j.
    ``pair_epsilon`` chooses ε per pair; ε is always inserted into the grid.
    """
    config = config or ClassifierConfig.from_config()
    grid = parse_grid(deltas)
    structural = tuple(structural)
    verdicts, profiles = {}, {}
    for (i, j), trace in sorted(traces.items()):
        cfg = config if pair_epsilon is None else config.with_epsilon(pair_epsilon(i, j))
        profile = distributional_profile(trace, with_epsilon(grid, cfg.epsilon), structural, burn_in)
        profiles[(i, j)] = profile
        verdicts[(i, j)] = classify_pair(profile, cfg)
    return VerdictMatrix(tuple(labels), verdicts, profiles)


def scrambled_matrix(level, system: SystemMap, family: Sequence, horizon: int, deltas: Iterable,
                     config: Optional[ClassifierConfig] = None, metric=None, structural: Iterable[int] = (),
                     exact: bool = True, burn_in: Optional[int] = None) -> VerdictMatrix:
    """
    Pairwise verdicts over a finite family: a sampled stand-in for a scrambled set.
    :param level: Level of the family members
    :param family: at least two distinct points, CompactSets or StepFuzzySets
    :return: VerdictMatrix
    """
    family = list(family)
    if len(family) < 2:
        raise DomainError("A scrambled family needs at least two members")
    if len(set(family)) != len(family):
        raise DomainError("Scrambled families must not repeat members")
    traces = {(i, j): distance_trace(level, system, family[i], family[j], horizon, metric, exact)
              for i, j in combinations(range(len(family)), 2)}
    labels = [object_label(x) for x in family]
    logger.info(f"Classifying {len(traces)} pairs of a {len(family)}-member family at horizon {horizon}")
    return verdict_matrix(labels, traces, deltas, config, structural, burn_in=burn_in)


def canonical_embeddings(obj, universe: Optional[PointUniverse] = None):
    """
    x ↦ {x} and K ↦ χ_K.
    :param obj: point (with its universe) or CompactSet
    :return: CompactSet or StepFuzzySet
    """
    if isinstance(obj, CompactSet):
        return characteristic(obj)
    if isinstance(obj, StepFuzzySet):
        raise DomainError("Fuzzy sets have no further embedding")
    if universe is None:
        raise DomainError("Embedding a point needs its universe")
    return CompactSet(universe, frozenset([obj]))


def singleton_pair(universe: PointUniverse, x: Point, y: Point) -> tuple:
    """(K, L) = ({x}, {x, y}); d_H(f̄^j K, f̄^j L) = d(f^j x, f^j y)."""
    if x == y:
        raise DomainError("singleton_pair needs two distinct points")
    return CompactSet(universe, frozenset([x])), CompactSet(universe, frozenset([x, y]))


@dataclass(frozen=True)
class EmbeddingReport:
    horizon: int
    discrepancies: dict

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.discrepancies.values())

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "passed": self.passed,
                "max_discrepancy": jsonable(self.discrepancies)}


def embedding_consistency(system: SystemMap, a: Point, b: Point, horizon: int) -> EmbeddingReport:
    """
    The base trace of (a, b), the hyper trace of ({a}, {b}) and the fuzzy
    traces of (χ_{a}, χ_{b}) agree; the endograph trace is min(d_j, 1).
    """
    base = distance_trace(Level.BASE, system, a, b, horizon)
    Ka, Kb = canonical_embeddings(a, system.universe), canonical_embeddings(b, system.universe)
    hyper = distance_trace(Level.HYPER, system, Ka, Kb, horizon)
    ua, ub = canonical_embeddings(Ka), canonical_embeddings(Kb)
    discrepancies = {"hyper": max(abs(x - y) for x, y in zip(base.values, hyper.values))}
    for metric in FuzzyMetric:
        fuzzy = distance_trace(Level.FUZZY, system, ua, ub, horizon, metric)
        expected = base.values if metric is not FuzzyMetric.ENDOGRAPH else tuple(min(d, 1) for d in base.values)
        discrepancies[metric.value] = max(abs(x - y) for x, y in zip(expected, fuzzy.values))
    return EmbeddingReport(horizon, discrepancies)
