"""
Three shift systems on ℕ_0 × Y whose hyperspace and fuzzy extensions behave
differently from the base system.

All three use f((n_1, n_2)) = (n_1 + 1, n_2) and a metric that is |n_1 - m_1|
(or |2^{n_1} - 2^{m_1}|) across columns and depends on membership of the
column in a density set A within a column:

    example 1   Y = {0, 1}         within column n: 1/n on A, 1 off A
    example 2   Y = [0, 1] ∩ ℚ     within column n: n on A, 1/2^n off A
    example 3   Y = [0, 1] ∩ ℚ     within column n: 1 on A, 2 off A
"""
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

import loguru
import numpy as np

from fuzzdyn import config
from fuzzdyn.dynamics.checks import SuiteReport
from fuzzdyn.dynamics.chaos import (ClassifierConfig, Level, bridge_check, default_burn_in, default_grid,
                                    distance_trace, distributional_profile, singleton_pair, transfer_check,
                                    transfer_trace, verdict_matrix)
from fuzzdyn.dynamics.fuzzy import StepFuzzySet
from fuzzdyn.dynamics.hyper import CompactSet
from fuzzdyn.dynamics.metrics import FuzzyMetric, endograph_distance
from fuzzdyn.dynamics.sampling import make_rng, random_alpha_beta, random_levels
from fuzzdyn.dynamics.spaces import (Number, PointKind, PointUniverse, SystemMap, parse_number,
                                     point_label)
from fuzzdyn.errors import ConfigurationError, PreconditionError
from fuzzdyn.gallery.claims import ClaimReport
from fuzzdyn.gallery.density import DensityKind, DensitySetSpec
from fuzzdyn.gallery.shift import random_vector, shift_map, shift_universe

logger = loguru.logger

ACCEPTED_KINDS = {
    1: {DensityKind.FACTORIAL_BLOCKS},
    2: {DensityKind.SQUARED_EXPONENTS},
    3: {DensityKind.DOUBLING_BLOCKS, DensityKind.FACTORIAL_BLOCKS},
}


def example_settings(which: int) -> dict:
    try:
        return config["examples"][int(which)]
    except (KeyError, ValueError):
        raise ConfigurationError(f"Unknown example {which!r}; choose 1, 2 or 3")


def _is_column(n) -> bool:
    return isinstance(n, int) and not isinstance(n, bool) and n >= 0


def _binary_point(p) -> bool:
    return isinstance(p, tuple) and len(p) == 2 and _is_column(p[0]) and p[1] in (0, 1) \
        and not isinstance(p[1], bool)


def _rational_point(p) -> bool:
    return isinstance(p, tuple) and len(p) == 2 and _is_column(p[0]) \
        and isinstance(p[1], (int, Fraction)) and not isinstance(p[1], bool) and 0 <= p[1] <= 1


def _example1_metric(A: DensitySetSpec):
    def d(p, q) -> Number:
        if p == q:
            return 0
        (n1, _), (m1, _) = p, q
        if n1 != m1:
            return abs(n1 - m1)
        return Fraction(1, n1) if n1 in A else 1
    return d


def _example2_metric(A: DensitySetSpec):
    def d(p, q) -> Number:
        if p == q:
            return 0
        (n1, _), (m1, _) = p, q
        if n1 != m1:
            return abs((1 << n1) - (1 << m1))
        return n1 if n1 in A else Fraction(1, 1 << n1)
    return d


def _example3_metric(A: DensitySetSpec):
    def d(p, q) -> Number:
        if p == q:
            return 0
        (n1, _), (m1, _) = p, q
        if n1 != m1:
            return abs(n1 - m1)
        return 1 if n1 in A else 2
    return d


def build_example(which: int, A: Optional[DensitySetSpec] = None) -> tuple:
    """
    Universe and column shift of example 1, 2 or 3.
    :param which: example id
    :param A: density set; the configured one when omitted
    :return: (PointUniverse, SystemMap)
    """
    which = int(which)
    example_settings(which)
    A = A if A is not None else DensitySetSpec.from_config(which)
    if A.kind not in ACCEPTED_KINDS[which]:
        raise ConfigurationError(f"Example {which} cannot use a {A.kind.value} density set")
    if which == 1:
        universe = PointUniverse(f"example-1[{A.label}]", PointKind.NAT_BINARY, _example1_metric(A), _binary_point)
    elif which == 2:
        universe = PointUniverse(f"example-2[{A.label}]", PointKind.NAT_RATIONAL, _example2_metric(A),
                                 _rational_point)
    else:
        universe = PointUniverse(f"example-3[{A.label}]", PointKind.NAT_RATIONAL, _example3_metric(A),
                                 _rational_point)
    system = SystemMap(universe, lambda p: (p[0] + 1, p[1]), name="column-shift")
    logger.debug(f"Built {universe.name}")
    return universe, system


def system_from_config(which: int) -> tuple:
    """(universe, system, density set) for the configured example."""
    A = DensitySetSpec.from_config(which)
    universe, system = build_example(which, A)
    return universe, system, A


def columns(obj) -> frozenset:
    """P_1 of a point, compact set or fuzzy set support."""
    if isinstance(obj, StepFuzzySet):
        obj = obj.support
    if isinstance(obj, CompactSet):
        return frozenset(p[0] for p in obj.points)
    return frozenset([obj[0]])


def column_maxima(u: StepFuzzySet) -> dict:
    """n ↦ max{u(x) : P_1(x) = n}."""
    out: dict = {}
    for (n1, _), level in u.membership:
        out[n1] = max(out.get(n1, 0), level)
    return out


def column_margin(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    """Largest gap between column maxima; positive iff some α-level has different columns."""
    cu, cv = column_maxima(u), column_maxima(v)
    return max(abs(cu.get(n, 0) - cv.get(n, 0)) for n in set(cu) | set(cv))


def _is_constant(values: Sequence) -> bool:
    return all(v == values[0] for v in values)


def structural_checkpoints(A: DensitySetSpec, horizon: int, explicit: Sequence[int] = ()) -> tuple:
    """Explicit checkpoints plus the edges of A past the burn-in."""
    burn_in = default_burn_in(horizon)
    return tuple(int(m) for m in explicit) + tuple(m for m in A.edges(horizon) if m >= burn_in)


def _random_pair(rng: np.random.Generator, width: int) -> tuple:
    a, b = rng.choice(width, size=2, replace=False)
    return (int(a), int(rng.integers(0, 2))), (int(b), int(rng.integers(0, 2)))


def _random_compact(rng: np.random.Generator, universe: PointUniverse, width: int, heights: Sequence) -> CompactSet:
    cells = [(n, h) for n in range(width) for h in heights]
    size = int(rng.integers(1, min(4, len(cells)) + 1))
    picked = rng.choice(len(cells), size=size, replace=False)
    return CompactSet(universe, frozenset(cells[int(i)] for i in picked))


def _random_column_fuzzy(rng: np.random.Generator, universe: PointUniverse, width: int,
                         heights: Sequence) -> StepFuzzySet:
    K = _random_compact(rng, universe, width, heights)
    points = list(K)
    levels = random_levels(rng, int(rng.integers(1, len(points) + 1)))
    membership = {p: levels[i] if i < len(levels) else levels[int(rng.integers(0, len(levels)))]
                  for i, p in enumerate(points)}
    membership[points[int(rng.integers(0, len(points)))]] = Fraction(1)
    return StepFuzzySet.from_mapping(universe, membership)


def verify_example1(horizon: Optional[int] = None, checkpoints: Optional[Sequence[int]] = None,
                    seed: Optional[int] = None, samples: Optional[int] = None,
                    alphas: Optional[Sequence] = None) -> ClaimReport:
    """
    Example 1 at a finite horizon.
      1.density        counting oracle and trace ratios agree at the checkpoints
      1.base-d1        ((0,0), (0,1)) classified D1 at ε
      1.bridge         mean/count inequalities along the base trace (r = 1)
      1.base-constant  sampled pairs in different columns have constant traces
      1.hyper-constant sampled compact pairs with different columns have constant traces
      1.transfer       transfer formulas exact on the u^α family at the constancy horizon
      1.fuzzy-d1       the u^α family is pairwise D1 at all four fuzzy metrics
    """
    settings = example_settings(1)
    horizon = int(horizon or settings["horizon"])
    checkpoints = tuple(int(m) for m in (checkpoints or settings["checkpoints"]))
    if checkpoints and max(checkpoints) > horizon:
        raise PreconditionError(f"horizon {horizon} is below the last checkpoint {max(checkpoints)}")
    samples = int(samples or settings["samples"])
    alphas = sorted(parse_number(a) for a in (alphas or settings["alphas"]))
    short = int(settings["constancy_horizon"])
    rng = make_rng(seed if seed is not None else config["defaults"]["seed"])
    universe, system, A = system_from_config(1)
    structural = structural_checkpoints(A, horizon, checkpoints)
    epsilon = parse_number(settings["epsilon"])
    classifier = ClassifierConfig.from_config({"epsilon": epsilon})
    grid = default_grid()
    report = ClaimReport("example-1")

    trace = distance_trace(Level.BASE, system, (0, 0), (0, 1), horizon)
    report.traces["base"] = trace
    profile = distributional_profile(trace, grid, structural)
    delta_one = profile.index(1)
    expected = {m: Fraction(A.count(m), m) for m in checkpoints}
    observed = {m: profile.ratios[delta_one][profile.checkpoints.index(m)] for m in checkpoints}
    report.add("1.density", expected == observed,
               ratios={str(m): observed[m] for m in checkpoints},
               oracle={str(m): expected[m] for m in checkpoints})

    base = verdict_matrix(["(0,0)", "(0,1)"], {(0, 1): trace}, grid, classifier, structural)
    verdict = base.verdicts[(0, 1)]
    report.add("1.base-d1", verdict["d1"].flag is True, **verdict["d1"].values)

    bridge = bridge_check(trace, 1, grid)
    report.add("1.bridge", bridge.passed, checked=bridge.checked, violations=len(bridge.violations))

    constant = 0
    for _ in range(samples):
        x, y = _random_pair(rng, 20)
        values = distance_trace(Level.BASE, system, x, y, short).values
        constant += _is_constant(values) and values[0] == abs(x[0] - y[0])
    report.add("1.base-constant", constant == samples, samples=samples, constant=constant)

    constant, tried = 0, 0
    while tried < samples:
        K = _random_compact(rng, universe, 6, (0, 1))
        L = _random_compact(rng, universe, 6, (0, 1))
        if columns(K) == columns(L):
            continue
        tried += 1
        constant += _is_constant(distance_trace(Level.HYPER, system, K, L, short).values)
    report.add("1.hyper-constant", constant == samples, samples=samples, constant=constant)

    K, L = singleton_pair(universe, (0, 0), (0, 1))
    transfers = [transfer_check(system, K, L, a, b, short) for b, a in combinations(alphas, 2)]
    report.add("1.transfer", all(t.passed for t in transfers), pairs=len(transfers),
               failing=[(point_label(t.alpha), point_label(t.beta)) for t in transfers if not t.passed])

    labels = [f"u^{point_label(a)}" for a in alphas]
    flagged = {}
    for metric in FuzzyMetric:
        traces = {(i, j): transfer_trace(trace, alphas[j], alphas[i], metric)
                  for i, j in combinations(range(len(alphas)), 2)}
        if metric is FuzzyMetric.SUP:
            matrix = verdict_matrix(labels, traces, grid, classifier, structural)
        else:
            matrix = verdict_matrix(labels, traces, grid, classifier, structural,
                                    pair_epsilon=lambda i, j: (alphas[j] - alphas[i]) / 2)
        flagged[metric.value] = matrix.count("d1")
    pairs = len(alphas) * (len(alphas) - 1) // 2
    report.add("1.fuzzy-d1", all(c == pairs for c in flagged.values()), pairs=pairs, flagged=flagged)
    return report


def example1_exhaustive(window: Optional[int] = None, horizon: Optional[int] = None) -> ClaimReport:
    """
    Every compact set inside {0..window} × {0, 1}:
      1.exhaustive-constant  pairs with different columns have constant hyper traces
      1.exhaustive-count     exactly 3^ℓ compact sets share the ℓ columns of each K
    """
    settings = example_settings(1)
    window = int(settings["exhaustive_window"] if window is None else window)
    horizon = int(horizon or settings["exhaustive_horizon"])
    universe, system, _ = system_from_config(1)
    cells = [(n, h) for n in range(window + 1) for h in (0, 1)]
    family = [CompactSet(universe, frozenset(c for c, keep in zip(cells, mask) if keep))
              for mask in product((False, True), repeat=len(cells)) if any(mask)]
    by_columns: dict = {}
    for K in family:
        by_columns.setdefault(columns(K), []).append(K)
    report = ClaimReport("example-1-exhaustive")
    counts_ok = all(len(group) == 3 ** len(cols) for cols, group in by_columns.items())
    report.add("1.exhaustive-count", counts_ok, sets=len(family), column_sets=len(by_columns))
    checked, constant = 0, 0
    for K, L in combinations(family, 2):
        if columns(K) == columns(L):
            continue
        checked += 1
        constant += _is_constant(distance_trace(Level.HYPER, system, K, L, horizon).values)
    report.add("1.exhaustive-constant", checked == constant, pairs=checked, constant=constant,
               horizon=horizon)
    return report


def verify_example2(horizon: Optional[int] = None, seed: Optional[int] = None,
                    samples: Optional[int] = None) -> ClaimReport:
    """
    Example 2 at a finite horizon.
      2.mean-low       Cesàro mean of the base trace ≤ 0.01 at n = 2^16 - 1
      2.mean-high      Cesàro mean ≥ 1 at n = 512 and n = 2^16
      2.base-mly       the family {0} × Y is pairwise MLY at ε
      2.case1-bound    pairs with different columns at some level keep d_E ≥ the column margin
      2.case2-bound    pairs with equal columns at every level: d_E ≤ 2^{-min column} off A
      2.case2-mean     the two-point Case-2 pair has endograph Cesàro mean ≤ 0.01 at 2^16 - 1
    """
    settings = example_settings(2)
    horizon = int(horizon or settings["horizon"])
    if horizon < 2 ** 16:
        raise PreconditionError(f"Example 2 needs a horizon of at least 65536, got {horizon}")
    samples = int(samples or settings["samples"])
    short = int(settings["case_horizon"])
    rng = make_rng(seed if seed is not None else config["defaults"]["seed"])
    universe, system, A = system_from_config(2)
    epsilon = parse_number(settings["epsilon"])
    classifier = ClassifierConfig.from_config({"epsilon": epsilon})
    structural = structural_checkpoints(A, horizon, settings["checkpoints"])
    report = ClaimReport("example-2")

    trace = distance_trace(Level.BASE, system, (0, 0), (0, 1), horizon, exact=False)
    report.traces["base"] = trace
    profile = distributional_profile(trace, default_grid(), structural)
    low, high = profile.mean(2 ** 16 - 1), [profile.mean(512), profile.mean(2 ** 16)]
    report.add("2.mean-low", low <= 0.01, mean=low, n=2 ** 16 - 1)
    report.add("2.mean-high", min(high) >= 1, means={"512": high[0], "65536": high[1]})

    family = [(0, parse_number(t)) for t in settings["family"]]
    traces = {(i, j): trace for i, j in combinations(range(len(family)), 2)}
    matrix = verdict_matrix([point_label(p) for p in family], traces, default_grid(), classifier, structural)
    report.add("2.base-mly", matrix.aggregate()["mly"] is True, pairs=len(traces), flagged=matrix.count("mly"))

    heights = (0, Fraction(1, 2), 1)
    case1_ok, case1, case2_ok, case2 = True, 0, True, 0
    while case1 < samples or case2 < samples:
        u = _random_column_fuzzy(rng, universe, 4, heights)
        v = _random_column_fuzzy(rng, universe, 4, heights)
        if u == v:
            continue
        margin = column_margin(u, v)
        if margin > 0 and case1 < samples:
            case1 += 1
            values = distance_trace(Level.FUZZY, system, u, v, short, FuzzyMetric.ENDOGRAPH).values
            case1_ok = case1_ok and endograph_distance(u, v) >= margin and min(values) >= margin
        elif margin == 0 and case2 < samples:
            case2 += 1
            case2_ok = case2_ok and _case2_bound_holds(system, A, u, v, short)
    report.add("2.case1-bound", case1_ok, samples=case1, horizon=short)
    report.add("2.case2-bound", case2_ok, samples=case2, horizon=short)

    u = StepFuzzySet.from_mapping(universe, {(0, 0): 1})
    v = StepFuzzySet.from_mapping(universe, {(0, 0): Fraction(1, 2), (0, 1): 1})
    fuzzy = distance_trace(Level.FUZZY, system, u, v, horizon, FuzzyMetric.ENDOGRAPH, exact=False)
    report.traces["fuzzy:endograph"] = fuzzy
    mean = float(fuzzy.array[:2 ** 16 - 1].mean())
    report.add("2.case2-mean", mean <= 0.01, mean=mean, n=2 ** 16 - 1)
    return report


def _case2_bound_holds(system: SystemMap, A: DensitySetSpec, u: StepFuzzySet, v: StepFuzzySet,
                       horizon: int) -> bool:
    trace = distance_trace(Level.FUZZY, system, u, v, horizon, FuzzyMetric.ENDOGRAPH)
    base = columns(u)
    for j, value in enumerate(trace.values, start=1):
        shifted = [n + j for n in base]
        if not any(n in A for n in shifted) and value > Fraction(1, 1 << min(shifted)):
            return False
    return True


def verify_example3(horizon: Optional[int] = None, trials: Optional[int] = None,
                    seed: Optional[int] = None) -> ClaimReport:
    """
    Example 3 at a finite horizon.
      3.base-d3    the family {0} × Y is pairwise D3 on the configured window
      3.phi        Φ̂(3/2) within 0.05 of 1/3 and Φ̂*(3/2) within 0.05 of 2/3
      3.bridge     mean/count inequalities along the base trace (r = 2)
      3.isometry   d_E(f̂^j u, f̂^j v) = d_E(u, v) for j ≤ 32 on random pairs
      3.beta       d_E(u, v) = max|u - v| on the same pairs
    """
    settings = example_settings(3)
    horizon = int(horizon or settings["horizon"])
    trials = int(settings["trials"] if trials is None else trials)
    if trials < 1:
        raise PreconditionError(f"trials must be ≥ 1, got {trials}")
    rng = make_rng(seed if seed is not None else config["defaults"]["seed"])
    universe, system, A = system_from_config(3)
    epsilon = parse_number(settings["epsilon"])
    window = tuple(settings["d3_window"])
    classifier = ClassifierConfig.from_config({"epsilon": epsilon, "d3_window": window})
    structural = structural_checkpoints(A, horizon, settings["checkpoints"])
    grid = default_grid()
    report = ClaimReport("example-3")

    trace = distance_trace(Level.BASE, system, (0, 0), (0, 1), horizon)
    report.traces["base"] = trace
    family = [(0, parse_number(t)) for t in settings["family"]]
    traces = {(i, j): trace for i, j in combinations(range(len(family)), 2)}
    matrix = verdict_matrix([point_label(p) for p in family], traces, grid, classifier, structural)
    report.add("3.base-d3", matrix.aggregate()["d3"] is True, pairs=len(traces), flagged=matrix.count("d3"))

    profile = matrix.profiles[(0, 1)]
    delta = Fraction(3, 2)
    lower, upper = profile.phi(delta), profile.phi_star(delta)
    report.add("3.phi", abs(lower - Fraction(1, 3)) <= 0.05 and abs(upper - Fraction(2, 3)) <= 0.05,
               phi_lower=lower, phi_upper=upper)

    bridge = bridge_check(trace, 2, grid)
    report.add("3.bridge", bridge.passed, checked=bridge.checked, violations=len(bridge.violations))

    steps = int(settings["isometry_horizon"])
    heights = [Fraction(k, 3) for k in range(4)]
    isometric, matches_beta, done = 0, 0, 0
    while done < trials:
        u = _random_column_fuzzy(rng, universe, 4, heights)
        v = _random_column_fuzzy(rng, universe, 4, heights)
        if u == v:
            continue
        done += 1
        start = endograph_distance(u, v)
        values = distance_trace(Level.FUZZY, system, u, v, steps, FuzzyMetric.ENDOGRAPH).values
        isometric += all(value == start for value in values)
        points = u.support.points | v.support.points
        matches_beta += start == max(abs(u(x) - v(x)) for x in points)
    report.add("3.isometry", isometric == trials, trials=trials, horizon=steps, isometric=isometric)
    report.add("3.beta", matches_beta == trials, trials=trials, matches=matches_beta)
    return report


def _random_nested(rng: np.random.Generator, draw) -> tuple:
    L = draw()
    while len(L) < 2:
        L = draw()
    inner = list(L)
    picked = rng.choice(len(inner), size=int(rng.integers(1, len(inner))), replace=False)
    return CompactSet(L.universe, frozenset(inner[int(i)] for i in picked)), L


def transfer_suite(rng: np.random.Generator, trials: int, horizon: int = 64) -> SuiteReport:
    """
    transfer_check on random strict pairs K ⊊ L and levels 0 < β < α < 1,
    cycling through examples 1 and 3 and the weighted backward shift.
    """
    ex1, sys1, _ = system_from_config(1)
    ex3, sys3, _ = system_from_config(3)
    seq = shift_universe()
    shift = shift_map(config["shift"]["weight"], seq)
    thirds = [Fraction(k, 3) for k in range(4)]
    draws = [
        ("example-1", sys1, lambda: _random_compact(rng, ex1, 6, (0, 1))),
        ("example-3", sys3, lambda: _random_compact(rng, ex3, 6, thirds)),
        ("shift", shift, lambda: CompactSet(seq, frozenset(random_vector(rng, 4)
                                                           for _ in range(int(rng.integers(1, 4)))))),
    ]
    report = SuiteReport("transfer", trials)
    for t in range(trials):
        name, system, draw = draws[t % len(draws)]
        K, L = _random_nested(rng, draw)
        alpha, beta = random_alpha_beta(rng)
        result = transfer_check(system, K, L, alpha, beta, horizon)
        report.record(f"transfer-{name}", t, result.passed,
                      f"{K.label} {L.label} α={point_label(alpha)} β={point_label(beta)} "
                      f"{result.discrepancies}")
    return report
