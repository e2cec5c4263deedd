"""
The four metrics on normal step fuzzy sets.

    sup         d∞(u, v) = sup_α d_H(u_α, v_α)
    skorokhod   d0(u, v) = inf over increasing homeomorphisms ξ of [0, 1] of
                max(sup|ξ - id|, d∞(u, ξ∘v))
    sendograph  Hausdorff distance between sendographs in X×[0, 1]
    endograph   Hausdorff distance between endographs in X×[0, 1]

X×[0, 1] carries the product metric max(d(x, y), |α - β|). All four are
computed exactly on rational universes.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from fuzzdyn.dynamics.fuzzy import StepFuzzySet, level_set, merged_levels
from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, same_universe
from fuzzdyn.dynamics.spaces import Number, PointUniverse, le, lt, parse_number
from fuzzdyn.errors import DomainError


class FuzzyMetric(str, Enum):
    SUP = "sup"
    SKOROKHOD = "skorokhod"
    SENDOGRAPH = "sendograph"
    ENDOGRAPH = "endograph"

    @classmethod
    def parse(cls, value) -> "FuzzyMetric":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"Unknown fuzzy metric {value!r}; choose from {[m.value for m in cls]}")


def _positive(x: Number) -> Number:
    return x if x > 0 else 0


def sup_distance(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    """
    Supremum metric. The α-levels of both sets are constant on the intervals
    between merged jump levels, so the sup is a max over those levels.
    """
    same_universe(u, v)
    return max(hausdorff(level_set(u, a), level_set(v, a)) for a in merged_levels(u, v))


def _directed_sendograph(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    d = u.universe.metric
    return max(min(max(d(x, y), _positive(ux - vy)) for y, vy in v.membership)
               for x, ux in u.membership)


def _directed_endograph(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    # X×{0} lies in every endograph, so (x, α) is never farther than α
    d = u.universe.metric
    return max(min(ux, min(max(d(x, y), _positive(ux - vy)) for y, vy in v.membership))
               for x, ux in u.membership)


def sendograph_distance(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    same_universe(u, v)
    return max(_directed_sendograph(u, v), _directed_sendograph(v, u))


def endograph_distance(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    same_universe(u, v)
    return max(_directed_endograph(u, v), _directed_endograph(v, u))


@dataclass(frozen=True)
class LevelStructure:
    """
    Jump levels a_1 < ... < a_p = 1 of a step fuzzy set together with the level
    set carried on each interval (a_{i-1}, a_i].
    """
    levels: tuple
    sets: tuple

    @classmethod
    def of(cls, u: StepFuzzySet) -> "LevelStructure":
        return cls(u.levels, tuple(level_set(u, a) for a in u.levels))


def level_hausdorff_matrix(u: StepFuzzySet, v: StepFuzzySet) -> list:
    """H[i][k] = d_H(u_{a_i}, v_{b_k}) over the jump levels of u and v."""
    us, vs = LevelStructure.of(u), LevelStructure.of(v)
    return [[hausdorff(U, V) for V in vs.sets] for U in us.sets]


def _alignment_feasible(a: Sequence[Number], b: Sequence[Number], H: list, eps: Number) -> bool:
    """
    Is there an increasing homeomorphism ξ with sup|ξ - id| ≤ eps and
    d∞(u, ξ∘v) ≤ eps?

    Walk the γ-axis cell by cell: cell (i, k) means u carries its i-th level set
    and ξ∘v its k-th. From (i, k) the next boundary is either a_i (move to
    (i+1, k)), the image c_k = ξ(b_k) of a v-jump strictly inside u's interval
    (move to (i, k+1), needs |c_k - b_k| ≤ eps to be realisable there) or both
    at once (c_k = a_i). Every visited cell must have H ≤ eps.
    """
    p, q = len(a), len(b)
    bounds = [0] + list(a)
    reach = [[False] * q for _ in range(p)]
    reach[0][0] = le(H[0][0], eps)
    for i in range(p):
        for k in range(q):
            if not reach[i][k]:
                continue
            if i + 1 < p and le(H[i + 1][k], eps):
                reach[i + 1][k] = True
            if k + 1 < q:
                inside = lt(b[k] - eps, bounds[i + 1]) and lt(bounds[i], b[k] + eps)
                if inside and le(H[i][k + 1], eps):
                    reach[i][k + 1] = True
                if i + 1 < p and le(abs(a[i] - b[k]), eps) and le(H[i + 1][k + 1], eps):
                    reach[i + 1][k + 1] = True
    return reach[p - 1][q - 1]


def skorokhod_distance(u: StepFuzzySet, v: StepFuzzySet) -> Number:
    """
    Exact Skorokhod distance of two step fuzzy sets.

    Feasibility of a tolerance eps only changes at the critical values: the
    entries of the level Hausdorff matrix and the gaps between jump levels
    (including 0). Bisection over the sorted critical values finds the first
    one above which alignment is feasible; that value is the infimum.
    """
    same_universe(u, v)
    a, b = u.levels, v.levels
    H = level_hausdorff_matrix(u, v)
    marks = set(a) | set(b) | {0}
    critical = {0} | {h for row in H for h in row} | {abs(x - y) for x in marks for y in marks}
    values = sorted(critical)

    def probe(index: int) -> Number:
        if index + 1 < len(values):
            return (values[index] + values[index + 1]) / 2
        return values[index] + 1

    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _alignment_feasible(a, b, H, probe(mid)):
            hi = mid
        else:
            lo = mid + 1
    return values[lo]


@dataclass(frozen=True)
class Reparametrization:
    """
    Increasing piecewise-linear homeomorphism of [0, 1] through the given knots.
    Knots always include (0, 0) and (1, 1).
    """
    knots: tuple

    def __post_init__(self):
        knots = tuple(sorted({(parse_number(x), parse_number(y)) for x, y in self.knots} | {(0, 0), (1, 1)}))
        xs = [x for x, _ in knots]
        ys = [y for _, y in knots]
        if any(x0 >= x1 for x0, x1 in zip(xs, xs[1:])) or any(y0 >= y1 for y0, y1 in zip(ys, ys[1:])):
            raise DomainError(f"Knots do not define an increasing homeomorphism: {knots}")
        if xs[0] != 0 or xs[-1] != 1 or ys[0] != 0 or ys[-1] != 1:
            raise DomainError("Reparametrizations must fix 0 and 1")
        object.__setattr__(self, "knots", knots)

    def __call__(self, gamma: Number) -> Number:
        gamma = parse_number(gamma)
        if not 0 <= gamma <= 1:
            raise DomainError(f"{gamma} is outside [0, 1]")
        for (x0, y0), (x1, y1) in zip(self.knots, self.knots[1:]):
            if gamma <= x1:
                return y0 + (y1 - y0) * (gamma - x0) / (x1 - x0)
        return 1

    @property
    def sup_deviation(self) -> Number:
        """sup|ξ(γ) - γ|; attained at a knot since ξ - id is piecewise linear."""
        return max(abs(y - x) for x, y in self.knots)

    def inverse(self) -> "Reparametrization":
        return Reparametrization(tuple((y, x) for x, y in self.knots))

    def compose(self, v: StepFuzzySet) -> StepFuzzySet:
        """ξ∘v as a fuzzy set."""
        return StepFuzzySet.from_mapping(v.universe, {x: self(level) for x, level in v.membership})


def skorokhod_candidate(u: StepFuzzySet, v: StepFuzzySet, xi: Reparametrization) -> Number:
    """max(sup|ξ - id|, d∞(u, ξ∘v)): an upper bound of d0(u, v) witnessed by ξ."""
    return max(xi.sup_deviation, sup_distance(u, xi.compose(v)))


def fuzzy_distance(metric, u: StepFuzzySet, v: StepFuzzySet) -> Number:
    """
    Distance between two step fuzzy sets.
    :param metric: FuzzyMetric or its name
    :param u: StepFuzzySet
    :param v: StepFuzzySet over the same universe
    :return: exact distance on rational universes
    """
    metric = FuzzyMetric.parse(metric)
    if not isinstance(u, StepFuzzySet) or not isinstance(v, StepFuzzySet):
        raise DomainError("fuzzy_distance compares two StepFuzzySets")
    if metric is FuzzyMetric.SUP:
        return sup_distance(u, v)
    if metric is FuzzyMetric.SKOROKHOD:
        return skorokhod_distance(u, v)
    if metric is FuzzyMetric.SENDOGRAPH:
        return sendograph_distance(u, v)
    return endograph_distance(u, v)


def graph_cloud(u: StepFuzzySet, which, resolution: int,
                base: Optional[CompactSet] = None) -> frozenset:
    """
    Finite sample of the sendograph or endograph of u on the level grid k/resolution.
    For the endograph the caller passes ``base`` (usually the union of both
    supports) whose points are added at level 0.
    :param u: StepFuzzySet
    :param which: 'sendograph' or 'endograph'
    :param resolution: number of grid steps per unit level
    :param base: extra level-0 points for endographs
    :return: frozenset of (point, level)
    """
    which = FuzzyMetric.parse(which)
    if which not in (FuzzyMetric.SENDOGRAPH, FuzzyMetric.ENDOGRAPH):
        raise DomainError(f"graph_cloud samples sendographs or endographs, not {which.value}")
    if resolution < 1:
        raise DomainError(f"resolution must be ≥ 1, got {resolution}")
    cloud = set()
    for x, level in u.membership:
        k = 0
        while Fraction(k, resolution) <= level:
            cloud.add((x, Fraction(k, resolution)))
            k += 1
    if which is FuzzyMetric.ENDOGRAPH and base is not None:
        cloud.update((x, Fraction(0)) for x in base.points)
    return frozenset(cloud)


def cloud_distance(universe: PointUniverse, C: Iterable, D: Iterable) -> Number:
    """Hausdorff distance between two finite clouds in X×[0, 1]."""
    d = universe.metric
    C, D = list(C), list(D)

    def directed(P, Q):
        return max(min(max(d(x, y), abs(a - b)) for y, b in Q) for x, a in P)

    return max(directed(C, D), directed(D, C))
