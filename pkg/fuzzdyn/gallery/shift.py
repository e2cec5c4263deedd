"""
Weighted backward shift T(x)_k = w·x_{k+1} on finitely supported rational
sequences with the distance Σ|x_k - y_k|.

For w > 1 the shift is sensitive (small bumps far down the sequence grow by
w^k before they fall off the front) while every orbit still reaches 0 after
finitely many steps. For 0 < w ≤ 1 it is a contraction and its extensions are
equicontinuous.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import loguru
import numpy as np

from fuzzdyn import config
from fuzzdyn.dynamics.chaos import (ClassifierConfig, Level, bridge_check, default_grid, distance_trace,
                                    transfer_check, transfer_trace, verdict_matrix)
from fuzzdyn.dynamics.fuzzy import StepFuzzySet, zadeh_apply
from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, hyper_apply
from fuzzdyn.dynamics.metrics import FuzzyMetric, sup_distance
from fuzzdyn.dynamics.proxsens import (BasisPerturbation, collective_witness, sensitivity_search,
                                       strong_sensitivity_window)
from fuzzdyn.dynamics.sampling import COORDINATE_DENOMINATOR, make_rng
from fuzzdyn.dynamics.spaces import (Number, PointKind, PointUniverse, SystemMap, iterate, parse_number,
                                     point_label)
from fuzzdyn.errors import ConfigurationError, DomainError, FuzzDynError
from fuzzdyn.gallery.claims import ClaimReport

logger = loguru.logger


@dataclass(frozen=True, order=True)
class ShiftVector:
    """
    Finitely supported sequence as sorted (index, coefficient) terms with
    non-zero coefficients.
    """
    terms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for k, c in self.terms:
            k, c = int(k), parse_number(c)
            if k < 0:
                raise DomainError(f"Sequence indices start at 0, got {k}")
            merged[k] = merged.get(k, 0) + c
        object.__setattr__(self, "terms", tuple(sorted((k, c) for k, c in merged.items() if c != 0)))

    @classmethod
    def zero(cls) -> "ShiftVector":
        return cls()

    @classmethod
    def basis(cls, k: int, c: Number = 1) -> "ShiftVector":
        """c·e_k"""
        return cls(((k, c),))

    @classmethod
    def of(cls, coefficients: Iterable) -> "ShiftVector":
        return cls(tuple(enumerate(coefficients)))

    def __add__(self, other: "ShiftVector") -> "ShiftVector":
        return ShiftVector(self.terms + other.terms)

    def __neg__(self) -> "ShiftVector":
        return ShiftVector(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: "ShiftVector") -> "ShiftVector":
        return self + (-other)

    def scale(self, c: Number) -> "ShiftVector":
        c = parse_number(c)
        return ShiftVector(tuple((k, c * x) for k, x in self.terms))

    def __getitem__(self, k: int) -> Number:
        return dict(self.terms).get(k, 0)

    @property
    def norm(self) -> Number:
        return sum((abs(c) for _, c in self.terms), Fraction(0))

    @property
    def max_index(self) -> Optional[int]:
        return self.terms[-1][0] if self.terms else None

    def shifted(self, weight: Number) -> "ShiftVector":
        """T(x)_k = w·x_{k+1}; the coefficient at index 0 falls off."""
        weight = parse_number(weight)
        return ShiftVector(tuple((k - 1, weight * c) for k, c in self.terms if k > 0))

    @property
    def label(self) -> str:
        if not self.terms:
            return "0"
        return "|".join(f"{k}:{point_label(c)}" for k, c in self.terms)

    @classmethod
    def parse(cls, text: str) -> "ShiftVector":
        text = text.strip()
        if text == "0":
            return cls()
        try:
            return cls(tuple((int(k), Fraction(c)) for k, c in (t.split(":") for t in text.split("|"))))
        except ValueError:
            raise DomainError(f"Cannot read a shift vector from {text!r}")


def _is_vector(x) -> bool:
    return isinstance(x, ShiftVector) and all(isinstance(c, (int, Fraction)) for _, c in x.terms)


def shift_universe(name: str = "finite-sequences") -> PointUniverse:
    return PointUniverse(name, PointKind.SEQUENCE, lambda x, y: (x - y).norm, _is_vector,
                         add=lambda x, y: x + y, zero=ShiftVector.zero())


def shift_map(weight: Number, universe: Optional[PointUniverse] = None) -> SystemMap:
    """
    Weighted backward shift for any positive weight.
    :param weight: w > 0
    :param universe: the sequence universe; a fresh one when omitted
    :return: SystemMap
    """
    weight = parse_number(weight)
    if weight <= 0:
        raise ConfigurationError(f"The shift weight must be positive, got {weight}")
    universe = universe or shift_universe()
    return SystemMap(universe, lambda x: x.shifted(weight), name=f"backward-shift[w={point_label(weight)}]")


def random_vector(rng: np.random.Generator, max_index: int = 8) -> ShiftVector:
    """Non-zero vector with coefficients on the 1/4 grid in [-1, 1]."""
    while True:
        size = int(rng.integers(1, max_index + 2))
        indices = rng.choice(max_index + 1, size=size, replace=False)
        numerators = rng.integers(-COORDINATE_DENOMINATOR, COORDINATE_DENOMINATOR + 1, size=size)
        x = ShiftVector(tuple((int(k), Fraction(int(c), COORDINATE_DENOMINATOR))
                              for k, c in zip(indices, numerators)))
        if x.terms:
            return x


def _shift_settings() -> dict:
    return config["shift"]


def shift_demo(weight=None, horizon: Optional[int] = None, delta=None, epsilons=None,
               seed: Optional[int] = None, samples: Optional[int] = None) -> ClaimReport:
    """
    Sensitivity of the weighted backward shift next to its null orbits.
      shift.sensitivity-<ε>  (δ/2)·e_k from the zero vector separates by more than ε
      shift.hyper-sensitivity and shift.fuzzy-sensitivity  same for {0} and χ_{0} at the first ε
      shift.strong-window    every time in the window carries a separating candidate
      shift.null-orbits      T^{m+1}x = 0 ≠ T^m x for sampled x with max index m
      shift.transfer         transfer formulas on K = {0}, L = {0, e_probe}
      shift.fuzzy-ly         the pair (u^β, u^α) is Li-Yorke at all four fuzzy metrics
      shift.bridge           mean/count inequalities along the hyper trace
      shift.collective       {0, e_1, e_2} is collectively separated by one small bump
    """
    settings = _shift_settings()
    weight = parse_number(weight if weight is not None else settings["weight"])
    if weight <= 1:
        raise ConfigurationError(f"shift_demo needs a weight > 1, got {weight}")
    horizon = int(horizon or settings["horizon"])
    delta = parse_number(delta if delta is not None else settings["delta"])
    epsilons = [parse_number(e) for e in (epsilons or settings["epsilons"])]
    samples = int(samples or settings["samples"])
    probe = int(settings["probe_index"])
    alpha, beta = parse_number(settings["alpha"]), parse_number(settings["beta"])
    rng = make_rng(seed if seed is not None else config["defaults"]["seed"])
    universe = shift_universe()
    system = shift_map(weight, universe)
    zero = universe.zero
    generator = BasisPerturbation(ShiftVector.basis, horizon + 1)
    report = ClaimReport(f"shift[w={point_label(weight)}]")

    for epsilon in epsilons:
        witness = sensitivity_search(Level.BASE, system, zero, delta, epsilon, horizon, generator)
        evidence = witness.to_dict() if witness else {"found": False}
        report.add(f"shift.sensitivity-{point_label(epsilon)}",
                   witness is not None and witness.revalidate(system), **evidence)

    K0 = CompactSet(universe, frozenset([zero]))
    witness = sensitivity_search(Level.HYPER, system, K0, delta, epsilons[0], horizon, generator)
    report.add("shift.hyper-sensitivity", witness is not None and witness.revalidate(system),
               n=witness.n if witness else None)
    u0 = StepFuzzySet.from_mapping(universe, {zero: 1})
    witness = sensitivity_search(Level.FUZZY, system, u0, delta, epsilons[0], horizon, generator,
                                 FuzzyMetric.SUP)
    report.add("shift.fuzzy-sensitivity", witness is not None and witness.revalidate(system),
               n=witness.n if witness else None)

    first = next((n for n in range(1, horizon + 1) if weight ** n * delta / 2 > epsilons[0]), None)
    if first is None:
        report.add("shift.strong-window", False, reason="no growth within the horizon")
    else:
        window = strong_sensitivity_window(Level.BASE, system, zero, delta, epsilons[0], first, horizon,
                                           generator)
        report.add("shift.strong-window", window.coverage == 1, n_from=first, n_to=horizon,
                   coverage=window.coverage)

    nulls = 0
    for _ in range(samples):
        x = random_vector(rng)
        m = x.max_index
        nulls += iterate(system, x, m + 1) == zero and iterate(system, x, m) != zero
    report.add("shift.null-orbits", nulls == samples, samples=samples, null=nulls)

    K = CompactSet(universe, frozenset([zero]))
    L = CompactSet(universe, frozenset([zero, ShiftVector.basis(probe)]))
    transfer = transfer_check(system, K, L, alpha, beta, horizon)
    report.add("shift.transfer", transfer.passed, levels_commute=transfer.levels_commute,
               max_discrepancy=transfer.discrepancies)

    trace = distance_trace(Level.HYPER, system, K, L, horizon)
    report.traces["hyper"] = trace
    classifier = ClassifierConfig.from_config()
    flagged = {}
    for metric in FuzzyMetric:
        fuzzy = transfer_trace(trace, alpha, beta, metric)
        report.traces[f"fuzzy:{metric.value}"] = fuzzy
        cfg = classifier.with_epsilon(min(classifier.epsilon, (alpha - beta) / 2))
        matrix = verdict_matrix(list(fuzzy.pair), {(0, 1): fuzzy}, default_grid(), cfg, burn_in=1)
        flagged[metric.value] = matrix.verdicts[(0, 1)]["ly"].flag
    report.add("shift.fuzzy-ly", all(flagged.values()), flags=flagged)

    bridge = bridge_check(trace, max(trace.values), default_grid())
    report.add("shift.bridge", bridge.passed, checked=bridge.checked, violations=len(bridge.violations))

    xs = [zero, ShiftVector.basis(1), ShiftVector.basis(2)]
    n = first or horizon
    bump = ShiftVector.basis(n, delta / 2)
    try:
        ys, collective = collective_witness(system, xs, bump, n, epsilons[0], delta)
        report.add("shift.collective", collective.passed, perturbed=[point_label(y) for y in ys],
                   **{k: v for k, v in collective.to_dict().items() if k != "passed"})
    except FuzzDynError as e:
        report.add("shift.collective", False, n=n, error=str(e))
    return report


def shift_contraction(weight, K: CompactSet, horizon: int) -> ClaimReport:
    """
    Power-bounded shift, 0 < w ≤ 1: d_H(T̄^n K, {0}) never increases and is 0
    from n = m + 1 on, m the largest support index in K; the sup distance of a
    fuzzy set over K to χ_{0} behaves the same.
    """
    weight = parse_number(weight)
    if not 0 < weight <= 1:
        raise ConfigurationError(f"shift_contraction needs 0 < w ≤ 1, got {weight}")
    if horizon < 1:
        raise DomainError(f"horizon must be ≥ 1, got {horizon}")
    universe = K.universe
    system = shift_map(weight, universe)
    zero = universe.zero
    origin = CompactSet(universe, frozenset([zero]))
    chi_zero = StepFuzzySet.from_mapping(universe, {zero: 1})
    points = sorted(K.points)
    u = StepFuzzySet.from_mapping(universe, {p: 1 if i == 0 else Fraction(1, 2) for i, p in enumerate(points)})
    m = max((p.max_index for p in points if p.terms), default=-1)

    hyper, fuzzy = [hausdorff(K, origin)], [sup_distance(u, chi_zero)]
    L = K
    for _ in range(horizon):
        L, u = hyper_apply(system, L), zadeh_apply(system, u)
        hyper.append(hausdorff(L, origin))
        fuzzy.append(sup_distance(u, chi_zero))
    report = ClaimReport(f"shift-contraction[w={point_label(weight)}]")
    report.add("contraction.monotone", all(a >= b for a, b in zip(hyper, hyper[1:]))
               and all(a >= b for a, b in zip(fuzzy, fuzzy[1:])), hyper=hyper[:8], fuzzy=fuzzy[:8])
    if m + 1 <= horizon:
        report.add("contraction.null", hyper[m + 1] == 0 and fuzzy[m + 1] == 0, steps=m + 1)
    else:
        logger.warning(f"Horizon {horizon} is shorter than the {m + 1} steps K needs to reach 0")
        report.add("contraction.null", False, steps=m + 1, horizon=horizon)
    return report
