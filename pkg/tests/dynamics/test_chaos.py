from fractions import Fraction

import pytest

from fuzzdyn.dynamics.chaos import (ClassifierConfig, DistanceTrace, Level, bridge_check, checkpoint_schedule,
                                    classify_pair, density_estimate, distance_trace, distributional_profile,
                                    canonical_embeddings, embedding_consistency, scrambled_matrix, singleton_pair,
                                    transfer_check, transfer_trace, u_alpha_family, xi_map)
from fuzzdyn.dynamics.fuzzy import characteristic
from fuzzdyn.dynamics.hyper import CompactSet, hausdorff, hyper_apply
from fuzzdyn.errors import ConfigurationError, DomainError, PreconditionError

HALF = Fraction(1, 2)


def _trace(values) -> DistanceTrace:
    return DistanceTrace(Level.BASE, None, ("x", "y"), tuple(values))


@pytest.fixture
def blocky():
    """Zero on [1, 4] and [17, 64], one on [5, 16] and [65, 256]."""
    values = [0] * 4 + [1] * 12 + [0] * 48 + [1] * 192
    return _trace(values)


def test_base_trace_on_segment(segment):
    _, system = segment
    trace = distance_trace("base", system, (0, 0), (2, 0), 3)
    assert trace.values == (2, 1, 0)
    assert trace.name == "base"
    assert list(trace.to_frame().columns) == ["j", "d_j"]


def test_trace_arguments_are_checked(segment):
    universe, system = segment
    u = characteristic(CompactSet.of(universe, [(0, 0)]))
    with pytest.raises(DomainError):
        distance_trace(Level.FUZZY, system, u, u, 3)
    with pytest.raises(DomainError):
        distance_trace(Level.HYPER, system, u, u, 3)
    with pytest.raises(DomainError):
        distance_trace(Level.BASE, system, (0, 0), (1, 0), 0)
    assert Level.parse("HYPER") is Level.HYPER


def test_density_estimate_from_members_and_predicates():
    est = density_estimate([1, 2, 4, 8], 8, [4, 8])
    assert est.ratios == (Fraction(3, 4), HALF)
    assert est.lower == HALF and est.upper == Fraction(3, 4)
    assert density_estimate(lambda j: j % 2 == 0, 10, [10]).ratio(10) == HALF
    with pytest.raises(PreconditionError):
        density_estimate([1], 8, [9])


def test_checkpoint_schedule():
    assert checkpoint_schedule(16, burn_in=2) == (2, 4, 8, 16)
    assert checkpoint_schedule(16, structural=[5, 100], burn_in=2) == (2, 4, 5, 8, 16)


def test_below_is_strict_on_exact_values():
    trace = _trace([Fraction(1, 3), Fraction(1, 4)])
    profile = distributional_profile(trace, [Fraction(1, 3)], burn_in=1)
    assert profile.ratios[0] == (0, HALF)
    assert profile.phi_star(Fraction(1, 3)) == HALF


def test_alternating_profile():
    profile = distributional_profile(_trace([0, 1] * 8), [HALF], burn_in=1)
    assert profile.checkpoints == (1, 2, 4, 8, 16)
    assert profile.phi(HALF) == HALF
    assert profile.phi_star(HALF) == 1
    assert (profile.minimum, profile.argmin, profile.tail_max) == (0, 1, 1)
    with pytest.raises(DomainError):
        profile.phi(Fraction(1, 3))


def test_blocky_trace_is_distributionally_chaotic(blocky):
    profile = distributional_profile(blocky, ["1/4", "1/2", "1", "2"], burn_in=4)
    assert profile.phi(HALF) == Fraction(13, 64)
    assert profile.phi_star(HALF) == 1
    flags = classify_pair(profile).flags
    assert flags == {"proximal": True, "ly": True, "mly": True, "d1": False, "d1_5": False,
                     "d2": True, "d2_5": True, "d3": True}


def test_constant_trace_is_not_chaotic():
    profile = distributional_profile(_trace([1] * 64), ["1/4", "1/2", "2"])
    assert not any(classify_pair(profile).flags.values())


def test_epsilon_off_grid_is_undecided(blocky):
    profile = distributional_profile(blocky, ["1/4", "1", "2"], burn_in=4)
    verdict = classify_pair(profile)
    assert verdict["d1"].flag is None
    assert verdict["d1"].status == "insufficient-grid"
    assert verdict["d2_5"].flag is not None


def test_classifier_config_overrides():
    assert ClassifierConfig.from_config({"epsilon": "1"}).epsilon == 1
    with pytest.raises(ConfigurationError):
        ClassifierConfig.from_config({"bogus": 1})
    with pytest.raises(PreconditionError):
        classify_pair(distributional_profile(_trace([1] * 4), ["1"]), ClassifierConfig.from_config({"min_horizon": 8}))


def test_bridge_inequalities(blocky):
    assert bridge_check(blocky, 1, ["1/4", "1/2", "1"]).passed
    with pytest.raises(PreconditionError):
        bridge_check(blocky, HALF, ["1/4"])


def test_transfer_on_segment(segment):
    universe, system = segment
    K, L = CompactSet.of(universe, [(0, 0)]), CompactSet.of(universe, [(0, 0), (3, 0)])
    report = transfer_check(system, K, L, Fraction(3, 4), Fraction(1, 4), 4)
    assert report.passed
    assert report.hyper == (3, 2, 1, 0, 0)
    with pytest.raises(DomainError):
        transfer_check(system, L, K, Fraction(3, 4), Fraction(1, 4), 4)


def test_transfer_trace_caps_non_sup_metrics():
    base = _trace([2, 1, 0])
    assert transfer_trace(base, Fraction(3, 4), Fraction(1, 4), "endograph").values == (HALF, HALF, 0)
    assert transfer_trace(base, Fraction(3, 4), Fraction(1, 4), "sup").values == (2, 1, 0)
    fuzzy = DistanceTrace(Level.FUZZY, None, ("u", "v"), (1,))
    with pytest.raises(DomainError):
        transfer_trace(fuzzy, Fraction(3, 4), Fraction(1, 4), "sup")


def test_xi_map_and_family(segment):
    xi = xi_map(Fraction(3, 4), Fraction(1, 4))
    assert xi(Fraction(3, 4)) == Fraction(1, 4)
    assert xi.sup_deviation == HALF
    with pytest.raises(DomainError):
        xi_map(Fraction(1, 4), Fraction(3, 4))
    universe, _ = segment
    K = CompactSet.of(universe, [(0, 0)])
    (u,) = u_alpha_family(K, CompactSet.of(universe, [(0, 0), (1, 0)]), [HALF])
    assert u((1, 0)) == HALF and u((0, 0)) == 1
    with pytest.raises(DomainError):
        u_alpha_family(K, K, [HALF])


def test_embeddings_agree(segment):
    _, system = segment
    assert embedding_consistency(system, (0, 0), (3, 0), 5).passed


def test_canonical_embeddings(segment):
    universe, _ = segment
    K = canonical_embeddings((1, 0), universe)
    assert K == CompactSet.of(universe, [(1, 0)])
    assert canonical_embeddings(K) == characteristic(K)
    with pytest.raises(DomainError):
        canonical_embeddings((1, 0))
    with pytest.raises(DomainError):
        canonical_embeddings(characteristic(K))


def test_singleton_pair_tracks_the_base_distance(segment):
    universe, system = segment
    K, L = singleton_pair(universe, (0, 0), (2, 0))
    for _ in range(3):
        assert hausdorff(K, L) == universe.distance(min(K.points), max(L.points))
        K, L = hyper_apply(system, K), hyper_apply(system, L)
    assert hausdorff(K, L) == 0
    with pytest.raises(DomainError):
        singleton_pair(universe, (1, 0), (1, 0))


def test_scrambled_matrix_on_segment(segment):
    _, system = segment
    matrix = scrambled_matrix("base", system, [(0, 0), (1, 0), (2, 0)], 8, ["1/4", "1/2", "1"])
    assert matrix.count("proximal") == 3
    assert matrix.aggregate()["proximal"] is True
    frame = matrix.to_frame()
    assert list(frame.columns) == ["pair_i", "pair_j", "flag", "status", "evidence"]
    assert len(frame) == 3 * 8
    assert set(matrix.uniform_curve()) == {Fraction(1, 4), HALF, Fraction(1)}
    with pytest.raises(DomainError):
        scrambled_matrix("base", system, [(0, 0)], 8, ["1"])
