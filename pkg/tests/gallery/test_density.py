from fractions import Fraction

import pytest

from fuzzdyn.dynamics.chaos import density_estimate
from fuzzdyn.errors import ConfigurationError
from fuzzdyn.gallery.density import DensityKind, DensitySetSpec

FACTORIAL = DensitySetSpec(DensityKind.FACTORIAL_BLOCKS)
SQUARED = DensitySetSpec("squared-exponents")
DOUBLING = DensitySetSpec("doubling-blocks")


def test_factorial_block_counts():
    assert FACTORIAL.count(5039) == 4420
    assert FACTORIAL.count(40319) == 4420
    assert FACTORIAL.count(40320) == 4421
    assert FACTORIAL.count(362879) == 326980
    assert 5 in FACTORIAL and 6 not in FACTORIAL and 40320 in FACTORIAL


def test_squared_exponents():
    assert [j for j in range(1, 600) if j in SQUARED] == [2, 16, 512]
    assert SQUARED.count(65535) == 3
    assert SQUARED.count(65536) == 4
    assert list(SQUARED.iter_members(65536)) == [2, 16, 512, 65536]


def test_doubling_blocks_oscillate_between_thirds():
    assert Fraction(DOUBLING.count(16383), 16383) == Fraction(1, 3)
    assert DOUBLING.count(8191) == 5461
    assert DOUBLING.expected_densities == (Fraction(1, 3), Fraction(2, 3))
    assert DOUBLING.edges(20) == (1, 3, 7, 15)


@pytest.mark.parametrize("spec", [FACTORIAL, SQUARED, DOUBLING, DensitySetSpec.custom([3, 1, 9])])
def test_membership_and_count_agree(spec):
    assert spec.consistent(1000)


def test_density_estimate_uses_exact_counts():
    est = density_estimate(FACTORIAL, 362879, [5039, 40319, 362879])
    assert est.ratio(40319) == Fraction(4420, 40319)
    assert est.upper == Fraction(326980, 362879)


def test_custom_sets_and_bad_configurations():
    assert DensitySetSpec.custom([3, 1, 1]).members == (1, 3)
    with pytest.raises(ConfigurationError):
        DensitySetSpec.custom([0])
    with pytest.raises(ConfigurationError):
        DensitySetSpec(DensityKind.FACTORIAL_BLOCKS, (1,))
    with pytest.raises(ConfigurationError):
        DensitySetSpec("bogus")
    with pytest.raises(ConfigurationError):
        list(SQUARED.blocks())


def test_from_config():
    assert DensitySetSpec.from_config(1).kind is DensityKind.FACTORIAL_BLOCKS
    assert DensitySetSpec.from_config(3).label == "doubling-blocks"
    with pytest.raises(ConfigurationError):
        DensitySetSpec.from_config(9)
