"""
Sets of naturals with known lower and upper densities, with exact counting.
"""
import bisect
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np

from fuzzdyn import config
from fuzzdyn.errors import ConfigurationError


class DensityKind(str, Enum):
    FACTORIAL_BLOCKS = "factorial-blocks"
    SQUARED_EXPONENTS = "squared-exponents"
    DOUBLING_BLOCKS = "doubling-blocks"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value) -> "DensityKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigurationError(f"Unknown density set kind {value!r}; choose from {[k.value for k in cls]}")


@dataclass(frozen=True)
class DensitySetSpec:
    """
    A ⊂ ℕ given by kind:
        factorial-blocks   ⋃_{k≥1} [(2k)!, (2k+1)!)        lower density 0, upper 1
        squared-exponents  {2^{k²} : k ≥ 1}                 density 0
        doubling-blocks    ⋃_{k≥0} [4^k, 2·4^k)             lower 1/3, upper 2/3
        custom             an explicit finite list
    Membership and the prefix count |A ∩ [1, m]| are exact.
    """
    kind: DensityKind
    members: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", DensityKind.parse(self.kind))
        if self.kind is DensityKind.CUSTOM:
            members = tuple(sorted(set(int(j) for j in self.members)))
            if any(j < 1 for j in members):
                raise ConfigurationError("Custom density sets contain positive integers only")
            object.__setattr__(self, "members", members)
        elif self.members:
            raise ConfigurationError(f"Only custom density sets take explicit members, not {self.kind.value}")

    @classmethod
    def custom(cls, members: Iterable[int]) -> "DensitySetSpec":
        return cls(DensityKind.CUSTOM, tuple(members))

    @classmethod
    def from_config(cls, which) -> "DensitySetSpec":
        """The density set configured for example 1, 2 or 3."""
        try:
            kind = config["examples"][int(which)]["density"]
        except (KeyError, ValueError):
            raise ConfigurationError(f"No density set configured for example {which!r}")
        if isinstance(kind, list):
            return cls.custom(kind)
        return cls(kind)

    def blocks(self) -> Iterator[tuple]:
        """Half-open blocks [lo, hi) of block kinds, increasing, without end."""
        if self.kind is DensityKind.FACTORIAL_BLOCKS:
            k = 1
            while True:
                yield math.factorial(2 * k), math.factorial(2 * k + 1)
                k += 1
        elif self.kind is DensityKind.DOUBLING_BLOCKS:
            k = 0
            while True:
                yield 4 ** k, 2 * 4 ** k
                k += 1
        else:
            raise ConfigurationError(f"{self.kind.value} sets are not made of blocks")

    def __contains__(self, j) -> bool:
        j = int(j)
        if j < 1:
            return False
        if self.kind is DensityKind.SQUARED_EXPONENTS:
            if j & (j - 1):
                return False
            e = j.bit_length() - 1
            return e >= 1 and math.isqrt(e) ** 2 == e
        if self.kind is DensityKind.CUSTOM:
            i = bisect.bisect_left(self.members, j)
            return i < len(self.members) and self.members[i] == j
        for lo, hi in self.blocks():
            if j < lo:
                return False
            if j < hi:
                return True
        return False

    def count(self, m: int) -> int:
        """|A ∩ [1, m]|."""
        m = int(m)
        if m < 1:
            return 0
        if self.kind is DensityKind.SQUARED_EXPONENTS:
            # 2^{k²} ≤ m  ⇔  k² ≤ log2(m)
            return math.isqrt(m.bit_length() - 1)
        if self.kind is DensityKind.CUSTOM:
            return bisect.bisect_right(self.members, m)
        total = 0
        for lo, hi in self.blocks():
            if lo > m:
                break
            total += min(m, hi - 1) - lo + 1
        return total

    def edges(self, limit: int) -> tuple:
        """
        Checkpoints where the prefix ratio turns: the last integer before each
        block and the last integer of each block, or each member and its predecessor.
        """
        points = set()
        if self.kind in (DensityKind.FACTORIAL_BLOCKS, DensityKind.DOUBLING_BLOCKS):
            for lo, hi in self.blocks():
                if lo - 1 > limit:
                    break
                points.update({lo - 1, hi - 1})
        else:
            for a in self.iter_members(limit):
                points.update({a - 1, a})
        return tuple(sorted(p for p in points if 1 <= p <= limit))

    def iter_members(self, limit: int) -> Iterator[int]:
        if self.kind is DensityKind.SQUARED_EXPONENTS:
            k = 1
            while 2 ** (k * k) <= limit:
                yield 2 ** (k * k)
                k += 1
        elif self.kind is DensityKind.CUSTOM:
            yield from (j for j in self.members if j <= limit)
        else:
            for lo, hi in self.blocks():
                if lo > limit:
                    break
                yield from range(lo, min(hi, limit + 1))

    @property
    def expected_densities(self) -> Optional[tuple]:
        """(lower, upper) density, None for custom lists."""
        return {DensityKind.FACTORIAL_BLOCKS: (Fraction(0), Fraction(1)),
                DensityKind.SQUARED_EXPONENTS: (Fraction(0), Fraction(0)),
                DensityKind.DOUBLING_BLOCKS: (Fraction(1, 3), Fraction(2, 3))}.get(self.kind)

    def consistent(self, limit: int) -> bool:
        """Membership and counting agree on every prefix up to limit."""
        hits = np.fromiter((j in self for j in range(1, limit + 1)), dtype=bool, count=limit)
        counts = np.cumsum(hits)
        return all(int(counts[m - 1]) == self.count(m) for m in range(1, limit + 1))

    @property
    def label(self) -> str:
        return self.kind.value
