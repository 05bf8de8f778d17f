"""Shared parameter and sector types."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class LatticeError(ValueError):
    """An exponent falls outside the sector lattice (caller bug)."""


class SectorMismatchError(ValueError):
    """Operands or operator live in different sectors / parameter families."""


@dataclass(frozen=True)
class SusyParams:
    """Index ``n`` of the coupled SUSY family with gamma = -1, delta = 2n - 1."""

    n: int
    gamma: int = field(init=False, default=-1)
    delta: int = field(init=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "delta", 2 * self.n - 1)

    @property
    def gap(self) -> int:
        """delta - gamma, the spacing of each ladder of the spectrum."""
        return self.delta - self.gamma


class Sector(enum.Enum):
    ONE = "one"
    TWO = "two"

    @classmethod
    def parse(cls, value) -> "Sector":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown sector {value!r}; expected 'one' or 'two'") from None

    @property
    def other(self) -> "Sector":
        return Sector.TWO if self is Sector.ONE else Sector.ONE

    def residues(self, n: int) -> frozenset[int]:
        """Admissible exponents mod 2n."""
        if self is Sector.ONE:
            return frozenset({0, 2 * n - 1})
        return frozenset({n - 1, n})

    def admits(self, k: int, n: int) -> bool:
        return k >= 0 and (k % (2 * n)) in self.residues(n)

    def exponent(self, n: int, l: int) -> int:
        """Exponent of the l-th basis element (l = 2k or 2k + 1)."""
        if l < 0:
            raise ValueError("level must be non-negative")
        k, odd = divmod(l, 2)
        if self is Sector.ONE:
            return 2 * n * k + (2 * n - 1 if odd else 0)
        return 2 * n * k + (n if odd else n - 1)

    def level(self, n: int, k: int) -> int:
        """Inverse of :meth:`exponent`."""
        if not self.admits(k, n):
            raise LatticeError(f"exponent {k} is not on the sector {self.value} lattice for n={n}")
        m, r = divmod(k, 2 * n)
        if self is Sector.ONE:
            return 2 * m + (1 if r == 2 * n - 1 else 0)
        # n = 1 has residues {0, 1} which coincide with level parity
        return 2 * m + (1 if r == n else 0)

    def levels_up_to(self, n: int, max_exponent: int) -> int:
        """Number of basis levels whose exponent is <= max_exponent."""
        count = 0
        while self.exponent(n, count) <= max_exponent:
            count += 1
        return count
